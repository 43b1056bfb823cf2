#include "melkit/ode.hpp"
#include "melkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace melkit::ode {

namespace {

// Dormand-Prince 5(4) tableau (FSAL).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// y5 - y4 error weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

} // namespace

State Trajectory::sample(double t) const {
    if (times.empty()) throw ComputationError("sample: empty trajectory");
    if (t <= times.front()) return states.front();
    if (t >= times.back()) return states.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - times.begin());
    const std::size_t lo = hi - 1;
    const double h = times[hi] - times[lo];
    const double s = (t - times[lo]) / h;
    const double s2 = s * s, s3 = s2 * s;
    // cubic Hermite basis
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    State out(states[lo].size());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = h00 * states[lo][j] + h10 * h * derivs[lo][j] + h01 * states[hi][j] +
                 h11 * h * derivs[hi][j];
    return out;
}

Trajectory integrate(const VectorField& field, const State& x0, double t0, double t1,
                     double tol) {
    if (!(tol > 0.0)) throw DomainError("integrate: tol must be positive");
    if (!(t1 > t0)) throw DomainError("integrate: need t1 > t0");
    const int n = field.dimension;
    if (static_cast<int>(x0.size()) != n)
        throw DomainError("integrate: state dimension mismatch");

    Trajectory traj;
    traj.tolerance_used = tol;

    State y = x0, ynew(n), f0(n), f1(n);
    State k2(n), k3(n), k4(n), k5(n), k6(n), ytmp(n), err(n);
    double t = t0;
    field.eval(t, y.data(), f0.data());
    traj.times.push_back(t);
    traj.states.push_back(y);
    traj.derivs.push_back(f0);

    double h = std::min((t1 - t0) / 16.0, 0.1);
    double err_prev = 1.0;
    const double hmin = 16.0 * std::numeric_limits<double>::epsilon() *
                        std::max({std::abs(t0), std::abs(t1), 1.0});

    while (t < t1) {
        h = std::min(h, t1 - t);
        if (h < hmin) {
            traj.complete = false;
            return traj;
        }

        for (int j = 0; j < n; ++j) ytmp[j] = y[j] + h * a21 * f0[j];
        field.eval(t + c2 * h, ytmp.data(), k2.data());
        for (int j = 0; j < n; ++j) ytmp[j] = y[j] + h * (a31 * f0[j] + a32 * k2[j]);
        field.eval(t + c3 * h, ytmp.data(), k3.data());
        for (int j = 0; j < n; ++j)
            ytmp[j] = y[j] + h * (a41 * f0[j] + a42 * k2[j] + a43 * k3[j]);
        field.eval(t + c4 * h, ytmp.data(), k4.data());
        for (int j = 0; j < n; ++j)
            ytmp[j] = y[j] + h * (a51 * f0[j] + a52 * k2[j] + a53 * k3[j] + a54 * k4[j]);
        field.eval(t + c5 * h, ytmp.data(), k5.data());
        for (int j = 0; j < n; ++j)
            ytmp[j] =
                y[j] + h * (a61 * f0[j] + a62 * k2[j] + a63 * k3[j] + a64 * k4[j] + a65 * k5[j]);
        field.eval(t + h, ytmp.data(), k6.data());
        for (int j = 0; j < n; ++j)
            ynew[j] = y[j] + h * (b1 * f0[j] + b3 * k3[j] + b4 * k4[j] + b5 * k5[j] + b6 * k6[j]);
        field.eval(t + h, ynew.data(), f1.data()); // FSAL stage

        double errnorm = 0.0;
        for (int j = 0; j < n; ++j) {
            const double sc = tol + tol * std::max(std::abs(y[j]), std::abs(ynew[j]));
            const double e = h * (e1 * f0[j] + e3 * k3[j] + e4 * k4[j] + e5 * k5[j] +
                                  e6 * k6[j] + e7 * f1[j]);
            errnorm += (e / sc) * (e / sc);
        }
        errnorm = std::sqrt(errnorm / n);

        if (errnorm <= 1.0) {
            t += h;
            y = ynew;
            f0 = f1;
            traj.times.push_back(t);
            traj.states.push_back(y);
            traj.derivs.push_back(f0);
            // PI controller (order 5): alpha = 0.7/5, beta = 0.4/5
            const double fac = 0.9 * std::pow(std::max(errnorm, 1e-16), -0.14) *
                               std::pow(err_prev, 0.08);
            h *= std::clamp(fac, 0.2, 5.0);
            err_prev = std::max(errnorm, 1e-16);
        } else {
            h *= std::clamp(0.9 * std::pow(errnorm, -0.2), 0.1, 1.0);
        }
    }
    return traj;
}

systems::Vec2 stroboscopic_map(const systems::ForcedPlanarSystem& sys, double eps,
                               systems::Vec2 x0, double phi0, double tol) {
    return stroboscopic_map_n(sys, eps, x0, phi0, 1, tol);
}

systems::Vec2 stroboscopic_map_n(const systems::ForcedPlanarSystem& sys, double eps,
                                 systems::Vec2 x0, double phi0, int periods, double tol) {
    if (!(sys.nu > 0.0)) throw DomainError("stroboscopic_map: nu must be positive");
    if (periods < 1) throw DomainError("stroboscopic_map: periods must be >= 1");
    VectorField f;
    f.dimension = 2;
    f.is_autonomous = false;
    f.eval = [&sys, eps, phi0](double t, const double* x, double* dxdt) {
        const systems::Vec2 v = sys.field(t, {x[0], x[1]}, eps, phi0);
        dxdt[0] = v[0];
        dxdt[1] = v[1];
    };
    const double T = 2.0 * M_PI / sys.nu * periods;
    Trajectory traj = integrate(f, {x0[0], x0[1]}, 0.0, T, tol);
    if (!traj.complete) throw ComputationError("stroboscopic_map: integration failed");
    return {traj.terminal()[0], traj.terminal()[1]};
}

ShootResult newton_shoot_periodic(const systems::ForcedPlanarSystem& sys, double eps,
                                  systems::Vec2 guess, double phi0, int periods, double tol,
                                  double ode_tol) {
    if (!(tol > 0.0)) throw DomainError("newton_shoot_periodic: tol must be positive");
    if (!std::isfinite(guess[0]) || !std::isfinite(guess[1]))
        throw DomainError("newton_shoot_periodic: guess must be finite");

    constexpr int max_iter = 25;
    ShootResult out;
    systems::Vec2 y = guess;

    for (int it = 0; it < max_iter; ++it) {
        systems::Vec2 Py;
        try {
            Py = stroboscopic_map_n(sys, eps, y, phi0, periods, ode_tol);
        } catch (const ComputationError&) {
            out.point = y;
            out.iterations = it;
            out.residual = std::numeric_limits<double>::infinity();
            return out; // diverged out of the integrable region
        }
        const Eigen::Vector2d F(Py[0] - y[0], Py[1] - y[1]);
        out.point = y;
        out.residual = F.norm();
        out.iterations = it;
        if (out.residual < tol) {
            out.converged = true;
            // Still report a degenerate Jacobian (whole-family fixed points at eps=0).
            break;
        }
        if (!std::isfinite(out.residual) || out.residual > 1e6) return out;

        const double fd_h = 1e-6 * (1.0 + std::hypot(y[0], y[1]));
        Eigen::Matrix2d J;
        for (int j = 0; j < 2; ++j) {
            systems::Vec2 yp = y;
            yp[j] += fd_h;
            const systems::Vec2 Pp = stroboscopic_map_n(sys, eps, yp, phi0, periods, ode_tol);
            J(0, j) = (Pp[0] - yp[0] - F(0)) / fd_h;
            J(1, j) = (Pp[1] - yp[1] - F(1)) / fd_h;
        }
        const Eigen::JacobiSVD<Eigen::Matrix2d> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const double smax = svd.singularValues()(0), smin = svd.singularValues()(1);
        if (smin <= 0.0 || smax / smin > 1e12) {
            out.degenerate_jacobian = true;
            return out; // cannot take a Newton step
        }
        const Eigen::Vector2d dy = svd.solve(F);
        y[0] -= dy(0);
        y[1] -= dy(1);
    }

    if (out.converged) {
        // Diagnose degeneracy at the solution for the caller.
        const double fd_h = 1e-6 * (1.0 + std::hypot(y[0], y[1]));
        Eigen::Matrix2d J;
        const systems::Vec2 Py0 = stroboscopic_map_n(sys, eps, out.point, phi0, periods, ode_tol);
        for (int j = 0; j < 2; ++j) {
            systems::Vec2 yp = out.point;
            yp[j] += fd_h;
            const systems::Vec2 Pp = stroboscopic_map_n(sys, eps, yp, phi0, periods, ode_tol);
            J(0, j) = (Pp[0] - yp[0] - (Py0[0] - out.point[0])) / fd_h;
            J(1, j) = (Pp[1] - yp[1] - (Py0[1] - out.point[1])) / fd_h;
        }
        const Eigen::JacobiSVD<Eigen::Matrix2d> svd(J);
        const double smax = svd.singularValues()(0), smin = svd.singularValues()(1);
        // At eps = 0 the fixed point sits in a whole periodic family and P - id
        // is rank-deficient, but finite-difference noise keeps the measured
        // condition number near 5e10; genuine eps > 0 fixed points sit near
        // 5e4 here, so 1e8 separates the two regimes by three decades each way.
        out.degenerate_jacobian = smin <= 0.0 || smax / smin > 1e8;
    }
    return out;
}

} // namespace melkit::ode
