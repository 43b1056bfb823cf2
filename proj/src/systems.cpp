#include "melkit/systems.hpp"
#include "melkit/errors.hpp"

#include <cmath>

namespace melkit::systems {

using specfun::ellip_K;
using specfun::jacobi_sncndn;

ForcedPlanarSystem make_duffing(double a, double beta, double delta, double nu) {
    if (a != 1.0 && a != -1.0)
        throw DomainError("duffing: a must be exactly +1 or -1");
    if (!(nu > 0.0)) throw DomainError("duffing: nu must be positive");
    if (beta < 0.0 || delta < 0.0) throw DomainError("duffing: beta, delta must be >= 0");
    return {a > 0 ? PlanarCase::duffing_a_plus : PlanarCase::duffing_a_minus, a, nu, beta, delta};
}

ActionAngleSystem make_pendulum_torque(double beta) {
    ActionAngleSystem s;
    s.case_tag = AACase::pendulum_torque;
    s.ell = 1;
    s.m = 1;
    s.omega = [](const std::vector<double>& I) { return std::vector<double>{I[0]}; };
    s.h = [beta](const std::vector<double>&, const std::vector<double>& th) {
        return std::vector<double>{beta * std::sin(th[0]) + 1.0};
    };
    s.g = [](const std::vector<double>&, const std::vector<double>&) {
        return std::vector<double>{0.0};
    };
    s.action_box = {{0.25, 4.0}};
    return s;
}

std::map<std::pair<int, int>, double> full_coupling_table(double M, double rate, int truncation) {
    std::map<std::pair<int, int>, double> t;
    for (int k1 = 1; k1 + 1 <= truncation; ++k1)
        for (int k2 = 1; k1 + k2 <= truncation; ++k2)
            t[{k1, k2}] = M * std::exp(-(k1 + k2) * rate);
    return t;
}

ActionAngleSystem make_coupled_oscillators(const CoupledParams& p) {
    if (p.ell < 1) throw DomainError("coupled_oscillators: ell must be >= 1");
    if (static_cast<int>(p.Omega.size()) != p.ell)
        throw DomainError("coupled_oscillators: Omega must have ell entries");
    for (const auto& [k, a] : p.coeffs) {
        if (k.first < 1 || k.second < 1)
            throw DomainError("coupled_oscillators: coefficient indices must be >= 1");
        if (k.first + k.second > p.truncation)
            throw DomainError("coupled_oscillators: coefficient beyond truncation");
        const double bound = p.decay_M * std::exp(-(k.first + k.second) * p.decay_rate);
        if (std::abs(a) > bound * (1.0 + 1e-12))
            throw DomainError("coupled_oscillators: |a_k| violates the analyticity decay bound");
    }

    ActionAngleSystem s;
    s.case_tag = AACase::coupled_oscillators;
    s.ell = p.ell;
    s.m = p.ell;
    s.omega = [](const std::vector<double>& I) { return I; };
    const auto coeffs = p.coeffs;
    const double delta = p.delta;
    const auto Omega = p.Omega;
    const int ell = p.ell;
    s.h = [coeffs, delta, Omega, ell](const std::vector<double>& I,
                                      const std::vector<double>& th) {
        std::vector<double> out(ell);
        for (int j = 0; j < ell; ++j) {
            double v = -delta * I[j] + Omega[j];
            for (int i = 0; i < ell; ++i)
                for (const auto& [k, a] : coeffs)
                    v += a * std::sin(k.first * th[j] - k.second * th[i]);
            out[j] = v;
        }
        return out;
    };
    s.g = [ell](const std::vector<double>&, const std::vector<double>&) {
        return std::vector<double>(ell, 0.0);
    };
    s.action_box.assign(p.ell, {0.5, 2.5});
    return s;
}

bool family_is_periodic(FamilyKind kind) {
    return kind != FamilyKind::homoclinic_plus && kind != FamilyKind::homoclinic_minus;
}

namespace {

Vec2 homoclinic_orbit(double t, int sign) {
    const double se = 1.0 / std::cosh(t);
    const double ta = std::tanh(t);
    return {sign * std::sqrt(2.0) * se, -sign * std::sqrt(2.0) * se * ta};
}

} // namespace

Vec2 OrbitFamily::orbit(const EllipticModulus& k, double t) const {
    const double kp2 = k.mc();
    switch (kind) {
    case FamilyKind::duffing_interior_plus:
    case FamilyKind::duffing_interior_minus: {
        // x1 = +-sqrt(2)/s dn(t/s), x2 = -+sqrt(2) k^2/s^2 sn cn,  s^2 = 2-k^2 = 1+k'^2
        const double s2 = 1.0 + kp2;
        const double s = std::sqrt(s2);
        const auto j = jacobi_sncndn(t / s, k);
        const double sgn = kind == FamilyKind::duffing_interior_plus ? 1.0 : -1.0;
        return {sgn * std::sqrt(2.0) / s * j.dn, -sgn * std::sqrt(2.0) * k.m() / s2 * j.sn * j.cn};
    }
    case FamilyKind::duffing_exterior: {
        // x1 = sqrt(2) k/s cn(t/s), x2 = -sqrt(2) k/s^2 sn dn,  s^2 = 2k^2-1 = 1-2k'^2
        const double s2 = 1.0 - 2.0 * kp2;
        const double s = std::sqrt(s2);
        const auto j = jacobi_sncndn(t / s, k);
        return {std::sqrt(2.0) * k.k() / s * j.cn, -std::sqrt(2.0) * k.k() / s2 * j.sn * j.dn};
    }
    case FamilyKind::duffing_soft: {
        // x1 = sqrt(2) k/r cn(t/r), x2 = -sqrt(2) k/r^2 sn dn,  r^2 = 1-2k^2
        const double r2 = 1.0 - 2.0 * k.m();
        const double r = std::sqrt(r2);
        const auto j = jacobi_sncndn(t / r, k);
        return {std::sqrt(2.0) * k.k() / r * j.cn, -std::sqrt(2.0) * k.k() / r2 * j.sn * j.dn};
    }
    case FamilyKind::homoclinic_plus:
        return homoclinic_orbit(t, +1);
    case FamilyKind::homoclinic_minus:
        return homoclinic_orbit(t, -1);
    }
    throw DomainError("orbit: unknown family kind");
}

double OrbitFamily::period(const EllipticModulus& k) const {
    switch (kind) {
    case FamilyKind::duffing_interior_plus:
    case FamilyKind::duffing_interior_minus:
        return 2.0 * ellip_K(k) * std::sqrt(1.0 + k.mc());
    case FamilyKind::duffing_exterior:
        return 4.0 * ellip_K(k) * std::sqrt(1.0 - 2.0 * k.mc());
    case FamilyKind::duffing_soft:
        return 4.0 * ellip_K(k) * std::sqrt(1.0 - 2.0 * k.m());
    default:
        throw DomainError("period: homoclinic families are not periodic");
    }
}

OrbitFamily orbit_family(const ForcedPlanarSystem& sys, FamilyKind kind) {
    const bool hard = sys.case_tag == PlanarCase::duffing_a_plus;
    const bool compatible = hard ? kind != FamilyKind::duffing_soft
                                 : kind == FamilyKind::duffing_soft;
    if (!compatible)
        throw DomainError("orbit_family: family kind incompatible with system case");

    OrbitFamily f;
    f.kind = kind;
    switch (kind) {
    case FamilyKind::duffing_interior_plus:
    case FamilyKind::duffing_interior_minus:
        f.k_range = {0.0, 1.0};
        f.dperiod_dk_sign = +1;
        break;
    case FamilyKind::duffing_exterior:
        f.k_range = {1.0 / std::sqrt(2.0), 1.0};
        f.dperiod_dk_sign = +1;
        break;
    case FamilyKind::duffing_soft:
        f.k_range = {0.0, 1.0 / std::sqrt(2.0)};
        f.dperiod_dk_sign = -1;
        break;
    case FamilyKind::homoclinic_plus:
    case FamilyKind::homoclinic_minus:
        f.k_range = {1.0, 1.0};
        f.dperiod_dk_sign = 0;
        break;
    }
    return f;
}

double orbit_residual(const OrbitFamily& fam, const ForcedPlanarSystem& sys,
                      const EllipticModulus& k, int samples, Exec exec) {
    if (samples < 2) throw DomainError("orbit_residual: need at least 2 samples");
    const bool periodic = fam.periodic();
    const double t0 = periodic ? 0.0 : -10.0;
    const double t1 = periodic ? fam.period(k) : 10.0;
    const double fd_h = 1e-5;

    std::vector<double> res(samples);
    parallel_for(exec, samples, [&](std::ptrdiff_t i) {
        const double t = t0 + (t1 - t0) * static_cast<double>(i) / samples;
        const Vec2 xp = fam.orbit(k, t + fd_h);
        const Vec2 xm = fam.orbit(k, t - fd_h);
        const Vec2 x = fam.orbit(k, t);
        const Vec2 f = sys.unperturbed_field(x);
        const double r0 = (xp[0] - xm[0]) / (2.0 * fd_h) - f[0];
        const double r1 = (xp[1] - xm[1]) / (2.0 * fd_h) - f[1];
        res[i] = std::sqrt(r0 * r0 + r1 * r1);
    });
    double worst = 0.0;
    for (double r : res) worst = std::max(worst, r);
    return worst;
}

ActionAngleSystem make_duffing_action_angle(const ForcedPlanarSystem& sys, FamilyKind kind) {
    const OrbitFamily fam = orbit_family(sys, kind);
    if (!fam.periodic())
        throw DomainError("make_duffing_action_angle: needs a periodic family");
    ActionAngleSystem s;
    s.case_tag = AACase::generic;
    s.ell = 1;
    s.m = 2;
    const double nu = sys.nu;
    s.omega = [fam, nu](const std::vector<double>& I) {
        const auto k = specfun::EllipticModulus::from_k(I[0]);
        return std::vector<double>{2.0 * M_PI / fam.period(k), nu};
    };
    s.h = [](const std::vector<double>&, const std::vector<double>&) {
        return std::vector<double>{0.0};
    };
    s.g = [](const std::vector<double>&, const std::vector<double>&) {
        return std::vector<double>{0.0, 0.0};
    };
    const double margin = 1e-3;
    s.action_box = {{fam.k_range.first + margin, fam.k_range.second - margin}};
    return s;
}

} // namespace melkit::systems
