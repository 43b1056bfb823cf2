#include "melkit/melnikov.hpp"
#include "melkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

namespace melkit::melnikov {

using specfun::ellip_E;
using specfun::ellip_K;
using systems::FamilyKind;
using systems::Vec2;

namespace {

constexpr int kDefaultNodes = 2048;
constexpr int kMaxNodes = 1 << 20;
constexpr double kRefineTol = 1e-10;

double sech(double x) {
    if (std::abs(x) > 709.0) return 0.0; // cosh would overflow; true value < 1e-300
    return 1.0 / std::cosh(x);
}

void check_resonance_pair(Resonance res) {
    if (res.l < 1 || res.n < 1) throw DomainError("resonance: l, n must be positive");
    if (std::gcd(res.l, res.n) != 1) throw DomainError("resonance: l and n must be coprime");
}

/// One quadrature pass over the phi grid with N nodes; each phi value is an
/// independent fixed-order sum, so serial and OpenMP execution agree bitwise.
/// Orbit states and gradients are phi-independent and hoisted out.
std::vector<double> subharm_pass(const ForcedPlanarSystem& sys, const OrbitFamily& fam,
                                 const EllipticModulus& k, double span,
                                 std::span<const double> phi, int N, Exec exec,
                                 double orbit_shift) {
    std::vector<Vec2> x(N), dh(N);
    std::vector<double> t(N);
    const double w = span / N;
    parallel_for(exec, N, [&](std::ptrdiff_t j) {
        t[j] = span * static_cast<double>(j) / N;
        x[j] = fam.orbit(k, t[j] + orbit_shift);
        dh[j] = sys.grad_h(x[j]);
    });
    std::vector<double> out(phi.size());
    parallel_for(exec, static_cast<std::ptrdiff_t>(phi.size()), [&](std::ptrdiff_t i) {
        double acc = 0.0;
        for (int j = 0; j < N; ++j) {
            const Vec2 u = sys.perturbation(x[j], sys.nu * t[j] + phi[i]);
            acc += dh[j][0] * u[0] + dh[j][1] * u[1];
        }
        out[i] = acc * w;
    });
    return out;
}

double sup_abs_diff(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
    return s;
}

} // namespace

std::vector<double> uniform_phi_grid(int size) {
    if (size < 16) throw DomainError("phi grid must have at least 16 points");
    std::vector<double> phi(size);
    for (int i = 0; i < size; ++i) phi[i] = 2.0 * M_PI * i / size;
    return phi;
}

MelnikovCurve subharmonic_melnikov(const ForcedPlanarSystem& sys, const OrbitFamily& fam,
                                   const EllipticModulus& k, Resonance res, int phi_grid_size,
                                   Exec exec, double orbit_shift) {
    check_resonance_pair(res);
    if (!fam.periodic())
        throw DomainError("subharmonic_melnikov: needs a periodic orbit family");
    const double T = fam.period(k);
    const double span = res.l * T;
    const double target = 2.0 * M_PI * res.n / sys.nu;
    if (std::abs(span - target) > 1e-10 * target)
        throw DomainError("subharmonic_melnikov: modulus does not satisfy the resonance "
                          "l T(k) = 2 pi n / nu (rel. mismatch " +
                          std::to_string(std::abs(span - target) / target) + ")");

    MelnikovCurve curve;
    curve.phi = uniform_phi_grid(phi_grid_size);
    curve.kind = CurveKind::subharmonic;
    curve.res = res;
    curve.k = k.k();
    curve.kprime = k.kprime();
    curve.nu = sys.nu;
    curve.beta = sys.beta;
    curve.delta = sys.delta;
    curve.sign = fam.kind == FamilyKind::duffing_interior_minus ? -1 : +1;
    curve.method = Method::quadrature;

    int N = kDefaultNodes;
    std::vector<double> vals = subharm_pass(sys, fam, k, span, curve.phi, N, exec, orbit_shift);
    while (N < kMaxNodes) {
        std::vector<double> next =
            subharm_pass(sys, fam, k, span, curve.phi, 2 * N, exec, orbit_shift);
        const double d = sup_abs_diff(vals, next);
        vals = std::move(next);
        N *= 2;
        if (d < kRefineTol) break;
    }
    curve.values = std::move(vals);
    curve.quadrature_nodes = N;
    return curve;
}

MelnikovCurve homoclinic_melnikov(const ForcedPlanarSystem& sys, int sign, int phi_grid_size,
                                  double tail_tol, Exec exec) {
    if (sys.case_tag != systems::PlanarCase::duffing_a_plus)
        throw DomainError("homoclinic_melnikov: only the a = +1 case has homoclinic orbits");
    if (!(tail_tol > 0.0)) throw DomainError("homoclinic_melnikov: tail_tol must be positive");
    if (sign != 1 && sign != -1) throw DomainError("homoclinic_melnikov: sign must be +-1");

    // |x2| <= 2 sqrt2 e^{-|t|}; two-sided tails:
    //   forcing:  4 sqrt2 beta e^{-T}, damping: 8 delta e^{-2T}.
    double Tstar = 1.0;
    if (sys.beta > 0.0)
        Tstar = std::max(Tstar, std::log(8.0 * std::sqrt(2.0) * sys.beta / tail_tol));
    if (sys.delta > 0.0) Tstar = std::max(Tstar, 0.5 * std::log(16.0 * sys.delta / tail_tol));
    if (Tstar > 60.0)
        throw ComputationError("homoclinic_melnikov: tail bound not achievable with T* <= 60");

    const OrbitFamily fam = orbit_family(
        sys, sign > 0 ? FamilyKind::homoclinic_plus : FamilyKind::homoclinic_minus);
    const EllipticModulus dummy = EllipticModulus::from_k(0.0); // unused by homoclinic orbits

    MelnikovCurve curve;
    curve.phi = uniform_phi_grid(phi_grid_size);
    curve.kind = CurveKind::homoclinic;
    curve.nu = sys.nu;
    curve.beta = sys.beta;
    curve.delta = sys.delta;
    curve.sign = sign;
    curve.method = Method::quadrature;

    auto pass = [&](int N) {
        std::vector<Vec2> x(N + 1), dh(N + 1);
        std::vector<double> t(N + 1);
        const double h = 2.0 * Tstar / N;
        parallel_for(exec, N + 1, [&](std::ptrdiff_t j) {
            t[j] = -Tstar + h * static_cast<double>(j);
            x[j] = fam.orbit(dummy, t[j]);
            dh[j] = sys.grad_h(x[j]);
        });
        std::vector<double> out(curve.phi.size());
        parallel_for(exec, static_cast<std::ptrdiff_t>(curve.phi.size()), [&](std::ptrdiff_t i) {
            double acc = 0.0;
            for (int j = 0; j <= N; ++j) {
                const Vec2 u = sys.perturbation(x[j], sys.nu * t[j] + curve.phi[i]);
                const double w = (j == 0 || j == N) ? 0.5 : 1.0;
                acc += w * (dh[j][0] * u[0] + dh[j][1] * u[1]);
            }
            out[i] = acc * h;
        });
        return out;
    };

    int N = 4096;
    std::vector<double> vals = pass(N);
    while (N < kMaxNodes) {
        std::vector<double> next = pass(2 * N);
        const double d = sup_abs_diff(vals, next);
        vals = std::move(next);
        N *= 2;
        if (d < kRefineTol) break;
    }
    curve.values = std::move(vals);
    curve.quadrature_nodes = N;
    return curve;
}

double duffing_J1(DuffingCase c, const EllipticModulus& k, int l) {
    const double K = ellip_K(k);
    const double E = ellip_E(k);
    const double kp2 = k.mc();
    switch (c) {
    case DuffingCase::interior: {
        const double s2 = 1.0 + kp2; // 2 - k^2
        return 4.0 * l * (s2 * E - 2.0 * kp2 * K) / (3.0 * s2 * std::sqrt(s2));
    }
    case DuffingCase::exterior: {
        const double s2 = 1.0 - 2.0 * kp2; // 2k^2 - 1
        return 8.0 * l * (s2 * E + kp2 * K) / (3.0 * s2 * std::sqrt(s2));
    }
    case DuffingCase::soft: {
        const double r2 = 1.0 - 2.0 * k.m();
        return 8.0 * l * ((2.0 * k.m() - 1.0) * E + kp2 * K) / (3.0 * r2 * std::sqrt(r2));
    }
    case DuffingCase::homoclinic:
        return 4.0 / 3.0;
    }
    throw DomainError("duffing_J1: unknown case");
}

double duffing_J2(DuffingCase c, const EllipticModulus& k, const Resonance& res, double nu) {
    check_resonance_pair(res);
    if (res.l != 1) return 0.0;
    const double K = ellip_K(k);
    const double Kp = ellip_K(EllipticModulus::from_k(k.kprime()));
    switch (c) {
    case DuffingCase::interior:
        return std::sqrt(2.0) * M_PI * nu * sech(res.n * M_PI * Kp / K);
    case DuffingCase::exterior:
        if (res.n % 2 == 0) return 0.0;
        return 2.0 * std::sqrt(2.0) * M_PI * nu * sech(res.n * M_PI * Kp / (2.0 * K));
    case DuffingCase::soft: {
        if (res.n % 2 == 0) return 0.0;
        const double r = std::sqrt(1.0 - 2.0 * k.m());
        return std::sqrt(2.0) * M_PI * M_PI * res.n / (K * r) * sech(M_PI * res.n * Kp / (2.0 * K));
    }
    case DuffingCase::homoclinic:
        return std::sqrt(2.0) * M_PI * nu * sech(M_PI * nu / 2.0);
    }
    throw DomainError("duffing_J2: unknown case");
}

double closed_form_duffing(DuffingCase c, int sign, const std::optional<EllipticModulus>& k,
                           const std::optional<Resonance>& res, double delta, double beta,
                           double nu, double phi) {
    if (sign != 1 && sign != -1) throw DomainError("closed_form_duffing: sign must be +-1");
    if (c == DuffingCase::homoclinic) {
        return -4.0 / 3.0 * delta +
               sign * std::sqrt(2.0) * M_PI * nu * beta * sech(M_PI * nu / 2.0) * std::sin(phi);
    }
    if (!k || !res)
        throw DomainError("closed_form_duffing: subharmonic cases need k and the resonance pair");
    const double J1 = duffing_J1(c, *k, res->l);
    const double J2 = duffing_J2(c, *k, *res, nu);
    const double branch = c == DuffingCase::interior ? sign : +1; // single family otherwise
    return -delta * J1 + branch * beta * J2 * std::sin(phi);
}

namespace {

double family_period_of_log_kprime(FamilyKind kind, double y) {
    return OrbitFamily{kind, {0, 1}, 0}.period(EllipticModulus::from_log_kprime(y));
}

/// Bisection bracket in y = log k' for each family, intersected with the
/// admissible modulus range.
std::pair<double, double> family_log_kprime_bracket(FamilyKind kind) {
    switch (kind) {
    case FamilyKind::duffing_interior_plus:
    case FamilyKind::duffing_interior_minus:
        // k in (~0, 1): k' from 1 down to ~1e-300
        return {-690.0, -5e-19}; // upper end corresponds to k ~ 1e-9
    case FamilyKind::duffing_exterior:
        // k in (1/sqrt2, 1): k' in (~0, 1/sqrt2)
        return {-690.0, 0.5 * std::log(0.5) - 1e-12};
    case FamilyKind::duffing_soft:
        // k in (~0, 1/sqrt2): k' in (1/sqrt2, 1)
        return {0.5 * std::log(0.5) + 1e-12, -5e-19};
    default:
        throw DomainError("solve_resonance: homoclinic family has no resonances");
    }
}

void assert_period_monotone(FamilyKind kind) {
    static std::mutex mu;
    static std::map<FamilyKind, bool> checked;
    std::lock_guard<std::mutex> lock(mu);
    if (checked[kind]) return;
    const auto [ylo, yhi] = family_log_kprime_bracket(kind);
    const double yfar = std::max(ylo, -50.0);
    double prev = family_period_of_log_kprime(kind, yhi);
    const int dir = family_period_of_log_kprime(kind, yfar) > prev ? +1 : -1;
    for (int i = 1; i <= 32; ++i) {
        const double y = yhi + (yfar - yhi) * i / 32.0;
        const double T = family_period_of_log_kprime(kind, y);
        if (!(dir * (T - prev) > 0.0))
            throw ComputationError("solve_resonance: period not monotone on the check grid");
        prev = T;
    }
    checked[kind] = true;
}

} // namespace

double resonance_nu(FamilyKind kind, const EllipticModulus& k, Resonance res) {
    check_resonance_pair(res);
    const OrbitFamily fam{kind, {0, 1}, 0};
    return 2.0 * M_PI * res.n / (res.l * fam.period(k));
}

EllipticModulus solve_resonance(FamilyKind kind, double nu, Resonance res) {
    check_resonance_pair(res);
    if (!(nu > 0.0)) throw DomainError("solve_resonance: nu must be positive");
    if (!family_is_periodic(kind))
        throw DomainError("solve_resonance: homoclinic family has no resonances");
    assert_period_monotone(kind);

    const double target = 2.0 * M_PI * res.n / (res.l * nu);
    auto [ylo, yhi] = family_log_kprime_bracket(kind);
    const double Tlo = family_period_of_log_kprime(kind, ylo);
    const double Thi = family_period_of_log_kprime(kind, yhi);
    if (target > std::max(Tlo, Thi) || target < std::min(Tlo, Thi))
        throw NoResonanceError("solve_resonance: no modulus gives period " +
                               std::to_string(target) + " in this family (attainable [" +
                               std::to_string(std::min(Tlo, Thi)) + ", " +
                               std::to_string(std::max(Tlo, Thi)) + "])");

    const double glo = Tlo - target; // g changes sign across the bracket
    for (int it = 0; it < 200; ++it) {
        const double ymid = 0.5 * (ylo + yhi);
        const double g = family_period_of_log_kprime(kind, ymid) - target;
        if (g * glo >= 0.0)
            ylo = ymid;
        else
            yhi = ymid;
    }
    const EllipticModulus k = EllipticModulus::from_log_kprime(0.5 * (ylo + yhi));
    const OrbitFamily fam{kind, {0, 1}, 0};
    const double rel = std::abs(res.l * fam.period(k) - 2.0 * M_PI * res.n / nu) /
                       (2.0 * M_PI * res.n / nu);
    if (rel > 1e-10)
        throw ComputationError("solve_resonance: bisection failed to meet tolerance");
    return k;
}

std::vector<double> melnikov_limit_check(const ForcedPlanarSystem& sys, double nu,
                                         std::span<const int> n_list, int phi_grid_size,
                                         Exec exec) {
    if (sys.case_tag != systems::PlanarCase::duffing_a_plus)
        throw DomainError("melnikov_limit_check: needs the a = +1 case");
    ForcedPlanarSystem s = sys;
    s.nu = nu;
    const OrbitFamily fam = orbit_family(s, FamilyKind::duffing_interior_plus);
    const MelnikovCurve hom = homoclinic_melnikov(s, +1, phi_grid_size, 1e-12, exec);

    std::vector<double> sup(n_list.size());
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        const Resonance res{1, n_list[i]};
        const EllipticModulus k = solve_resonance(fam.kind, nu, res);
        const MelnikovCurve sub = subharmonic_melnikov(s, fam, k, res, phi_grid_size, exec);
        sup[i] = sup_abs_diff(sub.values, hom.values);
    }
    return sup;
}

namespace {

/// Periodic cubic (Catmull-Rom) interpolation of grid values.
double interp_periodic(std::span<const double> v, double x01) {
    const int n = static_cast<int>(v.size());
    const double s = x01 * n;
    const int i1 = static_cast<int>(std::floor(s)) % n;
    const double u = s - std::floor(s);
    const int i0 = (i1 + n - 1) % n, i2 = (i1 + 1) % n, i3 = (i1 + 2) % n;
    const double m1 = 0.5 * (v[i2] - v[i0]);
    const double m2 = 0.5 * (v[i3] - v[i1]);
    const double d = v[i2] - v[i1];
    const double u2 = u * u, u3 = u2 * u;
    return v[i1] + m1 * u + (3 * d - 2 * m1 - m2) * u2 + (m1 + m2 - 2 * d) * u3;
}

} // namespace

std::vector<ZeroInfo> simple_zero_scan(const MelnikovCurve& curve) {
    const auto& v = curve.values;
    const int n = static_cast<int>(v.size());
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    std::vector<ZeroInfo> zeros;
    if (scale == 0.0) return zeros; // identically zero curve: no isolated zeros

    const double node_zero_tol = 1e-9 * scale;
    const double slope_tol = 1e-6 * scale;
    const double fd_h = 1.0 / (8.0 * n);
    auto slope_at = [&](double x01) {
        return (interp_periodic(v, x01 + fd_h) - interp_periodic(v, x01 - fd_h)) /
               (2.0 * fd_h * 2.0 * M_PI);
    };

    for (int i = 0; i < n; ++i) {
        const double vi = v[i], vj = v[(i + 1) % n];
        if (std::abs(vi) <= node_zero_tol) {
            ZeroInfo z;
            z.phi = curve.phi[i];
            z.slope = slope_at(static_cast<double>(i) / n);
            const double before = v[(i + n - 1) % n], after = vj;
            z.is_simple = before * after < 0.0 && std::abs(z.slope) > slope_tol;
            zeros.push_back(z);
            continue;
        }
        if (std::abs(vj) <= node_zero_tol) continue; // handled as next node
        if (vi * vj < 0.0) {
            double lo = static_cast<double>(i) / n, hi = static_cast<double>(i + 1) / n;
            double flo = vi;
            while ((hi - lo) * 2.0 * M_PI > 1e-10) {
                const double mid = 0.5 * (lo + hi);
                const double fm = interp_periodic(v, mid);
                if (flo * fm <= 0.0)
                    hi = mid;
                else {
                    lo = mid;
                    flo = fm;
                }
            }
            ZeroInfo z;
            const double root = 0.5 * (lo + hi);
            z.phi = root * 2.0 * M_PI;
            z.slope = slope_at(root);
            z.is_simple = std::abs(z.slope) > slope_tol;
            zeros.push_back(z);
        }
    }
    return zeros;
}

double chaos_threshold(double nu) {
    if (!(nu > 0.0)) throw DomainError("chaos_threshold: nu must be positive");
    return 0.75 * std::sqrt(2.0) * M_PI * nu * sech(M_PI * nu / 2.0);
}

} // namespace melkit::melnikov
