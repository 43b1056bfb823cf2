#include "melkit/specfun.hpp"
#include "melkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace melkit::specfun {

namespace {
constexpr int kAgmMaxIter = 64;
constexpr double kAgmRelTol = 1e-15;
} // namespace

EllipticModulus EllipticModulus::from_k(double k) {
    if (!(k >= 0.0 && k <= 1.0))
        throw DomainError("elliptic modulus k must lie in [0,1], got " + std::to_string(k));
    const double mc = (1.0 - k) * (1.0 + k);
    return EllipticModulus(k, std::sqrt(std::max(mc, 0.0)), k * k);
}

EllipticModulus EllipticModulus::from_kprime(double kp) {
    if (!(kp > 0.0 && kp <= 1.0))
        throw DomainError("complementary modulus k' must lie in (0,1], got " + std::to_string(kp));
    const double m = (1.0 - kp) * (1.0 + kp);
    return EllipticModulus(std::sqrt(std::max(m, 0.0)), kp, std::max(m, 0.0));
}

EllipticModulus EllipticModulus::from_log_kprime(double y) {
    if (!(y <= 0.0) || !std::isfinite(y))
        throw DomainError("log k' must be finite and <= 0");
    const double kp = std::exp(y);
    // m = 1 - k'^2 = -expm1(2y), accurate for k' near 1 (y near 0).
    const double m = std::min(-std::expm1(2.0 * y), 1.0);
    return EllipticModulus(std::sqrt(m), kp, m);
}

double ellip_K(const EllipticModulus& k) {
    if (!(k.kprime() > 0.0))
        throw DomainError("K(k) diverges as k -> 1; need k' > 0");
    double a = 1.0, b = k.kprime();
    for (int i = 0; i < kAgmMaxIter && std::abs(a - b) > kAgmRelTol * std::abs(a); ++i) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return M_PI / (2.0 * a);
}

double ellip_E(const EllipticModulus& k) {
    if (k.kprime() == 0.0) return 1.0;
    double a = 1.0, b = k.kprime(), c = k.k();
    double sum = 0.5 * c * c;
    double pow2 = 0.5; // 2^{n-1}
    for (int i = 0; i < kAgmMaxIter && std::abs(a - b) > kAgmRelTol * std::abs(a); ++i) {
        c = 0.5 * (a - b);
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
        pow2 *= 2.0;
        sum += pow2 * c * c;
    }
    return M_PI / (2.0 * a) * (1.0 - sum);
}

JacobiTriple jacobi_sncndn(double t, const EllipticModulus& k) {
    if (!std::isfinite(t))
        throw DomainError("jacobi_sncndn: argument must be finite");
    if (!(k.kprime() > 0.0))
        throw DomainError("jacobi_sncndn: need k' > 0");

    if (k.k() == 0.0) return {std::sin(t), std::cos(t), 1.0};

    // Descending Landen / AGM scale sequence (shared with K).
    double a[kAgmMaxIter + 1], c[kAgmMaxIter + 1];
    a[0] = 1.0;
    c[0] = k.k();
    double b = k.kprime();
    int n = 0;
    while (n < kAgmMaxIter && std::abs(c[n]) > kAgmRelTol * a[n]) {
        const double an = 0.5 * (a[n] + b);
        const double cn1 = 0.5 * (a[n] - b);
        b = std::sqrt(a[n] * b);
        ++n;
        a[n] = an;
        c[n] = cn1;
    }
    const double K = M_PI / (2.0 * a[n]);

    // Reduce modulo the full period; sn, cn have period 4K and dn has 2K.
    const double u = std::fmod(t, 4.0 * K);

    if (n == 0) return {std::sin(u), std::cos(u), 1.0}; // k below AGM resolution

    double phi = std::ldexp(a[n] * u, n);
    for (int i = n; i >= 1; --i) {
        const double s = std::clamp(c[i] / a[i] * std::sin(phi), -1.0, 1.0);
        phi = 0.5 * (phi + std::asin(s));
    }
    const double sn = std::sin(phi);
    const double cn = std::cos(phi);
    // dn in the cancellation-free form k'^2 + k^2 cn^2; exact at the quarter
    // period and stable down to dn = k'.
    const double dn = std::sqrt(k.mc() + k.m() * cn * cn);
    return {sn, cn, dn};
}

} // namespace melkit::specfun
