#ifndef MELKIT_SPECFUN_HPP
#define MELKIT_SPECFUN_HPP

#include <array>

namespace melkit::specfun {

/// Elliptic modulus k together with the complementary modulus k' = sqrt(1-k^2).
///
/// Both values are stored explicitly: near k = 1 the modulus itself rounds to
/// 1.0 in double precision while k' remains an exact small number, and all
/// formulas in this library that degrade near the separatrix are written in
/// terms of k' (e.g. 2 - k^2 = 1 + k'^2).  Construct from whichever side is
/// known accurately.
class EllipticModulus {
public:
    /// k in [0, 1]; k = 1 is admitted only so that E(1) = 1 is reachable.
    static EllipticModulus from_k(double k);
    /// k' in (0, 1]; arbitrarily small positive values are valid and keep
    /// full precision where k itself would round to 1.
    static EllipticModulus from_kprime(double kprime);
    /// k' = exp(y) for y <= 0; used by resonance solvers that bisect in log k'.
    static EllipticModulus from_log_kprime(double y);

    double k() const { return k_; }
    double kprime() const { return kp_; }
    /// k^2 computed as (1-k')(1+k') when that is the accurate route.
    double m() const { return m_; }
    /// k'^2, exact complement of m().
    double mc() const { return kp_ * kp_; }

private:
    EllipticModulus(double k, double kp, double m) : k_(k), kp_(kp), m_(m) {}
    double k_, kp_, m_;
};

/// Complete elliptic integral of the first kind K(k), by the arithmetic-
/// geometric mean.  K(0) = pi/2 exactly; diverges as k -> 1, so k' must be
/// positive.  Strictly increasing in k.
double ellip_K(const EllipticModulus& k);

/// Complete elliptic integral of the second kind E(k), by the AGM with the
/// c_n sum.  E(0) = pi/2 exactly, E(1) = 1 exactly; strictly decreasing.
double ellip_E(const EllipticModulus& k);

struct JacobiTriple {
    double sn, cn, dn;
};

/// Jacobi elliptic functions sn(t,k), cn(t,k), dn(t,k) by the descending
/// Landen (AGM) recursion, with the argument reduced modulo the full period
/// 4K(k) first.  Requires finite t and k' > 0.
JacobiTriple jacobi_sncndn(double t, const EllipticModulus& k);

} // namespace melkit::specfun

#endif
