#ifndef MELKIT_MELNIKOV_HPP
#define MELKIT_MELNIKOV_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "melkit/parallel.hpp"
#include "melkit/specfun.hpp"
#include "melkit/systems.hpp"

namespace melkit::melnikov {

using specfun::EllipticModulus;
using systems::ForcedPlanarSystem;
using systems::OrbitFamily;

/// Resonant orbit label: the unperturbed orbit closes after l of its own
/// periods, which equal n forcing periods (l T(k) = 2 pi n / nu).  l and n
/// must be coprime.  The forcing term of the Melnikov function survives only
/// for l = 1 (and additionally odd n for the cn-based families).
struct Resonance {
    int l = 1;
    int n = 1;
};

enum class CurveKind { subharmonic, homoclinic };
enum class Method { quadrature, closed_form };

struct MelnikovCurve {
    std::vector<double> phi;    // uniform grid on [0, 2 pi)
    std::vector<double> values; // same length, >= 16
    CurveKind kind = CurveKind::subharmonic;
    std::optional<Resonance> res;
    std::optional<double> k;       // elliptic modulus (subharmonic only)
    std::optional<double> kprime;  // stored separately; exact near k = 1
    double nu = 0, beta = 0, delta = 0;
    int sign = +1;                 // orbit-family branch for interior/homoclinic
    Method method = Method::quadrature;
    int quadrature_nodes = 0;
};

std::vector<double> uniform_phi_grid(int size);

/// Subharmonic Melnikov function on a phi grid:
///   M(phi) = int_0^{l T(k)} DH(x^k(t)) . u(x^k(t), nu t + phi) dt
/// by the periodic trapezoid rule (node count doubled until two successive
/// refinements agree below 1e-10).  The modulus must satisfy the resonance
/// l T(k) = 2 pi n / nu to 1e-10 relative, otherwise the integral has no
/// resonant meaning and a DomainError is thrown.
/// orbit_shift evaluates the orbit at t + s; the result equals the unshifted
/// curve read at phi + nu s (time-translation equivariance).
MelnikovCurve subharmonic_melnikov(const ForcedPlanarSystem& sys, const OrbitFamily& fam,
                                   const EllipticModulus& k, Resonance res, int phi_grid_size,
                                   Exec exec = Exec::omp, double orbit_shift = 0.0);

/// Homoclinic Melnikov function
///   M(phi) = int_{-T*}^{T*} DH(x^h(t)) . u(x^h(t), nu t + phi) dt
/// with T* chosen analytically so the discarded tails stay below tail_tol
/// (|x2^h| <= 2 sqrt2 e^{-|t|}); throws if that requires T* > 60.
/// sign = +-1 selects the homoclinic branch.  Only defined for a = +1.
MelnikovCurve homoclinic_melnikov(const ForcedPlanarSystem& sys, int sign, int phi_grid_size,
                                  double tail_tol, Exec exec = Exec::omp);

enum class DuffingCase { interior, exterior, soft, homoclinic };

/// Closed-form Melnikov value -delta*J1-type + sign*beta*J2-type*sin(phi)
/// for the Duffing catalog.  k and res are required except for the
/// homoclinic case; sign selects the branch for interior/homoclinic and is
/// ignored for the single-family exterior/soft cases.  The vanishing
/// branches (l != 1, or even n for exterior/soft) return the constant part
/// exactly.
double closed_form_duffing(DuffingCase c, int sign, const std::optional<EllipticModulus>& k,
                           const std::optional<Resonance>& res, double delta, double beta,
                           double nu, double phi);

/// The damping and forcing coefficients separately (same conventions).
double duffing_J1(DuffingCase c, const EllipticModulus& k, int l);
double duffing_J2(DuffingCase c, const EllipticModulus& k, const Resonance& res, double nu);

/// Solve l T(k) = 2 pi n / nu for the modulus within the family's range by
/// bisection in log k' (the periods are monotone; checked on a grid once per
/// family).  Throws NoResonanceError when nu is outside the attainable band.
EllipticModulus solve_resonance(systems::FamilyKind kind, double nu, Resonance res);

/// Convenience inverse: the nu that makes (l, n) resonant at modulus k.
double resonance_nu(systems::FamilyKind kind, const EllipticModulus& k, Resonance res);

/// For each n in n_list (with l = 1) solve the interior resonance at this nu,
/// compute the subharmonic curve by quadrature, and return
/// sup_phi |M^{1,n}(phi) - M_hom(phi)| per entry.  Realizes the convergence
/// of long-period subharmonic functions to the homoclinic one.
std::vector<double> melnikov_limit_check(const ForcedPlanarSystem& sys, double nu,
                                         std::span<const int> n_list, int phi_grid_size,
                                         Exec exec = Exec::omp);

struct ZeroInfo {
    double phi = 0;
    bool is_simple = false;
    double slope = 0;
};

/// Zeros of the curve by sign-change bracketing on the grid plus bisection on
/// a periodic cubic interpolant (refined to 1e-10).  A zero is simple when
/// the interpolant slope exceeds 1e-6 times the curve amplitude scale.
/// Grid nodes that sit exactly on zero without a sign change are reported as
/// tangencies (is_simple = false).
std::vector<ZeroInfo> simple_zero_scan(const MelnikovCurve& curve);

/// delta/beta boundary below which the homoclinic Melnikov function has a
/// pair of simple zeros: (3/4) sqrt2 pi nu sech(pi nu / 2).
double chaos_threshold(double nu);

} // namespace melkit::melnikov

#endif
