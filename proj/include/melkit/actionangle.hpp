#ifndef MELKIT_ACTIONANGLE_HPP
#define MELKIT_ACTIONANGLE_HPP

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "melkit/parallel.hpp"
#include "melkit/systems.hpp"

namespace melkit::actionangle {

using systems::ActionAngleSystem;

/// Fourier coefficients hhat_r(I) in C^ell of the leading perturbation
/// h(I, theta) over r in Z^m with |r|_inf <= R, stored as a flattened
/// (2R+1)^m x ell table.  h is real, so coeff(-r) = conj(coeff(r)).
struct FourierSpectrum {
    int m = 0, ell = 0, R = 0;
    std::vector<std::complex<double>> table;

    std::size_t index_of(std::span<const int> r) const;
    std::complex<double> coeff(std::span<const int> r, int component) const;
    /// Largest |coeff| over components at r.
    double magnitude(std::span<const int> r) const;
    /// Enumerate all multi-indices in the box, lexicographic in [-R, R]^m.
    std::vector<std::vector<int>> all_indices() const;
};

/// Coefficients by trapezoid quadrature on a (4R)^m angle grid; exact for
/// trigonometric polynomials of degree < 3R per axis, which covers the
/// catalog systems at their truncations.
FourierSpectrum fourier_coeffs(const ActionAngleSystem& sys, const std::vector<double>& I, int R,
                               Exec exec = Exec::omp);

/// Integer lattice Lambda = { r : r . omega = 0 } within |r|_inf <= R, plus
/// the largest omega0 > 0 with omega/omega0 integer when the frequency
/// ratios are rational (continued-fraction detection with denominators up to
/// denom_bound and residual below 1e-10).
struct ResonanceLattice {
    std::vector<double> omega;
    int R = 0;
    std::vector<std::vector<int>> members; // includes 0; closed under negation
    std::optional<double> omega0;
    std::optional<std::vector<int>> omega_ratio; // omega / omega0 when it exists
};

ResonanceLattice resonance_lattice(std::span<const double> omega, int R, int denom_bound);

/// tau |-> T^I sum_{r in Lambda} hhat_r e^{i r.tau} sampled on a product grid
/// over the q-torus; values are real R^ell vectors (the imaginary residue is
/// checked below 1e-10 and discarded).
struct IntegralCurve {
    int q = 0;            // torus dimension
    int ell = 0;          // value dimension
    int per_axis = 0;     // grid size per torus axis
    double period = 0.0;  // T^I = 2 pi / omega0
    std::vector<double> values; // (per_axis^q) * ell, point-major

    std::size_t npoints() const;
    std::vector<double> tau_of(std::size_t flat_index) const;
    std::span<const double> value_at(std::size_t flat_index) const;
};

IntegralCurve resonant_integral_fourier(const FourierSpectrum& spec,
                                        const ResonanceLattice& lattice, int tau_grid_size);

/// Same curve by direct periodic-trapezoid quadrature of h along the torus
/// flow over one period: int_0^{T} h(I, omega t + tau) dt.
IntegralCurve resonant_integral_quadrature(const ActionAngleSystem& sys,
                                           const std::vector<double>& I, int tau_grid_size,
                                           Exec exec = Exec::omp);

enum class Tristate { yes, no, inconclusive };

/// Whether ell - s lattice members (r = 0 admitted) carry linearly
/// independent coefficient vectors (rank by SVD), searching subsets in
/// small-|r| order with a 1000-subset cap; exceeding the cap without a
/// witness is inconclusive.
Tristate check_poincare_point(const FourierSpectrum& spec, const ResonanceLattice& lattice,
                              int s);

struct ResonantAction {
    std::vector<double> I;
    ResonanceLattice lattice;
    int denominator = 1; // q of the detected ratio p/q (1 when trivial)
};

/// Actions in the box where omega(I) is a rational point (omega/omega0
/// integer with ratio denominators <= denom_bound), located by bisection of
/// the frequency-ratio equations along the axis-parallel grid lines of the
/// box (axes with zero extent stay fixed).  Sorted by denominator, capped at
/// max_points.
std::vector<ResonantAction> detect_resonant_actions(
    const ActionAngleSystem& sys, const std::vector<std::pair<double, double>>& box,
    int denom_bound, int max_points);

/// Numerical rank of the finite-difference Jacobian D omega(I); singular
/// values above 1e-8 times the largest count.
int jacobian_rank_omega(const ActionAngleSystem& sys, const std::vector<double>& I);

} // namespace melkit::actionangle

#endif
