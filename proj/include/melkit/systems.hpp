#ifndef MELKIT_SYSTEMS_HPP
#define MELKIT_SYSTEMS_HPP

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "melkit/parallel.hpp"
#include "melkit/specfun.hpp"

namespace melkit::systems {

using Vec2 = std::array<double, 2>;
using specfun::EllipticModulus;

enum class PlanarCase { duffing_a_plus, duffing_a_minus };

/// Planar Hamiltonian system H(x) plus a time-periodic perturbation
/// u(x, nu t), here the Duffing oscillator
///   x1' = x2,  x2' = a x1 - x1^3 + eps (beta cos(nu t) - delta x2)
/// with H = -a x1^2/2 + x1^4/4 + x2^2/2 and a = +1 or -1.
struct ForcedPlanarSystem {
    PlanarCase case_tag;
    double a;     // +1 or -1
    double nu;    // forcing frequency, > 0
    double beta;  // forcing amplitude, >= 0
    double delta; // damping coefficient, >= 0

    double hamiltonian(Vec2 x) const {
        return -0.5 * a * x[0] * x[0] + 0.25 * x[0] * x[0] * x[0] * x[0] + 0.5 * x[1] * x[1];
    }
    Vec2 grad_h(Vec2 x) const { return {-a * x[0] + x[0] * x[0] * x[0], x[1]}; }
    /// u(x, theta), 2*pi-periodic in theta.
    Vec2 perturbation(Vec2 x, double theta) const {
        return {0.0, beta * std::cos(theta) - delta * x[1]};
    }
    /// J DH(x), the unperturbed vector field.
    Vec2 unperturbed_field(Vec2 x) const { return {x[1], a * x[0] - x[0] * x[0] * x[0]}; }
    /// Full field at time t with phase offset phi0: J DH + eps u(x, nu t + phi0).
    Vec2 field(double t, Vec2 x, double eps, double phi0) const {
        const Vec2 u = perturbation(x, nu * t + phi0);
        return {x[1] + eps * u[0], a * x[0] - x[0] * x[0] * x[0] + eps * u[1]};
    }
};

ForcedPlanarSystem make_duffing(double a, double beta, double delta, double nu);

enum class AACase { pendulum_torque, coupled_oscillators, generic };

/// System in action-angle form: I' = eps h(I,theta), theta' = omega(I) + eps g.
/// h and g are the leading-order perturbations (their eps->0 values).
struct ActionAngleSystem {
    AACase case_tag = AACase::generic;
    int ell = 0; // action dimension
    int m = 0;   // angle dimension
    std::function<std::vector<double>(const std::vector<double>&)> omega;
    std::function<std::vector<double>(const std::vector<double>&, const std::vector<double>&)> h;
    std::function<std::vector<double>(const std::vector<double>&, const std::vector<double>&)> g;
    std::vector<std::pair<double, double>> action_box;
};

ActionAngleSystem make_pendulum_torque(double beta);

/// Coupled-oscillator parameters: I_j' = eps(-delta I_j + Omega_j
///   + sum_i sum_k a_k sin(k1 theta_j - k2 theta_i)), theta_j' = I_j.
/// The coefficient table must satisfy |a_k| <= decay_M * exp(-(k1+k2) decay_rate)
/// so the field stays analytic; violations are rejected at construction.
struct CoupledParams {
    int ell = 2;
    double delta = 0.0;
    std::vector<double> Omega;                    // size ell
    std::map<std::pair<int, int>, double> coeffs; // a_{(k1,k2)}, k1,k2 >= 1
    double decay_M = 1.0;
    double decay_rate = 0.0;
    int truncation = 12; // keep terms with k1 + k2 <= truncation
};

ActionAngleSystem make_coupled_oscillators(const CoupledParams& p);

/// Exponentially decaying full coefficient table a_k = M exp(-(k1+k2) rate)
/// for all k1,k2 >= 1 with k1+k2 <= truncation.
std::map<std::pair<int, int>, double> full_coupling_table(double M, double rate, int truncation);

enum class FamilyKind {
    duffing_interior_plus,
    duffing_interior_minus,
    duffing_exterior,
    duffing_soft,
    homoclinic_plus,
    homoclinic_minus,
};

bool family_is_periodic(FamilyKind kind);

/// One-parameter family of unperturbed orbits of a ForcedPlanarSystem,
/// parameterized by the elliptic modulus k; the homoclinic kinds are the
/// k -> 1 limits and ignore the modulus.
struct OrbitFamily {
    FamilyKind kind;
    std::pair<double, double> k_range; // open interval of admissible moduli
    int dperiod_dk_sign;               // sign of dT/dk on k_range

    Vec2 orbit(const EllipticModulus& k, double t) const;
    double period(const EllipticModulus& k) const;
    bool periodic() const { return family_is_periodic(kind); }
};

/// Family catalog lookup; throws DomainError for kinds incompatible with the
/// system's case (a=+1 admits interior/exterior/homoclinic, a=-1 soft only).
OrbitFamily orbit_family(const ForcedPlanarSystem& sys, FamilyKind kind);

/// Max over `samples` uniform times of |d/dt orbit - J DH(orbit)|, the time
/// derivative by central differences.  Periodic kinds sample one period,
/// homoclinic kinds sample t in [-10, 10].
double orbit_residual(const OrbitFamily& fam, const ForcedPlanarSystem& sys,
                      const EllipticModulus& k, int samples, Exec exec = Exec::omp);

/// Action-angle view of a Duffing orbit family with the modulus k as the
/// action: omega(k) = (2 pi / T(k), nu).  Only omega is meaningful; h = 0.
ActionAngleSystem make_duffing_action_angle(const ForcedPlanarSystem& sys, FamilyKind kind);

} // namespace melkit::systems

#endif
