#ifndef MELKIT_ODE_HPP
#define MELKIT_ODE_HPP

#include <functional>
#include <vector>

#include "melkit/systems.hpp"

namespace melkit::ode {

using State = std::vector<double>;

struct VectorField {
    int dimension = 0;
    std::function<void(double t, const double* x, double* dxdt)> eval;
    bool is_autonomous = false;
};

/// Result of adaptive integration: accepted steps with derivatives, so dense
/// output is available by cubic Hermite interpolation between steps.
struct Trajectory {
    std::vector<double> times;        // strictly increasing
    std::vector<State> states;        // one per time
    std::vector<State> derivs;        // field values at the accepted steps
    double tolerance_used = 0.0;
    bool complete = true;             // false on step-size underflow

    const State& terminal() const { return states.back(); }
    /// Interpolate the state at t inside [times.front(), times.back()].
    State sample(double t) const;
};

/// Integrate with the Dormand-Prince embedded 5(4) pair and PI step control.
/// Local error per step is held to ~tol (mixed absolute/relative).  On
/// step-size underflow the partial trajectory is returned with
/// complete = false.
Trajectory integrate(const VectorField& field, const State& x0, double t0, double t1, double tol);

/// State after one forcing period 2*pi/nu of the extended system
/// (x' = J DH + eps u(x, nu t + phi0)), starting from x0.
systems::Vec2 stroboscopic_map(const systems::ForcedPlanarSystem& sys, double eps,
                               systems::Vec2 x0, double phi0, double tol = 1e-12);

/// Same map iterated `periods` times (integrated in one sweep).
systems::Vec2 stroboscopic_map_n(const systems::ForcedPlanarSystem& sys, double eps,
                                 systems::Vec2 x0, double phi0, int periods, double tol = 1e-12);

struct ShootResult {
    systems::Vec2 point{};
    bool converged = false;
    bool degenerate_jacobian = false;
    double residual = 0.0;
    int iterations = 0;
};

/// Newton iteration for a fixed point of the `periods`-fold stroboscopic map
/// at phase phi0.  The shooting Jacobian is taken by forward finite
/// differences with h = 1e-6 (1 + |y|); Jacobians with condition number
/// above 1e12 are flagged as degenerate and not inverted.
ShootResult newton_shoot_periodic(const systems::ForcedPlanarSystem& sys, double eps,
                                  systems::Vec2 guess, double phi0, int periods, double tol,
                                  double ode_tol = 1e-12);

} // namespace melkit::ode

#endif
