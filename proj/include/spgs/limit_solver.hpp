#pragma once

#include <optional>
#include <string>
#include <utility>

#include "spgs/nonlinearity.hpp"
#include "spgs/radial_grid.hpp"

namespace spgs {

enum class GroundStateMethod { constrained_flow, shooting };

const char* to_string(GroundStateMethod method) noexcept;

/// Ground state of -Laplace(u) + u = f(u) and the levels built from it.
struct LimitGroundState {
    RadialFunction u;      // minimizer of T0 on {V = 1}
    RadialFunction omega;  // u(./t0_dilation), on the Pohozaev set
    double M_value = 0.0;  // T0(u)
    double p_value = 0.0;  // I(omega)
    double b_value = 0.0;  // max_t I(omega(./t))
    double b_argmax = 0.0;
    double t0_dilation = 0.0;
    double V_of_u = 0.0;
    double pohozaev_relative = 0.0;  // P(omega) / ||grad omega||^2
    double projected_gradient = 0.0;
    int iterations = 0;
    GroundStateMethod method = GroundStateMethod::constrained_flow;
};

struct FlowOptions {
    double tol = 1e-8;
    int max_iter = 20000;
    /// 0 starts from the plain bump; other values add a seeded smooth
    /// perturbation of its shape, for independent restarts.
    unsigned seed = 0;
};

/// Projected H^1 gradient descent for T0 on {V = 1}. The step direction is the
/// Riesz representative of T0' - k V' with k the H^1-orthogonal multiplier;
/// after each step the constraint is restored by a dilation, which scales V by t^3.
/// Backtracking (Armijo) on T0 after reprojection.
LimitGroundState minimize_on_M(const Nonlinearity& nl, const GridPtr& grid, const FlowOptions& opts = {},
                               const std::optional<RadialFunction>& initial = std::nullopt);

/// omega = u0(./t) with t = ||grad u0||_2 / sqrt(6).
std::pair<RadialFunction, double> cgm_rescale(const RadialFunction& u0, const Nonlinearity& nl);

struct MountainPassLevel {
    double b = 0.0;
    double t_star = 0.0;
};

/// max over t in [t_lo, t_hi] of I(dilate(omega, t)) by golden-section search.
MountainPassLevel mountain_pass_b(const RadialFunction& omega, const Nonlinearity& nl, double t_lo = 0.1,
                                  double t_hi = 1.7320508075688772);

enum class ShotOutcome { undershoot, overshoot };

struct ShootingOptions {
    double tol = 1e-14;      // relative bisection width on the central value
    double ode_tol = 1e-11;  // local error per step, relative to |u| + |u'|
    double min_step = 1e-10;
};

struct Shot {
    ShotOutcome outcome = ShotOutcome::undershoot;
    double r_event = 0.0;
};

/// Integrates u'' + (2/r) u' = u - f(u), u(0) = a, u'(0) = 0 up to r_max and
/// classifies: overshoot if u crosses zero, undershoot if u' turns positive while
/// u > 0. Without an event the sign of u + u' at r_max decides.
Shot classify_shot(const Nonlinearity& nl, double a, double r_max, const ShootingOptions& opts = {});

/// Expands from the first s with f(s) > s until the endpoints classify as
/// undershoot and overshoot. Throws bracket_failure if none is found.
std::pair<double, double> shooting_bracket(const Nonlinearity& nl, double r_max, const ShootingOptions& opts = {});

/// Bisection on the central value; the returned profile is the converged
/// undershoot trajectory sampled on the grid and cut to zero past its turning point.
RadialFunction shoot_ground_state(const Nonlinearity& nl, const GridPtr& grid, std::pair<double, double> bracket,
                                  const ShootingOptions& opts = {}, double* central_value = nullptr);

} // namespace spgs
