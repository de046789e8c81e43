#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spgs/limit_solver.hpp"
#include "spgs/nonlinearity.hpp"
#include "spgs/radial_grid.hpp"

namespace spgs {

struct SolveOptions {
    double tol = 1e-8;
    int max_iter = 100;
    double damping_floor = 1.0 / 1024.0;
    /// Largest fraction of the L^2 mass one clipping step may remove.
    double clip_budget = 1e-8;
    /// Skip the frozen-potential iteration and always use the full Jacobian.
    bool force_dense = false;
};

struct BranchPoint {
    double lambda = 0.0;
    RadialFunction u;
    RadialFunction phi;
    double gamma_energy = 0.0;
    double i_energy = 0.0;
    double h1_dist_to_omega = 0.0;
    double phi_d12 = 0.0;            // ||grad phi||_2
    double pohozaev_res = 0.0;       // relative lambda-Pohozaev residual
    double dilation_slope = 0.0;     // numerical d/dt Gamma(u(./t)) at t = 1, same scale
    double grad_residual_norm = 0.0;
    double D_lambda = 0.0;           // filled in by continuation
    double D_argmax = 0.0;
    int iterations = 0;
    bool dense_fallback = false;
};

/// Damped quasi-Newton for -Laplace(u) + u + lambda phi_u u = f(u).
///
/// Each step freezes phi at the current iterate and solves the banded
/// linearization; if the residual falls by less than 10% over five steps the
/// remaining steps use the full Jacobian including 2 lambda^2 diag(wu) K diag(u).
/// Negative values are clipped after every step.
/// `omega` (optional) is the reference for h1_dist_to_omega.
BranchPoint solve_at_lambda(const RadialFunction& u_init, const Nonlinearity& nl, double lambda,
                            const SolveOptions& opts = {}, const RadialFunction* omega = nullptr);

struct T0Search {
    double t0 = 0.0;        // crossing times 1.05
    double t_cross = 0.0;   // first sampled t > 1 with I < -2
    double I_at_t0 = 0.0;
    double t_max = 0.0;     // largest dilation whose tail is still resolved
    bool monotone = true;   // I decreasing on the samples between the maximizer and t_cross
};

/// Smallest sampled t > 1 with I(dilate(omega, t)) < -2, times 1.05.
/// Throws range_failure if the crossing lies beyond the resolvable dilations.
T0Search find_t0(const RadialFunction& omega, const Nonlinearity& nl);

/// lambda_1 with Gamma_lambda(dilate(omega, t0)) < -2 for lambda < lambda_1; the
/// lambda dependence is exactly quadratic so this is closed form.
double gamma_below_minus_two_limit(const RadialFunction& omega, const Nonlinearity& nl, double t0);

struct PathMax {
    double D = 0.0;
    double t_star = 0.0;
};

/// max over t in (0, t0] of Gamma_lambda(dilate(omega, t)).
PathMax path_max_D(const RadialFunction& omega, const Nonlinearity& nl, double lambda, double t0);

struct SolutionBranch {
    std::vector<BranchPoint> points;  // decreasing lambda
    LimitGroundState ground;          // constrained-flow ground state
    RadialFunction omega_ref;         // ground.omega polished as the lambda = 0 solution
    double b_ref = 0.0;               // I(omega_ref)
    T0Search t0;
    double lambda_1 = 0.0;
};

/// Limit ground state, then warm-started solves along a strictly decreasing schedule.
SolutionBranch continuation(const Nonlinearity& nl, const GridPtr& grid, const std::vector<double>& schedule,
                            const SolveOptions& opts = {}, const FlowOptions& flow = {});

struct UpwardProbe {
    double last_converged = 0.0;
    double first_failed = 0.0;  // 0 when every probe converged
    std::string failure;
};

/// Doubles lambda from `start` with warm starts until a solve fails or `max_steps` is hit.
UpwardProbe probe_upward(const SolutionBranch& branch, const Nonlinearity& nl, double start, int max_steps,
                         const SolveOptions& opts = {});

struct PowerFit {
    double slope = 0.0;
    double prefactor = 0.0;  // y ~ prefactor * lambda^slope
    bool valid = false;
};

/// Least-squares fit of log|y| against log(lambda).
PowerFit fit_power_law(const std::vector<double>& lambda, const std::vector<double>& y);

struct AsymptoticsRow {
    double lambda = 0.0;
    double h1_dist = 0.0;
    double phi_d12 = 0.0;
    double gamma_minus_b = 0.0;
    double D_minus_b = 0.0;
    bool below_ceiling = false;  // Gamma <= D
    bool within_budget = false;  // h1_dist < d_budget
};

struct AsymptoticsReport {
    std::vector<AsymptoticsRow> rows;
    PowerFit h1_fit, phi_fit, gamma_fit, D_fit;
    bool h1_monotone = false, phi_monotone = false, gamma_monotone = false, D_monotone = false;
    bool energy_ordering = false;
    double d_budget = 0.0;
    /// Largest schedule lambda below which every point is inside the budget (heuristic).
    double lambda_0 = 0.0;
};

/// Table of the convergence quantities with log-log slopes. `S` is the Sobolev
/// constant used in the d-budget min{(1/3)[(3/2) S^3 / kappa]^(1/4), sqrt(3 b)}.
AsymptoticsReport asymptotics_report(const SolutionBranch& branch, const Nonlinearity& nl, double S);

} // namespace spgs
