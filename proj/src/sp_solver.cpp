#include "spgs/sp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spgs/error.hpp"
#include "spgs/functionals.hpp"
#include "spgs/optimize.hpp"
#include "spgs/poisson.hpp"

namespace spgs {

namespace {

// Newton step on the Dirichlet nodes. The dense variant adds the nonlocal block.
std::vector<double> newton_direction(const RadialFunction& u, const Nonlinearity& nl, const PoissonSolution& ps,
                                     const std::vector<double>& weak, bool dense) {
    const RadialGrid& g = u.grid();
    const int m = g.last();
    const auto w = g.weights();
    const double lambda = ps.lambda;
    std::vector<double> rhs(m);
    for (int i = 0; i < m; ++i) rhs[i] = -weak[i];

    std::vector<double> diag(m);
    for (int i = 0; i < m; ++i) diag[i] = w[i] * (1.0 + lambda * ps.phi[i] - nl.fprime(u[i]));

    if (!dense || lambda == 0.0) {
        linalg::BandMatrix J = g.stiffness().leading(m);
        J.add_diagonal(diag);
        return J.solve(rhs);
    }

    // Full Jacobian J + c diag(a) S diag(a) with a = w u and S_ij = 1 / max(r_i, r_j) on
    // nodes 1..m-1 (w_0 = 0). S is the inverse of a tridiagonal T, so the step solves
    // the sparse bordered system [J, c a; a, -T] [x; y] = [rhs; 0] with y = S (a x).
    const auto r = g.nodes();
    const linalg::BandMatrix& A = g.stiffness();
    const double c = 2.0 * lambda * lambda / (4.0 * std::numbers::pi);
    const int P = m - 1;
    std::vector<double> inv_d(P);
    for (int p = 0; p < P; ++p) {
        const double f = 1.0 / r[p + 1];
        const double f_next = p + 1 < P ? 1.0 / r[p + 2] : 0.0;
        inv_d[p] = 1.0 / (f - f_next);
    }
    std::vector<linalg::Entry> e;
    e.reserve(static_cast<std::size_t>(m) * (A.lower() + A.upper() + 2) + 5 * static_cast<std::size_t>(P));
    for (int j = 0; j < m; ++j)
        for (int i = std::max(0, j - A.upper()); i <= std::min(m - 1, j + A.lower()); ++i) e.push_back({i, j, A(i, j)});
    for (int i = 0; i < m; ++i) e.push_back({i, i, diag[i]});
    for (int p = 0; p < P; ++p) {
        const int k = p + 1;
        const double a = w[k] * u[k];
        e.push_back({k, m + p, c * a});
        e.push_back({m + p, k, a});
        e.push_back({m + p, m + p, -(inv_d[p] + (p > 0 ? inv_d[p - 1] : 0.0))});
        if (p + 1 < P) {
            e.push_back({m + p, m + p + 1, inv_d[p]});
            e.push_back({m + p + 1, m + p, inv_d[p]});
        }
    }
    rhs.resize(static_cast<std::size_t>(m + P), 0.0);
    std::vector<double> x = linalg::sparse_solve(m + P, e, rhs);
    x.resize(m);
    return x;
}

struct Evaluated {
    PoissonSolution ps;
    ResidualField res;
};

Evaluated evaluate(const RadialFunction& u, const Nonlinearity& nl, double lambda) {
    PoissonSolution ps = solve_phi(u, lambda);
    ResidualField res = gradient_residual(u, nl, ps);
    return {std::move(ps), std::move(res)};
}

void check_lambda(double lambda) {
    if (!std::isfinite(lambda) || lambda < 0.0) fail(ErrorCode::invalid_argument, "lambda must be >= 0");
}

} // namespace

BranchPoint solve_at_lambda(const RadialFunction& u_init, const Nonlinearity& nl, double lambda,
                            const SolveOptions& opts, const RadialFunction* omega) {
    check_lambda(lambda);
    require(opts.tol > 0.0 && opts.max_iter > 0, "solve_at_lambda: tol and max_iter must be positive");
    require(opts.damping_floor > 0.0 && opts.damping_floor <= 1.0, "solve_at_lambda: damping floor must lie in (0, 1]");
    require(opts.clip_budget >= 0.0, "solve_at_lambda: clip budget must be >= 0");
    if (omega) require(omega->same_grid(u_init), "solve_at_lambda: reference lives on another grid");

    std::vector<double> start(u_init.values().begin(), u_init.values().end());
    start.back() = 0.0;
    for (double& x : start) x = std::max(x, 0.0);
    RadialFunction u = u_init.with_values(std::move(start));
    const auto w = u.grid().weights();

    Evaluated ev = evaluate(u, nl, lambda);
    std::vector<double> history{ev.res.dual_norm};
    bool dense = opts.force_dense;
    bool used_dense = dense;
    int it = 0;
    while (ev.res.dual_norm > opts.tol) {
        if (it >= opts.max_iter) {
            std::ostringstream msg;
            msg << "quasi-Newton did not converge in " << opts.max_iter << " iterations at lambda = " << lambda
                << " (residual " << ev.res.dual_norm << ")";
            fail(ErrorCode::non_convergence, msg.str());
        }
        if (!dense && history.size() > 5 && history.back() > 0.9 * history[history.size() - 6]) {
            dense = used_dense = true;
        }
        const std::vector<double> delta = newton_direction(u, nl, ev.ps, ev.res.weak, dense);

        bool accepted = false;
        bool clipped_out = false;
        for (double theta = 1.0; theta >= opts.damping_floor; theta *= 0.5) {
            std::vector<double> v(u.values().begin(), u.values().end());
            double mass = 0.0, removed = 0.0;
            for (std::size_t i = 0; i < delta.size(); ++i) {
                v[i] += theta * delta[i];
                mass += w[i] * v[i] * v[i];
                if (v[i] < 0.0) {
                    removed += w[i] * v[i] * v[i];
                    v[i] = 0.0;
                }
            }
            if (mass > 0.0 && removed > opts.clip_budget * mass) {
                clipped_out = true;
                continue;
            }
            RadialFunction trial = u.with_values(std::move(v));
            Evaluated next = evaluate(trial, nl, lambda);
            if (next.res.dual_norm < ev.res.dual_norm) {
                u = std::move(trial);
                ev = std::move(next);
                accepted = true;
                break;
            }
        }
        ++it;
        if (!accepted) {
            if (!dense) {
                dense = used_dense = true;
                continue;
            }
            std::ostringstream msg;
            msg << "damping reached its floor at lambda = " << lambda << " (residual " << ev.res.dual_norm << ")";
            fail(clipped_out ? ErrorCode::positivity_loss : ErrorCode::non_convergence, msg.str());
        }
        history.push_back(ev.res.dual_norm);
    }

    BranchPoint pt{.lambda = lambda, .u = u, .phi = ev.ps.phi};
    const EnergyBreakdown e = energy(u, nl, ev.ps);
    pt.gamma_energy = e.Gamma_value;
    pt.i_energy = e.I_value;
    pt.phi_d12 = std::sqrt(std::max(ev.ps.dirichlet_energy, 0.0));
    const PohozaevLambda poh = pohozaev_residual_lambda(u, nl, lambda);
    pt.pohozaev_res = poh.relative();
    pt.dilation_slope = poh.scale > 0.0 ? dilation_derivative(u, nl, lambda) / poh.scale : 0.0;
    pt.grad_residual_norm = ev.res.dual_norm;
    pt.h1_dist_to_omega = omega ? std::sqrt(h1_norm_sq(u - *omega)) : 0.0;
    pt.iterations = it;
    pt.dense_fallback = used_dense;
    return pt;
}

T0Search find_t0(const RadialFunction& omega, const Nonlinearity& nl) {
    const RadialGrid& g = omega.grid();
    const auto r = g.nodes();
    const double peak = std::abs(omega[0]);
    require(peak > 0.0, "find_t0: omega vanishes at the origin");
    double r_tail = g.radius();
    for (int i = g.last(); i >= 0; --i) {
        if (std::abs(omega[i]) > 1e-6 * peak) {
            r_tail = r[std::min(i + 1, g.last())];
            break;
        }
    }
    T0Search out;
    out.t_max = g.radius() / r_tail;
    auto I_at = [&](double t) { return energy(dilate(omega, t), nl, 0.0).I_value; };
    double prev = I_at(1.0);
    for (int k = 1;; ++k) {
        const double t = 1.0 + 0.005 * k;
        if (t > out.t_max) {
            std::ostringstream msg;
            msg << "I(omega(./t)) stays above -2 up to t = " << out.t_max << ", where the dilated tail leaves [0, R]";
            fail(ErrorCode::range_failure, msg.str());
        }
        const double I = I_at(t);
        if (I >= prev) out.monotone = false;
        prev = I;
        if (I < -2.0) {
            out.t_cross = t;
            break;
        }
    }
    out.t0 = 1.05 * out.t_cross;
    out.I_at_t0 = I_at(out.t0);
    return out;
}

double gamma_below_minus_two_limit(const RadialFunction& omega, const Nonlinearity& nl, double t0) {
    const RadialFunction v = dilate(omega, t0);
    const double I = energy(v, nl, 0.0).I_value;
    if (!(I < -2.0)) return 0.0;
    const double coupling = solve_phi(v, 1.0).coupling;
    return std::sqrt(4.0 * (-2.0 - I) / coupling);
}

PathMax path_max_D(const RadialFunction& omega, const Nonlinearity& nl, double lambda, double t0) {
    check_lambda(lambda);
    require(t0 > 1.0, "path_max_D: t0 must exceed 1");
    auto gamma_at = [&](double t) { return energy(dilate(omega, t), nl, lambda).Gamma_value; };
    const ScalarExtremum m = golden_section_max(gamma_at, 0.1, t0, 1e-9);
    const double at_one = gamma_at(1.0);
    if (at_one >= m.value) return {at_one, 1.0};
    return {m.value, m.x};
}

SolutionBranch continuation(const Nonlinearity& nl, const GridPtr& grid, const std::vector<double>& schedule,
                            const SolveOptions& opts, const FlowOptions& flow) {
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i] > 0.0) || !std::isfinite(schedule[i]))
            fail(ErrorCode::invalid_argument, "schedule entries must be positive");
        if (i > 0 && !(schedule[i] < schedule[i - 1]))
            fail(ErrorCode::invalid_argument, "schedule must be strictly decreasing");
    }
    SolutionBranch br{{}, minimize_on_M(nl, grid, flow), RadialFunction::zeros(grid), 0.0, {}, 0.0};
    BranchPoint base = solve_at_lambda(br.ground.omega, nl, 0.0, opts);
    br.omega_ref = base.u;
    br.b_ref = base.i_energy;
    br.t0 = find_t0(br.omega_ref, nl);
    br.lambda_1 = gamma_below_minus_two_limit(br.omega_ref, nl, br.t0.t0);

    const RadialFunction* prev = &br.omega_ref;
    for (double lambda : schedule) {
        try {
            BranchPoint pt = solve_at_lambda(*prev, nl, lambda, opts, &br.omega_ref);
            const PathMax d = path_max_D(br.omega_ref, nl, lambda, br.t0.t0);
            pt.D_lambda = d.D;
            pt.D_argmax = d.t_star;
            br.points.push_back(std::move(pt));
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << "continuation failed at lambda = " << lambda << ": " << e.what();
            fail(e.code(), msg.str());
        }
        prev = &br.points.back().u;
    }
    return br;
}

UpwardProbe probe_upward(const SolutionBranch& branch, const Nonlinearity& nl, double start, int max_steps,
                         const SolveOptions& opts) {
    require(start > 0.0 && max_steps > 0, "probe_upward: need start > 0 and max_steps > 0");
    UpwardProbe out;
    RadialFunction u = branch.points.empty() ? branch.omega_ref : branch.points.front().u;
    out.last_converged = branch.points.empty() ? 0.0 : branch.points.front().lambda;
    double lambda = start;
    for (int k = 0; k < max_steps; ++k, lambda *= 2.0) {
        try {
            u = solve_at_lambda(u, nl, lambda, opts).u;
            out.last_converged = lambda;
        } catch (const Error& e) {
            out.first_failed = lambda;
            out.failure = e.what();
            break;
        }
    }
    return out;
}

PowerFit fit_power_law(const std::vector<double>& lambda, const std::vector<double>& y) {
    require(lambda.size() == y.size(), "fit_power_law: length mismatch");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double a = std::abs(y[i]);
        if (!(lambda[i] > 0.0) || !(a > 0.0) || !std::isfinite(a)) continue;
        const double x = std::log(lambda[i]), l = std::log(a);
        sx += x;
        sy += l;
        sxx += x * x;
        sxy += x * l;
        ++n;
    }
    PowerFit fit;
    const double den = n * sxx - sx * sx;
    if (n < 2 || den <= 0.0) return fit;
    fit.slope = (n * sxy - sx * sy) / den;
    fit.prefactor = std::exp((sy - fit.slope * sx) / n);
    fit.valid = true;
    return fit;
}

AsymptoticsReport asymptotics_report(const SolutionBranch& branch, const Nonlinearity& nl, double S) {
    if (branch.points.empty()) fail(ErrorCode::invalid_argument, "asymptotics_report: empty branch");
    require(S > 0.0, "asymptotics_report: S must be positive");
    AsymptoticsReport rep;
    rep.d_budget = std::min(std::pow(1.5 * S * S * S / nl.kappa(), 0.25) / 3.0, std::sqrt(3.0 * branch.b_ref));

    std::vector<double> lam, h1, phi, gam, D;
    for (const BranchPoint& p : branch.points) {
        AsymptoticsRow row{p.lambda,
                           p.h1_dist_to_omega,
                           p.phi_d12,
                           p.gamma_energy - branch.b_ref,
                           p.D_lambda - branch.b_ref,
                           p.gamma_energy <= p.D_lambda,
                           p.h1_dist_to_omega < rep.d_budget};
        rep.rows.push_back(row);
        lam.push_back(row.lambda);
        h1.push_back(row.h1_dist);
        phi.push_back(row.phi_d12);
        gam.push_back(row.gamma_minus_b);
        D.push_back(row.D_minus_b);
    }
    rep.h1_fit = fit_power_law(lam, h1);
    rep.phi_fit = fit_power_law(lam, phi);
    rep.gamma_fit = fit_power_law(lam, gam);
    rep.D_fit = fit_power_law(lam, D);

    auto decreasing = [](const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (!(std::abs(v[i]) < std::abs(v[i - 1]))) return false;
        return true;
    };
    rep.h1_monotone = decreasing(h1);
    rep.phi_monotone = decreasing(phi);
    rep.gamma_monotone = decreasing(gam);
    rep.D_monotone = decreasing(D);
    rep.energy_ordering = std::all_of(rep.rows.begin(), rep.rows.end(), [](const auto& r) { return r.below_ceiling; });

    // Rows run from large to small lambda; lambda_0 is the largest lambda whose
    // whole lower part of the schedule sits inside the budget.
    for (auto it = rep.rows.rbegin(); it != rep.rows.rend() && it->within_budget; ++it) rep.lambda_0 = it->lambda;
    return rep;
}

} // namespace spgs
