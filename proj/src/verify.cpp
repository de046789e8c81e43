#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

#include "app_internal.hpp"
#include "spgs/constants.hpp"
#include "spgs/functionals.hpp"
#include "spgs/poisson.hpp"

namespace spgs::detail {

namespace {

class Battery {
public:
    // measured <= tolerance
    void at_most(const std::string& name, double measured, double tolerance) {
        add(name, measured, tolerance, "<=", measured <= tolerance, tolerance - measured);
    }
    // measured >= bound
    void at_least(const std::string& name, double measured, double bound) {
        add(name, measured, bound, ">=", measured >= bound, measured - bound);
    }
    void within(const std::string& name, double measured, double lo, double hi) {
        const bool ok = measured >= lo && measured <= hi;
        json c = entry(name, measured, ok, std::min(measured - lo, hi - measured));
        c["tolerance"] = json::array({lo, hi});
        c["comparison"] = "in";
        push(std::move(c));
    }
    void holds(const std::string& name, bool ok) { add(name, ok ? 1.0 : 0.0, 1.0, "true", ok, ok ? 0.0 : -1.0); }
    void error(const std::string& name, const std::string& message) {
        json c = entry(name, std::nan(""), false, -1.0);
        c["tolerance"] = nullptr;
        c["comparison"] = "no_error";
        c["error"] = message;
        push(std::move(c));
    }
    void report(const std::string& name, json value) { reports_[name] = std::move(value); }

    bool passed() const { return failed_ == 0; }
    json result() const {
        json fails = json::array();
        for (const json& c : checks_)
            if (!c.at("passed").get<bool>()) fails.push_back(json{{"kind", "verification_failure"}, {"name", c.at("name")}});
        return json{{"subcommand", "verify"},
                    {"checks_total", checks_.size()},
                    {"checks_failed", failed_},
                    {"checks", checks_},
                    {"reports", reports_},
                    {"failures", fails}};
    }

private:
    static json entry(const std::string& name, double measured, bool ok, double margin) {
        // NaN cannot be stored in JSON; it dumps as null.
        return json{{"name", name}, {"measured", val(measured, "computed")}, {"margin", margin}, {"passed", ok}};
    }
    void add(const std::string& name, double measured, double tol, const char* cmp, bool ok, double margin) {
        json c = entry(name, measured, ok, margin);
        c["tolerance"] = tol;
        c["comparison"] = cmp;
        push(std::move(c));
    }
    void push(json c) {
        if (!c.at("passed").get<bool>()) ++failed_;
        checks_.push_back(std::move(c));
    }

    json checks_ = json::array();
    json reports_ = json::object();
    int failed_ = 0;
};

// Runs a group of checks; an exception becomes a failed check of its own.
template <class Fn>
void group(Battery& b, const std::string& name, Fn&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        b.error(name, e.what());
    }
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Smooth positive profile with random amplitude, width and a second bump.
RadialFunction random_profile(const GridPtr& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(0.3, 1.5), width(0.8, 2.5), shift(0.0, 3.0), mix(0.0, 0.5);
    const double a = amp(rng), s = width(rng), c = shift(rng), m = mix(rng);
    return RadialFunction::sample(g, [&](double r) {
        const double x = r / s;
        return a * (std::exp(-0.5 * x * x) + m * std::exp(-0.5 * (r - c) * (r - c)));
    });
}

void grid_checks(Battery& b) {
    group(b, "radial_grid", [&] {
        const GridPtr g = RadialGrid::make(30.0, 3000);
        double sum = 0.0;
        for (double w : g->weights()) sum += w;
        b.at_most("radial_grid.volume_weights", rel(sum, 4.0 / 3.0 * std::numbers::pi * 27000.0), 1e-10);

        const GridPtr g12 = RadialGrid::make(12.0, 4000);
        const auto gauss = RadialFunction::sample(g12, [](double r) { return std::exp(-0.5 * r * r); });
        const double pi15 = std::pow(std::numbers::pi, 1.5);
        b.at_most("radial_grid.gaussian_integral", rel(integrate(gauss), 2.0 * std::sqrt(2.0) * pi15), 1e-8);
        b.at_most("radial_grid.gaussian_gradient", rel(grad_norm_sq(gauss), 1.5 * pi15), 1e-6);
        for (double t : {0.5, 2.0}) {
            const RadialFunction d = dilate(gauss, t);
            const std::string tag = t < 1.0 ? "t_half" : "t_two";
            b.at_most("radial_grid.dilation_l2_" + tag, rel(l2_norm_sq(d), t * t * t * l2_norm_sq(gauss)), 1e-6);
            b.at_most("radial_grid.dilation_gradient_" + tag, rel(grad_norm_sq(d), t * grad_norm_sq(gauss)), 1e-6);
        }
        const RadialFunction twice = dilate(dilate(gauss, 0.8), 1.5), once = dilate(gauss, 1.2);
        b.at_most("radial_grid.dilation_composition", std::sqrt(l2_norm_sq(twice - once) / l2_norm_sq(once)), 1e-6);
    });
}

void nonlinearity_checks(Battery& b, const Nonlinearity& nl) {
    group(b, "nonlinearity", [&] {
        b.holds("nonlinearity.configured_family_passes", check_hypotheses(nl).all_passed());
        const Nonlinearity identity = Nonlinearity::custom([](double s) { return std::max(s, 0.0); }, std::nullopt,
                                                           std::nullopt, 1.0, 4.0, 0.0, 1.0, "identity");
        const HypothesisReport id = check_hypotheses(identity);
        const HypothesisCheck* small = id.find("f1_small_s_limit");
        b.holds("nonlinearity.identity_fails_small_s_limit", small && !small->passed);
        const Nonlinearity crit = Nonlinearity::canonical(1.0, 4.0, 1.0);
        const HypothesisReport halved = check_hypotheses(crit.with_kappa(0.5 * crit.kappa()));
        const HypothesisCheck* growth = halved.find("growth_bound");
        b.holds("nonlinearity.halved_kappa_fails_growth_bound", growth && !growth->passed);
        double worst = 0.0;
        for (double s = 0.05; s < 3.0; s *= 1.3) {
            const double h = 1e-5 * s;
            const double fd = (nl.F(s + h) - nl.F(s - h)) / (2.0 * h);
            worst = std::max(worst, std::abs(fd - nl.f(s)) / std::max(1e-12, std::abs(nl.f(s))));
        }
        b.at_most("nonlinearity.primitive_derivative", worst, 1e-6);
    });
}

void poisson_checks(Battery& b, std::mt19937_64& rng) {
    group(b, "poisson", [&] {
        const GaussianPoissonCheck c = gaussian_poisson_check(12.0, 4000);
        b.at_most("poisson.gaussian_phi", c.phi_max_rel_err, 1e-5);
        b.at_most("poisson.gaussian_coupling", c.coupling_rel_err, 1e-6);
        b.at_most("poisson.energy_consistency", c.energy_consistency, 1e-4);
        b.at_most("poisson.scaling_t_half", std::abs(c.scaling_half), 1e-3);
        b.at_most("poisson.scaling_t_two", std::abs(c.scaling_two), 1e-3);

        const GridPtr g = RadialGrid::make(20.0, 1000);
        double lin = 0.0, far = 0.0, c_fit = 0.0, phi_max = 0.0;
        bool shape = true;
        for (int k = 0; k < 20; ++k) {
            const RadialFunction u = random_profile(g, rng);
            const PoissonSolution p1 = solve_phi(u, 0.7), p2 = solve_phi(u, 2.1);
            for (int i = 0; i < u.size(); ++i) {
                lin = std::max(lin, std::abs(p2.phi[i] - 3.0 * p1.phi[i]) / std::abs(p2.phi[0]));
                if (p1.phi[i] < 0.0 || (i > 0 && p1.phi[i] > p1.phi[i - 1] * (1.0 + 1e-14))) shape = false;
            }
            std::vector<double> u2(u.size());
            for (int i = 0; i < u.size(); ++i) u2[i] = u[i] * u[i];
            const double charge = integrate(*g, u2) / (4.0 * std::numbers::pi);
            far = std::max(far, rel(g->radius() * p1.phi.back() / 0.7, charge));
            const double h1 = h1_norm_sq(u);
            c_fit = std::max(c_fit, T_value(u, 0.7) / (0.7 * h1 * h1));
            phi_max = std::max(phi_max, std::sqrt(p1.dirichlet_energy) / 0.7);
        }
        b.at_most("poisson.linearity_in_lambda", lin, 1e-14);
        b.at_most("poisson.far_field_charge", far, 1e-12);
        b.holds("poisson.phi_nonnegative_nonincreasing", shape);
        b.report("poisson.T_bound_constant", val(c_fit, "fitted"));
        b.report("poisson.phi_d12_per_lambda_max", val(phi_max, "computed"));
    });
}

void functional_checks(Battery& b, const Nonlinearity& nl, std::mt19937_64& rng) {
    group(b, "functionals", [&] {
        const GridPtr g = RadialGrid::make(20.0, 1000);
        std::uniform_real_distribution<double> lam(0.0, 2.0);
        double worst_grad = 0.0, worst_poh = 0.0;
        for (int k = 0; k < 20; ++k) {
            const RadialFunction u = random_profile(g, rng);
            // Sign-changing direction, zero at the Dirichlet node.
            const RadialFunction v1 = random_profile(g, rng), v2 = random_profile(g, rng);
            std::vector<double> vv(v1.size());
            for (int i = 0; i < v1.size(); ++i) vv[i] = v1[i] - 0.7 * v2[i];
            vv.back() = 0.0;
            const RadialFunction v = u.with_values(vv);
            const double l = lam(rng);
            const double eps = 1e-4;
            const double fd = (energy(u + eps * v, nl, l).Gamma_value - energy(u - eps * v, nl, l).Gamma_value) /
                              (2.0 * eps);
            const double pairing = gradient_residual(u, nl, l).pairing(v);
            worst_grad = std::max(worst_grad, std::abs(fd - pairing) / std::max(std::abs(fd), 1e-12));
            if (k < 5) {
                const PohozaevLambda ph = pohozaev_residual_lambda(u, nl, l);
                worst_poh = std::max(worst_poh, std::abs(ph.residual - dilation_derivative(u, nl, l)) / ph.scale);
            }
        }
        b.at_most("functionals.gradient_vs_finite_difference", worst_grad, 1e-5);
        b.at_most("functionals.pohozaev_vs_dilation_derivative", worst_poh, 1e-5);
        // P > 0 near the origin of H^1.
        double lowest = 1e300;
        for (int k = 0; k < 20; ++k) {
            const RadialFunction u = random_profile(g, rng);
            const RadialFunction small = (0.05 / std::sqrt(h1_norm_sq(u))) * u;
            lowest = std::min(lowest, pohozaev_P(small, nl) / grad_norm_sq(small));
        }
        b.at_least("functionals.pohozaev_positive_small_norm", lowest, 0.0);
    });
}

void limit_and_branch_checks(Battery& b, const RunConfig& cfg, const Nonlinearity& nl) {
    const GridPtr grid = RadialGrid::make(cfg.grid.R, cfg.grid.n);
    const SolveOptions sopts = solve_options(cfg);
    std::optional<SolutionBranch> branch;
    group(b, "limit_solver", [&] {
        branch = continuation(nl, grid, cfg.schedule.lambda, sopts, flow_options(cfg));
        const LimitGroundState& gs = branch->ground;
        const double M = gs.M_value, p = gs.p_value, bb = gs.b_value;
        b.at_most("limit_solver.constraint_V", std::abs(gs.V_of_u - 1.0), 1e-8);
        b.at_most("limit_solver.p_vs_M", std::abs(p - 2.0 * std::sqrt(3.0) / 9.0 * std::pow(M, 1.5)) / p, 1e-6);
        b.at_most("limit_solver.b_vs_grad", rel(bb, grad_norm_sq(gs.omega) / 3.0), 1e-4);
        b.at_most("limit_solver.b_vs_p", rel(bb, p), 1e-4);
        b.at_most("limit_solver.pohozaev", std::abs(gs.pohozaev_relative), 1e-4);
        b.at_most("limit_solver.path_argmax", std::abs(gs.b_argmax - 1.0), 1e-3);
        bool shape = true;
        for (int i = 1; i < gs.omega.size(); ++i)
            if (gs.omega[i] > gs.omega[i - 1] || (i < gs.omega.size() - 1 && !(gs.omega[i] > 0.0))) shape = false;
        b.holds("limit_solver.omega_positive_decreasing", shape);
        double spread = 0.0;
        for (unsigned k = 1; k <= 2; ++k) {
            const auto seed = static_cast<unsigned>(cfg.output.seed) + k;
            spread = std::max(spread, rel(minimize_on_M(nl, grid, flow_options(cfg, seed)).M_value, M));
        }
        b.at_most("limit_solver.restart_spread", spread, 1e-6);
        const double g0 = std::sqrt(grad_norm_sq(gs.u));
        b.at_most("limit_solver.cgm_energy", rel(energy(gs.omega, nl, 0.0).I_value, std::sqrt(6.0) / 18.0 * g0 * g0 * g0),
                  1e-5);
        double t0_scaling = 0.0;
        for (double t : {0.5, 2.0}) t0_scaling = std::max(t0_scaling, rel(T0_value(dilate(gs.omega, t)), t * T0_value(gs.omega)));
        b.at_most("functionals.T0_dilation_scaling", t0_scaling, 1e-6);
        b.at_most("limit_solver.dilation_energy_law", [&] {
            double worst = 0.0;
            const double gw = grad_norm_sq(gs.omega);
            for (double t = 0.2; t <= 2.0 + 1e-12; t += 0.2)
                worst = std::max(worst, std::abs(energy(dilate(gs.omega, t), nl, 0.0).I_value -
                                                 (t / 2.0 - t * t * t / 6.0) * gw) / bb);
            return worst;
        }(), 1e-4);
    });
    group(b, "limit_solver.shooting", [&] {
        for (double q : {3.0, 4.0, 5.0}) {
            const Nonlinearity f = Nonlinearity::canonical(1.0, q, 0.0);
            const LimitGroundState gs = minimize_on_M(f, grid, flow_options(cfg));
            const RadialFunction w = shoot_ground_state(f, grid, shooting_bracket(f, cfg.grid.R));
            const std::string tag = std::to_string(static_cast<int>(q));
            b.at_most("limit_solver.shooting_vs_flow_energy_q" + tag, rel(energy(w, f, 0.0).I_value, gs.p_value), 1e-3);
            double diff = 0.0, top = 0.0;
            for (int i = 0; i < w.size(); ++i) {
                diff = std::max(diff, std::abs(w[i] - gs.omega[i]));
                top = std::max(top, std::abs(gs.omega[i]));
            }
            b.at_most("limit_solver.shooting_vs_flow_sup_q" + tag, diff / top, 1e-2);
        }
    });
    if (!branch) return;
    group(b, "sp_solver", [&] {
        const SolutionBranch& br = *branch;
        double res = 0.0, poh = 0.0, cross = 0.0;
        for (const BranchPoint& p : br.points) {
            res = std::max(res, p.grad_residual_norm);
            poh = std::max(poh, std::abs(p.pohozaev_res));
            cross = std::max(cross, std::abs(p.pohozaev_res - p.dilation_slope));
        }
        b.at_most("sp_solver.residual_certificate", res, cfg.solver.tol);
        b.at_most("sp_solver.pohozaev_lambda", poh, 1e-3);
        b.at_most("sp_solver.pohozaev_vs_dilation_slope", cross, 1e-3);
        const BranchPoint zero = solve_at_lambda(br.omega_ref, nl, 0.0, sopts);
        b.at_most("sp_solver.lambda_zero_iterations", zero.iterations, 2);
        b.at_most("sp_solver.D_at_zero", rel(path_max_D(br.omega_ref, nl, 0.0, br.t0.t0).D, br.b_ref), 1e-6);
        b.at_most("sp_solver.I_at_t0_below_minus_two", br.t0.I_at_t0, -2.0);

        // %.17g text round trip reproduces the residual.
        std::vector<double> back;
        for (double x : br.points.back().u.values()) back.push_back(std::strtod(f17(x).c_str(), nullptr));
        const RadialFunction u2 = br.points.back().u.with_values(back);
        const double lam = br.points.back().lambda;
        b.holds("sp_solver.text_round_trip", gradient_residual(u2, nl, lam).dual_norm ==
                                                 gradient_residual(br.points.back().u, nl, lam).dual_norm);

        const SobolevResult S = sobolev_S(grid);
        const AsymptoticsReport rep = asymptotics_report(br, nl, S.S);
        b.holds("sp_solver.h1_dist_strictly_decreasing", rep.h1_monotone);
        b.within("sp_solver.phi_d12_slope", rep.phi_fit.slope, 0.8, 1.2);
        b.within("sp_solver.gamma_minus_b_slope", rep.gamma_fit.slope, 1.8, 2.2);
        b.within("sp_solver.D_minus_b_slope", rep.D_fit.slope, 1.8, 2.2);
        b.holds("sp_solver.gamma_below_D", rep.energy_ordering);
        b.holds("sp_solver.gamma_minus_b_decreasing", rep.gamma_monotone);
        b.holds("sp_solver.D_minus_b_decreasing", rep.D_monotone);
        b.holds("sp_solver.phi_d12_decreasing", rep.phi_monotone);
        bool signs = true, ceiling = true, argmax = true, budget = rep.lambda_0 > 0.0;
        for (std::size_t k = 0; k < br.points.size(); ++k) {
            const BranchPoint& p = br.points[k];
            for (int i = 0; i < p.u.size(); ++i) signs = signs && p.u[i] >= 0.0 && p.phi[i] >= 0.0;
            signs = signs && p.gamma_energy >= p.i_energy;
            ceiling = ceiling && p.D_lambda >= br.b_ref;
            if (k > 0) argmax = argmax && std::abs(p.D_argmax - 1.0) <= std::abs(br.points[k - 1].D_argmax - 1.0);
            if (p.lambda <= rep.lambda_0) budget = budget && rep.rows[k].within_budget;
        }
        b.holds("sp_solver.u_phi_nonnegative_gamma_above_I", signs);
        b.holds("sp_solver.D_above_b", ceiling);
        b.holds("sp_solver.D_argmax_approaches_one", argmax);
        b.holds("sp_solver.d_budget_below_lambda_0", budget);

        // Root t > 1 of (t/2 - t^3/6) A = -2 by Newton from t = 3.
        const double A = grad_norm_sq(br.omega_ref);
        double t = 3.0;
        for (int k = 0; k < 50; ++k) t -= ((t / 2.0 - t * t * t / 6.0) * A + 2.0) / ((0.5 - t * t / 2.0) * A);
        b.at_most("sp_solver.t_cross_vs_closed_form", rel(br.t0.t_cross, t), 0.05);
        b.at_most("sp_solver.gamma_at_t0_below_lambda_1",
                  energy(dilate(br.omega_ref, br.t0.t0), nl, 0.99 * br.lambda_1).Gamma_value, -2.0);
        b.report("sp_solver.gamma_minus_b_prefactor", val(rep.gamma_fit.prefactor, "fitted"));
        b.report("sp_solver.D_minus_b_prefactor", val(rep.D_fit.prefactor, "fitted"));
        b.report("sp_solver.d_budget", val(rep.d_budget, "derived"));
        b.report("sp_solver.lambda_0", val(rep.lambda_0, "heuristic"));
        b.report("sp_solver.lambda_1", val(br.lambda_1, "closed_form"));
    });
}

void constants_checks(Battery& b, const RunConfig& cfg, std::mt19937_64& rng) {
    group(b, "constants", [&] {
        const GridPtr grid = RadialGrid::make(cfg.grid.R, cfg.grid.n);
        const SobolevResult S = sobolev_S(grid);
        b.at_most("constants.sobolev_S", rel(S.S, sobolev_S_exact()), 1e-2);
        if (S.warning) b.report("constants.sobolev_warning", *S.warning);
        const CqResult c4 = best_Cq(4.0, grid);
        b.at_most("constants.Cq4_two_methods", std::abs(c4.from_identity - c4.from_descent) / c4.Cq, 1e-3);
        const GridPtr small = RadialGrid::make(20.0, 1000);
        double lowest = 1e300;
        for (int k = 0; k < 50; ++k) lowest = std::min(lowest, cq_quotient(random_profile(small, rng), 4.0));
        b.at_least("constants.Cq4_is_infimum", lowest / c4.Cq, 1.0 - 1e-6);
        const RadialFunction& w = c4.ground_state;
        const double psi_q2 = std::pow(norm_lq(w, 4.0), 2.0) / h1_norm_sq(w);
        b.at_most("constants.psi_test_vector", std::abs(psi_q2 * c4.Cq - 1.0), 1e-3);
        const auto gauss = RadialFunction::sample(grid, [](double r) { return std::exp(-0.5 * r * r); });
        b.at_most("constants.sobolev_quotient_dilation_invariant",
                  rel(sobolev_quotient(dilate(gauss, 1.5)), sobolev_quotient(gauss)), 1e-6);
        b.at_least("constants.gaussian_quotient_above_S", sobolev_quotient(gauss) - S.S, 0.0);
        b.at_most("constants.mu_threshold_spot_check", std::abs(mu_threshold(4.0, 1.0, 1.0) - 0.75), 1e-15);
        const double m0 = mu_threshold(3.0, S.S, c4.Cq);
        b.holds("constants.mu_threshold_monotone", mu_threshold(3.0, 1.01 * S.S, c4.Cq) < m0 &&
                                                       mu_threshold(3.0, S.S, 1.01 * c4.Cq) > m0);

        const double mu = 2.0 * mu_threshold(4.0, S.S, c4.Cq);
        const Nonlinearity crit = Nonlinearity::canonical(mu, 4.0, 1.0);
        const LimitGroundState gs = minimize_on_M(crit, grid, flow_options(cfg));
        const double bound = b_upper_bound(4.0, mu, c4.Cq);
        b.at_most("constants.b_below_upper_bound", gs.b_value / bound, 1.0);
        b.at_most("constants.p_below_sobolev_level", gs.p_value / (std::pow(S.S, 1.5) / 3.0), 1.0 - 1e-12);
        b.at_most("constants.M_below_sobolev_level", gs.M_value / (std::cbrt(6.0) / 2.0 * S.S), 1.0 - 1e-12);
        b.report("constants.mu_threshold_q4", val(mu / 2.0, "derived"));
    });
}

void convergence_checks(Battery& b, const RunConfig& cfg, const Nonlinearity& nl) {
    group(b, "grid_convergence", [&] {
        const GaussianPoissonCheck c1 = gaussian_poisson_check(12.0, 2000), c2 = gaussian_poisson_check(12.0, 4000);
        b.at_least("grid_convergence.poisson_phi_order", std::log2(c1.phi_max_rel_err / c2.phi_max_rel_err), 1.8);
        b.at_least("grid_convergence.poisson_coupling_order", std::log2(c1.coupling_rel_err / c2.coupling_rel_err),
                   1.8);
        const int n = cfg.grid.n;
        double M[3], p[3], bb[3];
        for (int k = 0; k < 3; ++k) {
            const int nk = k == 0 ? n / 2 : (k == 1 ? n : 2 * n);
            const LimitGroundState gs = minimize_on_M(nl, RadialGrid::make(cfg.grid.R, nk), flow_options(cfg));
            M[k] = gs.M_value;
            p[k] = gs.p_value;
            bb[k] = gs.b_value;
        }
        auto order = [](const double* v) { return std::log2(std::abs(v[0] - v[1]) / std::abs(v[1] - v[2])); };
        b.at_least("grid_convergence.M_order", order(M), 1.8);
        b.at_least("grid_convergence.p_order", order(p), 1.8);
        b.at_least("grid_convergence.b_order", order(bb), 1.8);
    });
}

} // namespace

json verify_battery(const RunConfig& cfg, bool& passed) {
    Battery b;
    std::mt19937_64 rng(cfg.output.seed);
    const Nonlinearity nl = make_nonlinearity(cfg);
    grid_checks(b);
    nonlinearity_checks(b, nl);
    poisson_checks(b, rng);
    functional_checks(b, nl, rng);
    limit_and_branch_checks(b, cfg, nl);
    constants_checks(b, cfg, rng);
    convergence_checks(b, cfg, nl);
    passed = b.passed();
    json out = b.result();
    out["nonlinearity"] = json{{"mu", val(cfg.nonlinearity.mu, "config")},
                               {"q", val(cfg.nonlinearity.q, "config")},
                               {"critical_weight", val(cfg.nonlinearity.critical_weight, "config")}};
    out["grid"] = json{{"R", val(cfg.grid.R, "config")}, {"n", val(cfg.grid.n, "config")}};
    return out;
}

} // namespace spgs::detail
