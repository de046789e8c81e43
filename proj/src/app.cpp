#include "spgs/app.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "app_internal.hpp"
#include "spgs/constants.hpp"
#include "spgs/functionals.hpp"
#include "spgs/poisson.hpp"

namespace spgs {

const char* const kBranchCsvHeader =
    "lambda,gamma_energy,i_energy,h1_dist_to_omega,phi_d12_norm,pohozaev_residual,D_lambda,iterations,"
    "grad_residual_norm";

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::config_error: return exit_config;
    case ErrorCode::verification_failure: return exit_verification;
    case ErrorCode::internal: return exit_internal;
    default: return exit_solver;
    }
}

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"solve-limit", "solve", "sweep-lambda", "constants", "poisson-test",
                                                "verify"};
    return names;
}

namespace detail {

GaussianPoissonCheck gaussian_poisson_check(double R, int n) {
    const GridPtr g = RadialGrid::make(R, n);
    const auto u = RadialFunction::sample(g, [](double r) { return std::exp(-0.5 * r * r); });
    const PoissonSolution ps = solve_phi(u, 1.0);
    const double c = std::sqrt(std::numbers::pi) / 4.0;
    GaussianPoissonCheck out;
    const auto r = g->nodes();
    for (int i = 0; i < g->size() && r[i] <= 8.0; ++i) {
        // erf(r)/r -> 2/sqrt(pi) at the origin.
        const double exact = r[i] > 0.0 ? c * std::erf(r[i]) / r[i] : c * 2.0 / std::sqrt(std::numbers::pi);
        out.phi_max_rel_err = std::max(out.phi_max_rel_err, std::abs(ps.phi[i] - exact) / exact);
    }
    out.coupling = ps.coupling;
    out.coupling_exact = std::pow(std::numbers::pi, 1.5) / (2.0 * std::sqrt(2.0));
    out.coupling_rel_err = std::abs(ps.coupling - out.coupling_exact) / out.coupling_exact;
    out.energy_consistency =
        std::abs(ps.dirichlet_energy - ps.dirichlet_energy_direct) / std::abs(ps.dirichlet_energy);
    out.scaling_half = coupling_scaling_check(u, 1.0, 0.5) * 32.0 - 1.0;
    out.scaling_two = coupling_scaling_check(u, 1.0, 2.0) / 32.0 - 1.0;
    return out;
}

json order_entry(double v1, double v2, double v3) {
    json e{{"n_half", v1}, {"n", v2}, {"n_double", v3}};
    const double d1 = std::abs(v1 - v2), d2 = std::abs(v2 - v3);
    if (d1 > 0.0 && d2 > 0.0) e["observed_order"] = val(std::log2(d1 / d2), "derived");
    else e["observed_order"] = nullptr;
    return e;
}

} // namespace detail

namespace {

using detail::f17;
using detail::json;
using detail::val;

GridPtr make_grid(const RunConfig& c, int n) { return RadialGrid::make(c.grid.R, n); }

json nonlinearity_json(const Nonlinearity& nl) {
    return json{{"mu", val(nl.mu(), "config")},
                {"q", val(nl.q(), "config")},
                {"critical_weight", val(nl.critical_weight(), "config")},
                {"kappa", val(nl.kappa(), "computed")}};
}

json grid_json(double R, int n) { return json{{"R", val(R, "config")}, {"n", val(n, "config")}}; }

std::string csv_row(const BranchPoint& p) {
    std::ostringstream o;
    o << f17(p.lambda) << ',' << f17(p.gamma_energy) << ',' << f17(p.i_energy) << ',' << f17(p.h1_dist_to_omega)
      << ',' << f17(p.phi_d12) << ',' << f17(p.pohozaev_res) << ',' << f17(p.D_lambda) << ',' << p.iterations << ','
      << f17(p.grad_residual_norm) << '\n';
    return o.str();
}

std::string profile_csv(const BranchPoint& p) {
    std::ostringstream o;
    o << "r,u,phi\n";
    const auto r = p.u.grid().nodes();
    for (int i = 0; i < p.u.size(); ++i) o << f17(r[i]) << ',' << f17(p.u[i]) << ',' << f17(p.phi[i]) << '\n';
    return o.str();
}

json point_json(const BranchPoint& p) {
    return json{{"lambda", val(p.lambda, "config")},
                {"gamma_energy", val(p.gamma_energy, "computed")},
                {"i_energy", val(p.i_energy, "computed")},
                {"h1_dist_to_omega", val(p.h1_dist_to_omega, "computed")},
                {"phi_d12_norm", val(p.phi_d12, "computed")},
                {"pohozaev_residual", val(p.pohozaev_res, "computed")},
                {"dilation_slope", val(p.dilation_slope, "computed")},
                {"D_lambda", val(p.D_lambda, "computed")},
                {"D_argmax", val(p.D_argmax, "computed")},
                {"grad_residual_norm", val(p.grad_residual_norm, "computed")},
                {"iterations", p.iterations},
                {"dense_fallback", p.dense_fallback}};
}

json t0_json(const SolutionBranch& br) {
    const RadialFunction top = dilate(br.omega_ref, br.t0.t0);
    return json{{"t0", val(br.t0.t0, "computed")},
                {"t_cross", val(br.t0.t_cross, "computed")},
                {"I_at_t0", val(br.t0.I_at_t0, "computed")},
                {"t_max", val(br.t0.t_max, "heuristic")},
                {"monotone", br.t0.monotone},
                // max over the path t in [0, t0] of ||U_t||_{H^1}; the norm grows in t.
                {"path_h1_max", val(std::sqrt(h1_norm_sq(top)), "computed")},
                {"lambda_1", val(br.lambda_1, "closed_form")}};
}

// ---------------------------------------------------------------- solve-limit

json solve_limit(const RunConfig& cfg, int n, std::vector<Artifact>* artifacts) {
    const Nonlinearity nl = detail::make_nonlinearity(cfg);
    const GridPtr grid = make_grid(cfg, n);
    const LimitGroundState gs = minimize_on_M(nl, grid, detail::flow_options(cfg));

    const double M = gs.M_value, p = gs.p_value, b = gs.b_value;
    const double grad_omega = grad_norm_sq(gs.omega);
    json out{{"subcommand", "solve-limit"},
             {"method", to_string(gs.method)},
             {"nonlinearity", nonlinearity_json(nl)},
             {"grid", grid_json(cfg.grid.R, n)},
             {"M", val(M, "computed")},
             {"p", val(p, "computed")},
             {"b", val(b, "computed")},
             {"b_argmax", val(gs.b_argmax, "computed")},
             {"t0_dilation", val(gs.t0_dilation, "computed")},
             {"pohozaev_residual", val(gs.pohozaev_relative, "computed")},
             {"V_of_u", val(gs.V_of_u, "computed")},
             {"projected_gradient", val(gs.projected_gradient, "computed")},
             {"iterations", gs.iterations},
             {"tail_mass_fraction", val(tail_mass_fraction(gs.omega), "computed")}};
    out["identities"] = json{
        {"p_vs_M", val(std::abs(p - 2.0 * std::sqrt(3.0) / 9.0 * std::pow(M, 1.5)) / p, "derived")},
        {"b_vs_grad", val(std::abs(b - grad_omega / 3.0) / b, "derived")},
        {"b_vs_p", val(std::abs(b - p) / b, "derived")},
        {"path_argmax_offset", val(std::abs(gs.b_argmax - 1.0), "derived")}};
    if (!artifacts) return out;

    // Restarts from seeded perturbations of the initial bump.
    json restarts = json::array();
    double spread = 0.0;
    for (unsigned k = 1; k <= 2; ++k) {
        const unsigned seed = static_cast<unsigned>(cfg.output.seed) + k;
        try {
            const LimitGroundState r = minimize_on_M(nl, grid, detail::flow_options(cfg, seed));
            spread = std::max(spread, std::abs(r.M_value - M) / M);
            restarts.push_back(json{{"seed", seed}, {"M", val(r.M_value, "computed")}, {"iterations", r.iterations}});
        } catch (const Error& e) {
            restarts.push_back(json{{"seed", seed}, {"error", e.what()}});
        }
    }
    out["restarts"] = restarts;
    out["restart_spread"] = val(spread, "computed");

    // Independent shooting solve; only canonical cw = 0 is covered by the uniqueness argument.
    json shoot{{"advisory", nl.critical_weight() > 0.0}};
    try {
        const auto bracket = shooting_bracket(nl, cfg.grid.R);
        double a = 0.0;
        const RadialFunction w = shoot_ground_state(nl, grid, bracket, {}, &a);
        const double Iw = energy(w, nl, 0.0).I_value;
        shoot["central_value"] = val(a, "computed");
        shoot["I"] = val(Iw, "computed");
        shoot["relative_difference"] = val(std::abs(Iw - p) / p, "derived");
    } catch (const Error& e) {
        shoot["error"] = e.what();
    }
    out["shooting"] = shoot;

    std::ostringstream csv;
    csv << "r,omega\n";
    const auto r = grid->nodes();
    for (int i = 0; i < gs.omega.size(); ++i) csv << f17(r[i]) << ',' << f17(gs.omega[i]) << '\n';
    artifacts->push_back({"omega.csv", csv.str()});
    return out;
}

// ---------------------------------------------------------------- solve

BranchPoint solve_with_ramp(const SolutionBranch& br, const Nonlinearity& nl, double lambda,
                            const SolveOptions& opts, int& ramp_steps) {
    ramp_steps = 0;
    try {
        return solve_at_lambda(br.omega_ref, nl, lambda, opts, &br.omega_ref);
    } catch (const Error&) {
        if (lambda == 0.0) throw;
    }
    // Warm-started ramp from 0 to lambda.
    const int steps = 8;
    RadialFunction u = br.omega_ref;
    for (int k = 1; k < steps; ++k) u = solve_at_lambda(u, nl, lambda * k / steps, opts).u;
    ramp_steps = steps;
    return solve_at_lambda(u, nl, lambda, opts, &br.omega_ref);
}

json solve_one(const RunConfig& cfg, double lambda, int n, std::vector<Artifact>* artifacts) {
    const Nonlinearity nl = detail::make_nonlinearity(cfg);
    const SolutionBranch br =
        continuation(nl, make_grid(cfg, n), {}, detail::solve_options(cfg), detail::flow_options(cfg));
    int ramp = 0;
    BranchPoint pt = solve_with_ramp(br, nl, lambda, detail::solve_options(cfg), ramp);
    const PathMax d = path_max_D(br.omega_ref, nl, lambda, br.t0.t0);
    pt.D_lambda = d.D;
    pt.D_argmax = d.t_star;

    json out{{"subcommand", "solve"},
             {"nonlinearity", nonlinearity_json(nl)},
             {"grid", grid_json(cfg.grid.R, n)},
             {"b", val(br.b_ref, "computed")},
             {"point", point_json(pt)},
             {"ramp_steps", ramp},
             {"path", t0_json(br)}};
    if (!artifacts) return out;
    artifacts->push_back({"solve.csv", std::string(kBranchCsvHeader) + "\n" + csv_row(pt)});
    if (cfg.output.emit_profiles) artifacts->push_back({"profile.csv", profile_csv(pt)});
    return out;
}

// ---------------------------------------------------------------- sweep-lambda

json fit_json(const PowerFit& f) {
    return json{{"slope", val(f.slope, "fitted")}, {"prefactor", val(f.prefactor, "fitted")}, {"valid", f.valid}};
}

json sweep(const RunConfig& cfg, int n, std::vector<Artifact>* artifacts) {
    const Nonlinearity nl = detail::make_nonlinearity(cfg);
    const GridPtr grid = make_grid(cfg, n);
    const SolutionBranch br =
        continuation(nl, grid, cfg.schedule.lambda, detail::solve_options(cfg), detail::flow_options(cfg));
    json out{{"subcommand", "sweep-lambda"},
             {"nonlinearity", nonlinearity_json(nl)},
             {"grid", grid_json(cfg.grid.R, n)},
             {"b", val(br.b_ref, "computed")},
             {"path", t0_json(br)}};
    json pts = json::array();
    for (const BranchPoint& p : br.points) pts.push_back(point_json(p));
    out["points"] = pts;
    if (!artifacts) return out;

    const SobolevResult S = sobolev_S(grid);
    const AsymptoticsReport rep = asymptotics_report(br, nl, S.S);
    json sob{{"S", val(S.S, "computed")}, {"S_exact", val(sobolev_S_exact(), "closed_form")}};
    if (S.warning) sob["warning"] = *S.warning;
    out["sobolev"] = sob;
    out["asymptotics"] = json{{"h1_dist_fit", fit_json(rep.h1_fit)},
                              {"phi_d12_fit", fit_json(rep.phi_fit)},
                              {"gamma_minus_b_fit", fit_json(rep.gamma_fit)},
                              {"D_minus_b_fit", fit_json(rep.D_fit)},
                              {"h1_dist_decreasing", rep.h1_monotone},
                              {"phi_d12_decreasing", rep.phi_monotone},
                              {"gamma_minus_b_decreasing", rep.gamma_monotone},
                              {"D_minus_b_decreasing", rep.D_monotone},
                              {"gamma_below_D", rep.energy_ordering},
                              {"d_budget", val(rep.d_budget, "derived")},
                              {"lambda_0", val(rep.lambda_0, "heuristic")}};
    const UpwardProbe probe =
        probe_upward(br, nl, 2.0 * cfg.schedule.lambda.front(), 8, detail::solve_options(cfg));
    json pr{{"last_converged", val(probe.last_converged, "heuristic")},
            {"first_failed", val(probe.first_failed, "heuristic")}};
    if (!probe.failure.empty()) pr["failure"] = probe.failure;
    out["upward_probe"] = pr;

    std::string csv = std::string(kBranchCsvHeader) + "\n";
    for (const BranchPoint& p : br.points) csv += csv_row(p);
    artifacts->push_back({"sweep.csv", csv});
    if (cfg.output.emit_profiles)
        for (const BranchPoint& p : br.points) artifacts->push_back({"profile_lambda_" + f17(p.lambda) + ".csv", profile_csv(p)});
    return out;
}

// ---------------------------------------------------------------- constants

json constants(const RunConfig& cfg, const std::vector<double>& qs, int n, std::vector<Artifact>* artifacts) {
    const GridPtr grid = make_grid(cfg, n);
    const SobolevResult S = sobolev_S(grid);
    json out{{"subcommand", "constants"}, {"grid", grid_json(cfg.grid.R, n)}, {"S", val(S.S, "computed")}};
    json cq = json::object(), mt = json::object(), detail = json::object();
    std::string csv = "q,Cq,Cq_identity,Cq_descent,mu_threshold\n";
    for (double q : qs) {
        const CqResult c = best_Cq(q, grid);
        const double m = mu_threshold(q, S.S, c.Cq);
        const std::string key = f17(q);
        cq[key] = val(c.Cq, "computed");
        mt[key] = val(m, "derived");
        detail[key] = json{{"Cq_identity", val(c.from_identity, "computed")},
                           {"Cq_descent", val(c.from_descent, "computed")},
                           {"descent_iterations", c.descent_iterations}};
        csv += key + "," + f17(c.Cq) + "," + f17(c.from_identity) + "," + f17(c.from_descent) + "," + f17(m) + "\n";
    }
    out["Cq"] = cq;
    out["mu_threshold"] = mt;
    out["methods"] = json{
        {"S", "Aubin-Talenti bubble scan, golden section in the width, preconditioned descent polish"},
        {"Cq", "min of the ground-state identity ||w||_q^(q-2) and direct quotient descent from a Gaussian"},
        {"mu_threshold", "closed form in S and Cq"}};
    json sob{{"S_scan", val(S.S_scan, "computed")},
             {"S_exact", val(sobolev_S_exact(), "closed_form")},
             {"relative_error", val(std::abs(S.S - sobolev_S_exact()) / sobolev_S_exact(), "derived")},
             {"bubble_width", val(S.epsilon, "computed")},
             {"polish_steps", S.polish_steps}};
    if (S.warning) sob["warning"] = *S.warning;
    out["sobolev_detail"] = sob;
    out["Cq_detail"] = detail;
    if (artifacts) artifacts->push_back({"constants.csv", csv});
    return out;
}

// ---------------------------------------------------------------- poisson-test

constexpr double kPoissonR = 12.0;
constexpr int kPoissonN = 4000;

json poisson_test(int n, bool& passed) {
    const auto c = detail::gaussian_poisson_check(kPoissonR, n);
    passed = c.phi_max_rel_err <= 1e-5 && c.coupling_rel_err <= 1e-6 && std::abs(c.scaling_half) <= 1e-3 &&
             std::abs(c.scaling_two) <= 1e-3 && c.energy_consistency <= 1e-4;
    return json{{"subcommand", "poisson-test"},
                {"grid", grid_json(kPoissonR, n)},
                {"phi_max_rel_err", val(c.phi_max_rel_err, "computed")},
                {"coupling", val(c.coupling, "computed")},
                {"coupling_exact", val(c.coupling_exact, "closed_form")},
                {"coupling_rel_err", val(c.coupling_rel_err, "computed")},
                {"dirichlet_energy_consistency", val(c.energy_consistency, "computed")},
                {"scaling_t_half_rel_err", val(c.scaling_half, "computed")},
                {"scaling_t_two_rel_err", val(c.scaling_two, "computed")},
                {"passed", passed}};
}

// ---------------------------------------------------------------- grid study

double number(const json& j, const std::string& pointer) { return j.at(json::json_pointer(pointer)).at("value"); }

json grid_study(const RunConfig& cfg, const RunRequest& req) {
    const int base = req.subcommand == "poisson-test" ? kPoissonN : cfg.grid.n;
    const int ns[3] = {base / 2, base, 2 * base};
    std::vector<std::pair<std::string, std::string>> keys;
    std::function<json(int)> eval;
    bool ignored = false;
    if (req.subcommand == "solve-limit" || req.subcommand == "verify") {
        eval = [&](int n) { return solve_limit(cfg, n, nullptr); };
        keys = {{"M", "/M"}, {"p", "/p"}, {"b", "/b"}};
    } else if (req.subcommand == "solve") {
        eval = [&](int n) { return solve_one(cfg, req.lambda.value_or(0.0), n, nullptr); };
        keys = {{"gamma_energy", "/point/gamma_energy"}, {"i_energy", "/point/i_energy"}, {"D_lambda", "/point/D_lambda"}};
    } else if (req.subcommand == "sweep-lambda") {
        eval = [&](int n) { return sweep(cfg, n, nullptr); };
        const std::size_t last = cfg.schedule.lambda.size() - 1;
        keys = {{"b", "/b"},
                {"gamma_energy_first", "/points/0/gamma_energy"},
                {"gamma_energy_last", "/points/" + std::to_string(last) + "/gamma_energy"}};
    } else if (req.subcommand == "constants") {
        eval = [&](int n) { return constants(cfg, req.q_list, n, nullptr); };
        keys = {{"S", "/S"}};
        for (double q : req.q_list) keys.push_back({"Cq_q=" + f17(q), "/Cq/" + f17(q)});
    } else {
        eval = [&](int n) { return poisson_test(n, ignored); };
        keys = {{"phi_max_rel_err", "/phi_max_rel_err"}, {"coupling_rel_err", "/coupling_rel_err"}};
    }
    json runs[3];
    for (int k = 0; k < 3; ++k) runs[k] = eval(ns[k]);
    json study{{"n_values", {ns[0], ns[1], ns[2]}}};
    for (const auto& [name, ptr] : keys)
        study[name] = detail::order_entry(number(runs[0], ptr), number(runs[1], ptr), number(runs[2], ptr));
    if (req.subcommand == "verify") {
        // The Gaussian Poisson errors as well.
        json p[3];
        for (int k = 0; k < 3; ++k) p[k] = poisson_test(ns[k] * kPoissonN / cfg.grid.n, ignored);
        for (const char* name : {"phi_max_rel_err", "coupling_rel_err"})
            study[std::string("poisson_") + name] = detail::order_entry(
                number(p[0], std::string("/") + name), number(p[1], std::string("/") + name),
                number(p[2], std::string("/") + name));
    }
    return study;
}

json dispatch(const RunConfig& cfg, const RunRequest& req, std::vector<Artifact>& artifacts, int& exit_code) {
    exit_code = exit_ok;
    const std::string& s = req.subcommand;
    if (s == "solve-limit") return solve_limit(cfg, cfg.grid.n, &artifacts);
    if (s == "solve") {
        if (!req.lambda) fail(ErrorCode::config_error, "solve needs --lambda");
        const double l = *req.lambda;
        if (!std::isfinite(l) || l < 0.0) {
            std::ostringstream msg;
            msg << "lambda = " << l << " violates the precondition lambda >= 0";
            fail(ErrorCode::invalid_argument, msg.str());
        }
        return solve_one(cfg, l, cfg.grid.n, &artifacts);
    }
    if (s == "sweep-lambda") return sweep(cfg, cfg.grid.n, &artifacts);
    if (s == "constants") {
        if (req.q_list.empty()) fail(ErrorCode::config_error, "constants needs at least one q");
        for (double q : req.q_list)
            if (!(q > 2.0 && q < 6.0)) fail(ErrorCode::config_error, "q = " + f17(q) + " must lie in (2, 6)");
        return constants(cfg, req.q_list, cfg.grid.n, &artifacts);
    }
    if (s == "poisson-test") {
        bool passed = false;
        json out = poisson_test(kPoissonN, passed);
        std::string csv = "quantity,value,tolerance\n";
        for (const auto& [key, tol] : std::vector<std::pair<std::string, double>>{{"phi_max_rel_err", 1e-5},
                                                                                 {"coupling_rel_err", 1e-6},
                                                                                 {"dirichlet_energy_consistency", 1e-4},
                                                                                 {"scaling_t_half_rel_err", 1e-3},
                                                                                 {"scaling_t_two_rel_err", 1e-3}})
            csv += key + "," + f17(out.at(key).at("value")) + "," + f17(tol) + "\n";
        artifacts.push_back({"poisson.csv", csv});
        if (!passed) exit_code = exit_verification;
        return out;
    }
    if (s == "verify") {
        bool passed = false;
        json out = detail::verify_battery(cfg, passed);
        std::string csv = "name,measured,tolerance,margin,passed\n";
        auto num = [](const json& v) { return v.is_number() ? f17(v.get<double>()) : std::string("nan"); };
        for (const json& c : out.at("checks")) {
            const json& tol = c.at("tolerance");
            const std::string t = tol.is_array() ? num(tol[0]) + ":" + num(tol[1]) : num(tol);
            csv += c.at("name").get<std::string>() + "," + num(c.at("measured").at("value")) + "," + t + "," +
                   num(c.at("margin")) + "," + (c.at("passed").get<bool>() ? "1" : "0") + "\n";
        }
        artifacts.push_back({"verify.csv", csv});
        if (!passed) exit_code = exit_verification;
        return out;
    }
    fail(ErrorCode::config_error, "unknown subcommand '" + s + "'");
}

json failure_summary(const std::string& subcommand, const std::string& kind, const std::string& message) {
    return json{{"subcommand", subcommand},
                {"status", "error"},
                {"failures", json::array({json{{"kind", kind}, {"message", message}}})}};
}

} // namespace

RunOutcome run(const RunConfig& cfg, const RunRequest& req) {
    RunOutcome out;
    try {
        validate_config(cfg);
        json summary = dispatch(cfg, req, out.artifacts, out.exit_code);
        if (req.grid_study) summary["grid_study"] = grid_study(cfg, req);
        if (!summary.contains("status")) summary["status"] = out.exit_code == exit_ok ? "ok" : "failed";
        out.summary_json = summary.dump(2);
    } catch (const Error& e) {
        out.exit_code = exit_code_for(e.code());
        out.artifacts.clear();
        out.summary_json = failure_summary(req.subcommand, to_string(e.code()), e.what()).dump(2);
    } catch (const std::exception& e) {
        out.exit_code = exit_internal;
        out.artifacts.clear();
        out.summary_json = failure_summary(req.subcommand, "internal", e.what()).dump(2);
    }
    return out;
}

} // namespace spgs
