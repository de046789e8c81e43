#include "spgs/spgs.h"

#include <cstring>
#include <exception>
#include <string>

#include "spgs/app.hpp"
#include "spgs/config.hpp"
#include "spgs/error.hpp"
#include "spgs/functionals.hpp"
#include "spgs/limit_solver.hpp"
#include "spgs/nonlinearity.hpp"
#include "spgs/radial_grid.hpp"
#include "spgs/sp_solver.hpp"

struct spgs_config {
    spgs::RunConfig cfg;
};

struct spgs_result {
    spgs::RunOutcome outcome;
};

struct spgs_grid {
    spgs::GridPtr grid;
};

struct spgs_nonlinearity {
    spgs::Nonlinearity nl;
};

struct spgs_ground_state {
    spgs::Nonlinearity nl;
    spgs::LimitGroundState gs;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_kind;

int set_error(int status, const char* kind, const std::string& message) {
    g_kind = kind;
    g_error = message;
    return status;
}

// Maps exceptions to status codes; fn returns a status.
template <class Fn>
int guarded(Fn&& fn) noexcept {
    try {
        return fn();
    } catch (const spgs::Error& e) {
        return set_error(spgs::exit_code_for(e.code()), spgs::to_string(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(SPGS_ERR_INTERNAL, "internal", "out of memory");
    } catch (const std::exception& e) {
        return set_error(SPGS_ERR_INTERNAL, "internal", e.what());
    } catch (...) {
        return set_error(SPGS_ERR_INTERNAL, "internal", "unknown exception");
    }
}

int null_argument(const char* what) { return set_error(SPGS_ERR_CONFIG, "invalid_argument", std::string(what) + " is NULL"); }

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

extern "C" {

const char* spgs_version(void) { return "1.0.0"; }
const char* spgs_last_error(void) { return g_error.c_str(); }
const char* spgs_last_error_kind(void) { return g_kind.c_str(); }

int spgs_config_default(spgs_config** out) {
    if (!out) return null_argument("out");
    return guarded([&] {
        *out = new spgs_config{};
        return SPGS_OK;
    });
}

int spgs_config_parse(const char* text, int apply_env, spgs_config** out) {
    if (!out) return null_argument("out");
    *out = nullptr;
    return guarded([&] {
        spgs::RunConfig cfg = spgs::parse_config(text ? text : "");
        if (apply_env) spgs::apply_env_overrides(cfg);
        *out = new spgs_config{std::move(cfg)};
        return SPGS_OK;
    });
}

int spgs_config_set(spgs_config* cfg, const char* section, const char* key, const char* value) {
    if (!cfg || !section || !key || !value) return null_argument("config, section, key or value");
    return guarded([&] {
        spgs::RunConfig copy = cfg->cfg;
        spgs::set_config_value(copy, section, key, value);
        spgs::validate_config(copy);
        cfg->cfg = std::move(copy);
        return SPGS_OK;
    });
}

int spgs_config_render(const spgs_config* cfg, char** out) {
    if (!cfg || !out) return null_argument("config or out");
    return guarded([&] {
        *out = dup_string(spgs::render_config(cfg->cfg));
        return SPGS_OK;
    });
}

const char* spgs_config_output_directory(const spgs_config* cfg) {
    return cfg ? cfg->cfg.output.directory.c_str() : "";
}

void spgs_config_free(spgs_config* cfg) { delete cfg; }
void spgs_string_free(char* s) { delete[] s; }

size_t spgs_subcommand_count(void) { return spgs::subcommands().size(); }

const char* spgs_subcommand_name(size_t i) {
    const auto& names = spgs::subcommands();
    return i < names.size() ? names[i].c_str() : nullptr;
}

const char* spgs_branch_csv_header(void) { return spgs::kBranchCsvHeader; }

int spgs_run(const spgs_config* cfg, const char* subcommand, const spgs_run_options* opts, spgs_result** out) {
    if (!cfg || !subcommand || !out) return null_argument("config, subcommand or out");
    *out = nullptr;
    return guarded([&] {
        spgs::RunRequest req;
        req.subcommand = subcommand;
        if (opts) {
            if (opts->has_lambda) req.lambda = opts->lambda;
            if (opts->q_list) req.q_list.assign(opts->q_list, opts->q_list + opts->q_count);
            req.grid_study = opts->grid_study != 0;
        }
        auto* res = new spgs_result{spgs::run(cfg->cfg, req)};
        *out = res;
        if (res->outcome.exit_code != SPGS_OK) set_error(res->outcome.exit_code, "run", res->outcome.summary_json);
        return res->outcome.exit_code;
    });
}

int spgs_result_exit_code(const spgs_result* res) { return res ? res->outcome.exit_code : SPGS_ERR_CONFIG; }
const char* spgs_result_summary(const spgs_result* res) { return res ? res->outcome.summary_json.c_str() : ""; }
size_t spgs_result_artifact_count(const spgs_result* res) { return res ? res->outcome.artifacts.size() : 0; }

const char* spgs_result_artifact_name(const spgs_result* res, size_t i) {
    return res && i < res->outcome.artifacts.size() ? res->outcome.artifacts[i].name.c_str() : nullptr;
}

const char* spgs_result_artifact_content(const spgs_result* res, size_t i) {
    return res && i < res->outcome.artifacts.size() ? res->outcome.artifacts[i].content.c_str() : nullptr;
}

void spgs_result_free(spgs_result* res) { delete res; }

int spgs_grid_create(double R, int n, spgs_grid** out) {
    if (!out) return null_argument("out");
    *out = nullptr;
    return guarded([&] {
        *out = new spgs_grid{spgs::RadialGrid::make(R, n)};
        return SPGS_OK;
    });
}

int spgs_grid_size(const spgs_grid* grid) { return grid ? grid->grid->size() : 0; }

int spgs_grid_nodes(const spgs_grid* grid, double* r, size_t len) {
    if (!grid || !r) return null_argument("grid or r");
    if (len != static_cast<size_t>(grid->grid->size()))
        return set_error(SPGS_ERR_CONFIG, "invalid_argument", "buffer length differs from the grid size");
    const auto nodes = grid->grid->nodes();
    std::copy(nodes.begin(), nodes.end(), r);
    return SPGS_OK;
}

void spgs_grid_free(spgs_grid* grid) { delete grid; }

int spgs_nonlinearity_canonical(double mu, double q, double critical_weight, spgs_nonlinearity** out) {
    if (!out) return null_argument("out");
    *out = nullptr;
    return guarded([&] {
        *out = new spgs_nonlinearity{spgs::Nonlinearity::canonical(mu, q, critical_weight)};
        return SPGS_OK;
    });
}

int spgs_nonlinearity_eval(const spgs_nonlinearity* nl, double s, double* f, double* F) {
    if (!nl) return null_argument("nonlinearity");
    return guarded([&] {
        if (f) *f = nl->nl.f(s);
        if (F) *F = nl->nl.F(s);
        return SPGS_OK;
    });
}

double spgs_nonlinearity_kappa(const spgs_nonlinearity* nl) { return nl ? nl->nl.kappa() : 0.0; }
void spgs_nonlinearity_free(spgs_nonlinearity* nl) { delete nl; }

int spgs_ground_state_solve(const spgs_nonlinearity* nl, const spgs_grid* grid, spgs_ground_state** out) {
    if (!nl || !grid || !out) return null_argument("nonlinearity, grid or out");
    *out = nullptr;
    return guarded([&] {
        *out = new spgs_ground_state{nl->nl, spgs::minimize_on_M(nl->nl, grid->grid)};
        return SPGS_OK;
    });
}

int spgs_ground_state_levels(const spgs_ground_state* gs, double* M, double* p, double* b) {
    if (!gs) return null_argument("ground state");
    if (M) *M = gs->gs.M_value;
    if (p) *p = gs->gs.p_value;
    if (b) *b = gs->gs.b_value;
    return SPGS_OK;
}

int spgs_ground_state_omega(const spgs_ground_state* gs, double* values, size_t len) {
    if (!gs || !values) return null_argument("ground state or values");
    const auto v = gs->gs.omega.values();
    if (len != v.size()) return set_error(SPGS_ERR_CONFIG, "invalid_argument", "buffer length differs from the grid size");
    std::copy(v.begin(), v.end(), values);
    return SPGS_OK;
}

int spgs_ground_state_solve_lambda(const spgs_ground_state* gs, double lambda, double* gamma_energy,
                                   double* h1_dist_to_omega, double* grad_residual_norm) {
    if (!gs) return null_argument("ground state");
    return guarded([&] {
        const spgs::BranchPoint pt = spgs::solve_at_lambda(gs->gs.omega, gs->nl, lambda, {}, &gs->gs.omega);
        if (gamma_energy) *gamma_energy = pt.gamma_energy;
        if (h1_dist_to_omega) *h1_dist_to_omega = pt.h1_dist_to_omega;
        if (grad_residual_norm) *grad_residual_norm = pt.grad_residual_norm;
        return SPGS_OK;
    });
}

void spgs_ground_state_free(spgs_ground_state* gs) { delete gs; }

} // extern "C"
