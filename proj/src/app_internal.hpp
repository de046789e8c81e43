#pragma once

#include <cstdio>
#include <string>

#include <json.hpp>

#include "spgs/config.hpp"
#include "spgs/nonlinearity.hpp"
#include "spgs/radial_grid.hpp"
#include "spgs/limit_solver.hpp"
#include "spgs/sp_solver.hpp"

namespace spgs::detail {

using json = nlohmann::ordered_json;

/// Every emitted number carries where it came from.
inline json val(double v, const char* provenance) { return json{{"value", v}, {"provenance", provenance}}; }
inline json val(int v, const char* provenance) { return json{{"value", v}, {"provenance", provenance}}; }

inline std::string f17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline Nonlinearity make_nonlinearity(const RunConfig& c) {
    return Nonlinearity::canonical(c.nonlinearity.mu, c.nonlinearity.q, c.nonlinearity.critical_weight);
}

inline FlowOptions flow_options(const RunConfig& c, unsigned seed = 0) {
    FlowOptions o;
    o.tol = c.solver.tol;
    o.max_iter = c.solver.flow_max_iter;
    o.seed = seed;
    return o;
}

inline SolveOptions solve_options(const RunConfig& c) {
    SolveOptions o;
    o.tol = c.solver.tol;
    o.max_iter = c.solver.max_iter;
    o.damping_floor = c.solver.damping_floor;
    o.clip_budget = c.solver.clip_budget;
    return o;
}

struct GaussianPoissonCheck {
    double phi_max_rel_err = 0.0;  // over r in [0, 8]
    double coupling = 0.0;
    double coupling_exact = 0.0;
    double coupling_rel_err = 0.0;
    double energy_consistency = 0.0;
    double scaling_half = 0.0;  // ratio / t^5 - 1 at t = 1/2
    double scaling_two = 0.0;
};

/// u = exp(-r^2/2), lambda = 1 against phi = (sqrt(pi)/4) erf(r)/r.
GaussianPoissonCheck gaussian_poisson_check(double R, int n);

/// The invariant battery behind `verify`; sets `passed`.
json verify_battery(const RunConfig& cfg, bool& passed);

/// n/2, n, 2n values and observed order log2(|v1 - v2| / |v2 - v3|).
json order_entry(double v1, double v2, double v3);

} // namespace spgs::detail
