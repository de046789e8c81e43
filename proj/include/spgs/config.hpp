#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace spgs {

struct RunConfig {
    struct NonlinearitySection {
        double mu = 1.0;
        double q = 4.0;
        double critical_weight = 0.0;
        bool operator==(const NonlinearitySection&) const = default;
    } nonlinearity;

    struct GridSection {
        double R = 30.0;
        int n = 3000;
        bool operator==(const GridSection&) const = default;
    } grid;

    struct SolverSection {
        double tol = 1e-8;
        int max_iter = 100;
        double damping_floor = 1.0 / 1024.0;
        double clip_budget = 1e-8;
        int flow_max_iter = 20000;
        bool operator==(const SolverSection&) const = default;
    } solver;

    struct ScheduleSection {
        std::vector<double> lambda{0.2, 0.1, 0.05, 0.02, 0.01, 0.005};
        bool operator==(const ScheduleSection&) const = default;
    } schedule;

    struct OutputSection {
        std::string directory;  // empty: a fresh directory per run
        bool emit_profiles = false;
        std::uint64_t seed = 20240611;
        bool operator==(const OutputSection&) const = default;
    } output;

    bool operator==(const RunConfig&) const = default;
};

/// Reads `[section]` headers and `key = value` lines; `#` and `;` start comments.
/// Missing keys keep their defaults. Throws Error(config_error) with the line
/// number on unknown sections or keys, malformed values and range violations.
RunConfig parse_config(const std::string& text);

/// Applies SPGS_<SECTION>_<KEY> overrides, e.g. SPGS_GRID_N=1500. `lookup`
/// returns the variable's value if set; defaults to std::getenv.
void apply_env_overrides(RunConfig& cfg,
                         const std::function<std::optional<std::string>(const std::string&)>& lookup = {});

/// Sets one field from its textual value with the same checks as the parser.
void set_config_value(RunConfig& cfg, const std::string& section, const std::string& key, const std::string& value);

/// Range checks across all sections; throws Error(config_error).
void validate_config(const RunConfig& cfg);

/// Canonical text form; parse_config(render_config(c)) == c.
std::string render_config(const RunConfig& cfg);

} // namespace spgs
