#include "spgs/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "spgs/error.hpp"

namespace spgs {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[noreturn]] void bad(const std::string& where, const std::string& msg) {
    fail(ErrorCode::config_error, where.empty() ? msg : where + ": " + msg);
}

double parse_double(const std::string& where, const std::string& name, const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const char* end = t.data() + t.size();
    auto [p, ec] = std::from_chars(t.data(), end, v);
    if (t.empty() || ec != std::errc() || p != end || !std::isfinite(v))
        bad(where, "expected a finite number for " + name + ", got '" + t + "'");
    return v;
}

long long parse_int(const std::string& where, const std::string& name, const std::string& text) {
    const std::string t = trim(text);
    long long v = 0;
    const char* end = t.data() + t.size();
    auto [p, ec] = std::from_chars(t.data(), end, v);
    if (t.empty() || ec != std::errc() || p != end) bad(where, "expected an integer for " + name + ", got '" + t + "'");
    return v;
}

bool parse_bool(const std::string& where, const std::string& name, const std::string& text) {
    const std::string t = lower(trim(text));
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    bad(where, "expected true or false for " + name + ", got '" + trim(text) + "'");
}

std::string parse_string(const std::string& text) {
    std::string t = trim(text);
    if (t.size() >= 2 && t.front() == '"' && t.back() == '"') t = t.substr(1, t.size() - 2);
    return t;
}

std::vector<double> parse_list(const std::string& where, const std::string& name, const std::string& text) {
    std::vector<double> out;
    std::string t = trim(text);
    if (t.size() >= 2 && t.front() == '[' && t.back() == ']') t = t.substr(1, t.size() - 2);
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(where, name, item));
    return out;
}

void check_int_range(const std::string& where, const std::string& name, long long v, long long lo, long long hi) {
    if (v < lo || v > hi) bad(where, name + " = " + std::to_string(v) + " out of range [" + std::to_string(lo) + ", " +
                                         std::to_string(hi) + "]");
}

// Per-field range checks; `where` locates the offending line or variable.
void check_field(const RunConfig& c, const std::string& section, const std::string& key, const std::string& where) {
    const std::string name = section + "." + key;
    if (section == "nonlinearity") {
        if (key == "mu" && !(c.nonlinearity.mu > 0.0))
            bad(where, "mu = " + fmt(c.nonlinearity.mu) +
                           " out of range: the lower-bound coefficient mu must be > 0 for the existence result");
        if (key == "q" && !(c.nonlinearity.q > 2.0 && c.nonlinearity.q < 6.0))
            bad(where, "q = " + fmt(c.nonlinearity.q) +
                           " out of range: the subcritical exponent q must lie in the open interval (2, 6)");
        if (key == "critical_weight" && !(c.nonlinearity.critical_weight >= 0.0 && c.nonlinearity.critical_weight <= 1.0))
            bad(where, "critical_weight = " + fmt(c.nonlinearity.critical_weight) +
                           " out of range: the s^5 coefficient must lie in [0, 1]");
    } else if (section == "grid") {
        if (key == "R" && !(c.grid.R > 0.0)) bad(where, "R = " + fmt(c.grid.R) + " out of range: R must be > 0");
        if (key == "n" && c.grid.n < 16) bad(where, "n = " + std::to_string(c.grid.n) + " out of range: n must be >= 16");
    } else if (section == "solver") {
        if (key == "tol" && !(c.solver.tol > 0.0)) bad(where, "tol must be > 0");
        if (key == "damping_floor" && !(c.solver.damping_floor > 0.0 && c.solver.damping_floor <= 1.0))
            bad(where, "damping_floor must lie in (0, 1]");
        if (key == "clip_budget" && !(c.solver.clip_budget >= 0.0 && c.solver.clip_budget < 1.0))
            bad(where, "clip_budget must lie in [0, 1)");
    } else if (section == "schedule") {
        const auto& l = c.schedule.lambda;
        for (std::size_t i = 0; i < l.size(); ++i) {
            if (!(l[i] > 0.0)) bad(where, name + ": every lambda must be > 0, got " + fmt(l[i]));
            if (i > 0 && !(l[i] < l[i - 1])) bad(where, name + ": the schedule must be strictly decreasing");
        }
    }
}

struct Field {
    const char* section;
    const char* key;
};

constexpr std::array<Field, 14> kFields{{{"nonlinearity", "mu"},
                                         {"nonlinearity", "q"},
                                         {"nonlinearity", "critical_weight"},
                                         {"grid", "R"},
                                         {"grid", "n"},
                                         {"solver", "tol"},
                                         {"solver", "max_iter"},
                                         {"solver", "damping_floor"},
                                         {"solver", "clip_budget"},
                                         {"solver", "flow_max_iter"},
                                         {"schedule", "lambda"},
                                         {"output", "directory"},
                                         {"output", "emit_profiles"},
                                         {"output", "seed"}}};

void set_field(RunConfig& c, const std::string& section, const std::string& key, const std::string& value,
               const std::string& where) {
    const std::string name = section + "." + key;
    bool known_section = false;
    for (const Field& f : kFields) known_section = known_section || section == f.section;
    if (!known_section) bad(where, "unknown section [" + section + "]");

    if (section == "nonlinearity" && key == "mu") c.nonlinearity.mu = parse_double(where, name, value);
    else if (section == "nonlinearity" && key == "q") c.nonlinearity.q = parse_double(where, name, value);
    else if (section == "nonlinearity" && key == "critical_weight")
        c.nonlinearity.critical_weight = parse_double(where, name, value);
    else if (section == "grid" && key == "R") c.grid.R = parse_double(where, name, value);
    else if (section == "grid" && key == "n") {
        const long long n = parse_int(where, name, value);
        check_int_range(where, name, n, 16, 1000000);
        c.grid.n = static_cast<int>(n);
    } else if (section == "solver" && key == "tol") c.solver.tol = parse_double(where, name, value);
    else if (section == "solver" && key == "max_iter") {
        const long long v = parse_int(where, name, value);
        check_int_range(where, name, v, 1, 100000000);
        c.solver.max_iter = static_cast<int>(v);
    } else if (section == "solver" && key == "damping_floor") c.solver.damping_floor = parse_double(where, name, value);
    else if (section == "solver" && key == "clip_budget") c.solver.clip_budget = parse_double(where, name, value);
    else if (section == "solver" && key == "flow_max_iter") {
        const long long v = parse_int(where, name, value);
        check_int_range(where, name, v, 1, 100000000);
        c.solver.flow_max_iter = static_cast<int>(v);
    } else if (section == "schedule" && key == "lambda") c.schedule.lambda = parse_list(where, name, value);
    else if (section == "output" && key == "directory") c.output.directory = parse_string(value);
    else if (section == "output" && key == "emit_profiles") c.output.emit_profiles = parse_bool(where, name, value);
    else if (section == "output" && key == "seed") {
        const long long v = parse_int(where, name, value);
        if (v < 0) bad(where, "seed must be >= 0");
        c.output.seed = static_cast<std::uint64_t>(v);
    } else {
        bad(where, "unknown key '" + key + "' in section [" + section + "]");
    }
    check_field(c, section, key, where);
}

} // namespace

void set_config_value(RunConfig& cfg, const std::string& section, const std::string& key, const std::string& value) {
    set_field(cfg, section, key, value, "");
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = "line " + std::to_string(lineno);
        // Comments: '#' or ';' outside of a quoted string.
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (!quoted && (line[i] == '#' || line[i] == ';')) {
                line.resize(i);
                break;
            }
        }
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') bad(where, "malformed section header '" + t + "'");
            section = trim(t.substr(1, t.size() - 2));
            bool known = false;
            for (const Field& f : kFields) known = known || section == f.section;
            if (!known) bad(where, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) bad(where, "expected 'key = value', got '" + t + "'");
        if (section.empty()) bad(where, "key outside of any [section]");
        const std::string key = trim(t.substr(0, eq));
        set_field(cfg, section, key, t.substr(eq + 1), where);
    }
    validate_config(cfg);
    return cfg;
}

void apply_env_overrides(RunConfig& cfg,
                         const std::function<std::optional<std::string>(const std::string&)>& lookup) {
    auto get = [&](const std::string& name) -> std::optional<std::string> {
        if (lookup) return lookup(name);
        if (const char* v = std::getenv(name.c_str())) return std::string(v);
        return std::nullopt;
    };
    for (const Field& f : kFields) {
        std::string var = "SPGS_" + std::string(f.section) + "_" + f.key;
        std::transform(var.begin(), var.end(), var.begin(), [](unsigned char c) { return std::toupper(c); });
        if (auto v = get(var)) set_field(cfg, f.section, f.key, *v, "environment variable " + var);
    }
    validate_config(cfg);
}

void validate_config(const RunConfig& cfg) {
    for (const Field& f : kFields) check_field(cfg, f.section, f.key, "");
    if (cfg.schedule.lambda.empty()) bad("", "schedule.lambda must contain at least one value");
}

std::string render_config(const RunConfig& c) {
    std::ostringstream o;
    o << "[nonlinearity]\n"
      << "mu = " << fmt(c.nonlinearity.mu) << "\n"
      << "q = " << fmt(c.nonlinearity.q) << "\n"
      << "critical_weight = " << fmt(c.nonlinearity.critical_weight) << "\n\n"
      << "[grid]\n"
      << "R = " << fmt(c.grid.R) << "\n"
      << "n = " << c.grid.n << "\n\n"
      << "[solver]\n"
      << "tol = " << fmt(c.solver.tol) << "\n"
      << "max_iter = " << c.solver.max_iter << "\n"
      << "damping_floor = " << fmt(c.solver.damping_floor) << "\n"
      << "clip_budget = " << fmt(c.solver.clip_budget) << "\n"
      << "flow_max_iter = " << c.solver.flow_max_iter << "\n\n"
      << "[schedule]\n"
      << "lambda = ";
    for (std::size_t i = 0; i < c.schedule.lambda.size(); ++i) o << (i ? ", " : "") << fmt(c.schedule.lambda[i]);
    o << "\n\n"
      << "[output]\n"
      << "directory = \"" << c.output.directory << "\"\n"
      << "emit_profiles = " << (c.output.emit_profiles ? "true" : "false") << "\n"
      << "seed = " << c.output.seed << "\n";
    return o.str();
}

} // namespace spgs
