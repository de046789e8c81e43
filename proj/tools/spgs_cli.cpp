// Command-line front end. Talks to the solver only through the C API.
#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "spgs/spgs.h"

namespace fs = std::filesystem;

namespace {

struct ConfigHandle {
    spgs_config* p = nullptr;
    ~ConfigHandle() { spgs_config_free(p); }
};

struct ResultHandle {
    spgs_result* p = nullptr;
    ~ResultHandle() { spgs_result_free(p); }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// <base>/<subcommand>-<UTC time>-<pid>-<k>, created atomically by create_directory.
fs::path unique_run_dir(const fs::path& base, const std::string& subcommand) {
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", std::gmtime(&now));
    fs::create_directories(base);
    for (int k = 0;; ++k) {
        fs::path p = base / (subcommand + "-" + stamp + "-" + std::to_string(::getpid()) + "-" + std::to_string(k));
        if (fs::create_directory(p)) return p;
    }
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
}

void print_verify_table(const std::string& summary) {
    const auto j = nlohmann::json::parse(summary, nullptr, false);
    if (j.is_discarded() || !j.contains("checks")) return;
    for (const auto& c : j["checks"]) {
        std::printf("%s  %-48s measured=%-12.4g margin=%.4g\n", c["passed"].get<bool>() ? "PASS" : "FAIL",
                    c["name"].get<std::string>().c_str(),
                    c["measured"]["value"].is_number() ? c["measured"]["value"].get<double>() : NAN,
                    c["margin"].get<double>());
    }
    std::printf("%d of %d checks failed\n", j["checks_failed"].get<int>(), j["checks_total"].get<int>());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ground states of a Schrodinger-Poisson system with critical growth"};
    app.set_version_flag("--version", spgs_version());
    app.require_subcommand(1);
    app.fallthrough();  // global options may also follow the subcommand

    std::string config_path, out_dir;
    std::vector<std::string> overrides;
    bool grid_study = false, print_summary = false;
    app.add_option("-c,--config", config_path, "config file in [section] key = value form")->check(CLI::ExistingFile);
    app.add_option("-o,--out", out_dir, "output directory (default: a fresh directory per run)");
    app.add_option("-s,--set", overrides, "override one value, section.key=value");
    app.add_flag("--grid-study", grid_study, "rerun at n/2, n, 2n and report observed orders");
    app.add_flag("--print", print_summary, "print the JSON summary to stdout");

    double lambda = 0.0;
    std::vector<double> q_list;
    for (size_t i = 0; i < spgs_subcommand_count(); ++i) {
        const std::string name = spgs_subcommand_name(i);
        CLI::App* sub = app.add_subcommand(name);
        if (name == "solve") sub->add_option("--lambda", lambda, "coupling strength, >= 0")->required();
        if (name == "constants") sub->add_option("--q", q_list, "subcritical exponents in (2, 6)")->delimiter(',');
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : SPGS_ERR_CONFIG;
    }
    const std::string subcommand = app.get_subcommands().front()->get_name();

    try {
        ConfigHandle cfg;
        const std::string text = config_path.empty() ? std::string() : read_file(config_path);
        if (spgs_config_parse(text.c_str(), 1, &cfg.p) != SPGS_OK) {
            std::fprintf(stderr, "config error: %s\n", spgs_last_error());
            return SPGS_ERR_CONFIG;
        }
        for (const std::string& o : overrides) {
            const auto dot = o.find('.'), eq = o.find('=');
            if (dot == std::string::npos || eq == std::string::npos || dot > eq) {
                std::fprintf(stderr, "config error: --set expects section.key=value, got '%s'\n", o.c_str());
                return SPGS_ERR_CONFIG;
            }
            if (spgs_config_set(cfg.p, o.substr(0, dot).c_str(), o.substr(dot + 1, eq - dot - 1).c_str(),
                                o.substr(eq + 1).c_str()) != SPGS_OK) {
                std::fprintf(stderr, "config error: %s\n", spgs_last_error());
                return SPGS_ERR_CONFIG;
            }
        }

        spgs_run_options opts{};
        opts.has_lambda = subcommand == "solve";
        opts.lambda = lambda;
        if (!q_list.empty()) {
            opts.q_list = q_list.data();
            opts.q_count = q_list.size();
        }
        opts.grid_study = grid_study;

        ResultHandle res;
        const int rc = spgs_run(cfg.p, subcommand.c_str(), &opts, &res.p);
        if (!res.p) {
            std::fprintf(stderr, "error: %s\n", spgs_last_error());
            return rc;
        }

        fs::path dir;
        if (!out_dir.empty()) {
            dir = out_dir;
            fs::create_directories(dir);
        } else {
            const std::string base = spgs_config_output_directory(cfg.p);
            dir = unique_run_dir(base.empty() ? fs::path("spgs-runs") : fs::path(base), subcommand);
        }
        const std::string summary = spgs_result_summary(res.p);
        write_file(dir / "summary.json", summary + "\n");
        char* rendered = nullptr;
        if (spgs_config_render(cfg.p, &rendered) == SPGS_OK) {
            write_file(dir / "config.ini", rendered);
            spgs_string_free(rendered);
        }
        for (size_t i = 0; i < spgs_result_artifact_count(res.p); ++i)
            write_file(dir / spgs_result_artifact_name(res.p, i), spgs_result_artifact_content(res.p, i));

        if (print_summary) std::cout << summary << "\n";
        else if (subcommand == "verify") print_verify_table(summary);
        if (rc != SPGS_OK && !print_summary) std::fprintf(stderr, "%s\n", summary.c_str());
        std::fprintf(stderr, "%s: exit %d, output in %s\n", subcommand.c_str(), rc, dir.string().c_str());
        return rc;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return SPGS_ERR_INTERNAL;
    }
}
