#include <doctest.h>

#include <map>
#include <string>

#include "oracles.hpp"
#include "spgs/config.hpp"

using namespace spgs;

namespace {

std::string message_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::config_error);
        return e.what();
    }
    return "";
}

}

TEST_SUITE("config") {

TEST_CASE("defaults") {
    const RunConfig c = parse_config("");
    CHECK(c.grid.R == 30.0);
    CHECK(c.grid.n == 3000);
    CHECK(c.solver.tol == 1e-8);
    CHECK(c.schedule.lambda == std::vector<double>{0.2, 0.1, 0.05, 0.02, 0.01, 0.005});
    CHECK(c.nonlinearity.mu == 1.0);
    CHECK(c.nonlinearity.q == 4.0);
    CHECK(c == RunConfig{});
}

TEST_CASE("parsing") {
    const RunConfig c = parse_config(
        "# comment\n"
        "[nonlinearity]\n"
        "mu = 2.5   ; trailing comment\n"
        "q=3\n"
        "critical_weight = 1\n"
        "[grid]\n"
        "n = 1500\n"
        "[schedule]\n"
        "lambda = [0.4, 0.2, 0.1]\n"
        "[output]\n"
        "directory = \"runs # here\"\n"
        "emit_profiles = yes\n");
    CHECK(c.nonlinearity.mu == 2.5);
    CHECK(c.nonlinearity.q == 3.0);
    CHECK(c.nonlinearity.critical_weight == 1.0);
    CHECK(c.grid.n == 1500);
    CHECK(c.grid.R == 30.0);
    CHECK(c.schedule.lambda == std::vector<double>{0.4, 0.2, 0.1});
    CHECK(c.output.directory == "runs # here");
    CHECK(c.output.emit_profiles);
}

TEST_CASE("render round trip") {
    RunConfig c;
    c.nonlinearity.mu = 0.1 + 0.2;
    c.grid.R = 17.25;
    c.solver.tol = 3e-11;
    c.schedule.lambda = {1.0 / 3.0, 0.1, 1e-3};
    c.output.directory = "out dir";
    c.output.seed = 42;
    CHECK(parse_config(render_config(c)) == c);
    CHECK(parse_config(render_config(RunConfig{})) == RunConfig{});
}

TEST_CASE("errors carry line numbers") {
    CHECK(message_of("[grid]\nn = 3000\n[bogus]\n").find("line 3") != std::string::npos);
    CHECK(message_of("[grid]\nfoo = 1\n").find("line 2") != std::string::npos);
    CHECK(message_of("\n\n[grid]\nn = abc\n").find("line 4") != std::string::npos);
    CHECK(message_of("[nonlinearity]\nq = 6\n").find("line 2") != std::string::npos);
    CHECK(message_of("n = 5\n").find("line 1") != std::string::npos);
    CHECK(message_of("[grid\n").find("line 1") != std::string::npos);
    CHECK(message_of("[grid]\njunk\n").find("line 2") != std::string::npos);
    CHECK(message_of("[grid]\nR = -1\n").find("line 2") != std::string::npos);
    CHECK(message_of("[grid]\nn = 8\n").find("line 2") != std::string::npos);
    CHECK(message_of("[schedule]\nlambda = 0.1, 0.2\n").find("decreasing") != std::string::npos);
    CHECK(message_of("[schedule]\nlambda = 0.1, -0.2\n").find("line 2") != std::string::npos);
    CHECK(message_of("[output]\nemit_profiles = maybe\n").find("line 2") != std::string::npos);
    CHECK(message_of("[nonlinearity]\nmu = nan\n").find("line 2") != std::string::npos);
}

TEST_CASE("environment overrides") {
    RunConfig c;
    const std::map<std::string, std::string> env{{"SPGS_GRID_N", "1200"}, {"SPGS_NONLINEARITY_Q", "3.5"}};
    apply_env_overrides(c, [&](const std::string& k) -> std::optional<std::string> {
        const auto it = env.find(k);
        return it == env.end() ? std::nullopt : std::optional<std::string>(it->second);
    });
    CHECK(c.grid.n == 1200);
    CHECK(c.nonlinearity.q == 3.5);
    CHECK(c.grid.R == 30.0);

    RunConfig d;
    try {
        apply_env_overrides(d, [](const std::string& k) -> std::optional<std::string> {
            if (k == "SPGS_GRID_N") return "abc";
            return std::nullopt;
        });
        FAIL("expected a config error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::config_error);
        CHECK(std::string(e.what()).find("SPGS_GRID_N") != std::string::npos);
    }
}

TEST_CASE("set_config_value") {
    RunConfig c;
    set_config_value(c, "grid", "R", "12.5");
    CHECK(c.grid.R == 12.5);
    CHECK(oracle::error_code_of([&] { set_config_value(c, "grid", "nope", "1"); }) == ErrorCode::config_error);
    CHECK(oracle::error_code_of([&] { set_config_value(c, "nonlinearity", "q", "6"); }) == ErrorCode::config_error);
    RunConfig bad;
    bad.schedule.lambda.clear();
    CHECK(oracle::error_code_of([&] { validate_config(bad); }) == ErrorCode::config_error);
}

}
