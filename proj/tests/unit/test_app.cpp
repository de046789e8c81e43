#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>

#include "spgs/app.hpp"

using namespace spgs;
using json = nlohmann::json;

namespace {

RunOutcome run_sub(const std::string& sub, std::optional<double> lambda = std::nullopt, RunConfig cfg = {}) {
    RunRequest req;
    req.subcommand = sub;
    req.lambda = lambda;
    return run(cfg, req);
}

const Artifact* find(const RunOutcome& out, const std::string& name) {
    for (const Artifact& a : out.artifacts)
        if (a.name == name) return &a;
    return nullptr;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}

TEST_SUITE("app") {

TEST_CASE("subcommand list") {
    const auto& s = subcommands();
    for (const char* name : {"solve-limit", "solve", "sweep-lambda", "constants", "poisson-test", "verify"})
        CHECK(std::find(s.begin(), s.end(), name) != s.end());
}

TEST_CASE("exit codes") {
    CHECK(exit_code_for(ErrorCode::invalid_argument) == 2);
    CHECK(exit_code_for(ErrorCode::config_error) == 2);
    CHECK(exit_code_for(ErrorCode::stagnation) == 3);
    CHECK(exit_code_for(ErrorCode::non_convergence) == 3);
    CHECK(exit_code_for(ErrorCode::verification_failure) == 4);
    CHECK(exit_code_for(ErrorCode::internal) == 5);
}

TEST_CASE("negative lambda is a precondition error") {
    const RunOutcome out = run_sub("solve", -0.1);
    CHECK(out.exit_code == 2);
    const json j = json::parse(out.summary_json);
    CHECK(j["status"] == "error");
    CHECK(j["failures"][0]["kind"] == "invalid_argument");
    CHECK(j["failures"][0]["message"].get<std::string>().find("lambda") != std::string::npos);
}

TEST_CASE("solve without lambda and unknown subcommand") {
    CHECK(run_sub("solve").exit_code == 2);
    CHECK(run_sub("frobnicate").exit_code == 2);
}

TEST_CASE("poisson-test") {
    const RunOutcome out = run_sub("poisson-test");
    CHECK(out.exit_code == 0);
    const Artifact* csv = find(out, "poisson.csv");
    REQUIRE(csv != nullptr);
    CHECK(first_line(csv->content) == "quantity,value,tolerance");
    const json j = json::parse(out.summary_json);
    CHECK(j.contains("subcommand"));
}

TEST_CASE("sweep CSV header and determinism") {
    const RunOutcome a = run_sub("sweep-lambda"), b = run_sub("sweep-lambda");
    REQUIRE(a.exit_code == 0);
    const Artifact* csv = find(a, "sweep.csv");
    REQUIRE(csv != nullptr);
    CHECK(first_line(csv->content) == kBranchCsvHeader);
    CHECK(std::string(kBranchCsvHeader) ==
          "lambda,gamma_energy,i_energy,h1_dist_to_omega,phi_d12_norm,pohozaev_residual,D_lambda,iterations,"
          "grad_residual_norm");
    // One row per schedule entry.
    std::istringstream in(csv->content);
    std::string line;
    int rows = -1;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 6);
    REQUIRE(a.artifacts.size() == b.artifacts.size());
    for (std::size_t i = 0; i < a.artifacts.size(); ++i) CHECK(a.artifacts[i].content == b.artifacts[i].content);
}

TEST_CASE("solve writes the branch header") {
    const RunOutcome out = run_sub("solve", 0.05);
    REQUIRE(out.exit_code == 0);
    const Artifact* csv = find(out, "solve.csv");
    REQUIRE(csv != nullptr);
    CHECK(first_line(csv->content) == kBranchCsvHeader);
    const json j = json::parse(out.summary_json);
    CHECK(j.dump().find("provenance") != std::string::npos);
}

}
