#include "doctest.h"

#include <stdexcept>

#include <cstdio>
#include <filesystem>
#include <string>

#include "riskcomp/experiment.hpp"
#include "riskcomp/result_table.hpp"

using namespace riskcomp;
using nlohmann::json;

namespace {

io::ExperimentConfig config_from(const char* text) {
  return io::config_from_json(json::parse(text));
}

bool has_error_containing(const std::vector<std::string>& errors, const std::string& needle) {
  for (const auto& error : errors)
    if (error.find(needle) != std::string::npos) return true;
  return false;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("validate surfaces range errors without running") {
  SUBCASE("streaming split out of range") {
    const auto config = config_from(
        R"({"experiment":"normal-frontier","params":{"mode":"streaming","n":100,"splits":[1]}})");
    CHECK(has_error_containing(io::validate(config), "s must be in [2, n-1]"));
  }
  SUBCASE("rho at the boundary") {
    const auto config = config_from(
        R"({"experiment":"matinv","params":{"rhos":[0.5,1.0]}})");
    CHECK(has_error_containing(io::validate(config), "rho must be in [0,1)"));
  }
  SUBCASE("valid configs produce no errors") {
    const auto frontier = config_from(
        R"({"experiment":"normal-frontier","params":{"mu":0,"sigma2":1,"n":100,"budgets":{"from":2,"to":200,"step":2}}})");
    CHECK(io::validate(frontier).empty());
    const auto matinv = config_from(
        R"({"experiment":"matinv","replicates":5,"params":{"rhos":[0.01],"n_rows":50}})");
    CHECK(io::validate(matinv).empty());
  }
  SUBCASE("unknown keys are named") {
    const auto config = config_from(
        R"({"experiment":"normal-frontier","params":{"n":100,"budgets":[4],"bogus":1}})");
    CHECK(has_error_containing(io::validate(config), "unknown config key: bogus"));
  }
  SUBCASE("unsorted budgets rejected") {
    const auto config = config_from(
        R"({"experiment":"normal-frontier","params":{"n":100,"budgets":[10,4]}})");
    CHECK(has_error_containing(io::validate(config), "sorted ascending"));
  }
  SUBCASE("hl replicate floor and odd pair budgets") {
    const auto config = config_from(
        R"({"experiment":"hl","replicates":1,"params":{"n":100,"budgets":[3]}})");
    const auto errors = io::validate(config);
    CHECK(has_error_containing(errors, "replicates must be >= 2"));
    CHECK(has_error_containing(errors, "pair budgets must be even"));
  }
  SUBCASE("expfam tau outside the mean-value domain") {
    const auto config = config_from(
        R"({"experiment":"expfam-frontier","params":{"family":"normal","tau":[2.0,1.0],"budgets":[10]}})");
    CHECK(has_error_containing(io::validate(config), "implied variance"));
  }
  SUBCASE("unknown output format") {
    auto config = config_from(
        R"({"experiment":"normal-frontier","format":"xml","params":{"n":10,"budgets":[4]}})");
    CHECK(has_error_containing(io::validate(config), "format must be 'csv' or 'json'"));
  }
}

TEST_CASE("normal-frontier run produces the documented table") {
  const auto config = config_from(
      R"({"experiment":"normal-frontier","seed":5,
          "params":{"mu":0,"sigma2":1,"n":100,"budgets":{"from":2,"to":200}}})");
  const io::ResultTable table = io::run(config);
  CHECK(table.columns ==
        std::vector<std::string>{"budget", "n1", "n2", "n12", "risk", "risk_mu", "risk_sigma2"});
  CHECK(table.rows.size() == 199);
  for (std::size_t i = 1; i < table.rows.size(); ++i)
    CHECK(std::get<double>(table.rows[i][4]) <= std::get<double>(table.rows[i - 1][4]));
  CHECK(table.metadata.at("version") == io::kToolVersion);
  CHECK(table.metadata.at("seed") == 5);
}

TEST_CASE("streaming mode emits closed-form risk rows") {
  const auto config = config_from(
      R"({"experiment":"normal-frontier",
          "params":{"mode":"streaming","mu":1,"sigma2":1,"n":100,"splits":[2,50,99]}})");
  const io::ResultTable table = io::run(config);
  CHECK(table.rows.size() == 3);
  CHECK(std::get<std::int64_t>(table.rows[1][0]) == 50);
  CHECK(std::get<double>(table.rows[1][1]) == doctest::Approx(0.02));
  CHECK(std::get<double>(table.rows[1][2]) == doctest::Approx(25100.0 / 120050.0));
}

TEST_CASE("expfam-frontier run reports allocations and costs") {
  const auto config = config_from(
      R"({"experiment":"expfam-frontier","seed":9,
          "params":{"family":"normal","tau":[1.0,2.0],"target":"mean-variance",
                    "n":60,"budgets":[10,40,120]}})");
  const io::ResultTable table = io::run(config);
  REQUIRE(table.rows.size() == 3);
  // mu = sigma2 = 1: everything goes to the shared block, cost = 2 n12.
  for (const auto& row : table.rows) {
    const double budget = std::get<double>(row[0]);
    const auto size1 = std::get<std::int64_t>(row[1]);
    const auto size2 = std::get<std::int64_t>(row[2]);
    const auto overlap = std::get<std::int64_t>(row[3]);
    CHECK(size1 == size2);
    CHECK(overlap == size1);
    CHECK(std::get<double>(row[4]) <= budget);
  }
}

TEST_CASE("hl run returns one row per feasible cell") {
  const auto config = config_from(
      R"({"experiment":"hl","seed":3,"replicates":50,
          "params":{"n":60,"alphas":[0.05,0.1,0.2],"budgets":[10,20],
                    "variants":["mean","sequential","sample"]}})");
  const io::ResultTable table = io::run(config);
  CHECK(table.rows.size() == 18);  // 3 alphas x 2 budgets x 3 variants
}

TEST_CASE("run writes byte-identical files regardless of threads") {
  const std::string path_a = temp_path("riskcomp_det_a.csv");
  const std::string path_b = temp_path("riskcomp_det_b.csv");
  auto config = config_from(
      R"({"experiment":"hl","seed":11,"replicates":200,
          "params":{"n":80,"alphas":[0.1],"budgets":[20,40],"variants":["mean","sequential"]}})");
  config.output_path = path_a;
  config.threads = 1;
  io::run(config);
  config.output_path = path_b;
  config.threads = 4;
  io::run(config);
  CHECK(io::read_file(path_a) == io::read_file(path_b));
  std::remove(path_a.c_str());
  std::remove(path_b.c_str());
}

TEST_CASE("tables round-trip through csv and json") {
  const auto config = config_from(
      R"({"experiment":"hl","seed":21,"replicates":60,
          "params":{"n":50,"alphas":[0.2],"budgets":[10,20],"variants":["mean","sample"]}})");
  const io::ResultTable table = io::run(config);
  CHECK(io::parse_csv(io::to_csv(table)) == table);
  CHECK(io::parse_json_text(io::to_json_text(table)) == table);
}

TEST_CASE("matinv run emits trajectories with the documented schema") {
  const auto config = config_from(
      R"({"experiment":"matinv","seed":2,"replicates":5,
          "params":{"rhos":[0.01],"n_rows":40,"ns_iters":10,"power_k":50,
                    "methods":["ns_safe","power_constant"]}})");
  const io::ResultTable table = io::run(config);
  CHECK(table.columns == std::vector<std::string>{"rho", "method", "checkpoint", "cost", "risk",
                                                  "residual", "floor_risk"});
  // ns_safe: init + 10 iterations; power_constant: 10 eigenvector checkpoints.
  CHECK(table.rows.size() == 11 + 10);
}

TEST_CASE("run rejects invalid configs with an exception") {
  const auto config = config_from(
      R"({"experiment":"normal-frontier","params":{"n":100,"budgets":[999]}})");
  CHECK_THROWS_AS(io::run(config), std::invalid_argument);
}

TEST_CASE("real formatting preserves doubles exactly") {
  for (double value : {0.1, 1.0 / 3.0, 25100.0 / 120050.0, 1e-300, -0.0, 12345678.909876}) {
    CHECK(std::stod(io::format_real(value)) == value);
  }
}
