#ifndef RISKCOMP_EXPERIMENT_HPP
#define RISKCOMP_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "riskcomp/result_table.hpp"

namespace riskcomp::io {

enum class ExperimentKind { NormalFrontier, ExpfamFrontier, HodgesLehmann, MatInv };

const char* experiment_name(ExperimentKind kind);
ExperimentKind experiment_from_name(const std::string& name);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::NormalFrontier;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t master_seed = 0;
  std::uint64_t replicates = 1000;
  std::string output_path;        // empty -> no file written
  std::string format = "csv";     // csv | json
  unsigned threads = 1;           // not echoed in metadata; never affects results
};

/// Full config from a JSON document {"experiment", "seed", "replicates",
/// "format", "params"}. Unknown top-level keys are reported as errors by
/// validate, not here.
ExperimentConfig config_from_json(const nlohmann::json& doc);

/// Every range/feasibility problem in the config, without running anything.
/// Empty result means the config is runnable.
std::vector<std::string> validate(const ExperimentConfig& config);

/// Runs the configured experiment and, when output_path is set, writes the
/// table in the configured format. Deterministic given (config, seed).
ResultTable run(const ExperimentConfig& config);

}  // namespace riskcomp::io

#endif  // RISKCOMP_EXPERIMENT_HPP
