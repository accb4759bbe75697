// riskcomp: budgeted-estimator experiments from the command line.
//
// Subcommands: normal-frontier, expfam-frontier, hl, matinv, validate.
// Each run subcommand accepts --config FILE (JSON) plus flag overrides;
// exit codes: 0 success, 2 config error, 3 runtime error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "riskcomp/experiment.hpp"
#include "riskcomp/result_table.hpp"

namespace {

using nlohmann::json;

/// "a,b,c" -> [a,b,c]; "from:to[:step]" -> {"from","to","step"} range.
json parse_list_spec(const std::string& spec, bool integers) {
  const auto to_number = [&](const std::string& token) {
    return integers ? json(std::stoll(token)) : json(std::stod(token));
  };
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
      const std::size_t pos = spec.find(':', start);
      if (pos == std::string::npos) {
        parts.push_back(spec.substr(start));
        break;
      }
      parts.push_back(spec.substr(start, pos - start));
      start = pos + 1;
    }
    if (parts.size() < 2 || parts.size() > 3)
      throw std::invalid_argument("range must be from:to[:step]");
    json range;
    range["from"] = std::stoll(parts[0]);
    range["to"] = std::stoll(parts[1]);
    range["step"] = parts.size() == 3 ? std::stoll(parts[2]) : 1;
    return range;
  }
  json list = json::array();
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = spec.find(',', start);
    if (pos == std::string::npos) {
      list.push_back(to_number(spec.substr(start)));
      break;
    }
    list.push_back(to_number(spec.substr(start, pos - start)));
    start = pos + 1;
  }
  return list;
}

json parse_name_list(const std::string& spec) {
  json list = json::array();
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = spec.find(',', start);
    if (pos == std::string::npos) {
      list.push_back(spec.substr(start));
      break;
    }
    list.push_back(spec.substr(start, pos - start));
    start = pos + 1;
  }
  return list;
}

struct CommonFlags {
  std::string config_path;
  std::string out;
  std::string format;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::uint64_t replicates = 0;
  bool replicates_set = false;
  unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file; flags override its keys");
  cmd->add_option("--out", flags.out, "Output file path");
  cmd->add_option("--format", flags.format, "Output format: csv or json");
  cmd->add_option("--seed", flags.seed, "Master seed")->each([&](const std::string&) {
    flags.seed_set = true;
  });
  cmd->add_option("--replicates", flags.replicates, "Monte Carlo replicates")
      ->each([&](const std::string&) { flags.replicates_set = true; });
  cmd->add_option("--threads", flags.threads, "Worker threads (never changes results)");
}

json load_config_doc(const CommonFlags& flags, const std::string& experiment) {
  json doc;
  if (!flags.config_path.empty())
    doc = json::parse(riskcomp::io::read_file(flags.config_path));
  doc["experiment"] = experiment;
  if (!doc.contains("params")) doc["params"] = json::object();
  if (flags.seed_set) doc["seed"] = flags.seed;
  if (flags.replicates_set) doc["replicates"] = flags.replicates;
  if (!flags.format.empty()) doc["format"] = flags.format;
  if (!flags.out.empty()) doc["out"] = flags.out;
  return doc;
}

int run_config(const json& doc, unsigned threads) {
  riskcomp::io::ExperimentConfig config;
  try {
    config = riskcomp::io::config_from_json(doc);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  config.threads = threads;
  const std::vector<std::string> errors = riskcomp::io::validate(config);
  if (!errors.empty()) {
    for (const auto& error : errors) std::cerr << "config error: " << error << "\n";
    return 2;
  }
  try {
    const riskcomp::io::ResultTable table = riskcomp::io::run(config);
    if (config.output_path.empty())
      std::cout << riskcomp::io::to_csv(table);
    else
      std::cerr << "wrote " << table.rows.size() << " rows to " << config.output_path << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"risk-versus-computation experiments for budgeted estimators"};
  app.require_subcommand(1);

  // normal-frontier ----------------------------------------------------------
  auto* normal_cmd =
      app.add_subcommand("normal-frontier", "Optimal two-statistic allocations and risks");
  CommonFlags normal_flags;
  add_common(normal_cmd, normal_flags);
  std::string normal_mode, normal_budgets, normal_splits;
  double normal_mu = 0.0, normal_sigma2 = 0.0;
  std::int64_t normal_n = 0;
  normal_cmd->add_option("--mode", normal_mode, "frontier (default) or streaming");
  normal_cmd->add_option("--mu", normal_mu, "Population mean");
  normal_cmd->add_option("--sigma2", normal_sigma2, "Population variance");
  normal_cmd->add_option("--n", normal_n, "Sample size");
  normal_cmd->add_option("--budgets", normal_budgets, "Budgets: list a,b,c or range from:to:step");
  normal_cmd->add_option("--splits", normal_splits, "Streaming splits: list or range");

  // expfam-frontier ----------------------------------------------------------
  auto* expfam_cmd =
      app.add_subcommand("expfam-frontier", "Budgeted subset-statistic allocations");
  CommonFlags expfam_flags;
  add_common(expfam_cmd, expfam_flags);
  std::string expfam_family, expfam_tau, expfam_target, expfam_q, expfam_budgets, expfam_costs;
  std::int64_t expfam_n = 0;
  expfam_cmd->add_option("--family", expfam_family, "normal, bernoulli or gamma");
  expfam_cmd->add_option("--tau", expfam_tau, "Mean-value parameter, comma separated");
  expfam_cmd->add_option("--target", expfam_target, "identity or mean-variance");
  expfam_cmd->add_option("--q", expfam_q, "Component weights, comma separated");
  expfam_cmd->add_option("--n", expfam_n, "Sample size");
  expfam_cmd->add_option("--budgets", expfam_budgets, "Budgets: list or range");
  expfam_cmd->add_option("--unit-costs", expfam_costs, "Per-statistic costs, comma separated");

  // hl -------------------------------------------------------------------------
  auto* hl_cmd = app.add_subcommand("hl", "Budget-capped Hodges-Lehmann contamination study");
  CommonFlags hl_flags;
  add_common(hl_cmd, hl_flags);
  std::string hl_alphas, hl_budgets, hl_variants;
  std::int64_t hl_n = 0, hl_subset_m = -1;
  hl_cmd->add_option("--n", hl_n, "Sample size");
  hl_cmd->add_option("--alphas", hl_alphas, "Contamination levels, comma separated");
  hl_cmd->add_option("--budgets", hl_budgets, "Pair-look budgets: list or range");
  hl_cmd->add_option("--variants", hl_variants,
                     "Comma list from mean,sequential,sample,subset,full");
  hl_cmd->add_option("--subset-m", hl_subset_m, "Subset size (default floor(sqrt(n)))");

  // matinv ----------------------------------------------------------------------
  auto* matinv_cmd = app.add_subcommand("matinv", "Anytime matrix-inversion regression risk");
  CommonFlags matinv_flags;
  add_common(matinv_cmd, matinv_flags);
  std::string matinv_rhos, matinv_methods, matinv_deflation;
  std::int64_t matinv_n_rows = 0, matinv_p = 0, matinv_ns_iters = 0, matinv_power_k = 0;
  matinv_cmd->add_option("--rhos", matinv_rhos, "Design correlations, comma separated");
  matinv_cmd->add_option("--n-rows", matinv_n_rows, "Design rows");
  matinv_cmd->add_option("--p", matinv_p, "Design columns");
  matinv_cmd->add_option("--methods", matinv_methods,
                         "Comma list from ns_safe,ns_naive,power_constant,power_decreasing");
  matinv_cmd->add_option("--ns-iters", matinv_ns_iters, "Newton-Schulz iterations");
  matinv_cmd->add_option("--power-k", matinv_power_k, "Power-method schedule parameter");
  matinv_cmd->add_option("--deflation", matinv_deflation, "hotelling or literal");

  // validate ---------------------------------------------------------------------
  auto* validate_cmd = app.add_subcommand("validate", "Check a config file without running");
  std::string validate_path;
  validate_cmd->add_option("config", validate_path, "JSON config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (normal_cmd->parsed()) {
      json doc = load_config_doc(normal_flags, "normal-frontier");
      json& params = doc["params"];
      if (!normal_mode.empty()) params["mode"] = normal_mode;
      if (normal_cmd->count("--mu")) params["mu"] = normal_mu;
      if (normal_cmd->count("--sigma2")) params["sigma2"] = normal_sigma2;
      if (normal_cmd->count("--n")) params["n"] = normal_n;
      if (!normal_budgets.empty()) params["budgets"] = parse_list_spec(normal_budgets, true);
      if (!normal_splits.empty()) params["splits"] = parse_list_spec(normal_splits, true);
      return run_config(doc, normal_flags.threads);
    }
    if (expfam_cmd->parsed()) {
      json doc = load_config_doc(expfam_flags, "expfam-frontier");
      json& params = doc["params"];
      if (!expfam_family.empty()) params["family"] = expfam_family;
      if (!expfam_tau.empty()) params["tau"] = parse_list_spec(expfam_tau, false);
      if (!expfam_target.empty()) params["target"] = expfam_target;
      if (!expfam_q.empty()) params["q"] = parse_list_spec(expfam_q, false);
      if (expfam_cmd->count("--n")) params["n"] = expfam_n;
      if (!expfam_budgets.empty()) params["budgets"] = parse_list_spec(expfam_budgets, false);
      if (!expfam_costs.empty()) params["unit_costs"] = parse_list_spec(expfam_costs, false);
      return run_config(doc, expfam_flags.threads);
    }
    if (hl_cmd->parsed()) {
      json doc = load_config_doc(hl_flags, "hl");
      json& params = doc["params"];
      if (hl_cmd->count("--n")) params["n"] = hl_n;
      if (!hl_alphas.empty()) params["alphas"] = parse_list_spec(hl_alphas, false);
      if (!hl_budgets.empty()) params["budgets"] = parse_list_spec(hl_budgets, true);
      if (!hl_variants.empty()) params["variants"] = parse_name_list(hl_variants);
      if (hl_subset_m >= 0) params["subset_m"] = hl_subset_m;
      return run_config(doc, hl_flags.threads);
    }
    if (matinv_cmd->parsed()) {
      json doc = load_config_doc(matinv_flags, "matinv");
      json& params = doc["params"];
      if (!matinv_rhos.empty()) params["rhos"] = parse_list_spec(matinv_rhos, false);
      if (matinv_cmd->count("--n-rows")) params["n_rows"] = matinv_n_rows;
      if (matinv_cmd->count("--p")) params["p"] = matinv_p;
      if (!matinv_methods.empty()) params["methods"] = parse_name_list(matinv_methods);
      if (matinv_cmd->count("--ns-iters")) params["ns_iters"] = matinv_ns_iters;
      if (matinv_cmd->count("--power-k")) params["power_k"] = matinv_power_k;
      if (!matinv_deflation.empty()) params["deflation"] = matinv_deflation;
      return run_config(doc, matinv_flags.threads);
    }
    if (validate_cmd->parsed()) {
      riskcomp::io::ExperimentConfig config;
      try {
        config = riskcomp::io::config_from_json(
            json::parse(riskcomp::io::read_file(validate_path)));
      } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
      }
      const std::vector<std::string> errors = riskcomp::io::validate(config);
      if (errors.empty()) {
        std::cout << "ok\n";
        return 0;
      }
      for (const auto& error : errors) std::cerr << "config error: " << error << "\n";
      return 2;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
