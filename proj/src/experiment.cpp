#include "riskcomp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "riskcomp/expfam.hpp"
#include "riskcomp/matinv.hpp"
#include "riskcomp/normal_frontier.hpp"
#include "riskcomp/robust_hl.hpp"

namespace riskcomp::io {

const char* experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::NormalFrontier:
      return "normal-frontier";
    case ExperimentKind::ExpfamFrontier:
      return "expfam-frontier";
    case ExperimentKind::HodgesLehmann:
      return "hl";
    case ExperimentKind::MatInv:
      return "matinv";
  }
  return "unknown";
}

ExperimentKind experiment_from_name(const std::string& name) {
  if (name == "normal-frontier") return ExperimentKind::NormalFrontier;
  if (name == "expfam-frontier") return ExperimentKind::ExpfamFrontier;
  if (name == "hl") return ExperimentKind::HodgesLehmann;
  if (name == "matinv") return ExperimentKind::MatInv;
  throw std::invalid_argument("unknown experiment: " + name);
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  ExperimentConfig config;
  config.experiment = experiment_from_name(doc.at("experiment").get<std::string>());
  config.master_seed = doc.value("seed", std::uint64_t{0});
  config.replicates = doc.value("replicates", std::uint64_t{1000});
  config.format = doc.value("format", std::string{"csv"});
  config.output_path = doc.value("out", std::string{});
  if (doc.contains("params")) config.params = doc.at("params");
  return config;
}

namespace {

/// Integer list given either directly or as {"from","to","step"}.
std::vector<std::int64_t> parse_int_list(const nlohmann::json& node) {
  std::vector<std::int64_t> out;
  if (node.is_array()) {
    for (const auto& v : node) out.push_back(v.get<std::int64_t>());
    return out;
  }
  if (node.is_object()) {
    const auto from = node.at("from").get<std::int64_t>();
    const auto to = node.at("to").get<std::int64_t>();
    const auto step = node.value("step", std::int64_t{1});
    if (step < 1) throw std::invalid_argument("range step must be >= 1");
    for (std::int64_t v = from; v <= to; v += step) out.push_back(v);
    return out;
  }
  throw std::invalid_argument("expected an array or a from/to/step range");
}

std::vector<double> parse_real_list(const nlohmann::json& node) {
  std::vector<double> out;
  for (const auto& v : node) out.push_back(v.get<double>());
  return out;
}

struct Checker {
  std::vector<std::string> errors;
  const nlohmann::json& params;

  explicit Checker(const nlohmann::json& p) : params(p) {}

  void fail(const std::string& message) { errors.push_back(message); }

  void allow_keys(const std::set<std::string>& keys) {
    for (const auto& item : params.items())
      if (!keys.count(item.key())) fail("unknown config key: " + item.key());
  }

  bool has(const char* key) const { return params.contains(key); }

  template <class T>
  T get(const char* key, T fallback) const {
    return params.contains(key) ? params.at(key).get<T>() : fallback;
  }
};

nlohmann::json metadata_for(const ExperimentConfig& config) {
  nlohmann::json meta;
  meta["experiment"] = experiment_name(config.experiment);
  meta["params"] = config.params;
  meta["seed"] = config.master_seed;
  meta["replicates"] = config.replicates;
  meta["format"] = config.format;
  meta["version"] = kToolVersion;
  return meta;
}

// --- normal-frontier -------------------------------------------------------

void validate_normal(Checker& check) {
  check.allow_keys({"mode", "mu", "sigma2", "n", "budgets", "splits"});
  const double sigma2 = check.get("sigma2", 1.0);
  if (!(sigma2 > 0.0)) check.fail("sigma2 must be positive");
  const auto n = check.get<std::int64_t>("n", 100);
  if (n < 2) check.fail("n must be >= 2");
  const std::string mode = check.get<std::string>("mode", "frontier");
  if (mode != "frontier" && mode != "streaming")
    check.fail("mode must be 'frontier' or 'streaming'");
  if (mode == "frontier") {
    if (!check.has("budgets")) {
      check.fail("missing config key: budgets");
      return;
    }
    try {
      const auto budgets = parse_int_list(check.params.at("budgets"));
      if (budgets.empty()) check.fail("budgets must be non-empty");
      for (std::size_t i = 1; i < budgets.size(); ++i)
        if (budgets[i] < budgets[i - 1]) {
          check.fail("budgets must be sorted ascending");
          break;
        }
      for (std::int64_t budget : budgets)
        if (budget < 2 || budget > 2 * n) {
          check.fail("budget must be in [2, 2n]");
          break;
        }
    } catch (const std::exception& e) {
      check.fail(std::string("budgets: ") + e.what());
    }
  } else {
    if (!check.has("splits")) {
      check.fail("missing config key: splits");
      return;
    }
    try {
      const auto splits = parse_int_list(check.params.at("splits"));
      if (splits.empty()) check.fail("splits must be non-empty");
      for (std::int64_t s : splits)
        if (s < 2 || s > n - 1) {
          check.fail("s must be in [2, n-1]");
          break;
        }
    } catch (const std::exception& e) {
      check.fail(std::string("splits: ") + e.what());
    }
  }
}

ResultTable run_normal(const ExperimentConfig& config) {
  const Checker check(config.params);
  const normal::NormalParams params{check.get("mu", 0.0), check.get("sigma2", 1.0)};
  const auto n = check.get<std::int64_t>("n", 100);
  const std::string mode = check.get<std::string>("mode", "frontier");

  ResultTable table;
  if (mode == "streaming") {
    const auto splits = parse_int_list(config.params.at("splits"));
    table.columns = {"s", "risk_mu", "risk_sigma2", "risk_total", "asymptotic_risk"};
    table.types = {ColumnType::Int, ColumnType::Real, ColumnType::Real, ColumnType::Real,
                   ColumnType::Real};
    for (std::int64_t s : splits) {
      const auto [risk_mu, risk_sigma2] = normal::streaming_risks(params, n, s);
      const double p = static_cast<double>(s) / static_cast<double>(n);
      table.add_row({s, risk_mu, risk_sigma2, risk_mu + risk_sigma2,
                     normal::asymptotic_streaming_risk(params, n, p)});
    }
  } else {
    const auto budgets = parse_int_list(config.params.at("budgets"));
    const normal::FrontierCurve curve = normal::frontier(params, n, budgets);
    table.columns = {"budget", "n1", "n2", "n12", "risk", "risk_mu", "risk_sigma2"};
    table.types = {ColumnType::Int, ColumnType::Int, ColumnType::Int, ColumnType::Int,
                   ColumnType::Real, ColumnType::Real, ColumnType::Real};
    for (const auto& point : curve)
      table.add_row({point.budget, point.alloc.n1, point.alloc.n2, point.alloc.n12, point.risk,
                     point.risk_mu, point.risk_sigma2});
  }
  return table;
}

// --- expfam-frontier -------------------------------------------------------

expfam::FamilySpec family_by_name(const std::string& name) {
  if (name == "normal") return expfam::normal_family();
  if (name == "bernoulli") return expfam::bernoulli_family();
  if (name == "gamma") return expfam::gamma_family();
  throw std::invalid_argument("unknown family: " + name);
}

void validate_expfam(Checker& check) {
  check.allow_keys({"family", "tau", "target", "q", "n", "budgets", "unit_costs"});
  if (!check.has("family") || !check.has("tau") || !check.has("budgets")) {
    if (!check.has("family")) check.fail("missing config key: family");
    if (!check.has("tau")) check.fail("missing config key: tau");
    if (!check.has("budgets")) check.fail("missing config key: budgets");
    return;
  }
  try {
    expfam::FamilySpec family = family_by_name(check.params.at("family").get<std::string>());
    const auto tau = parse_real_list(check.params.at("tau"));
    if (static_cast<int>(tau.size()) != family.p) {
      check.fail("tau size must match the family dimension");
      return;
    }
    family.theta_of_tau(tau);  // domain check
    const std::string target = check.get<std::string>("target", "identity");
    if (target != "identity" && target != "mean-variance")
      check.fail("target must be 'identity' or 'mean-variance'");
    if (target == "mean-variance" && family.name != "normal")
      check.fail("target 'mean-variance' requires the normal family");
    if (check.has("unit_costs")) {
      const auto costs = parse_real_list(check.params.at("unit_costs"));
      if (static_cast<int>(costs.size()) != family.p)
        check.fail("unit_costs size must match the family dimension");
      for (double c : costs)
        if (!(c > 0.0)) check.fail("unit costs must be positive");
      if (costs.size() == static_cast<std::size_t>(family.p)) family.unit_costs = costs;
    }
    const auto n = check.get<std::int64_t>("n", 100);
    if (n < 1) check.fail("n must be >= 1");
    double min_cost = 0.0;
    for (double c : family.unit_costs) min_cost += c;
    for (double budget : parse_real_list(check.params.at("budgets")))
      if (budget < min_cost) {
        check.fail("budget must cover at least one sample per statistic");
        break;
      }
    if (check.has("q")) {
      const auto q = parse_real_list(check.params.at("q"));
      for (double w : q)
        if (w < 0.0) check.fail("q weights must be non-negative");
    }
  } catch (const std::exception& e) {
    check.fail(e.what());
  }
}

ResultTable run_expfam(const ExperimentConfig& config) {
  const Checker check(config.params);
  expfam::FamilySpec family = family_by_name(config.params.at("family").get<std::string>());
  const std::vector<double> tau = parse_real_list(config.params.at("tau"));
  if (check.has("unit_costs")) family.unit_costs = parse_real_list(config.params.at("unit_costs"));
  const std::string target_name = check.get<std::string>("target", "identity");
  expfam::TargetSpec target = target_name == "mean-variance"
                                  ? expfam::normal_mean_variance_target()
                                  : expfam::TargetSpec::identity(family.p);
  if (check.has("q")) target.q_weights = parse_real_list(config.params.at("q"));
  const auto n = check.get<std::int64_t>("n", 100);
  const std::vector<double> budgets = parse_real_list(config.params.at("budgets"));

  expfam::OptimizeOptions options;
  options.multistart_seed = config.master_seed;

  ResultTable table;
  table.columns = {"budget"};
  table.types = {ColumnType::Real};
  for (int k = 0; k < family.p; ++k) {
    table.columns.push_back("size_" + std::to_string(k + 1));
    table.types.push_back(ColumnType::Int);
  }
  for (int k = 0; k < family.p; ++k)
    for (int l = k + 1; l < family.p; ++l) {
      table.columns.push_back("overlap_" + std::to_string(k + 1) + "_" + std::to_string(l + 1));
      table.types.push_back(ColumnType::Int);
    }
  table.columns.push_back("cost");
  table.types.push_back(ColumnType::Real);
  table.columns.push_back("risk");
  table.types.push_back(ColumnType::Real);

  for (double budget : budgets) {
    const expfam::GeneralAllocation alloc =
        expfam::optimize_allocation(family, tau, target, budget, n, options);
    std::vector<Cell> row{budget};
    for (int k = 0; k < family.p; ++k) row.push_back(alloc.size(k));
    for (int k = 0; k < family.p; ++k)
      for (int l = k + 1; l < family.p; ++l) row.push_back(alloc.overlap(k, l));
    row.push_back(allocation_cost(alloc, family.unit_costs));
    row.push_back(expfam::allocation_risk(family, tau, alloc, target));
    table.add_row(std::move(row));
  }
  return table;
}

// --- hl ----------------------------------------------------------------------

const std::set<std::string> kHlVariantNames{"mean", "sequential", "sample", "subset", "full"};

void validate_hl(Checker& check, const ExperimentConfig& config) {
  check.allow_keys({"n", "alphas", "budgets", "variants", "subset_m"});
  const auto n = check.get<std::int64_t>("n", 2000);
  if (n < 2) check.fail("n must be >= 2");
  if (config.replicates < 2) check.fail("replicates must be >= 2");
  if (check.has("alphas")) {
    for (double alpha : parse_real_list(check.params.at("alphas")))
      if (!(alpha >= 0.0 && alpha <= 1.0)) {
        check.fail("alpha must be in [0,1]");
        break;
      }
  }
  bool any_pair_variant = true;
  if (check.has("variants")) {
    any_pair_variant = false;
    for (const auto& v : check.params.at("variants")) {
      const std::string name = v.get<std::string>();
      if (!kHlVariantNames.count(name)) check.fail("unknown variant: " + name);
      if (name == "sequential" || name == "sample" || name == "subset") any_pair_variant = true;
    }
  }
  if (!check.has("budgets")) {
    check.fail("missing config key: budgets");
    return;
  }
  try {
    const auto budgets = parse_int_list(check.params.at("budgets"));
    if (budgets.empty()) check.fail("budgets must be non-empty");
    for (std::int64_t c : budgets) {
      if (c < 1) {
        check.fail("budgets must be >= 1");
        break;
      }
      if (any_pair_variant && c % 2 != 0) {
        check.fail("pair budgets must be even");
        break;
      }
    }
  } catch (const std::exception& e) {
    check.fail(std::string("budgets: ") + e.what());
  }
  const auto subset_m = check.get<std::int64_t>("subset_m", 0);
  if (subset_m < 0 || subset_m > n) check.fail("subset_m must be in [0, n]");
}

ResultTable run_hl(const ExperimentConfig& config) {
  const Checker check(config.params);
  hl::HlExperimentConfig experiment;
  experiment.n = check.get<std::int64_t>("n", 2000);
  if (check.has("alphas")) experiment.alphas = parse_real_list(config.params.at("alphas"));
  experiment.budgets = parse_int_list(config.params.at("budgets"));
  experiment.replicates = config.replicates;
  experiment.master_seed = config.master_seed;
  experiment.subset_m = check.get<std::int64_t>("subset_m", 0);
  experiment.threads = config.threads;
  if (check.has("variants")) {
    experiment.include_mean = false;
    experiment.include_full = false;
    experiment.variants.clear();
    for (const auto& v : config.params.at("variants")) {
      const std::string name = v.get<std::string>();
      if (name == "mean")
        experiment.include_mean = true;
      else if (name == "full")
        experiment.include_full = true;
      else if (name == "sequential")
        experiment.variants.push_back(hl::HlVariantKind::Sequential);
      else if (name == "sample")
        experiment.variants.push_back(hl::HlVariantKind::Sample);
      else if (name == "subset")
        experiment.variants.push_back(hl::HlVariantKind::Subset);
    }
  }

  const std::vector<hl::HlRow> rows = hl::hl_experiment(experiment);
  ResultTable table;
  table.columns = {"variant", "alpha", "budget", "mean_cost", "risk", "risk_se", "replicates"};
  table.types = {ColumnType::Str,  ColumnType::Real, ColumnType::Int, ColumnType::Real,
                 ColumnType::Real, ColumnType::Real, ColumnType::Int};
  for (const auto& row : rows)
    table.add_row({row.variant, row.alpha, row.budget, row.mean_cost, row.risk, row.risk_se,
                   static_cast<std::int64_t>(row.replicates)});
  return table;
}

// --- matinv ------------------------------------------------------------------

const std::set<std::string> kMatinvMethodNames{"ns_safe", "ns_naive", "power_constant",
                                               "power_decreasing"};

void validate_matinv(Checker& check, const ExperimentConfig& config) {
  check.allow_keys({"rhos", "n_rows", "p", "methods", "ns_iters", "power_k", "deflation"});
  const auto p = check.get<std::int64_t>("p", 10);
  if (p < 2) check.fail("p must be >= 2");
  const auto n_rows = check.get<std::int64_t>("n_rows", 100);
  if (n_rows <= p) check.fail("n_rows must exceed p");
  if (check.has("rhos")) {
    for (double rho : parse_real_list(check.params.at("rhos")))
      if (!(rho >= 0.0 && rho < 1.0)) {
        check.fail("rho must be in [0,1)");
        break;
      }
  }
  if (check.has("methods")) {
    for (const auto& m : check.params.at("methods"))
      if (!kMatinvMethodNames.count(m.get<std::string>()))
        check.fail("unknown method: " + m.get<std::string>());
  }
  if (check.get<std::int64_t>("ns_iters", 20) < 1) check.fail("ns_iters must be >= 1");
  if (check.get<std::int64_t>("power_k", 200) < 1) check.fail("power_k must be >= 1");
  if (config.replicates < 2) check.fail("replicates must be >= 2");
  const std::string deflation = check.get<std::string>("deflation", "hotelling");
  if (deflation != "hotelling" && deflation != "literal")
    check.fail("deflation must be 'hotelling' or 'literal'");
}

ResultTable run_matinv(const ExperimentConfig& config) {
  const Checker check(config.params);
  matinv::MatinvExperimentConfig experiment;
  if (check.has("rhos")) experiment.rhos = parse_real_list(config.params.at("rhos"));
  experiment.n_rows = check.get<std::int64_t>("n_rows", 100);
  experiment.p = static_cast<int>(check.get<std::int64_t>("p", 10));
  experiment.ns_iters = static_cast<int>(check.get<std::int64_t>("ns_iters", 20));
  experiment.power_k = static_cast<int>(check.get<std::int64_t>("power_k", 200));
  experiment.datasets = config.replicates;
  experiment.master_seed = config.master_seed;
  experiment.threads = config.threads;
  if (check.get<std::string>("deflation", "hotelling") == "literal")
    experiment.deflation = matinv::DeflationMode::UnitLiteral;
  if (check.has("methods")) {
    experiment.methods.clear();
    for (const auto& m : config.params.at("methods")) {
      const std::string name = m.get<std::string>();
      if (name == "ns_safe") experiment.methods.push_back(matinv::Method::NewtonSchulzSafe);
      if (name == "ns_naive") experiment.methods.push_back(matinv::Method::NewtonSchulzNaive);
      if (name == "power_constant") experiment.methods.push_back(matinv::Method::PowerConstant);
      if (name == "power_decreasing")
        experiment.methods.push_back(matinv::Method::PowerDecreasing);
    }
  }

  const std::vector<matinv::Trajectory> trajectories = matinv::matinv_experiment(experiment);
  ResultTable table;
  table.columns = {"rho", "method", "checkpoint", "cost", "risk", "residual", "floor_risk"};
  table.types = {ColumnType::Real, ColumnType::Str,  ColumnType::Int, ColumnType::Real,
                 ColumnType::Real, ColumnType::Real, ColumnType::Real};
  for (const auto& trajectory : trajectories) {
    std::int64_t checkpoint = 0;
    for (const auto& point : trajectory.points) {
      table.add_row({trajectory.rho, trajectory.method, checkpoint, point.cost, point.risk,
                     point.residual, trajectory.floor_risk});
      ++checkpoint;
    }
  }
  return table;
}

}  // namespace

std::vector<std::string> validate(const ExperimentConfig& config) {
  Checker check(config.params);
  try {
    switch (config.experiment) {
      case ExperimentKind::NormalFrontier:
        validate_normal(check);
        break;
      case ExperimentKind::ExpfamFrontier:
        validate_expfam(check);
        break;
      case ExperimentKind::HodgesLehmann:
        validate_hl(check, config);
        break;
      case ExperimentKind::MatInv:
        validate_matinv(check, config);
        break;
    }
  } catch (const std::exception& e) {
    check.fail(e.what());
  }
  if (config.format != "csv" && config.format != "json")
    check.fail("format must be 'csv' or 'json'");
  return check.errors;
}

ResultTable run(const ExperimentConfig& config) {
  const std::vector<std::string> errors = validate(config);
  if (!errors.empty()) throw std::invalid_argument("invalid config: " + errors.front());

  ResultTable table;
  switch (config.experiment) {
    case ExperimentKind::NormalFrontier:
      table = run_normal(config);
      break;
    case ExperimentKind::ExpfamFrontier:
      table = run_expfam(config);
      break;
    case ExperimentKind::HodgesLehmann:
      table = run_hl(config);
      break;
    case ExperimentKind::MatInv:
      table = run_matinv(config);
      break;
  }
  table.metadata = metadata_for(config);
  if (!config.output_path.empty()) {
    const std::string content =
        config.format == "json" ? to_json_text(table) : to_csv(table);
    write_file(config.output_path, content);
  }
  return table;
}

}  // namespace riskcomp::io
