#include "riskcomp/robust_hl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>
#include <utility>

#include "riskcomp/mc.hpp"

namespace riskcomp::hl {

namespace {

// Pivot seed for the sequential variant, which takes no stream.
constexpr std::uint64_t kSequentialPivotSeed = 0x5eb0a9d3u;

/// kth (0-based) order statistic by Lomuto partition with random pivots;
/// every non-pivot element in a partition costs one comparison.
double quickselect_kth(std::vector<double>& values, std::size_t k, RngStream& stream,
                       CostLedger& ledger) {
  std::size_t lo = 0;
  std::size_t hi = values.size() - 1;
  for (;;) {
    if (lo == hi) return values[lo];
    const std::size_t pivot_idx =
        lo + static_cast<std::size_t>(stream.uniform_below(hi - lo + 1));
    std::swap(values[pivot_idx], values[hi]);
    const double pivot = values[hi];
    std::size_t store = lo;
    for (std::size_t i = lo; i < hi; ++i) {
      if (values[i] < pivot) {
        std::swap(values[i], values[store]);
        ++store;
      }
    }
    std::swap(values[store], values[hi]);
    ledger.charge(CostCategory::Comparison, hi - lo);
    if (store == k) return values[store];
    if (k < store)
      hi = store - 1;
    else
      lo = store + 1;
  }
}

/// Decode pair index t in [0, m(m-1)/2) to (i, j) with 0 <= i < j < m,
/// ordering index = j(j-1)/2 + i.
std::pair<std::int64_t, std::int64_t> decode_pair(std::int64_t t) {
  auto j = static_cast<std::int64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(t))) / 2.0);
  while (j * (j - 1) / 2 > t) --j;
  while ((j + 1) * j / 2 <= t) ++j;
  return {t - j * (j - 1) / 2, j};
}

double median_of(std::vector<double> values, RngStream& stream, CostLedger& ledger) {
  const std::size_t n = values.size();
  if (n % 2 == 1) return quickselect_kth(values, n / 2, stream, ledger);
  std::vector<double> copy = values;
  const double lower = quickselect_kth(copy, n / 2 - 1, stream, ledger);
  const double upper = quickselect_kth(values, n / 2, stream, ledger);
  return 0.5 * (lower + upper);
}

}  // namespace

const char* hl_variant_name(HlVariantKind kind) {
  switch (kind) {
    case HlVariantKind::Full:
      return "hl_full";
    case HlVariantKind::Subset:
      return "hl_subset";
    case HlVariantKind::Sample:
      return "hl_sample";
    case HlVariantKind::Sequential:
      return "hl_sequential";
  }
  return "unknown";
}

double quickselect_median(std::span<const double> values, RngStream& stream,
                          CostLedger& ledger) {
  if (values.empty()) throw std::invalid_argument("quickselect_median: empty input");
  return median_of(std::vector<double>(values.begin(), values.end()), stream, ledger);
}

double hl_full(std::span<const double> sample, RngStream& stream, CostLedger& ledger) {
  const auto n = static_cast<std::int64_t>(sample.size());
  if (n < 1) throw std::invalid_argument("hl_full: empty sample");
  std::vector<double> pair_means;
  pair_means.reserve(static_cast<std::size_t>(n * (n + 1) / 2));
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = i; j < n; ++j)
      pair_means.push_back(0.5 * (sample[static_cast<std::size_t>(i)] +
                                  sample[static_cast<std::size_t>(j)]));
  ledger.charge(CostCategory::DataLook, static_cast<std::uint64_t>(n * (n + 1)));
  return median_of(std::move(pair_means), stream, ledger);
}

double hl_subset(std::span<const double> sample, std::int64_t m, std::int64_t c,
                 RngStream& stream, CostLedger& ledger) {
  const auto n = static_cast<std::int64_t>(sample.size());
  if (m < 2 || m > n) throw std::invalid_argument("hl_subset: need 2 <= m <= n");
  const std::int64_t max_pairs = m * (m - 1) / 2;
  if (c < 2 || c % 2 != 0 || c / 2 > max_pairs)
    throw std::invalid_argument("hl_subset: need even c with 1 <= c/2 <= m(m-1)/2");
  const std::int64_t pairs = c / 2;

  // Floyd's algorithm keeps memory proportional to the number of pairs.
  std::unordered_set<std::int64_t> chosen;
  std::vector<std::int64_t> picks;
  picks.reserve(static_cast<std::size_t>(pairs));
  for (std::int64_t r = max_pairs - pairs; r < max_pairs; ++r) {
    const auto t = static_cast<std::int64_t>(
        stream.uniform_below(static_cast<std::uint64_t>(r) + 1));
    if (chosen.insert(t).second)
      picks.push_back(t);
    else {
      chosen.insert(r);
      picks.push_back(r);
    }
  }

  std::vector<double> pair_means;
  pair_means.reserve(picks.size());
  for (std::int64_t t : picks) {
    const auto [i, j] = decode_pair(t);
    pair_means.push_back(0.5 * (sample[static_cast<std::size_t>(i)] +
                                sample[static_cast<std::size_t>(j)]));
  }
  ledger.charge(CostCategory::DataLook, static_cast<std::uint64_t>(c));
  return median_of(std::move(pair_means), stream, ledger);
}

double hl_sample(std::span<const double> sample, std::int64_t c, RngStream& stream,
                 CostLedger& ledger) {
  const auto n = static_cast<std::int64_t>(sample.size());
  if (n < 2) throw std::invalid_argument("hl_sample: need n >= 2");
  if (c < 2 || c % 2 != 0) throw std::invalid_argument("hl_sample: need even c >= 2");
  const std::int64_t max_pairs = n * (n - 1) / 2;
  std::vector<double> pair_means;
  pair_means.reserve(static_cast<std::size_t>(c / 2));
  for (std::int64_t q = 0; q < c / 2; ++q) {
    const auto t =
        static_cast<std::int64_t>(stream.uniform_below(static_cast<std::uint64_t>(max_pairs)));
    const auto [i, j] = decode_pair(t);
    pair_means.push_back(0.5 * (sample[static_cast<std::size_t>(i)] +
                                sample[static_cast<std::size_t>(j)]));
  }
  ledger.charge(CostCategory::DataLook, static_cast<std::uint64_t>(c));
  return median_of(std::move(pair_means), stream, ledger);
}

double hl_sequential(std::span<const double> sample, std::int64_t c, CostLedger& ledger) {
  const auto n = static_cast<std::int64_t>(sample.size());
  if (c < 2 || c % 2 != 0 || c > n)
    throw std::invalid_argument("hl_sequential: need even c with 2 <= c <= n");
  std::vector<double> pair_means;
  pair_means.reserve(static_cast<std::size_t>(c / 2));
  for (std::int64_t i = 0; i + 1 < c; i += 2)
    pair_means.push_back(0.5 * (sample[static_cast<std::size_t>(i)] +
                                sample[static_cast<std::size_t>(i + 1)]));
  ledger.charge(CostCategory::DataLook, static_cast<std::uint64_t>(c));
  RngStream pivot_stream(kSequentialPivotSeed, 0);
  return median_of(std::move(pair_means), pivot_stream, ledger);
}

double mean_prefix(std::span<const double> sample, std::int64_t c, CostLedger& ledger) {
  const auto n = static_cast<std::int64_t>(sample.size());
  if (c < 1 || c > n) throw std::invalid_argument("mean_prefix: need 1 <= c <= n");
  double sum = 0.0;
  for (std::int64_t i = 0; i < c; ++i) sum += sample[static_cast<std::size_t>(i)];
  ledger.charge(CostCategory::DataLook, static_cast<std::uint64_t>(c));
  return sum / static_cast<double>(c);
}

HlResult run_hl_variant(std::span<const double> sample, const HlVariant& variant,
                        RngStream& stream) {
  HlResult result;
  switch (variant.kind) {
    case HlVariantKind::Full:
      result.estimate = hl_full(sample, stream, result.ledger);
      break;
    case HlVariantKind::Subset:
      result.estimate = hl_subset(sample, variant.subset_m, variant.budget_c, stream,
                                  result.ledger);
      break;
    case HlVariantKind::Sample:
      result.estimate = hl_sample(sample, variant.budget_c, stream, result.ledger);
      break;
    case HlVariantKind::Sequential:
      result.estimate = hl_sequential(sample, variant.budget_c, result.ledger);
      break;
  }
  return result;
}

namespace {

bool variant_feasible(HlVariantKind kind, std::int64_t c, std::int64_t n, std::int64_t m) {
  if (c < 2 || c % 2 != 0) return false;
  switch (kind) {
    case HlVariantKind::Sequential:
      return c <= n;
    case HlVariantKind::Subset:
      return c / 2 <= m * (m - 1) / 2;
    case HlVariantKind::Sample:
      return n >= 2;
    case HlVariantKind::Full:
      return true;
  }
  return false;
}

}  // namespace

std::vector<HlRow> hl_experiment(const HlExperimentConfig& config) {
  if (config.n < 2) throw std::invalid_argument("hl_experiment: need n >= 2");
  if (config.replicates < 2) throw std::invalid_argument("hl_experiment: need replicates >= 2");
  const std::int64_t m = config.subset_m > 0
                             ? config.subset_m
                             : static_cast<std::int64_t>(
                                   std::floor(std::sqrt(static_cast<double>(config.n))));

  const std::vector<double> truth{0.0};
  mc::McOptions mc_options;
  mc_options.threads = config.threads;

  std::vector<HlRow> rows;
  for (double alpha : config.alphas) {
    const auto sampler = [&, alpha](RngStream& stream) {
      return mc::sample_contaminated(stream, config.n, alpha);
    };
    const auto push_row = [&](const std::string& name, std::int64_t budget, auto&& estimator) {
      mc::MeanCost cost;
      const mc::RiskEstimate risk = mc::run_replicates(
          sampler, estimator, truth, config.replicates, config.master_seed, mc_options, &cost);
      rows.push_back({name, alpha, budget, cost.total, risk.mean_loss, risk.std_error,
                      risk.replicates});
    };

    if (config.include_mean) {
      for (std::int64_t c : config.budgets) {
        if (c < 1 || c > config.n) continue;
        push_row("mean", c,
                 [c](const std::vector<double>& sample, RngStream&, CostLedger& ledger) {
                   return std::vector<double>{mean_prefix(sample, c, ledger)};
                 });
      }
    }
    for (HlVariantKind kind : config.variants) {
      if (kind == HlVariantKind::Full) continue;  // budget-free; see include_full
      for (std::int64_t c : config.budgets) {
        if (!variant_feasible(kind, c, config.n, m)) continue;
        push_row(hl_variant_name(kind), c,
                 [kind, c, m](const std::vector<double>& sample, RngStream& stream,
                              CostLedger& ledger) {
                   double estimate = 0.0;
                   switch (kind) {
                     case HlVariantKind::Subset:
                       estimate = hl_subset(sample, m, c, stream, ledger);
                       break;
                     case HlVariantKind::Sample:
                       estimate = hl_sample(sample, c, stream, ledger);
                       break;
                     case HlVariantKind::Sequential:
                       estimate = hl_sequential(sample, c, ledger);
                       break;
                     case HlVariantKind::Full:
                       break;
                   }
                   return std::vector<double>{estimate};
                 });
      }
    }
    if (config.include_full) {
      push_row("hl_full", config.n * (config.n + 1),
               [](const std::vector<double>& sample, RngStream& stream, CostLedger& ledger) {
                 return std::vector<double>{hl_full(sample, stream, ledger)};
               });
    }
  }
  return rows;
}

}  // namespace riskcomp::hl
