#ifndef RISKCOMP_ROBUST_HL_HPP
#define RISKCOMP_ROBUST_HL_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "riskcomp/cost_model.hpp"
#include "riskcomp/rng.hpp"

namespace riskcomp::hl {

enum class HlVariantKind { Full, Subset, Sample, Sequential };

const char* hl_variant_name(HlVariantKind kind);

struct HlVariant {
  HlVariantKind kind = HlVariantKind::Full;
  std::int64_t subset_m = 0;  // Subset only
  std::int64_t budget_c = 0;  // pair-look budget; even where applicable
};

struct HlResult {
  double estimate = 0.0;
  CostLedger ledger;
};

/// Median with element comparisons charged to the ledger. Random pivots
/// come from the stream; even length averages the two middle order
/// statistics (two selections, both counted).
double quickselect_median(std::span<const double> values, RngStream& stream, CostLedger& ledger);

/// Median of all pair means (X_i + X_j)/2 over unordered pairs including
/// i = j: n(n+1)/2 values, charged n(n+1) data looks.
double hl_full(std::span<const double> sample, RngStream& stream, CostLedger& ledger);

/// Median over c/2 distinct pairs sampled without replacement from the
/// m(m-1)/2 pairs of the first m samples. Charges c looks.
double hl_subset(std::span<const double> sample, std::int64_t m, std::int64_t c,
                 RngStream& stream, CostLedger& ledger);

/// Median over c/2 pairs sampled with replacement from the n(n-1)/2
/// distinct-index pairs. Charges c looks.
double hl_sample(std::span<const double> sample, std::int64_t c, RngStream& stream,
                 CostLedger& ledger);

/// Median of the fixed disjoint pairs (X1,X2), (X3,X4), ..., (X_{c-1},X_c).
/// Fully deterministic given the sample (pivot stream has a fixed seed).
/// Charges c looks.
double hl_sequential(std::span<const double> sample, std::int64_t c, CostLedger& ledger);

/// Mean of the first c points; charges c looks.
double mean_prefix(std::span<const double> sample, std::int64_t c, CostLedger& ledger);

/// Dispatch with a fresh ledger (single-shot use).
HlResult run_hl_variant(std::span<const double> sample, const HlVariant& variant,
                        RngStream& stream);

struct HlExperimentConfig {
  std::int64_t n = 2000;
  std::vector<double> alphas{0.05, 0.10, 0.20};
  std::vector<std::int64_t> budgets;  // even pair-look budgets
  std::uint64_t replicates = 1000;
  std::uint64_t master_seed = 0;
  std::vector<HlVariantKind> variants{HlVariantKind::Sequential, HlVariantKind::Sample,
                                      HlVariantKind::Subset};
  bool include_mean = true;
  bool include_full = false;
  std::int64_t subset_m = 0;  // 0 -> floor(sqrt(n))
  unsigned threads = 1;
};

struct HlRow {
  std::string variant;
  double alpha = 0.0;
  std::int64_t budget = 0;
  double mean_cost = 0.0;  // looks + comparisons, averaged over replicates
  double risk = 0.0;
  double risk_se = 0.0;
  std::uint64_t replicates = 0;
};

/// Monte Carlo risk/cost table over the contaminated mixture
/// (1-alpha) N(0,1) + alpha 4 t_3, truth 0. Infeasible (variant, budget)
/// combinations are skipped.
std::vector<HlRow> hl_experiment(const HlExperimentConfig& config);

}  // namespace riskcomp::hl

#endif  // RISKCOMP_ROBUST_HL_HPP
