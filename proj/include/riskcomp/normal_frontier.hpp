#ifndef RISKCOMP_NORMAL_FRONTIER_HPP
#define RISKCOMP_NORMAL_FRONTIER_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "riskcomp/cost_model.hpp"
#include "riskcomp/linalg.hpp"

namespace riskcomp::normal {

struct NormalParams {
  double mu = 0.0;
  double sigma2 = 1.0;  // > 0
};

/// Moment sums over the two index sets: m1 = sum of X over S1,
/// m2 = sum of X^2 over S2.
struct MomentSums {
  double m1 = 0.0;
  double m2 = 0.0;
  std::int64_t n1_eff = 0;  // |S1|
  std::int64_t n2_eff = 0;  // |S2|
};

struct Estimate {
  double mu_hat = 0.0;
  double sigma2_hat = 0.0;
};

/// Full-sample maximum-likelihood estimates (mean, mean-of-squares - mean^2).
/// Charges 2n data looks. Requires n >= 2.
Estimate mle_estimate(std::span<const double> sample, CostLedger& ledger);

/// Exact risk of the MLE pair: sigma^2/n + 2 sigma^4/n.
double mle_risk(const NormalParams& params, std::int64_t n);

/// One-pass split estimates: first s points feed the mean sum, the rest the
/// square sum. Unbiased variant; requires 2 <= s <= n-1. Charges n looks.
///
/// sigma2_hat = s/((s-1)(n-s)) * (M2 - (n-s)/s^2 * M1^2), the unique
/// unbiased combination of (M2, M1^2).
Estimate streaming_estimate(std::span<const double> sample, std::int64_t s, CostLedger& ledger);

/// Exact risks of the unbiased streaming pair:
///   R(mu_hat)     = sigma^2 / s
///   R(sigma2_hat) = (4 s n mu^2 sigma^2 + 2 (s(s-1)+n) sigma^4) / ((s-1)^2 (n-s))
std::pair<double, double> streaming_risks(const NormalParams& params, std::int64_t n,
                                          std::int64_t s);

/// Maximum-likelihood variant given the split statistics:
/// mu_hat = M1/s, sigma2_hat = M2/(n-s) - mu_hat^2. Requires 1 <= s <= n-1.
Estimate streaming_mle_estimate(std::span<const double> sample, std::int64_t s,
                                CostLedger& ledger);

/// Large-n risk of the streaming estimates at split fraction p in (0,1):
/// sigma^2 (4 mu^2 + 2 p sigma^2 - p + 1) / (n p (1-p)).
double asymptotic_streaming_risk(const NormalParams& params, std::int64_t n, double p);

/// Split fraction minimizing the asymptotic risk:
/// sqrt(4 mu^2 + 1) / (sqrt(4 mu^2 + 2 sigma^2) + sqrt(4 mu^2 + 1)).
double optimal_split_p(const NormalParams& params);

/// Estimates from an (n1, n2, n12) allocation: the first n1 samples feed
/// only the mean sum, the next n12 feed both sums, the next n2 only the
/// square sum. Charges n1 + n2 + 2 n12 looks.
Estimate mixed_estimate(std::span<const double> sample, const Allocation& alloc,
                        CostLedger& ledger);

/// Asymptotic covariance of (mu_hat, sigma2_hat) under the allocation:
///   var(mu)       = sigma^2 / (n1+n12)
///   cov           = -2 n2 mu sigma^2 / ((n1+n12)(n12+n2))
///   var(sigma2)   = (2 (n1+n12) sigma^4 + 4 (n1+n2) mu^2 sigma^2)
///                   / ((n1+n12)(n12+n2))
linalg::Matrix mixed_asymptotic_cov(const NormalParams& params, const Allocation& alloc);

/// Trace of mixed_asymptotic_cov.
double mixed_asymptotic_risk(const NormalParams& params, const Allocation& alloc);

/// Exhaustive integer minimizer of mixed_asymptotic_risk subject to
/// n1 + n2 + 2 n12 <= budget and n1 + n2 + n12 <= n. Ties break toward
/// larger n12, then larger n1, then smaller n2.
Allocation optimal_allocation(const NormalParams& params, std::int64_t n, std::int64_t budget);

/// Fast path for large n: optimizes the continuous split sizes under a
/// binding budget (closed form per branch), rounds, and repairs within a
/// small window. Same feasible set and tie-breaks as optimal_allocation.
Allocation optimal_allocation_relaxed(const NormalParams& params, std::int64_t n,
                                      std::int64_t budget);

struct FrontierPoint {
  std::int64_t budget = 0;
  Allocation alloc;
  double risk = 0.0;
  double risk_mu = 0.0;
  double risk_sigma2 = 0.0;
};

using FrontierCurve = std::vector<FrontierPoint>;

/// Optimal allocation and risk per budget. Budgets must be ascending;
/// the returned risks are non-increasing.
FrontierCurve frontier(const NormalParams& params, std::int64_t n,
                       std::span<const std::int64_t> budgets);

}  // namespace riskcomp::normal

#endif  // RISKCOMP_NORMAL_FRONTIER_HPP
