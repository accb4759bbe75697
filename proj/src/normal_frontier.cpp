#include "riskcomp/normal_frontier.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace riskcomp::normal {

namespace {

void validate_params(const NormalParams& params) {
  if (!(params.sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
}

/// Accumulates the two moment sums for an (n1, n12, n2) prefix layout.
/// Shared by every estimator so that allocations which reduce to one
/// another produce bit-identical sums.
MomentSums accumulate(std::span<const double> sample, std::int64_t n1, std::int64_t n12,
                      std::int64_t n2) {
  MomentSums sums;
  std::size_t i = 0;
  for (std::int64_t k = 0; k < n1; ++k, ++i) sums.m1 += sample[i];
  for (std::int64_t k = 0; k < n12; ++k, ++i) {
    const double x = sample[i];
    sums.m1 += x;
    sums.m2 += x * x;
  }
  for (std::int64_t k = 0; k < n2; ++k, ++i) {
    const double x = sample[i];
    sums.m2 += x * x;
  }
  sums.n1_eff = n1 + n12;
  sums.n2_eff = n2 + n12;
  return sums;
}

}  // namespace

Estimate mle_estimate(std::span<const double> sample, CostLedger& ledger) {
  const auto n = static_cast<std::int64_t>(sample.size());
  if (n < 2) throw std::invalid_argument("mle_estimate: need n >= 2");
  const MomentSums sums = accumulate(sample, 0, n, 0);
  ledger.charge(CostCategory::DataLook, static_cast<std::uint64_t>(2 * n));
  const double mu_hat = sums.m1 / static_cast<double>(n);
  return {mu_hat, sums.m2 / static_cast<double>(n) - mu_hat * mu_hat};
}

double mle_risk(const NormalParams& params, std::int64_t n) {
  validate_params(params);
  if (n < 2) throw std::invalid_argument("mle_risk: need n >= 2");
  const double s2 = params.sigma2;
  return s2 / static_cast<double>(n) + 2.0 * s2 * s2 / static_cast<double>(n);
}

Estimate streaming_estimate(std::span<const double> sample, std::int64_t s,
                            CostLedger& ledger) {
  const auto n = static_cast<std::int64_t>(sample.size());
  if (s < 2 || s > n - 1)
    throw std::invalid_argument("streaming_estimate: s must be in [2, n-1]");
  const MomentSums sums = accumulate(sample, s, 0, n - s);
  ledger.charge(CostCategory::DataLook, static_cast<std::uint64_t>(n));
  const double sd = static_cast<double>(s);
  const double rest = static_cast<double>(n - s);
  const double mu_hat = sums.m1 / sd;
  const double sigma2_hat =
      sd / ((sd - 1.0) * rest) * (sums.m2 - rest / (sd * sd) * sums.m1 * sums.m1);
  return {mu_hat, sigma2_hat};
}

std::pair<double, double> streaming_risks(const NormalParams& params, std::int64_t n,
                                          std::int64_t s) {
  validate_params(params);
  if (s < 2 || s > n - 1)
    throw std::invalid_argument("streaming_risks: s must be in [2, n-1]");
  const double s2 = params.sigma2;
  const double mu2 = params.mu * params.mu;
  const double sd = static_cast<double>(s);
  const double nd = static_cast<double>(n);
  const double risk_mu = s2 / sd;
  const double risk_sigma2 =
      (4.0 * sd * nd * mu2 * s2 + 2.0 * (sd * (sd - 1.0) + nd) * s2 * s2) /
      ((sd - 1.0) * (sd - 1.0) * (nd - sd));
  return {risk_mu, risk_sigma2};
}

Estimate streaming_mle_estimate(std::span<const double> sample, std::int64_t s,
                                CostLedger& ledger) {
  const auto n = static_cast<std::int64_t>(sample.size());
  if (s < 1 || s > n - 1)
    throw std::invalid_argument("streaming_mle_estimate: s must be in [1, n-1]");
  const MomentSums sums = accumulate(sample, s, 0, n - s);
  ledger.charge(CostCategory::DataLook, static_cast<std::uint64_t>(n));
  const double mu_hat = sums.m1 / static_cast<double>(s);
  return {mu_hat, sums.m2 / static_cast<double>(n - s) - mu_hat * mu_hat};
}

double asymptotic_streaming_risk(const NormalParams& params, std::int64_t n, double p) {
  validate_params(params);
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("asymptotic_streaming_risk: p must be in (0,1)");
  const double s2 = params.sigma2;
  const double mu2 = params.mu * params.mu;
  return s2 * (4.0 * mu2 + 2.0 * p * s2 - p + 1.0) / (static_cast<double>(n) * p * (1.0 - p));
}

double optimal_split_p(const NormalParams& params) {
  validate_params(params);
  const double a = std::sqrt(4.0 * params.mu * params.mu + 1.0);
  const double b = std::sqrt(4.0 * params.mu * params.mu + 2.0 * params.sigma2);
  return a / (b + a);
}

Estimate mixed_estimate(std::span<const double> sample, const Allocation& alloc,
                        CostLedger& ledger) {
  const auto n = static_cast<std::int64_t>(sample.size());
  validate_allocation(alloc, n);
  if (alloc.n1 + alloc.n12 < 1 || alloc.n2 + alloc.n12 < 1)
    throw std::invalid_argument("mixed_estimate: both statistics need at least one sample");
  const MomentSums sums = accumulate(sample, alloc.n1, alloc.n12, alloc.n2);
  ledger.charge(CostCategory::DataLook, static_cast<std::uint64_t>(alloc.looks()));
  const double mu_hat = sums.m1 / static_cast<double>(sums.n1_eff);
  return {mu_hat, sums.m2 / static_cast<double>(sums.n2_eff) - mu_hat * mu_hat};
}

linalg::Matrix mixed_asymptotic_cov(const NormalParams& params, const Allocation& alloc) {
  validate_params(params);
  if (alloc.n1 < 0 || alloc.n2 < 0 || alloc.n12 < 0)
    throw std::invalid_argument("allocation counts must be non-negative");
  if (alloc.n1 + alloc.n12 < 1 || alloc.n2 + alloc.n12 < 1)
    throw std::invalid_argument("mixed_asymptotic_cov: degenerate allocation");
  const double a = static_cast<double>(alloc.n1 + alloc.n12);
  const double b = static_cast<double>(alloc.n2 + alloc.n12);
  const double s2 = params.sigma2;
  const double mu = params.mu;
  linalg::Matrix cov(2, 2);
  cov(0, 0) = s2 / a;
  cov(0, 1) = -2.0 * static_cast<double>(alloc.n2) * mu * s2 / (a * b);
  cov(1, 0) = cov(0, 1);
  cov(1, 1) = (2.0 * a * s2 * s2 +
               4.0 * static_cast<double>(alloc.n1 + alloc.n2) * mu * mu * s2) /
              (a * b);
  return cov;
}

double mixed_asymptotic_risk(const NormalParams& params, const Allocation& alloc) {
  const linalg::Matrix cov = mixed_asymptotic_cov(params, alloc);
  return cov(0, 0) + cov(1, 1);
}

namespace {

/// Risk trace written out directly; the search calls this millions of times.
inline double mixed_risk_terms(double mu2, double s2, double n1, double n2, double n12) {
  const double a = n1 + n12;
  const double b = n2 + n12;
  return s2 / a + (2.0 * a * s2 * s2 + 4.0 * (n1 + n2) * mu2 * s2) / (a * b);
}

struct SearchBest {
  double risk = std::numeric_limits<double>::infinity();
  Allocation alloc;
  bool found = false;

  void offer(double risk_candidate, std::int64_t n1, std::int64_t n2, std::int64_t n12) {
    if (!found || risk_candidate < risk ||
        (risk_candidate == risk &&
         (n12 > alloc.n12 || (n12 == alloc.n12 && (n1 > alloc.n1 || (n1 == alloc.n1 && n2 < alloc.n2)))))) {
      risk = risk_candidate;
      alloc = {n1, n2, n12};
      found = true;
    }
  }
};

}  // namespace

Allocation optimal_allocation(const NormalParams& params, std::int64_t n, std::int64_t budget) {
  validate_params(params);
  if (n < 1) throw std::invalid_argument("optimal_allocation: need n >= 1");
  if (budget < 2 || budget > 2 * n)
    throw std::invalid_argument("optimal_allocation: budget must be in [2, 2n]");
  const double mu2 = params.mu * params.mu;
  const double s2 = params.sigma2;

  // For fixed (n1, n12) the risk is monotone in n2: the derivative sign
  // 4 mu^2 sigma^2 n12 - 2 (n1+n12) sigma^4 - 4 n1 mu^2 sigma^2 does not
  // involve n2, so only the two endpoints can be optimal. This keeps the
  // enumeration at O(budget^2) without giving up exactness.
  SearchBest best;
  const std::int64_t n12_max = std::min(budget / 2, n);
  for (std::int64_t n12 = 0; n12 <= n12_max; ++n12) {
    const std::int64_t n1_cap = std::min(budget - 2 * n12, n - n12);
    for (std::int64_t n1 = 0; n1 <= n1_cap; ++n1) {
      if (n1 + n12 < 1) continue;
      const std::int64_t n2_hi = std::min(budget - 2 * n12 - n1, n - n12 - n1);
      const std::int64_t n2_lo = n12 >= 1 ? 0 : 1;
      if (n2_hi < n2_lo) continue;
      const double d1 = static_cast<double>(n1);
      const double d12 = static_cast<double>(n12);
      best.offer(mixed_risk_terms(mu2, s2, d1, static_cast<double>(n2_lo), d12), n1, n2_lo, n12);
      if (n2_hi != n2_lo)
        best.offer(mixed_risk_terms(mu2, s2, d1, static_cast<double>(n2_hi), d12), n1, n2_hi, n12);
    }
  }
  if (!best.found) throw std::invalid_argument("optimal_allocation: infeasible budget");
  return best.alloc;
}

Allocation optimal_allocation_relaxed(const NormalParams& params, std::int64_t n,
                                      std::int64_t budget) {
  validate_params(params);
  if (n < 1) throw std::invalid_argument("optimal_allocation_relaxed: need n >= 1");
  if (budget < 2 || budget > 2 * n)
    throw std::invalid_argument("optimal_allocation_relaxed: budget must be in [2, 2n]");
  const double mu2 = params.mu * params.mu;
  const double s2 = params.sigma2;
  const double c = static_cast<double>(budget);

  // With a = n1+n12, b = n2+n12 at full overlap o = min(a, b) and a binding
  // budget a + b = C, the risk on each branch collapses to
  // c1/a + c2/(C-a), whose interior minimizer is a = C/(1 + sqrt(c2/c1)).
  const auto branch_minimum = [&](double c1, double c2, double lo, double hi) {
    double a;
    if (c1 <= 0.0 || c2 <= 0.0)
      a = c2 <= 0.0 ? hi : lo;  // monotone on the branch
    else
      a = c / (1.0 + std::sqrt(c2 / c1));
    return std::min(hi, std::max(lo, a));
  };
  const double lo = std::max(1.0, c - static_cast<double>(n));
  const double hi = std::min(static_cast<double>(n), c - 1.0);
  std::vector<double> seeds;
  if (lo <= hi) {
    // a <= b branch (o = a): coefficients of 1/a and 1/(C-a).
    seeds.push_back(branch_minimum(s2 + 4.0 * mu2 * s2, 2.0 * s2 * s2 - 4.0 * mu2 * s2, lo,
                                   std::min(hi, c / 2.0)));
    // a >= b branch (o = b).
    seeds.push_back(branch_minimum(s2 - 4.0 * mu2 * s2, 2.0 * s2 * s2 + 4.0 * mu2 * s2,
                                   std::max(lo, c / 2.0), hi));
    seeds.push_back(c / 2.0);
  }

  SearchBest best;
  for (double seed : seeds) {
    const auto centre = static_cast<std::int64_t>(std::llround(seed));
    for (std::int64_t a = centre - 3; a <= centre + 3; ++a) {
      for (std::int64_t slack = 0; slack <= 2; ++slack) {
        const std::int64_t b = budget - a - slack;
        if (a < 1 || b < 1 || a > n || b > n) continue;
        const std::int64_t o = std::min(a, b);
        if (a + b - o > n) continue;
        const Allocation alloc{a - o, b - o, o};
        best.offer(mixed_risk_terms(mu2, s2, static_cast<double>(alloc.n1),
                                    static_cast<double>(alloc.n2), static_cast<double>(o)),
                   alloc.n1, alloc.n2, o);
      }
    }
  }
  if (!best.found)
    throw std::invalid_argument("optimal_allocation_relaxed: infeasible budget");
  return best.alloc;
}

FrontierCurve frontier(const NormalParams& params, std::int64_t n,
                       std::span<const std::int64_t> budgets) {
  for (std::size_t i = 1; i < budgets.size(); ++i)
    if (budgets[i] < budgets[i - 1])
      throw std::invalid_argument("frontier: budgets must be sorted ascending");
  FrontierCurve curve;
  curve.reserve(budgets.size());
  for (std::int64_t budget : budgets) {
    FrontierPoint point;
    point.budget = budget;
    point.alloc = optimal_allocation(params, n, budget);
    const linalg::Matrix cov = mixed_asymptotic_cov(params, point.alloc);
    point.risk_mu = cov(0, 0);
    point.risk_sigma2 = cov(1, 1);
    point.risk = point.risk_mu + point.risk_sigma2;
    curve.push_back(point);
  }
  return curve;
}

}  // namespace riskcomp::normal
