#ifndef RISKCOMP_EXPFAM_HPP
#define RISKCOMP_EXPFAM_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "riskcomp/cost_model.hpp"
#include "riskcomp/linalg.hpp"
#include "riskcomp/rng.hpp"

namespace riskcomp::expfam {

/// General p-statistic allocation; laminar block layout keeps every stored
/// overlap pattern realizable (see cost_model.hpp).
using GeneralAllocation = BlockAllocation;

/// A p-parameter exponential family described through its mean-value
/// parameterization tau = E[t(X)]. The log-partition function is never
/// evaluated; estimation goes through tau and its inverse map.
struct FamilySpec {
  std::string name;
  int p = 0;
  /// Sufficient statistics t_k on a scalar sample point.
  std::vector<std::function<double(double)>> statistics;
  /// tau(theta) = E_theta[t(X)].
  std::function<std::vector<double>(std::span<const double>)> tau_of_theta;
  /// Inverse map; throws std::domain_error outside the mean-value domain.
  std::function<std::vector<double>(std::span<const double>)> theta_of_tau;
  /// I^{-1}(tau) = Cov_tau(t(X)), symmetric PSD.
  std::function<linalg::Matrix(std::span<const double>)> fisher_info_inv_tau;
  /// Cost per statistic update, c_k > 0.
  std::vector<double> unit_costs;
  /// One draw from the family at mean-value parameter tau.
  std::function<double(std::span<const double>, RngStream&)> sampler;
};

/// Reparameterization of interest eta(tau) with component weights.
struct TargetSpec {
  int m = 0;
  std::function<std::vector<double>(std::span<const double>)> eta;
  /// m x p gradient of eta; leave empty to fall back to central finite
  /// differences with step 1e-6 * max(1, |tau_j|).
  std::function<linalg::Matrix(std::span<const double>)> eta_grad;
  std::vector<double> q_weights;  // non-negative, size m

  static TargetSpec identity(int p);
};

/// Gradient of the target at tau: analytic when supplied, otherwise
/// finite differences.
linalg::Matrix eta_gradient(const TargetSpec& target, std::span<const double> tau);

struct SubsetStats {
  std::vector<double> statistic_sums;  // T_{S,k}
  std::vector<double> tau_hat;         // T_{S,k} / |S_k|
};

/// Per-statistic sums over the allocation's index sets and the resulting
/// mean-value estimates. Charges sum_k c_k |S_k| data looks (unit costs
/// rounded to counts on the ledger).
SubsetStats subset_statistics(std::span<const double> sample, const GeneralAllocation& alloc,
                              const FamilySpec& family, CostLedger& ledger);

/// Natural-parameter estimate: theta_of_tau(tau_hat), with domain errors
/// surfaced as std::domain_error.
std::vector<double> theta_hat(std::span<const double> tau_hat, const FamilySpec& family);

/// Covariance of tau_hat under the allocation:
///   Sigma_{kl} = |S_k ∩ S_l| I^{-1}(tau)_{kl} / (|S_k| |S_l|)
/// including k = l, where the overlap is |S_k| and the entry reduces to
/// I^{-1}(tau)_{kk} / |S_k|, the variance of a mean of |S_k| iid terms.
linalg::Matrix sigma_matrix(const FamilySpec& family, std::span<const double> tau,
                            const GeneralAllocation& alloc);

/// Weighted delta-method risk tr(Q etadot Sigma etadot^T).
double allocation_risk(const FamilySpec& family, std::span<const double> tau,
                       const GeneralAllocation& alloc, const TargetSpec& target);

struct OptimizeOptions {
  std::uint64_t multistart_seed = 0;
  int multistarts = 8;
  int gradient_steps = 300;
};

/// Minimizes allocation_risk subject to sum_k c_k |S_k| <= budget within a
/// sample of size n. Exact integer enumeration for p <= 2; continuous
/// relaxation over laminar blocks plus rounding and local repair for p > 2.
/// Deterministic for a fixed multistart seed.
GeneralAllocation optimize_allocation(const FamilySpec& family, std::span<const double> tau,
                                      const TargetSpec& target, double budget, std::int64_t n,
                                      const OptimizeOptions& options = {});

/// {"sizes":[...],"overlaps":[{"k":..,"l":..,"count":..},...],"cost":..,"risk":..}
std::string allocation_to_json(const GeneralAllocation& alloc, double cost, double risk);

FamilySpec normal_family();
FamilySpec bernoulli_family();
FamilySpec gamma_family();

/// eta(tau) = (tau1, tau2 - tau1^2), the (mean, variance) target for the
/// normal family; analytic gradient.
TargetSpec normal_mean_variance_target();

}  // namespace riskcomp::expfam

#endif  // RISKCOMP_EXPFAM_HPP
