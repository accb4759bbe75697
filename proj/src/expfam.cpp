#include "riskcomp/expfam.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "riskcomp/special.hpp"

namespace riskcomp::expfam {

TargetSpec TargetSpec::identity(int p) {
  TargetSpec target;
  target.m = p;
  target.eta = [](std::span<const double> tau) {
    return std::vector<double>(tau.begin(), tau.end());
  };
  target.eta_grad = [p](std::span<const double>) { return linalg::Matrix::identity(p); };
  target.q_weights.assign(p, 1.0);
  return target;
}

linalg::Matrix eta_gradient(const TargetSpec& target, std::span<const double> tau) {
  if (target.eta_grad) return target.eta_grad(tau);
  if (!target.eta) throw std::invalid_argument("eta_gradient: target has no eta");
  const int p = static_cast<int>(tau.size());
  linalg::Matrix grad(target.m, p);
  std::vector<double> bumped(tau.begin(), tau.end());
  for (int j = 0; j < p; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(tau[j]));
    bumped[j] = tau[j] + h;
    const std::vector<double> up = target.eta(bumped);
    bumped[j] = tau[j] - h;
    const std::vector<double> down = target.eta(bumped);
    bumped[j] = tau[j];
    if (static_cast<int>(up.size()) != target.m)
      throw std::invalid_argument("eta_gradient: eta dimension mismatch");
    for (int i = 0; i < target.m; ++i) grad(i, j) = (up[i] - down[i]) / (2.0 * h);
  }
  return grad;
}

SubsetStats subset_statistics(std::span<const double> sample, const GeneralAllocation& alloc,
                              const FamilySpec& family, CostLedger& ledger) {
  if (alloc.p() != family.p)
    throw std::invalid_argument("subset_statistics: allocation/family dimension mismatch");
  if (alloc.total_samples() > static_cast<std::int64_t>(sample.size()))
    throw std::invalid_argument("subset_statistics: sample too short for allocation");
  for (int k = 0; k < family.p; ++k)
    if (alloc.size(k) < 1) throw std::invalid_argument("subset_statistics: empty index set");

  SubsetStats stats;
  stats.statistic_sums.assign(family.p, 0.0);
  std::size_t offset = 0;
  for (const auto& block : alloc.blocks()) {
    for (std::int64_t i = 0; i < block.count; ++i) {
      const double x = sample[offset + static_cast<std::size_t>(i)];
      for (int k = 0; k < family.p; ++k)
        if (block.members & (1u << k)) stats.statistic_sums[k] += family.statistics[k](x);
    }
    offset += static_cast<std::size_t>(block.count);
  }
  double cost = 0.0;
  for (int k = 0; k < family.p; ++k)
    cost += family.unit_costs[k] * static_cast<double>(alloc.size(k));
  ledger.charge(CostCategory::DataLook, static_cast<std::uint64_t>(std::llround(cost)));

  stats.tau_hat.resize(family.p);
  for (int k = 0; k < family.p; ++k)
    stats.tau_hat[k] = stats.statistic_sums[k] / static_cast<double>(alloc.size(k));
  return stats;
}

std::vector<double> theta_hat(std::span<const double> tau_hat, const FamilySpec& family) {
  if (static_cast<int>(tau_hat.size()) != family.p)
    throw std::invalid_argument("theta_hat: dimension mismatch");
  return family.theta_of_tau(tau_hat);
}

linalg::Matrix sigma_matrix(const FamilySpec& family, std::span<const double> tau,
                            const GeneralAllocation& alloc) {
  if (alloc.p() != family.p)
    throw std::invalid_argument("sigma_matrix: allocation/family dimension mismatch");
  for (int k = 0; k < family.p; ++k)
    if (alloc.size(k) < 1) throw std::invalid_argument("sigma_matrix: empty index set");
  const linalg::Matrix iinv = family.fisher_info_inv_tau(tau);
  linalg::Matrix sigma(family.p, family.p);
  for (int k = 0; k < family.p; ++k) {
    for (int l = 0; l < family.p; ++l) {
      sigma(k, l) = static_cast<double>(alloc.overlap(k, l)) * iinv(k, l) /
                    (static_cast<double>(alloc.size(k)) * static_cast<double>(alloc.size(l)));
    }
  }
  return sigma;
}

namespace {

/// risk = sum_{kl} M_{kl} Sigma_{kl} with M = etadot^T Q etadot.
linalg::Matrix weighted_gram(const FamilySpec& family, std::span<const double> tau,
                             const TargetSpec& target) {
  const linalg::Matrix etadot = eta_gradient(target, tau);
  if (static_cast<int>(etadot.cols()) != family.p || static_cast<int>(etadot.rows()) != target.m)
    throw std::invalid_argument("allocation_risk: gradient dimension mismatch");
  if (static_cast<int>(target.q_weights.size()) != target.m)
    throw std::invalid_argument("allocation_risk: weight dimension mismatch");
  linalg::Matrix m(family.p, family.p);
  for (int k = 0; k < family.p; ++k)
    for (int l = 0; l < family.p; ++l) {
      double acc = 0.0;
      for (int i = 0; i < target.m; ++i)
        acc += target.q_weights[i] * etadot(i, k) * etadot(i, l);
      m(k, l) = acc;
    }
  return m;
}

double risk_from_counts(const linalg::Matrix& m, const linalg::Matrix& iinv,
                        std::span<const double> sizes, const linalg::Matrix& overlaps) {
  const int p = static_cast<int>(sizes.size());
  double risk = 0.0;
  for (int k = 0; k < p; ++k) {
    risk += m(k, k) * iinv(k, k) / sizes[k];
    for (int l = 0; l < p; ++l) {
      if (l == k) continue;
      risk += m(k, l) * iinv(k, l) * overlaps(k, l) / (sizes[k] * sizes[l]);
    }
  }
  return risk;
}

}  // namespace

double allocation_risk(const FamilySpec& family, std::span<const double> tau,
                       const GeneralAllocation& alloc, const TargetSpec& target) {
  const linalg::Matrix m = weighted_gram(family, tau, target);
  const linalg::Matrix iinv = family.fisher_info_inv_tau(tau);
  std::vector<double> sizes(family.p);
  linalg::Matrix overlaps(family.p, family.p);
  for (int k = 0; k < family.p; ++k) {
    if (alloc.size(k) < 1) throw std::invalid_argument("allocation_risk: empty index set");
    sizes[k] = static_cast<double>(alloc.size(k));
    for (int l = 0; l < family.p; ++l)
      overlaps(k, l) = static_cast<double>(alloc.overlap(k, l));
  }
  return risk_from_counts(m, iinv, sizes, overlaps);
}

namespace {

GeneralAllocation optimize_single_statistic(const FamilySpec& family, double budget,
                                            std::int64_t n) {
  const double c1 = family.unit_costs[0];
  const std::int64_t size =
      std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(budget / c1)), n);
  if (size < 1) throw std::invalid_argument("optimize_allocation: infeasible budget");
  return GeneralAllocation(1, {{0b1u, size}});
}

/// Exact enumeration over sizes (a, b); the risk is linear in the overlap
/// for fixed sizes, so only the overlap endpoints are evaluated. Ties break
/// toward larger overlap, then larger a-only count.
GeneralAllocation optimize_two_statistics(const FamilySpec& family, const linalg::Matrix& m,
                                          const linalg::Matrix& iinv, double budget,
                                          std::int64_t n) {
  const double c1 = family.unit_costs[0];
  const double c2 = family.unit_costs[1];
  double best_risk = std::numeric_limits<double>::infinity();
  Allocation best;
  bool found = false;

  const auto offer = [&](double risk, std::int64_t a, std::int64_t b, std::int64_t o) {
    const Allocation cand{a - o, b - o, o};
    if (!found || risk < best_risk ||
        (risk == best_risk &&
         (cand.n12 > best.n12 ||
          (cand.n12 == best.n12 &&
           (cand.n1 > best.n1 || (cand.n1 == best.n1 && cand.n2 < best.n2)))))) {
      best_risk = risk;
      best = cand;
      found = true;
    }
  };

  std::vector<double> sizes(2);
  linalg::Matrix overlaps(2, 2);
  const auto eval = [&](std::int64_t a, std::int64_t b, std::int64_t o) {
    sizes[0] = static_cast<double>(a);
    sizes[1] = static_cast<double>(b);
    overlaps(0, 1) = overlaps(1, 0) = static_cast<double>(o);
    return risk_from_counts(m, iinv, sizes, overlaps);
  };

  for (std::int64_t a = 1; a <= n && c1 * static_cast<double>(a) + c2 <= budget; ++a) {
    const auto b_max = std::min<std::int64_t>(
        n, static_cast<std::int64_t>(std::floor((budget - c1 * static_cast<double>(a)) / c2)));
    for (std::int64_t b = 1; b <= b_max; ++b) {
      const std::int64_t o_lo = std::max<std::int64_t>(0, a + b - n);
      const std::int64_t o_hi = std::min(a, b);
      offer(eval(a, b, o_hi), a, b, o_hi);
      if (o_lo != o_hi) offer(eval(a, b, o_lo), a, b, o_lo);
    }
  }
  if (!found) throw std::invalid_argument("optimize_allocation: infeasible budget");
  return GeneralAllocation::from_two_statistic(best);
}

/// Relaxed objective over laminar block counts x_B >= 0.
struct BlockRelaxation {
  int p;
  std::vector<std::uint32_t> masks;   // all non-empty subsets
  std::vector<double> block_costs;    // sum of c_k over members
  const linalg::Matrix& m;
  const linalg::Matrix& iinv;
  double budget;
  double n;

  BlockRelaxation(const FamilySpec& family, const linalg::Matrix& m_in,
                  const linalg::Matrix& iinv_in, double budget_in, std::int64_t n_in)
      : p(family.p), m(m_in), iinv(iinv_in), budget(budget_in),
        n(static_cast<double>(n_in)) {
    const std::uint32_t all = (1u << p) - 1u;
    for (std::uint32_t mask = 1; mask <= all; ++mask) {
      masks.push_back(mask);
      double c = 0.0;
      for (int k = 0; k < p; ++k)
        if (mask & (1u << k)) c += family.unit_costs[k];
      block_costs.push_back(c);
    }
  }

  void counts(std::span<const double> x, std::vector<double>& sizes,
              linalg::Matrix& overlaps) const {
    std::fill(sizes.begin(), sizes.end(), 0.0);
    for (std::size_t i = 0; i < overlaps.data().size(); ++i) overlaps.data()[i] = 0.0;
    for (std::size_t b = 0; b < masks.size(); ++b) {
      const std::uint32_t mask = masks[b];
      for (int k = 0; k < p; ++k) {
        if (!(mask & (1u << k))) continue;
        sizes[k] += x[b];
        for (int l = k + 1; l < p; ++l) {
          if (mask & (1u << l)) {
            overlaps(k, l) += x[b];
            overlaps(l, k) += x[b];
          }
        }
      }
    }
  }

  double objective(std::span<const double> x, std::vector<double>& sizes,
                   linalg::Matrix& overlaps) const {
    counts(x, sizes, overlaps);
    for (int k = 0; k < p; ++k)
      if (sizes[k] < 1e-9) return std::numeric_limits<double>::infinity();
    return risk_from_counts(m, iinv, sizes, overlaps);
  }

  void gradient(std::span<const double> x, std::vector<double>& grad,
                std::vector<double>& sizes, linalg::Matrix& overlaps) const {
    counts(x, sizes, overlaps);
    for (std::size_t b = 0; b < masks.size(); ++b) {
      const std::uint32_t mask = masks[b];
      double g = 0.0;
      for (int k = 0; k < p; ++k) {
        const bool k_in = mask & (1u << k);
        if (k_in) g -= m(k, k) * iinv(k, k) / (sizes[k] * sizes[k]);
        for (int l = 0; l < p; ++l) {
          if (l == k) continue;
          const double w = m(k, l) * iinv(k, l);
          if (w == 0.0) continue;
          const bool l_in = mask & (1u << l);
          // Each ordered term w * o_kl / (s_k s_l) differentiates into an
          // overlap part and one size part per member of the block.
          if (k_in && l_in) g += w / (sizes[k] * sizes[l]);
          const double o = overlaps(k, l);
          if (k_in) g -= w * o / (sizes[k] * sizes[k] * sizes[l]);
          if (l_in) g -= w * o / (sizes[k] * sizes[l] * sizes[l]);
        }
      }
      grad[b] = g;
    }
  }

  void project(std::vector<double>& x) const {
    double total = 0.0;
    double cost = 0.0;
    for (std::size_t b = 0; b < x.size(); ++b) {
      if (x[b] < 0.0) x[b] = 0.0;
      total += x[b];
      cost += block_costs[b] * x[b];
    }
    double scale = 1.0;
    if (total > n) scale = std::min(scale, n / total);
    if (cost > budget) scale = std::min(scale, budget / cost);
    if (scale < 1.0)
      for (auto& v : x) v *= scale;
  }
};

GeneralAllocation optimize_general(const FamilySpec& family, const linalg::Matrix& m,
                                   const linalg::Matrix& iinv, double budget, std::int64_t n,
                                   const OptimizeOptions& options) {
  double min_cost = 0.0;
  for (double c : family.unit_costs) min_cost += c;
  if (budget < min_cost || n < 1)
    throw std::invalid_argument("optimize_allocation: infeasible budget");

  const BlockRelaxation relax(family, m, iinv, budget, n);
  const std::size_t dim = relax.masks.size();
  std::vector<double> sizes(family.p);
  linalg::Matrix overlaps(family.p, family.p);

  const auto integer_risk = [&](const std::vector<std::int64_t>& xi) {
    std::vector<double> xd(xi.begin(), xi.end());
    relax.counts(xd, sizes, overlaps);
    for (int k = 0; k < family.p; ++k)
      if (sizes[k] < 1.0) return std::numeric_limits<double>::infinity();
    return risk_from_counts(m, iinv, sizes, overlaps);
  };
  const auto integer_feasible = [&](const std::vector<std::int64_t>& xi) {
    std::int64_t total = 0;
    double cost = 0.0;
    for (std::size_t b = 0; b < dim; ++b) {
      if (xi[b] < 0) return false;
      total += xi[b];
      cost += relax.block_costs[b] * static_cast<double>(xi[b]);
    }
    return total <= n && cost <= budget + 1e-9;
  };

  std::vector<std::int64_t> best_int;
  double best_risk = std::numeric_limits<double>::infinity();

  for (int start = 0; start < options.multistarts; ++start) {
    std::vector<double> x(dim, 0.0);
    if (start == 0) {
      // Everything in the all-statistics block.
      const double full_cost = relax.block_costs[dim - 1];
      x[dim - 1] = std::min(static_cast<double>(n), budget / full_cost);
    } else if (start == 1) {
      // Disjoint singleton blocks with an even budget share.
      for (int k = 0; k < family.p; ++k) {
        const std::size_t idx = static_cast<std::size_t>((1u << k) - 1u);
        x[idx] = std::min(static_cast<double>(n) / family.p,
                          budget / (family.p * family.unit_costs[k]));
      }
    } else {
      RngStream stream(options.multistart_seed, static_cast<std::uint64_t>(start));
      for (auto& v : x) v = stream.uniform01() * static_cast<double>(n) / static_cast<double>(dim);
    }
    relax.project(x);

    std::vector<double> grad(dim);
    double risk = relax.objective(x, sizes, overlaps);
    double step = 0.25 * (static_cast<double>(n) + 1.0);
    for (int it = 0; it < options.gradient_steps; ++it) {
      relax.gradient(x, grad, sizes, overlaps);
      double gnorm = 0.0;
      for (double g : grad) gnorm += g * g;
      gnorm = std::sqrt(gnorm);
      if (gnorm < 1e-14) break;
      bool moved = false;
      for (int bt = 0; bt < 25; ++bt) {
        std::vector<double> trial = x;
        for (std::size_t b = 0; b < dim; ++b) trial[b] -= step / gnorm * grad[b];
        relax.project(trial);
        const double trial_risk = relax.objective(trial, sizes, overlaps);
        if (trial_risk < risk) {
          x = std::move(trial);
          risk = trial_risk;
          moved = true;
          step *= 1.5;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }

    // Round and repair.
    std::vector<std::int64_t> xi(dim);
    for (std::size_t b = 0; b < dim; ++b) xi[b] = std::llround(x[b]);
    for (int k = 0; k < family.p; ++k) {
      std::int64_t size_k = 0;
      for (std::size_t b = 0; b < dim; ++b)
        if (relax.masks[b] & (1u << k)) size_k += xi[b];
      if (size_k < 1) xi[static_cast<std::size_t>((1u << k) - 1u)] += 1 - size_k;
    }
    // Shed units until the budget and sample constraints hold.
    while (!integer_feasible(xi)) {
      double best_increase = std::numeric_limits<double>::infinity();
      std::size_t best_b = dim;
      const double current = integer_risk(xi);
      for (std::size_t b = 0; b < dim; ++b) {
        if (xi[b] <= 0) continue;
        xi[b] -= 1;
        const double r = integer_risk(xi);
        xi[b] += 1;
        const double inc = r - current;
        if (r < std::numeric_limits<double>::infinity() && inc < best_increase) {
          best_increase = inc;
          best_b = b;
        }
      }
      if (best_b == dim) break;
      xi[best_b] -= 1;
    }
    if (!integer_feasible(xi)) continue;

    // Greedy single-unit improvements.
    for (int pass = 0; pass < 200; ++pass) {
      const double current = integer_risk(xi);
      double best_delta = -1e-15;
      std::size_t add_b = dim, sub_b = dim;
      for (std::size_t b = 0; b < dim; ++b) {
        xi[b] += 1;
        if (integer_feasible(xi)) {
          const double delta = integer_risk(xi) - current;
          if (delta < best_delta) {
            best_delta = delta;
            add_b = b;
            sub_b = dim;
          }
        }
        xi[b] -= 1;
        if (xi[b] > 0) {
          for (std::size_t b2 = 0; b2 < dim; ++b2) {
            if (b2 == b) continue;
            xi[b] -= 1;
            xi[b2] += 1;
            if (integer_feasible(xi)) {
              const double delta = integer_risk(xi) - current;
              if (delta < best_delta) {
                best_delta = delta;
                add_b = b2;
                sub_b = b;
              }
            }
            xi[b] += 1;
            xi[b2] -= 1;
          }
        }
      }
      if (add_b == dim) break;
      xi[add_b] += 1;
      if (sub_b != dim) xi[sub_b] -= 1;
    }

    const double risk_int = integer_risk(xi);
    if (risk_int < best_risk || (risk_int == best_risk && xi < best_int)) {
      best_risk = risk_int;
      best_int = xi;
    }
  }

  if (best_int.empty() || !std::isfinite(best_risk))
    throw std::invalid_argument("optimize_allocation: infeasible budget");
  std::vector<SampleBlock> blocks;
  for (std::size_t b = 0; b < dim; ++b)
    if (best_int[b] > 0) blocks.push_back({relax.masks[b], best_int[b]});
  return GeneralAllocation(family.p, std::move(blocks));
}

}  // namespace

GeneralAllocation optimize_allocation(const FamilySpec& family, std::span<const double> tau,
                                      const TargetSpec& target, double budget, std::int64_t n,
                                      const OptimizeOptions& options) {
  if (family.p < 1) throw std::invalid_argument("optimize_allocation: family has no statistics");
  if (n < 1) throw std::invalid_argument("optimize_allocation: need n >= 1");
  if (family.p == 1) return optimize_single_statistic(family, budget, n);
  const linalg::Matrix m = weighted_gram(family, tau, target);
  const linalg::Matrix iinv = family.fisher_info_inv_tau(tau);
  if (family.p == 2) return optimize_two_statistics(family, m, iinv, budget, n);
  return optimize_general(family, m, iinv, budget, n, options);
}

std::string allocation_to_json(const GeneralAllocation& alloc, double cost, double risk) {
  const auto real = [](double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return std::string(buffer);
  };
  std::string out = "{\"sizes\":[";
  for (int k = 0; k < alloc.p(); ++k) {
    if (k) out += ',';
    out += std::to_string(alloc.size(k));
  }
  out += "],\"overlaps\":[";
  bool first = true;
  for (int k = 0; k < alloc.p(); ++k) {
    for (int l = k + 1; l < alloc.p(); ++l) {
      if (!first) out += ',';
      first = false;
      out += "{\"k\":" + std::to_string(k) + ",\"l\":" + std::to_string(l) +
             ",\"count\":" + std::to_string(alloc.overlap(k, l)) + "}";
    }
  }
  out += "],\"cost\":" + real(cost) + ",\"risk\":" + real(risk) + "}";
  return out;
}

FamilySpec normal_family() {
  FamilySpec family;
  family.name = "normal";
  family.p = 2;
  family.statistics = {[](double x) { return x; }, [](double x) { return x * x; }};
  family.unit_costs = {1.0, 1.0};
  family.tau_of_theta = [](std::span<const double> theta) {
    if (theta.size() != 2 || !(theta[1] < 0.0))
      throw std::domain_error("normal family: theta2 must be negative");
    const double sigma2 = -0.5 / theta[1];
    const double mu = theta[0] * sigma2;
    return std::vector<double>{mu, mu * mu + sigma2};
  };
  family.theta_of_tau = [](std::span<const double> tau) {
    if (tau.size() != 2) throw std::domain_error("normal family: tau must have 2 components");
    const double sigma2 = tau[1] - tau[0] * tau[0];
    if (!(sigma2 > 0.0)) throw std::domain_error("normal family: implied variance <= 0");
    return std::vector<double>{tau[0] / sigma2, -0.5 / sigma2};
  };
  family.fisher_info_inv_tau = [](std::span<const double> tau) {
    const double mu = tau[0];
    const double sigma2 = tau[1] - tau[0] * tau[0];
    if (!(sigma2 > 0.0)) throw std::domain_error("normal family: implied variance <= 0");
    linalg::Matrix iinv(2, 2);
    iinv(0, 0) = sigma2;
    iinv(0, 1) = iinv(1, 0) = 2.0 * mu * sigma2;
    iinv(1, 1) = 4.0 * mu * mu * sigma2 + 2.0 * sigma2 * sigma2;
    return iinv;
  };
  family.sampler = [](std::span<const double> tau, RngStream& stream) {
    const double sigma2 = tau[1] - tau[0] * tau[0];
    if (!(sigma2 > 0.0)) throw std::domain_error("normal family: implied variance <= 0");
    return tau[0] + std::sqrt(sigma2) * stream.normal();
  };
  return family;
}

FamilySpec bernoulli_family() {
  FamilySpec family;
  family.name = "bernoulli";
  family.p = 1;
  family.statistics = {[](double x) { return x; }};
  family.unit_costs = {1.0};
  family.tau_of_theta = [](std::span<const double> theta) {
    return std::vector<double>{1.0 / (1.0 + std::exp(-theta[0]))};
  };
  family.theta_of_tau = [](std::span<const double> tau) {
    if (tau.size() != 1 || !(tau[0] > 0.0 && tau[0] < 1.0))
      throw std::domain_error("bernoulli family: tau must be in (0,1)");
    return std::vector<double>{std::log(tau[0] / (1.0 - tau[0]))};
  };
  family.fisher_info_inv_tau = [](std::span<const double> tau) {
    if (!(tau[0] > 0.0 && tau[0] < 1.0))
      throw std::domain_error("bernoulli family: tau must be in (0,1)");
    linalg::Matrix iinv(1, 1);
    iinv(0, 0) = tau[0] * (1.0 - tau[0]);
    return iinv;
  };
  family.sampler = [](std::span<const double> tau, RngStream& stream) {
    return stream.uniform01() < tau[0] ? 1.0 : 0.0;
  };
  return family;
}

namespace {

/// Shape/rate from the mean-value pair (E log X, E X): solves
/// log(alpha) - psi(alpha) = log(tau2) - tau1 by damped Newton.
std::pair<double, double> gamma_shape_rate(std::span<const double> tau) {
  if (tau.size() != 2) throw std::domain_error("gamma family: tau must have 2 components");
  if (!(tau[1] > 0.0)) throw std::domain_error("gamma family: E[X] must be positive");
  const double gap = std::log(tau[1]) - tau[0];
  if (!(gap > 0.0))
    throw std::domain_error("gamma family: log E[X] - E[log X] must be positive");
  double alpha = (3.0 - gap + std::sqrt((gap - 3.0) * (gap - 3.0) + 24.0 * gap)) / (12.0 * gap);
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    const double value = std::log(alpha) - digamma(alpha) - gap;
    if (std::abs(value) < 1e-12 * std::max(1.0, gap)) {
      converged = true;
      break;
    }
    const double deriv = 1.0 / alpha - trigamma(alpha);
    double next = alpha - value / deriv;
    if (!(next > 0.0)) next = alpha / 2.0;
    alpha = next;
  }
  if (!converged)
    throw std::runtime_error("gamma family: mean-value inversion did not converge");
  return {alpha, alpha / tau[1]};
}

}  // namespace

FamilySpec gamma_family() {
  FamilySpec family;
  family.name = "gamma";
  family.p = 2;
  family.statistics = {[](double x) { return std::log(x); }, [](double x) { return x; }};
  family.unit_costs = {1.0, 1.0};
  family.tau_of_theta = [](std::span<const double> theta) {
    const double alpha = theta[0] + 1.0;
    const double rate = -theta[1];
    if (!(alpha > 0.0) || !(rate > 0.0))
      throw std::domain_error("gamma family: need theta1 > -1 and theta2 < 0");
    return std::vector<double>{digamma(alpha) - std::log(rate), alpha / rate};
  };
  family.theta_of_tau = [](std::span<const double> tau) {
    const auto [alpha, rate] = gamma_shape_rate(tau);
    return std::vector<double>{alpha - 1.0, -rate};
  };
  family.fisher_info_inv_tau = [](std::span<const double> tau) {
    const auto [alpha, rate] = gamma_shape_rate(tau);
    linalg::Matrix iinv(2, 2);
    iinv(0, 0) = trigamma(alpha);
    iinv(0, 1) = iinv(1, 0) = 1.0 / rate;
    iinv(1, 1) = alpha / (rate * rate);
    return iinv;
  };
  family.sampler = [](std::span<const double> tau, RngStream& stream) {
    const auto [alpha, rate] = gamma_shape_rate(tau);
    return stream.gamma(alpha, rate);
  };
  return family;
}

TargetSpec normal_mean_variance_target() {
  TargetSpec target;
  target.m = 2;
  target.eta = [](std::span<const double> tau) {
    return std::vector<double>{tau[0], tau[1] - tau[0] * tau[0]};
  };
  target.eta_grad = [](std::span<const double> tau) {
    linalg::Matrix grad(2, 2);
    grad(0, 0) = 1.0;
    grad(0, 1) = 0.0;
    grad(1, 0) = -2.0 * tau[0];
    grad(1, 1) = 1.0;
    return grad;
  };
  target.q_weights = {1.0, 1.0};
  return target;
}

}  // namespace riskcomp::expfam
