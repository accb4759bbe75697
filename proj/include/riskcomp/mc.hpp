#ifndef RISKCOMP_MC_HPP
#define RISKCOMP_MC_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "riskcomp/cost_model.hpp"
#include "riskcomp/rng.hpp"

namespace riskcomp::mc {

enum class LossKind { SquaredErrorScalar, SquaredErrorVector };

/// Monte Carlo estimate of an expected loss.
struct RiskEstimate {
  double mean_loss = 0.0;
  double std_error = 0.0;  // sample sd of losses / sqrt(replicates)
  std::uint64_t replicates = 0;
  LossKind loss_kind = LossKind::SquaredErrorScalar;

  friend bool operator==(const RiskEstimate&, const RiskEstimate&) = default;
};

/// Per-replicate average of the ledger charges made by the estimator.
struct MeanCost {
  std::array<double, kNumCostCategories> per_category{0.0, 0.0, 0.0};
  double total = 0.0;
};

struct McOptions {
  unsigned threads = 1;
  /// Optional diagonal weights on the squared-error components.
  std::vector<double> weights;
};

/// n draws from (1-alpha) N(0,1) + alpha * 4 * t_3. Mean 0; variance
/// (1-alpha) + 48 alpha (the scaled t_3 component has variance 16*3).
std::vector<double> sample_contaminated(RngStream& stream, std::int64_t n, double alpha);

std::vector<double> sample_normal(RngStream& stream, std::int64_t n, double mu, double sigma2);

namespace detail {

/// Runs `body(r)` for r in [0, replicates), possibly on several threads.
/// Thread assignment never affects results: callers must write outputs
/// into per-replicate slots and reduce sequentially afterwards.
template <class Body>
void for_each_replicate(std::uint64_t replicates, unsigned threads, Body&& body) {
  if (threads <= 1 || replicates < 2) {
    for (std::uint64_t r = 0; r < replicates; ++r) {
      try {
        body(r);
      } catch (const std::exception& e) {
        throw std::runtime_error("replicate " + std::to_string(r) + ": " + e.what());
      }
    }
    return;
  }
  const unsigned worker_count = static_cast<unsigned>(
      std::min<std::uint64_t>(threads, replicates));
  std::vector<std::string> errors(worker_count);
  std::vector<std::uint64_t> error_replicate(worker_count, UINT64_MAX);
  std::vector<std::thread> workers;
  workers.reserve(worker_count);
  for (unsigned w = 0; w < worker_count; ++w) {
    workers.emplace_back([&, w]() {
      for (std::uint64_t r = w; r < replicates; r += worker_count) {
        try {
          body(r);
        } catch (const std::exception& e) {
          if (r < error_replicate[w]) {
            error_replicate[w] = r;
            errors[w] = e.what();
          }
          return;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  std::uint64_t first_error = UINT64_MAX;
  std::string what;
  for (unsigned w = 0; w < worker_count; ++w) {
    if (error_replicate[w] < first_error) {
      first_error = error_replicate[w];
      what = errors[w];
    }
  }
  if (first_error != UINT64_MAX)
    throw std::runtime_error("replicate " + std::to_string(first_error) + ": " + what);
}

}  // namespace detail

/// Monte Carlo risk of `estimator` against `truth` under squared-error loss.
///
/// Replicate r draws its sample from `sampler` on the stream derived from
/// (master_seed, r) and hands the same stream to the estimator, so results
/// are identical for any thread count. Estimator exceptions abort the run
/// tagged with the replicate index.
///
/// Sampler:   (RngStream&) -> std::vector<double>
/// Estimator: (const std::vector<double>&, RngStream&, CostLedger&) -> std::vector<double>
template <class Sampler, class Estimator>
RiskEstimate run_replicates(Sampler&& sampler, Estimator&& estimator,
                            std::span<const double> truth, std::uint64_t replicates,
                            std::uint64_t master_seed, const McOptions& options = {},
                            MeanCost* mean_cost = nullptr) {
  if (replicates < 2) throw std::invalid_argument("run_replicates: replicates must be >= 2");
  if (!options.weights.empty() && options.weights.size() != truth.size())
    throw std::invalid_argument("run_replicates: weights size mismatch");

  std::vector<double> losses(replicates, 0.0);
  std::vector<std::array<std::uint64_t, kNumCostCategories>> charges;
  if (mean_cost) charges.assign(replicates, {0, 0, 0});

  detail::for_each_replicate(replicates, options.threads, [&](std::uint64_t r) {
    RngStream stream = derive_stream(master_seed, r);
    CostLedger ledger;
    const std::vector<double> sample = sampler(stream);
    const std::vector<double> estimate = estimator(sample, stream, ledger);
    if (estimate.size() != truth.size())
      throw std::runtime_error("estimate dimension does not match truth");
    double loss = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const double d = estimate[i] - truth[i];
      const double w = options.weights.empty() ? 1.0 : options.weights[i];
      loss += w * d * d;
    }
    losses[r] = loss;
    if (mean_cost)
      for (std::size_t i = 0; i < kNumCostCategories; ++i)
        charges[r][i] = ledger.total(static_cast<CostCategory>(i));
  });

  double sum = 0.0;
  for (double l : losses) sum += l;
  const double mean = sum / static_cast<double>(replicates);
  double ss = 0.0;
  for (double l : losses) {
    const double d = l - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / static_cast<double>(replicates - 1));

  if (mean_cost) {
    std::array<std::uint64_t, kNumCostCategories> totals{0, 0, 0};
    for (const auto& c : charges)
      for (std::size_t i = 0; i < kNumCostCategories; ++i) totals[i] += c[i];
    double grand = 0.0;
    for (std::size_t i = 0; i < kNumCostCategories; ++i) {
      mean_cost->per_category[i] =
          static_cast<double>(totals[i]) / static_cast<double>(replicates);
      grand += mean_cost->per_category[i];
    }
    mean_cost->total = grand;
  }

  RiskEstimate out;
  out.mean_loss = mean;
  out.std_error = sd / std::sqrt(static_cast<double>(replicates));
  out.replicates = replicates;
  out.loss_kind = truth.size() == 1 ? LossKind::SquaredErrorScalar : LossKind::SquaredErrorVector;
  return out;
}

/// Collects the raw per-replicate estimates (replicates x dim). Used by
/// verification suites that need empirical moments beyond the mean loss.
template <class Sampler, class Estimator>
std::vector<std::vector<double>> collect_replicates(Sampler&& sampler, Estimator&& estimator,
                                                    std::uint64_t replicates,
                                                    std::uint64_t master_seed,
                                                    unsigned threads = 1) {
  std::vector<std::vector<double>> estimates(replicates);
  detail::for_each_replicate(replicates, threads, [&](std::uint64_t r) {
    RngStream stream = derive_stream(master_seed, r);
    CostLedger ledger;
    const std::vector<double> sample = sampler(stream);
    estimates[r] = estimator(sample, stream, ledger);
  });
  return estimates;
}

}  // namespace riskcomp::mc

#endif  // RISKCOMP_MC_HPP
