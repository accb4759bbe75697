#include "riskcomp/matinv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "riskcomp/mc.hpp"

namespace riskcomp::matinv {

DesignConfig DesignConfig::with_defaults(std::int64_t n_rows, int p, double rho) {
  DesignConfig config;
  config.n_rows = n_rows;
  config.p = p;
  config.rho = rho;
  return config;
}

namespace {

std::vector<double> default_d_diag(int p) {
  std::vector<double> d(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j)
    d[static_cast<std::size_t>(j)] =
        4.0 - 2.0 * static_cast<double>(j) / static_cast<double>(p - 1);
  return d;
}

void validate_design_config(const DesignConfig& config) {
  if (config.p < 2) throw std::invalid_argument("design: need p >= 2");
  if (config.n_rows <= config.p) throw std::invalid_argument("design: need n_rows > p");
  if (!(config.rho >= 0.0 && config.rho < 1.0))
    throw std::invalid_argument("rho must be in [0,1)");
  if (!config.d_diag.empty()) {
    if (static_cast<int>(config.d_diag.size()) != config.p)
      throw std::invalid_argument("design: d_diag size must equal p");
    for (double d : config.d_diag)
      if (!(d > 0.0)) throw std::invalid_argument("design: d_diag must be positive");
  }
}

}  // namespace

linalg::Matrix compound_symmetry_sqrt(int p, double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("rho must be in [0,1)");
  const double low = std::sqrt(1.0 - rho);
  const double high = std::sqrt(1.0 + (p - 1) * rho);
  linalg::Matrix root(p, p, (high - low) / static_cast<double>(p));
  for (int i = 0; i < p; ++i) root(i, i) += low;
  return root;
}

Design generate_design(const DesignConfig& config, RngStream& stream) {
  validate_design_config(config);
  const int p = config.p;
  const std::vector<double> d = config.d_diag.empty() ? default_d_diag(p) : config.d_diag;
  std::vector<double> d_root(d.size());
  for (std::size_t j = 0; j < d.size(); ++j) d_root[j] = std::sqrt(d[j]);

  linalg::Matrix z(static_cast<std::size_t>(config.n_rows), p);
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t j = 0; j < z.cols(); ++j) z(i, j) = stream.normal() * d_root[j];

  const linalg::Matrix c_root = compound_symmetry_sqrt(p, config.rho);
  Design design;
  design.x = z * c_root;
  design.gram = transpose(design.x) * design.x;
  // Symmetrize away the last-bit asymmetry from the product.
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      const double v = 0.5 * (design.gram(i, j) + design.gram(j, i));
      design.gram(i, j) = design.gram(j, i) = v;
    }
  return design;
}

linalg::Matrix newton_schulz_step(const linalg::Matrix& b, const linalg::Matrix& a) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw std::invalid_argument("newton_schulz_step: square conformable matrices required");
  return 2.0 * b - b * a * b;
}

NewtonSchulzResult newton_schulz(const linalg::Matrix& a, NsInit init, int max_iters,
                                 CostLedger& ledger) {
  if (a.rows() != a.cols()) throw std::invalid_argument("newton_schulz: A must be square");
  if (max_iters < 0) throw std::invalid_argument("newton_schulz: max_iters must be >= 0");
  const auto p = a.rows();

  linalg::Matrix b(p, p);
  if (init == NsInit::Safe) {
    const double scale = 1.0 / (linalg::norm1(a) * linalg::norm_inf(a));
    b = scale * transpose(a);
  } else {
    const double scale = 1.0 / linalg::trace(a);
    for (std::size_t i = 0; i < p; ++i) b(i, i) = scale;
  }

  NewtonSchulzResult result;
  result.iterates.reserve(static_cast<std::size_t>(max_iters) + 1);
  result.iterates.push_back(b);
  const linalg::Matrix eye = linalg::Matrix::identity(p);
  for (int it = 0; it < max_iters; ++it) {
    b = newton_schulz_step(b, a);
    ledger.charge(CostCategory::VectorMultiply, 2 * static_cast<std::uint64_t>(p));
    const double residual = linalg::frobenius_norm(b * a - eye);
    if (!(residual < 1e10)) {
      result.diverged = true;
      result.diverged_at = it + 1;
      break;
    }
    result.iterates.push_back(b);
  }
  return result;
}

std::vector<double> power_iteration(const linalg::Matrix& a, std::span<const double> v0, int k,
                                    CostLedger& ledger) {
  if (a.rows() != a.cols() || a.cols() != v0.size())
    throw std::invalid_argument("power_iteration: shape mismatch");
  std::vector<double> v(v0.begin(), v0.end());
  const double start_norm = linalg::norm2(v);
  if (start_norm == 0.0) throw std::invalid_argument("power_iteration: zero start vector");
  for (auto& x : v) x /= start_norm;
  for (int it = 0; it < k; ++it) {
    std::vector<double> w = linalg::matvec(a, v);
    ledger.charge(CostCategory::VectorMultiply, 1);
    const double norm = linalg::norm2(w);
    if (norm == 0.0) throw std::runtime_error("power_iteration: A v vanished");
    for (auto& x : w) x /= norm;
    v = std::move(w);
  }
  return v;
}

std::vector<int> Schedule::per_vector_iters(int p) const {
  if (k < 1) throw std::invalid_argument("schedule: need k >= 1");
  std::vector<int> iters(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i)
    iters[static_cast<std::size_t>(i)] = kind == ScheduleKind::Constant ? k : std::max(k - i, 1);
  return iters;
}

std::int64_t Schedule::total_cost(int p) const {
  std::int64_t total = 0;
  for (int it : per_vector_iters(p)) total += it;
  return total;
}

std::int64_t increasing_schedule_reference_cost(int k, int p) {
  const auto binom2 = [](std::int64_t m) { return m * (m - 1) / 2; };
  return binom2(k + p) - binom2(k);
}

DeflatedEigs deflated_eigs(const linalg::Matrix& a, const Schedule& schedule, RngStream& stream,
                           CostLedger& ledger, DeflationMode mode) {
  if (a.rows() != a.cols()) throw std::invalid_argument("deflated_eigs: A must be square");
  const int p = static_cast<int>(a.rows());
  const std::vector<int> iters = schedule.per_vector_iters(p);

  DeflatedEigs result;
  linalg::Matrix current = a;
  for (int i = 0; i < p; ++i) {
    std::vector<double> v0(static_cast<std::size_t>(p));
    for (auto& x : v0) x = stream.normal();
    std::vector<double> v;
    try {
      v = power_iteration(current, v0, iters[static_cast<std::size_t>(i)], ledger);
    } catch (const std::runtime_error&) {
      // The deflated matrix annihilated the start vector: spectrum exhausted.
      result.truncated = true;
      break;
    }
    const double lambda = linalg::dot(v, linalg::matvec(current, v));
    if (lambda <= 1e-12) {
      result.truncated = true;
      break;
    }
    result.pairs.push_back({lambda, v});
    const double shift = mode == DeflationMode::Hotelling ? lambda : 1.0;
    for (int r = 0; r < p; ++r)
      for (int c = 0; c < p; ++c)
        current(r, c) -= shift * v[static_cast<std::size_t>(r)] * v[static_cast<std::size_t>(c)];
  }
  return result;
}

linalg::Matrix inverse_from_eigs(const DeflatedEigs& eigs) {
  if (eigs.pairs.empty()) throw std::invalid_argument("inverse_from_eigs: no retained pairs");
  const auto p = eigs.pairs.front().vector.size();
  linalg::Matrix b(p, p);
  // Accumulate the upper triangle and mirror it, so the result is
  // symmetric bit for bit.
  for (const auto& pair : eigs.pairs) {
    const double inv_lambda = 1.0 / pair.value;
    for (std::size_t r = 0; r < p; ++r)
      for (std::size_t c = r; c < p; ++c)
        b(r, c) += inv_lambda * pair.vector[r] * pair.vector[c];
  }
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t c = r + 1; c < p; ++c) b(c, r) = b(r, c);
  return b;
}

double regression_risk(const linalg::Matrix& b, const linalg::Matrix& s,
                       std::span<const double> beta, double sigma2_noise) {
  if (b.rows() != b.cols() || s.rows() != s.cols() || b.rows() != s.rows() ||
      beta.size() != b.rows())
    throw std::invalid_argument("regression_risk: shape mismatch");
  const linalg::Matrix bs = b * s;
  std::vector<double> bias = linalg::matvec(bs, beta);
  for (std::size_t i = 0; i < beta.size(); ++i) bias[i] -= beta[i];
  double variance = 0.0;  // tr(B S B^T) = sum_ij (BS)_ij B_ij
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) variance += bs(i, j) * b(i, j);
  return linalg::dot(bias, bias) + sigma2_noise * variance;
}

std::vector<double> uniform_beta(int p) {
  std::vector<double> beta(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j)
    beta[static_cast<std::size_t>(j)] =
        -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(p - 1);
  return beta;
}

const char* method_name(Method method) {
  switch (method) {
    case Method::NewtonSchulzSafe:
      return "ns_safe";
    case Method::NewtonSchulzNaive:
      return "ns_naive";
    case Method::PowerConstant:
      return "power_constant";
    case Method::PowerDecreasing:
      return "power_decreasing";
  }
  return "unknown";
}

std::vector<Trajectory> matinv_experiment(const MatinvExperimentConfig& config) {
  if (config.datasets < 1) throw std::invalid_argument("matinv_experiment: need datasets >= 1");
  DesignConfig design_config;
  design_config.n_rows = config.n_rows;
  design_config.p = config.p;
  validate_design_config(design_config);

  const int p = config.p;
  const std::vector<double> beta = uniform_beta(p);
  const linalg::Matrix eye = linalg::Matrix::identity(p);

  struct Checkpoints {
    std::vector<double> costs;
    std::vector<double> risk_sums;
    std::vector<double> residual_sums;
  };

  std::vector<Trajectory> out;
  for (double rho : config.rhos) {
    design_config.rho = rho;

    // Per-dataset values go into indexed slots; sequential reduction keeps
    // the averages identical for any thread count.
    std::vector<std::vector<std::vector<double>>> risks(config.methods.size());
    std::vector<std::vector<std::vector<double>>> residuals(config.methods.size());
    for (auto& r : risks) r.assign(config.datasets, {});
    for (auto& r : residuals) r.assign(config.datasets, {});
    std::vector<std::vector<double>> costs(config.methods.size());
    std::vector<double> floor_values(config.datasets, 0.0);

    mc::detail::for_each_replicate(config.datasets, config.threads, [&](std::uint64_t d) {
      RngStream stream = derive_stream(config.master_seed, d);
      const Design design = generate_design(design_config, stream);
      const linalg::Matrix exact_inverse = linalg::inverse(design.gram);
      floor_values[d] = config.sigma2_noise * linalg::trace(exact_inverse);

      for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
        const Method method = config.methods[mi];
        std::vector<double> risk_path;
        std::vector<double> residual_path;
        std::vector<double> cost_path;
        CostLedger ledger;
        if (method == Method::NewtonSchulzSafe || method == Method::NewtonSchulzNaive) {
          const NsInit init =
              method == Method::NewtonSchulzSafe ? NsInit::Safe : NsInit::Naive;
          const NewtonSchulzResult ns = newton_schulz(design.gram, init, config.ns_iters, ledger);
          for (std::size_t it = 0; it < ns.iterates.size(); ++it) {
            const linalg::Matrix& b = ns.iterates[it];
            risk_path.push_back(regression_risk(b, design.gram, beta, config.sigma2_noise));
            residual_path.push_back(linalg::frobenius_norm(b * design.gram - eye));
            cost_path.push_back(static_cast<double>(2 * p) * static_cast<double>(it));
          }
        } else {
          Schedule schedule;
          schedule.kind = method == Method::PowerConstant ? ScheduleKind::Constant
                                                          : ScheduleKind::Decreasing;
          schedule.k = config.power_k;
          const std::vector<int> iters = schedule.per_vector_iters(p);
          const DeflatedEigs eigs =
              deflated_eigs(design.gram, schedule, stream, ledger, config.deflation);
          DeflatedEigs partial;
          double cost = 0.0;
          for (std::size_t i = 0; i < eigs.pairs.size(); ++i) {
            partial.pairs.push_back(eigs.pairs[i]);
            cost += static_cast<double>(iters[i]);
            const linalg::Matrix b = inverse_from_eigs(partial);
            risk_path.push_back(regression_risk(b, design.gram, beta, config.sigma2_noise));
            residual_path.push_back(linalg::frobenius_norm(b * design.gram - eye));
            cost_path.push_back(cost);
          }
        }
        risks[mi][d] = std::move(risk_path);
        residuals[mi][d] = std::move(residual_path);
        if (d == 0) costs[mi] = std::move(cost_path);
      }
    });

    double floor_sum = 0.0;
    for (double f : floor_values) floor_sum += f;
    const double floor_mean = floor_sum / static_cast<double>(config.datasets);

    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
      Trajectory trajectory;
      trajectory.rho = rho;
      trajectory.method = method_name(config.methods[mi]);
      trajectory.floor_risk = floor_mean;
      const std::size_t checkpoints = costs[mi].size();
      for (std::size_t c = 0; c < checkpoints; ++c) {
        double risk_sum = 0.0;
        double residual_sum = 0.0;
        std::uint64_t have = 0;
        for (std::uint64_t d = 0; d < config.datasets; ++d) {
          if (c < risks[mi][d].size()) {
            risk_sum += risks[mi][d][c];
            residual_sum += residuals[mi][d][c];
            ++have;
          }
        }
        if (have == 0) continue;
        trajectory.points.push_back({costs[mi][c], risk_sum / static_cast<double>(have),
                                     residual_sum / static_cast<double>(have)});
      }
      out.push_back(std::move(trajectory));
    }
  }
  return out;
}

}  // namespace riskcomp::matinv
