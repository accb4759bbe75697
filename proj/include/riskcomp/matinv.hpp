#ifndef RISKCOMP_MATINV_HPP
#define RISKCOMP_MATINV_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "riskcomp/cost_model.hpp"
#include "riskcomp/linalg.hpp"
#include "riskcomp/rng.hpp"

namespace riskcomp::matinv {

/// Correlated regression design X = Z D^{1/2} C^{1/2} with Z_ij ~ N(0,1),
/// C = (1-rho) I + rho 11^T, and D diagonal decreasing uniformly from 4 to 2.
struct DesignConfig {
  std::int64_t n_rows = 100;
  int p = 10;
  double rho = 0.0;  // in [0, 1)
  std::vector<double> d_diag;  // empty -> default ramp from 4 to 2

  static DesignConfig with_defaults(std::int64_t n_rows, int p, double rho);
};

struct Design {
  linalg::Matrix x;     // n_rows x p
  linalg::Matrix gram;  // X^T X, symmetric PD a.s. for n_rows > p
};

Design generate_design(const DesignConfig& config, RngStream& stream);

/// Symmetric square root of the compound-symmetry correlation matrix,
/// from its closed-form eigenstructure (1 + (p-1) rho on the ones vector,
/// 1 - rho elsewhere).
linalg::Matrix compound_symmetry_sqrt(int p, double rho);

/// One inverse iteration step: 2B - BAB.
linalg::Matrix newton_schulz_step(const linalg::Matrix& b, const linalg::Matrix& a);

enum class NsInit {
  Safe,   // B0 = A^T / (||A||_1 ||A||_inf): guaranteed contraction
  Naive,  // B0 = I / tr(A): converges on PD matrices but starts far off
};

struct NewtonSchulzResult {
  std::vector<linalg::Matrix> iterates;  // iterates[0] = B0, one entry per step after
  bool diverged = false;
  int diverged_at = -1;
};

/// Runs max_iters steps recording every iterate; each step charges
/// 2p vector multiplies (two matrix products). Residual blow-up past 1e10
/// stops the run with an explicit divergence flag instead of silent NaNs.
NewtonSchulzResult newton_schulz(const linalg::Matrix& a, NsInit init, int max_iters,
                                 CostLedger& ledger);

/// k normalized multiplications v <- Av/||Av||; one vector multiply each.
std::vector<double> power_iteration(const linalg::Matrix& a, std::span<const double> v0, int k,
                                    CostLedger& ledger);

enum class ScheduleKind { Constant, Decreasing };

/// Per-eigenvector iteration counts: Constant(k) runs k for each of the p
/// vectors; Decreasing(k) runs k, k-1, ..., max(k-p+1, 1).
struct Schedule {
  ScheduleKind kind = ScheduleKind::Constant;
  int k = 0;

  std::vector<int> per_vector_iters(int p) const;
  std::int64_t total_cost(int p) const;
};

/// binom(k+p, 2) - binom(k, 2): reference cost formula for an increasing
/// schedule k, k+1, ..., k+p-1. Exposed for comparison; ledger charges
/// always come from the iterations actually run.
std::int64_t increasing_schedule_reference_cost(int k, int p);

enum class DeflationMode {
  Hotelling,    // A <- A - lambda_hat v v^T with the Rayleigh estimate
  UnitLiteral,  // A <- A - v v^T (only shifts the eigenvalue by one)
};

struct EigPair {
  double value = 0.0;
  std::vector<double> vector;
};

struct DeflatedEigs {
  std::vector<EigPair> pairs;
  bool truncated = false;  // a Rayleigh estimate fell below 1e-12
};

/// Extracts up to p eigenpairs by power iteration with deflation; random
/// unit starts come from the stream; lambda_hat is the Rayleigh quotient on
/// the current deflated matrix.
DeflatedEigs deflated_eigs(const linalg::Matrix& a, const Schedule& schedule, RngStream& stream,
                           CostLedger& ledger, DeflationMode mode = DeflationMode::Hotelling);

/// sum_i v_i v_i^T / lambda_i over the retained pairs; exactly symmetric.
linalg::Matrix inverse_from_eigs(const DeflatedEigs& eigs);

/// Conditional-on-design risk of beta_hat = B X^T Y:
/// ||(BS - I) beta||^2 + sigma2_noise tr(B S B^T).
/// With B = S^{-1} this is sigma2_noise * tr(S^{-1}).
double regression_risk(const linalg::Matrix& b, const linalg::Matrix& s,
                       std::span<const double> beta, double sigma2_noise);

/// p coefficients equally spaced from -1 to 1.
std::vector<double> uniform_beta(int p);

enum class Method { NewtonSchulzSafe, NewtonSchulzNaive, PowerConstant, PowerDecreasing };

const char* method_name(Method method);

struct TrajectoryPoint {
  double cost = 0.0;
  double risk = 0.0;
  double residual = 0.0;  // ||BS - I||_F
};

struct Trajectory {
  double rho = 0.0;
  std::string method;
  std::vector<TrajectoryPoint> points;  // cost strictly increasing
  double floor_risk = 0.0;              // sum diag(S^{-1}), dataset average
};

struct MatinvExperimentConfig {
  std::vector<double> rhos{0.01, 0.45, 0.88};
  std::int64_t n_rows = 100;
  int p = 10;
  std::vector<Method> methods{Method::NewtonSchulzSafe, Method::NewtonSchulzNaive,
                              Method::PowerConstant, Method::PowerDecreasing};
  int ns_iters = 20;
  int power_k = 200;
  std::uint64_t datasets = 100;
  std::uint64_t master_seed = 0;
  double sigma2_noise = 1.0;
  DeflationMode deflation = DeflationMode::Hotelling;
  unsigned threads = 1;
};

/// Risk-versus-cost trajectories averaged over datasets. Newton-Schulz
/// checkpoints every iteration (20 vector multiplies each at p=10); power
/// methods checkpoint after each completed eigenvector.
std::vector<Trajectory> matinv_experiment(const MatinvExperimentConfig& config);

}  // namespace riskcomp::matinv

#endif  // RISKCOMP_MATINV_HPP
