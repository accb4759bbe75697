#include "doctest.h"

#include <stdexcept>

#include <cmath>
#include <vector>

#include "riskcomp/matinv.hpp"
#include "riskcomp/mc.hpp"
#include "support/test_support.hpp"

using namespace riskcomp;
using matinv::DesignConfig;

namespace {

matinv::Design design_for(double rho, std::int64_t n_rows, std::uint64_t seed) {
  RngStream stream(seed, 0);
  return matinv::generate_design(DesignConfig::with_defaults(n_rows, 10, rho), stream);
}

}  // namespace

TEST_CASE("generate_design column variances and symmetry") {
  RngStream stream(21, 0);
  DesignConfig config = DesignConfig::with_defaults(10000, 10, 0.0);
  const matinv::Design design = matinv::generate_design(config, stream);
  for (int j = 0; j < 10; ++j) {
    std::vector<double> column(design.x.rows());
    for (std::size_t i = 0; i < design.x.rows(); ++i) column[i] = design.x(i, j);
    const double expected = 4.0 - 2.0 * j / 9.0;
    CHECK(test_support::variance_of(column) == doctest::Approx(expected).epsilon(0.10));
  }
  CHECK(linalg::is_symmetric(design.gram, 0.0));
  CHECK_THROWS_WITH_AS(
      matinv::generate_design(DesignConfig::with_defaults(100, 10, 1.0), stream),
      "rho must be in [0,1)", std::invalid_argument);
}

TEST_CASE("condition number grows with rho") {
  const auto kappa = [](const linalg::Matrix& m) {
    const std::vector<double> eigenvalues = test_support::jacobi_eigenvalues(m);
    return eigenvalues.front() / eigenvalues.back();
  };
  CHECK(kappa(design_for(0.88, 100, 5).gram) > kappa(design_for(0.01, 100, 5).gram));
}

TEST_CASE("compound symmetry square root squares back") {
  for (double rho : {0.0, 0.3, 0.88}) {
    const linalg::Matrix root = matinv::compound_symmetry_sqrt(6, rho);
    const linalg::Matrix c = root * root;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        CHECK(c(i, j) == doctest::Approx(i == j ? 1.0 : rho).epsilon(1e-12));
  }
}

TEST_CASE("newton_schulz_step identities") {
  const linalg::Matrix eye = linalg::Matrix::identity(4);
  CHECK(matinv::newton_schulz_step(eye, eye) == eye);

  const matinv::Design design = design_for(0.3, 60, 31);
  const linalg::Matrix exact = linalg::inverse(design.gram);
  const linalg::Matrix stepped = matinv::newton_schulz_step(exact, design.gram);
  CHECK(linalg::frobenius_norm(stepped - exact) / linalg::frobenius_norm(exact) < 1e-12);
}

TEST_CASE("newton_schulz residual squaring identity at every step") {
  const matinv::Design design = design_for(0.5, 100, 32);
  const linalg::Matrix eye = linalg::Matrix::identity(10);
  for (matinv::NsInit init : {matinv::NsInit::Safe, matinv::NsInit::Naive}) {
    CostLedger ledger;
    const matinv::NewtonSchulzResult result =
        matinv::newton_schulz(design.gram, init, 25, ledger);
    for (std::size_t it = 0; it + 1 < result.iterates.size(); ++it) {
      const linalg::Matrix residual = eye - result.iterates[it] * design.gram;
      const linalg::Matrix next_residual = eye - result.iterates[it + 1] * design.gram;
      const linalg::Matrix squared = residual * residual;
      const double scale = std::max(1.0, linalg::frobenius_norm(design.gram) *
                                             linalg::frobenius_norm(result.iterates[it]));
      CHECK(linalg::frobenius_norm(next_residual - squared) / scale < 1e-12);
    }
  }
}

TEST_CASE("newton_schulz safe init converges within 20 steps at rho = 0.01") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const matinv::Design design = design_for(0.01, 100, 900 + seed);
    CostLedger ledger;
    const matinv::NewtonSchulzResult result =
        matinv::newton_schulz(design.gram, matinv::NsInit::Safe, 20, ledger);
    REQUIRE_FALSE(result.diverged);
    const linalg::Matrix residual =
        result.iterates.back() * design.gram - linalg::Matrix::identity(10);
    CHECK(linalg::frobenius_norm(residual) < 1e-8);
    CHECK(ledger.total(CostCategory::VectorMultiply) == 20 * 20);
  }
}

TEST_CASE("newton_schulz residuals decrease monotonically once below one") {
  const matinv::Design design = design_for(0.45, 100, 77);
  CostLedger ledger;
  const matinv::NewtonSchulzResult result =
      matinv::newton_schulz(design.gram, matinv::NsInit::Safe, 30, ledger);
  const linalg::Matrix eye = linalg::Matrix::identity(10);
  double previous = linalg::frobenius_norm(eye - result.iterates[0] * design.gram);
  bool below_one = previous < 1.0;
  for (std::size_t it = 1; it < result.iterates.size(); ++it) {
    const double current = linalg::frobenius_norm(eye - result.iterates[it] * design.gram);
    if (below_one && previous > 1e-14) CHECK(current < previous);
    below_one = below_one || current < 1.0;
    previous = current;
  }
}

TEST_CASE("newton_schulz scalar case") {
  linalg::Matrix a(1, 1);
  a(0, 0) = 2.0;
  CostLedger ledger;
  const matinv::NewtonSchulzResult result = matinv::newton_schulz(a, matinv::NsInit::Safe, 3, ledger);
  CHECK(std::abs(result.iterates.back()(0, 0) - 0.5) < 1e-10);
}

TEST_CASE("power_iteration basics") {
  linalg::Matrix a(2, 2);
  a(0, 0) = 3.0;
  a(1, 1) = 1.0;
  CostLedger ledger;
  const std::vector<double> v0{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  const std::vector<double> v = matinv::power_iteration(a, v0, 50, ledger);
  CHECK(std::abs(std::abs(v[0]) - 1.0) < 1e-6);
  CHECK(std::abs(v[1]) < 1e-6);
  CHECK(ledger.total(CostCategory::VectorMultiply) == 50);
  CHECK(std::abs(linalg::norm2(v) - 1.0) < 1e-12);
  CHECK_THROWS_AS(matinv::power_iteration(a, std::vector<double>{0.0, 0.0}, 3, ledger),
                  std::invalid_argument);
}

TEST_CASE("power_iteration Rayleigh quotient matches a dense eigensolver") {
  const matinv::Design design = design_for(0.45, 100, 41);
  CostLedger ledger;
  RngStream stream(42, 0);
  std::vector<double> v0(10);
  for (auto& x : v0) x = stream.normal();
  const std::vector<double> v = matinv::power_iteration(design.gram, v0, 500, ledger);
  const double rayleigh = linalg::dot(v, linalg::matvec(design.gram, v));
  const std::vector<double> eigenvalues = test_support::jacobi_eigenvalues(design.gram);
  CHECK(std::abs(rayleigh - eigenvalues.front()) / eigenvalues.front() < 1e-6);
}

TEST_CASE("schedules and their costs") {
  const matinv::Schedule constant{matinv::ScheduleKind::Constant, 7};
  CHECK(constant.per_vector_iters(4) == std::vector<int>{7, 7, 7, 7});
  CHECK(constant.total_cost(4) == 28);

  const matinv::Schedule decreasing{matinv::ScheduleKind::Decreasing, 7};
  CHECK(decreasing.per_vector_iters(4) == std::vector<int>{7, 6, 5, 4});
  CHECK(decreasing.total_cost(4) == 22);
  CHECK(decreasing.total_cost(4) == 7 * 4 - 4 * 3 / 2);

  const matinv::Schedule clipped{matinv::ScheduleKind::Decreasing, 3};
  CHECK(clipped.per_vector_iters(5) == std::vector<int>{3, 2, 1, 1, 1});

  CHECK(matinv::increasing_schedule_reference_cost(7, 4) == 7 * 4 + 4 * 3 / 2);
}

TEST_CASE("deflated_eigs on a diagonal matrix") {
  linalg::Matrix a(2, 2);
  a(0, 0) = 4.0;
  a(1, 1) = 1.0;
  RngStream stream(43, 0);
  CostLedger ledger;
  const matinv::DeflatedEigs eigs =
      matinv::deflated_eigs(a, {matinv::ScheduleKind::Constant, 200}, stream, ledger);
  REQUIRE(eigs.pairs.size() == 2);
  CHECK(std::abs(eigs.pairs[0].value - 4.0) < 1e-6);
  CHECK(std::abs(eigs.pairs[1].value - 1.0) < 1e-6);
  CHECK(std::abs(std::abs(eigs.pairs[0].vector[0]) - 1.0) < 1e-4);
  CHECK(std::abs(std::abs(eigs.pairs[1].vector[1]) - 1.0) < 1e-4);
  CHECK(ledger.total(CostCategory::VectorMultiply) == 400);
}

TEST_CASE("deflated_eigs ledger equals the schedule cost") {
  const matinv::Design design = design_for(0.45, 100, 44);
  RngStream stream(45, 0);
  SUBCASE("constant charges k p") {
    CostLedger ledger;
    matinv::deflated_eigs(design.gram, {matinv::ScheduleKind::Constant, 37}, stream, ledger);
    CHECK(ledger.total(CostCategory::VectorMultiply) == 370);
  }
  SUBCASE("decreasing charges the clipped sum") {
    CostLedger ledger;
    const matinv::Schedule schedule{matinv::ScheduleKind::Decreasing, 37};
    matinv::deflated_eigs(design.gram, schedule, stream, ledger);
    CHECK(ledger.total(CostCategory::VectorMultiply) ==
          static_cast<std::uint64_t>(schedule.total_cost(10)));
    CHECK(schedule.total_cost(10) == 37 * 10 - 10 * 9 / 2);
  }
}

TEST_CASE("deflated_eigs eigenvalues are non-increasing and truncate on rank deficiency") {
  const matinv::Design design = design_for(0.5, 100, 46);
  RngStream stream(47, 0);
  CostLedger ledger;
  const matinv::DeflatedEigs eigs =
      matinv::deflated_eigs(design.gram, {matinv::ScheduleKind::Constant, 500}, stream, ledger);
  REQUIRE(eigs.pairs.size() == 10);
  for (std::size_t i = 1; i < eigs.pairs.size(); ++i)
    CHECK(eigs.pairs[i].value <= eigs.pairs[i - 1].value * (1.0 + 1e-3));

  // Rank-one matrix: the second Rayleigh estimate collapses.
  linalg::Matrix rank_one(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) rank_one(i, j) = 2.0 / 3.0;
  CostLedger ledger2;
  const matinv::DeflatedEigs truncated =
      matinv::deflated_eigs(rank_one, {matinv::ScheduleKind::Constant, 100}, stream, ledger2);
  CHECK(truncated.truncated);
  CHECK(truncated.pairs.size() < 3);
}

TEST_CASE("literal unit deflation only shifts the repeated eigenvalue") {
  // A - v v^T moves the dominant eigenvalue from 4 to 3, so the second
  // extraction finds 3 on the same axis instead of the true second pair.
  linalg::Matrix a(2, 2);
  a(0, 0) = 4.0;
  a(1, 1) = 1.0;
  RngStream stream(61, 0);
  CostLedger ledger;
  const matinv::DeflatedEigs eigs =
      matinv::deflated_eigs(a, {matinv::ScheduleKind::Constant, 300}, stream, ledger,
                            matinv::DeflationMode::UnitLiteral);
  REQUIRE(eigs.pairs.size() == 2);
  CHECK(std::abs(eigs.pairs[0].value - 4.0) < 1e-6);
  CHECK(std::abs(eigs.pairs[1].value - 3.0) < 1e-6);
  CHECK(std::abs(std::abs(eigs.pairs[1].vector[0]) - 1.0) < 1e-4);
}

TEST_CASE("newton_schulz reports divergence instead of silent NaNs") {
  // Indefinite input violates the contraction, so the residual blows up.
  linalg::Matrix a(2, 2);
  a(0, 0) = 10.0;
  a(1, 1) = -1.0;
  CostLedger ledger;
  const matinv::NewtonSchulzResult result =
      matinv::newton_schulz(a, matinv::NsInit::Naive, 60, ledger);
  CHECK(result.diverged);
  CHECK(result.diverged_at > 0);
  for (const auto& iterate : result.iterates)
    for (double v : iterate.data()) CHECK(std::isfinite(v));
}

TEST_CASE("inverse_from_eigs identities") {
  SUBCASE("an exact eigendecomposition inverts a diagonal matrix") {
    matinv::DeflatedEigs eigs;
    eigs.pairs.push_back({2.0, {1.0, 0.0, 0.0}});
    eigs.pairs.push_back({5.0, {0.0, 1.0, 0.0}});
    eigs.pairs.push_back({0.25, {0.0, 0.0, 1.0}});
    const linalg::Matrix inverse = matinv::inverse_from_eigs(eigs);
    CHECK(inverse(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(inverse(1, 1) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(inverse(2, 2) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(inverse(0, 1) == 0.0);
  }
  SUBCASE("a single pair gives the rank-one reconstruction") {
    matinv::DeflatedEigs eigs;
    eigs.pairs.push_back({2.0, {0.6, 0.8}});
    const linalg::Matrix inverse = matinv::inverse_from_eigs(eigs);
    CHECK(inverse(0, 0) == doctest::Approx(0.36 / 2.0));
    CHECK(inverse(0, 1) == doctest::Approx(0.48 / 2.0));
    CHECK(inverse(0, 1) == inverse(1, 0));
  }
  SUBCASE("no retained pairs is an error") {
    CHECK_THROWS_AS(matinv::inverse_from_eigs(matinv::DeflatedEigs{}), std::invalid_argument);
  }
  SUBCASE("converged run approximates the direct inverse") {
    const matinv::Design design = design_for(0.5, 100, 48);
    RngStream stream(49, 0);
    CostLedger ledger;
    const matinv::DeflatedEigs eigs = matinv::deflated_eigs(
        design.gram, {matinv::ScheduleKind::Constant, 500}, stream, ledger);
    const linalg::Matrix approx = matinv::inverse_from_eigs(eigs);
    const linalg::Matrix exact = linalg::inverse(design.gram);
    CHECK(linalg::frobenius_norm(approx - exact) / linalg::frobenius_norm(exact) < 1e-3);
    CHECK(approx == linalg::transpose(approx));  // exactly symmetric
  }
}

TEST_CASE("regression_risk closed form") {
  const matinv::Design design = design_for(0.3, 80, 51);
  const std::vector<double> beta = matinv::uniform_beta(10);
  const linalg::Matrix exact = linalg::inverse(design.gram);
  SUBCASE("exact inverse attains sigma2 * tr(S^-1)") {
    CHECK(matinv::regression_risk(exact, design.gram, beta, 1.0) ==
          doctest::Approx(linalg::trace(exact)).epsilon(1e-9));
  }
  SUBCASE("zero estimator pays the full signal") {
    const linalg::Matrix zero(10, 10);
    double beta_norm2 = 0.0;
    for (double b : beta) beta_norm2 += b * b;
    CHECK(matinv::regression_risk(zero, design.gram, beta, 1.0) == doctest::Approx(beta_norm2));
  }
  SUBCASE("exact inverse is optimal among linear reconstructions") {
    RngStream stream(52, 0);
    const double best = matinv::regression_risk(exact, design.gram, beta, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      linalg::Matrix b = exact;
      for (auto& v : b.data()) v += 0.01 * stream.normal();
      CHECK(matinv::regression_risk(b, design.gram, beta, 1.0) >= best - 1e-12);
    }
  }
}

TEST_CASE("regression_risk matches a Monte Carlo noise oracle") {
  RngStream stream(53, 0);
  const DesignConfig config = DesignConfig::with_defaults(2000, 10, 0.45);
  const matinv::Design design = matinv::generate_design(config, stream);
  const std::vector<double> beta = matinv::uniform_beta(10);

  // A deliberately imperfect reconstruction.
  linalg::Matrix b = linalg::inverse(design.gram);
  for (auto& v : b.data()) v *= 1.0 + 0.05;
  const double closed_form = matinv::regression_risk(b, design.gram, beta, 1.0);

  const std::uint64_t replicates = 10000;
  std::vector<double> losses;
  losses.reserve(replicates);
  const linalg::Matrix xt = linalg::transpose(design.x);
  std::vector<double> y(design.x.rows());
  for (std::uint64_t r = 0; r < replicates; ++r) {
    RngStream noise(54, r);
    for (std::size_t i = 0; i < y.size(); ++i) {
      double mean = 0.0;
      for (std::size_t j = 0; j < 10; ++j) mean += design.x(i, j) * beta[j];
      y[i] = mean + noise.normal();
    }
    const std::vector<double> beta_hat = linalg::matvec(b, linalg::matvec(xt, y));
    double loss = 0.0;
    for (std::size_t j = 0; j < 10; ++j)
      loss += (beta_hat[j] - beta[j]) * (beta_hat[j] - beta[j]);
    losses.push_back(loss);
  }
  const double mc_risk = test_support::mean_of(losses);
  const double se = std::sqrt(test_support::variance_of(losses) / static_cast<double>(replicates));
  CHECK(std::abs(mc_risk - closed_form) < 3.0 * se);
}

TEST_CASE("matinv_experiment trajectories") {
  matinv::MatinvExperimentConfig config;
  config.rhos = {0.01, 0.88};
  config.datasets = 20;
  config.master_seed = 4242;
  config.ns_iters = 20;
  config.power_k = 200;
  const std::vector<matinv::Trajectory> trajectories = matinv::matinv_experiment(config);
  REQUIRE(trajectories.size() == 8);  // 2 rhos x 4 methods

  for (const auto& trajectory : trajectories) {
    REQUIRE_FALSE(trajectory.points.empty());
    for (std::size_t i = 1; i < trajectory.points.size(); ++i)
      CHECK(trajectory.points[i].cost > trajectory.points[i - 1].cost);
    CHECK(trajectory.floor_risk > 0.0);
    if (trajectory.method == "ns_safe" || trajectory.method == "power_constant") {
      const double terminal = trajectory.points.back().risk;
      CHECK(std::abs(terminal - trajectory.floor_risk) / trajectory.floor_risk < 0.01);
    }
  }
}

TEST_CASE("safe-init trajectory risk is non-increasing after the first step") {
  // Averaged over datasets and judged at 3 standard errors: near the floor
  // the risk creeps back up by a few 1e-6 because the variance term
  // approaches tr(S^-1) from below while the bias vanishes.
  const std::uint64_t datasets = 50;
  const int iters = 20;
  const std::vector<double> beta = matinv::uniform_beta(10);
  std::vector<std::vector<double>> risks(static_cast<std::size_t>(iters) + 1);
  for (std::uint64_t d = 0; d < datasets; ++d) {
    RngStream stream(4244, d);
    const matinv::Design design = matinv::generate_design(
        DesignConfig::with_defaults(100, 10, 0.01), stream);
    CostLedger ledger;
    const matinv::NewtonSchulzResult result =
        matinv::newton_schulz(design.gram, matinv::NsInit::Safe, iters, ledger);
    for (std::size_t it = 0; it < result.iterates.size(); ++it)
      risks[it].push_back(
          matinv::regression_risk(result.iterates[it], design.gram, beta, 1.0));
  }
  double previous_mean = 0.0, previous_se = 0.0;
  for (std::size_t it = 1; it < risks.size(); ++it) {
    const double mean = test_support::mean_of(risks[it]);
    const double se =
        std::sqrt(test_support::variance_of(risks[it]) / static_cast<double>(datasets));
    if (it >= 2) CHECK(mean <= previous_mean + 3.0 * (se + previous_se));
    previous_mean = mean;
    previous_se = se;
  }
}

TEST_CASE("naive init starts far above the floor when the floor is small") {
  // The achievable ratio scales like ||beta||^2 / tr(S^-1); with 1000 rows
  // the floor is small enough for a 100x gap even at rho = 0.88.
  matinv::MatinvExperimentConfig config;
  config.rhos = {0.88};
  config.n_rows = 1000;
  config.datasets = 10;
  config.master_seed = 4243;
  config.methods = {matinv::Method::NewtonSchulzNaive};
  const std::vector<matinv::Trajectory> trajectories = matinv::matinv_experiment(config);
  REQUIRE(trajectories.size() == 1);
  CHECK(trajectories[0].points.front().risk >= 100.0 * trajectories[0].floor_risk);
  // And it still converges to the floor.
  CHECK(std::abs(trajectories[0].points.back().risk - trajectories[0].floor_risk) /
            trajectories[0].floor_risk <
        0.01);
}
