#include "doctest.h"

#include <stdexcept>

#include <cmath>
#include <vector>

#include "riskcomp/mc.hpp"
#include "riskcomp/rng.hpp"
#include "support/test_support.hpp"

using namespace riskcomp;

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(7, 0);
  RngStream b(7, 0);
  RngStream c(7, 1);
  bool all_equal = true;
  bool any_equal_c = false;
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t va = a.next_u64();
    all_equal = all_equal && va == b.next_u64();
    any_equal_c = any_equal_c || va == c.next_u64();
  }
  CHECK(all_equal);
  CHECK_FALSE(any_equal_c);
}

TEST_CASE("derive_stream matches direct construction") {
  RngStream direct(42, 9);
  RngStream derived = derive_stream(42, 9);
  for (int i = 0; i < 16; ++i) CHECK(direct.next_u64() == derived.next_u64());
}

TEST_CASE("consecutive streams are empirically uncorrelated") {
  // 1001 streams from master seed 7, 1000 uniforms each. Under independence
  // each pair correlation has sd ~ 1/sqrt(1000) ~ 0.032, so across 1000
  // pairs a fraction beyond 0.1 (~3.2 sd) is expected ~0.0016 of the time;
  // anything past 0.2 would mean real correlation.
  const int streams = 1001;
  const int draws = 1000;
  std::vector<std::vector<double>> u(streams);
  for (int k = 0; k < streams; ++k) {
    RngStream stream(7, static_cast<std::uint64_t>(k));
    u[k].resize(draws);
    for (auto& x : u[k]) x = stream.uniform01();
  }
  int beyond_tolerance = 0;
  double max_abs = 0.0;
  for (int k = 0; k + 1 < streams; ++k) {
    const double r = test_support::correlation_of(u[k], u[k + 1]);
    max_abs = std::max(max_abs, std::abs(r));
    if (std::abs(r) >= 0.1) ++beyond_tolerance;
  }
  CHECK(max_abs < 0.2);
  CHECK(beyond_tolerance <= 5);
}

TEST_CASE("uniform01 mean and range") {
  RngStream stream(3, 0);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = stream.uniform01();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    sum += x;
  }
  CHECK(sum / 100000.0 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("contaminated sampler moments") {
  SUBCASE("alpha = 0 is standard normal") {
    RngStream stream(100, 0);
    const std::vector<double> x = mc::sample_contaminated(stream, 1000000, 0.0);
    CHECK(test_support::variance_of(x) == doctest::Approx(1.0).epsilon(0.01));
  }
  SUBCASE("alpha = 1 has the scaled-t3 variance 48") {
    RngStream stream(101, 0);
    const std::vector<double> x = mc::sample_contaminated(stream, 1000000, 1.0);
    CHECK(test_support::variance_of(x) == doctest::Approx(48.0).epsilon(0.05));
  }
  SUBCASE("alpha = 0.1 mean is zero within 3 standard errors") {
    RngStream stream(102, 0);
    const std::vector<double> x = mc::sample_contaminated(stream, 1000000, 0.1);
    const double se = std::sqrt(test_support::variance_of(x) / 1e6);
    CHECK(std::abs(test_support::mean_of(x)) < 3.0 * se);
  }
  SUBCASE("alpha outside [0,1] rejected") {
    RngStream stream(103, 0);
    CHECK_THROWS_AS(mc::sample_contaminated(stream, 10, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(mc::sample_contaminated(stream, 10, 1.1), std::invalid_argument);
  }
}

namespace {

std::vector<double> pass_through(const std::vector<double>& sample, RngStream&, CostLedger&) {
  return sample;
}

}  // namespace

TEST_CASE("run_replicates: identity estimator has zero risk") {
  const std::vector<double> truth{1.5, -2.0};
  const auto sampler = [&](RngStream&) { return truth; };
  const mc::RiskEstimate risk = mc::run_replicates(sampler, pass_through, truth, 100, 5);
  CHECK(risk.mean_loss == 0.0);
  CHECK(risk.std_error == 0.0);
  CHECK(risk.replicates == 100);
  CHECK(risk.loss_kind == mc::LossKind::SquaredErrorVector);
}

TEST_CASE("run_replicates: sample-mean risk matches sigma^2/n") {
  const std::vector<double> truth{0.0};
  const auto sampler = [](RngStream& stream) { return mc::sample_normal(stream, 100, 0.0, 1.0); };
  const auto estimator = [](const std::vector<double>& sample, RngStream&, CostLedger& ledger) {
    double sum = 0.0;
    for (double x : sample) sum += x;
    ledger.charge(CostCategory::DataLook, sample.size());
    return std::vector<double>{sum / static_cast<double>(sample.size())};
  };
  mc::MeanCost cost;
  const mc::RiskEstimate risk =
      mc::run_replicates(sampler, estimator, truth, 100000, 2024, {}, &cost);
  CHECK(std::abs(risk.mean_loss - 0.01) < 3.0 * risk.std_error);
  CHECK(cost.per_category[0] == doctest::Approx(100.0));
  CHECK(cost.total == doctest::Approx(100.0));
}

TEST_CASE("run_replicates is bit-identical across runs and thread counts") {
  const std::vector<double> truth{0.0};
  const auto sampler = [](RngStream& stream) { return mc::sample_normal(stream, 50, 0.0, 1.0); };
  const auto estimator = [](const std::vector<double>& sample, RngStream&, CostLedger&) {
    double sum = 0.0;
    for (double x : sample) sum += x;
    return std::vector<double>{sum / static_cast<double>(sample.size())};
  };
  const mc::RiskEstimate base = mc::run_replicates(sampler, estimator, truth, 2000, 7);
  const mc::RiskEstimate again = mc::run_replicates(sampler, estimator, truth, 2000, 7);
  mc::McOptions threaded;
  threaded.threads = 3;
  const mc::RiskEstimate parallel =
      mc::run_replicates(sampler, estimator, truth, 2000, 7, threaded);
  CHECK(base == again);
  CHECK(base == parallel);
}

TEST_CASE("run_replicates aborts with the failing replicate index") {
  const std::vector<double> truth{0.0};
  const auto sampler = [](RngStream&) { return std::vector<double>{1.0}; };
  const auto estimator = [](const std::vector<double>&, RngStream& stream, CostLedger&) {
    if (stream.stream_id() == 17) throw std::runtime_error("boom");
    return std::vector<double>{0.0};
  };
  CHECK_THROWS_WITH_AS(mc::run_replicates(sampler, estimator, truth, 100, 0),
                       "replicate 17: boom", std::runtime_error);
}

TEST_CASE("run_replicates applies diagonal loss weights") {
  const std::vector<double> truth{0.0, 0.0};
  const auto sampler = [](RngStream&) { return std::vector<double>{1.0, 2.0}; };
  const auto estimator = [](const std::vector<double>& sample, RngStream&, CostLedger&) {
    return sample;
  };
  mc::McOptions options;
  options.weights = {1.0, 0.0};
  const mc::RiskEstimate risk = mc::run_replicates(sampler, estimator, truth, 10, 0, options);
  CHECK(risk.mean_loss == doctest::Approx(1.0));
}

TEST_CASE("student t3 has variance near 3") {
  RngStream stream(55, 0);
  std::vector<double> x(500000);
  for (auto& v : x) v = stream.student_t3();
  CHECK(test_support::variance_of(x) == doctest::Approx(3.0).epsilon(0.08));
}

TEST_CASE("gamma sampler matches mean and variance") {
  RngStream stream(56, 0);
  const double shape = 2.5, rate = 1.5;
  std::vector<double> x(400000);
  for (auto& v : x) v = stream.gamma(shape, rate);
  CHECK(test_support::mean_of(x) == doctest::Approx(shape / rate).epsilon(0.01));
  CHECK(test_support::variance_of(x) == doctest::Approx(shape / (rate * rate)).epsilon(0.02));
}
