#include "doctest.h"

#include <stdexcept>

#include <array>

#include "riskcomp/cost_model.hpp"
#include "riskcomp/rng.hpp"

using namespace riskcomp;

TEST_CASE("allocation cost: full-overlap, streaming, and mixed splits") {
  const std::array<double, 2> unit{1.0, 1.0};
  const std::int64_t n = 37;
  CHECK(allocation_cost(Allocation{0, 0, n}, unit) == doctest::Approx(2.0 * n));
  CHECK(allocation_cost(Allocation{12, n - 12, 0}, unit) == doctest::Approx(n));
  CHECK(allocation_cost(Allocation{3, 4, 5}, unit) == doctest::Approx(17.0));
}

TEST_CASE("allocation cost rejects bad inputs") {
  CHECK_THROWS_AS(allocation_cost(Allocation{-1, 0, 2}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(allocation_cost(Allocation{1, 1, 1}, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(allocation_cost(Allocation{1, 1, 1}, {1.0, -2.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate_allocation(Allocation{5, 5, 5}, 10), std::invalid_argument);
}

TEST_CASE("allocation cost is linear in the unit costs") {
  RngStream stream(11, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const Allocation alloc{static_cast<std::int64_t>(stream.uniform_below(50)),
                           static_cast<std::int64_t>(stream.uniform_below(50)),
                           static_cast<std::int64_t>(stream.uniform_below(50))};
    const double c1 = 0.25 + stream.uniform01() * 3.0;
    const double c2 = 0.25 + stream.uniform01() * 3.0;
    CHECK(allocation_cost(alloc, {2.0 * c1, 2.0 * c2}) ==
          doctest::Approx(2.0 * allocation_cost(alloc, {c1, c2})).epsilon(1e-12));
  }
}

TEST_CASE("streaming splits always cost n at unit costs") {
  const std::int64_t n = 64;
  for (std::int64_t s = 1; s < n; ++s)
    CHECK(allocation_cost(Allocation{s, n - s, 0}, {1.0, 1.0}) == doctest::Approx(n));
}

TEST_CASE("ledger examples") {
  CostLedger ledger;
  ledger = ledger_charge(ledger, {CostCategory::DataLook, 5});
  CHECK(ledger.grand_total() == 5);
  ledger = ledger_charge(ledger, {CostCategory::Comparison, 3});
  CHECK(ledger.grand_total() == 8);
  const CostLedger before = ledger;
  ledger = ledger_charge(ledger, {CostCategory::VectorMultiply, 0});
  CHECK(ledger == before);
}

TEST_CASE("ledger totals are monotone and consistent under random charges") {
  RngStream stream(13, 0);
  CostLedger ledger;
  std::uint64_t previous_grand = 0;
  for (int i = 0; i < 500; ++i) {
    const auto category = static_cast<CostCategory>(stream.uniform_below(3));
    ledger.charge(category, stream.uniform_below(20));
    CHECK(ledger.grand_total() >= previous_grand);
    std::uint64_t sum = 0;
    for (std::size_t c = 0; c < kNumCostCategories; ++c)
      sum += ledger.total(static_cast<CostCategory>(c));
    CHECK(sum == ledger.grand_total());
    previous_grand = ledger.grand_total();
  }
}

TEST_CASE("ledger merge sums category-wise") {
  CostLedger a, b;
  a.charge(CostCategory::DataLook, 7);
  b.charge(CostCategory::DataLook, 2);
  b.charge(CostCategory::VectorMultiply, 9);
  a.merge(b);
  CHECK(a.total(CostCategory::DataLook) == 9);
  CHECK(a.total(CostCategory::VectorMultiply) == 9);
  CHECK(a.grand_total() == 18);
}

TEST_CASE("ledger json snapshot") {
  CostLedger ledger;
  ledger.charge(CostCategory::DataLook, 4);
  ledger.charge(CostCategory::Comparison, 1);
  CHECK(ledger.to_json() ==
        "{\"data_look\":4,\"comparison\":1,\"vector_multiply\":0,\"grand_total\":5}");
}

TEST_CASE("block allocation sizes and overlaps") {
  // Blocks: 3 samples feeding stat 0 only, 5 feeding both, 2 feeding stat 1.
  const BlockAllocation alloc(2, {{0b01u, 3}, {0b11u, 5}, {0b10u, 2}});
  CHECK(alloc.size(0) == 8);
  CHECK(alloc.size(1) == 7);
  CHECK(alloc.overlap(0, 1) == 5);
  CHECK(alloc.overlap(0, 0) == 8);
  CHECK(alloc.total_samples() == 10);

  const Allocation two = alloc.to_two_statistic();
  CHECK(two == Allocation{3, 2, 5});
  CHECK(BlockAllocation::from_two_statistic(two) == alloc);
}

TEST_CASE("general allocation cost agrees with the two-statistic form") {
  RngStream stream(17, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const Allocation alloc{static_cast<std::int64_t>(stream.uniform_below(40)) + 1,
                           static_cast<std::int64_t>(stream.uniform_below(40)) + 1,
                           static_cast<std::int64_t>(stream.uniform_below(40))};
    const double c1 = 0.5 + stream.uniform01();
    const double c2 = 0.5 + stream.uniform01();
    const std::array<double, 2> costs{c1, c2};
    const std::vector<double> costs_vec{c1, c2};
    CHECK(allocation_cost(BlockAllocation::from_two_statistic(alloc), costs_vec) ==
          doctest::Approx(allocation_cost(alloc, costs)).epsilon(1e-12));
  }
}

TEST_CASE("block allocation validates members and counts") {
  CHECK_THROWS_AS(BlockAllocation(2, {{0b100u, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(BlockAllocation(2, {{0b0u, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(BlockAllocation(2, {{0b01u, -1}}), std::invalid_argument);
}

TEST_CASE("benchmark profile maps counts to nanoseconds") {
  CostLedger ledger;
  ledger.charge(CostCategory::DataLook, 10);
  ledger.charge(CostCategory::VectorMultiply, 2);
  CostProfile profile;
  profile.ns_per_unit = {1.5, 2.0, 10.0};
  CHECK(profile.nanos(ledger) == doctest::Approx(15.0 + 20.0));
}
