#include "riskcomp/cost_model.hpp"

#include <algorithm>
#include <stdexcept>

namespace riskcomp {

const char* cost_category_name(CostCategory category) {
  switch (category) {
    case CostCategory::DataLook:
      return "data_look";
    case CostCategory::Comparison:
      return "comparison";
    case CostCategory::VectorMultiply:
      return "vector_multiply";
  }
  return "unknown";
}

void CostLedger::charge(CostCategory category, std::uint64_t amount) {
  totals_[static_cast<std::size_t>(category)] += amount;
  grand_total_ += amount;
}

void CostLedger::merge(const CostLedger& other) {
  for (std::size_t i = 0; i < kNumCostCategories; ++i) totals_[i] += other.totals_[i];
  grand_total_ += other.grand_total_;
}

std::string CostLedger::to_json() const {
  std::string out = "{";
  for (std::size_t i = 0; i < kNumCostCategories; ++i) {
    out += '"';
    out += cost_category_name(static_cast<CostCategory>(i));
    out += "\":";
    out += std::to_string(totals_[i]);
    out += ',';
  }
  out += "\"grand_total\":";
  out += std::to_string(grand_total_);
  out += '}';
  return out;
}

CostLedger ledger_charge(CostLedger ledger, const CostUnit& unit) {
  ledger.charge(unit);
  return ledger;
}

void validate_allocation(const Allocation& alloc, std::int64_t n) {
  if (alloc.n1 < 0 || alloc.n2 < 0 || alloc.n12 < 0)
    throw std::invalid_argument("allocation counts must be non-negative");
  if (alloc.samples_used() > n)
    throw std::invalid_argument("allocation uses more than n samples");
}

double allocation_cost(const Allocation& alloc, const std::array<double, 2>& unit_costs) {
  if (alloc.n1 < 0 || alloc.n2 < 0 || alloc.n12 < 0)
    throw std::invalid_argument("allocation counts must be non-negative");
  if (unit_costs[0] <= 0.0 || unit_costs[1] <= 0.0)
    throw std::invalid_argument("unit costs must be positive");
  return static_cast<double>(alloc.n1) * unit_costs[0] +
         static_cast<double>(alloc.n2) * unit_costs[1] +
         static_cast<double>(alloc.n12) * (unit_costs[0] + unit_costs[1]);
}

BlockAllocation::BlockAllocation(int p, std::vector<SampleBlock> blocks)
    : p_(p), blocks_(std::move(blocks)) {
  if (p < 1 || p > 31) throw std::invalid_argument("block allocation: p must be in [1, 31]");
  const std::uint32_t all = (1u << p) - 1u;
  for (const auto& block : blocks_) {
    if (block.count < 0) throw std::invalid_argument("block allocation: negative block count");
    if (block.members == 0 || (block.members & ~all) != 0)
      throw std::invalid_argument("block allocation: block members out of range");
  }
}

std::int64_t BlockAllocation::size(int k) const {
  std::int64_t total = 0;
  const std::uint32_t bit = 1u << k;
  for (const auto& block : blocks_)
    if (block.members & bit) total += block.count;
  return total;
}

std::int64_t BlockAllocation::overlap(int k, int l) const {
  std::int64_t total = 0;
  const std::uint32_t bits = (1u << k) | (1u << l);
  for (const auto& block : blocks_)
    if ((block.members & bits) == bits) total += block.count;
  return total;
}

std::int64_t BlockAllocation::total_samples() const {
  std::int64_t total = 0;
  for (const auto& block : blocks_) total += block.count;
  return total;
}

BlockAllocation BlockAllocation::from_two_statistic(const Allocation& alloc) {
  if (alloc.n1 < 0 || alloc.n2 < 0 || alloc.n12 < 0)
    throw std::invalid_argument("allocation counts must be non-negative");
  std::vector<SampleBlock> blocks;
  if (alloc.n1 > 0) blocks.push_back({0b01u, alloc.n1});
  if (alloc.n12 > 0) blocks.push_back({0b11u, alloc.n12});
  if (alloc.n2 > 0) blocks.push_back({0b10u, alloc.n2});
  return BlockAllocation(2, std::move(blocks));
}

Allocation BlockAllocation::to_two_statistic() const {
  if (p_ != 2) throw std::invalid_argument("to_two_statistic requires p == 2");
  const std::int64_t o = overlap(0, 1);
  return Allocation{size(0) - o, size(1) - o, o};
}

double allocation_cost(const BlockAllocation& alloc, std::span<const double> unit_costs) {
  if (static_cast<int>(unit_costs.size()) != alloc.p())
    throw std::invalid_argument("allocation_cost: unit cost size mismatch");
  for (double c : unit_costs)
    if (c <= 0.0) throw std::invalid_argument("unit costs must be positive");
  double total = 0.0;
  for (int k = 0; k < alloc.p(); ++k)
    total += unit_costs[k] * static_cast<double>(alloc.size(k));
  return total;
}

double CostProfile::nanos(const CostLedger& ledger) const {
  double total = 0.0;
  for (std::size_t i = 0; i < kNumCostCategories; ++i)
    total += ns_per_unit[i] * static_cast<double>(ledger.total(static_cast<CostCategory>(i)));
  return total;
}

}  // namespace riskcomp
