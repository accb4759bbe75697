#ifndef RISKCOMP_COST_MODEL_HPP
#define RISKCOMP_COST_MODEL_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace riskcomp {

/// Abstract operation categories every estimator charges against.
enum class CostCategory { DataLook = 0, Comparison = 1, VectorMultiply = 2 };

inline constexpr std::size_t kNumCostCategories = 3;

const char* cost_category_name(CostCategory category);

struct CostUnit {
  CostCategory category = CostCategory::DataLook;
  std::uint64_t amount = 0;
};

/// Append-only tally of abstract compute units by category. Totals never
/// decrease and the grand total always equals the sum over categories.
/// Single-writer; parallel replicates each own a ledger and merge afterward.
class CostLedger {
 public:
  void charge(CostCategory category, std::uint64_t amount);
  void charge(const CostUnit& unit) { charge(unit.category, unit.amount); }

  std::uint64_t total(CostCategory category) const {
    return totals_[static_cast<std::size_t>(category)];
  }
  std::uint64_t grand_total() const { return grand_total_; }

  /// Sum another ledger into this one (replicate merge).
  void merge(const CostLedger& other);

  /// {"data_look": n, "comparison": n, "vector_multiply": n, "grand_total": n}
  std::string to_json() const;

  friend bool operator==(const CostLedger&, const CostLedger&) = default;

 private:
  std::array<std::uint64_t, kNumCostCategories> totals_{0, 0, 0};
  std::uint64_t grand_total_ = 0;
};

/// Value-semantics charge: returns the ledger with `unit` added.
CostLedger ledger_charge(CostLedger ledger, const CostUnit& unit);

/// Two-statistic sample split: n1 samples feed only the first statistic,
/// n2 only the second, n12 feed both.
struct Allocation {
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
  std::int64_t n12 = 0;

  std::int64_t looks() const { return n1 + n2 + 2 * n12; }
  std::int64_t samples_used() const { return n1 + n2 + n12; }

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

/// Throws std::invalid_argument if counts are negative or exceed n.
void validate_allocation(const Allocation& alloc, std::int64_t n);

/// n1*c1 + n2*c2 + n12*(c1+c2). Unit costs must be positive.
double allocation_cost(const Allocation& alloc, const std::array<double, 2>& unit_costs);

/// One laminar block: `count` consecutive samples feeding every statistic
/// whose bit is set in `members`.
struct SampleBlock {
  std::uint32_t members = 0;
  std::int64_t count = 0;

  friend bool operator==(const SampleBlock&, const SampleBlock&) = default;
};

/// General p-statistic allocation stored as sequential blocks of samples.
/// Restricting overlap patterns to this layout keeps every stored
/// allocation realizable: assign sample indices block by block.
class BlockAllocation {
 public:
  BlockAllocation() = default;
  BlockAllocation(int p, std::vector<SampleBlock> blocks);

  int p() const { return p_; }
  const std::vector<SampleBlock>& blocks() const { return blocks_; }

  /// |S_k|
  std::int64_t size(int k) const;
  /// |S_k ∩ S_l|; overlap(k, k) == size(k).
  std::int64_t overlap(int k, int l) const;
  /// Number of distinct samples consumed.
  std::int64_t total_samples() const;

  static BlockAllocation from_two_statistic(const Allocation& alloc);
  Allocation to_two_statistic() const;  // requires p == 2

  friend bool operator==(const BlockAllocation&, const BlockAllocation&) = default;

 private:
  int p_ = 0;
  std::vector<SampleBlock> blocks_;
};

/// Σ_k c_k |S_k|. Agrees with the two-statistic form when both apply.
double allocation_cost(const BlockAllocation& alloc, std::span<const double> unit_costs);

/// Reporting-only hook mapping abstract categories to measured nanoseconds;
/// the core accounting stays in integer operation counts.
struct CostProfile {
  std::array<double, kNumCostCategories> ns_per_unit{1.0, 1.0, 1.0};
  double nanos(const CostLedger& ledger) const;
};

}  // namespace riskcomp

#endif  // RISKCOMP_COST_MODEL_HPP
