#ifndef RISKCOMP_RNG_HPP
#define RISKCOMP_RNG_HPP

#include <array>
#include <cstdint>

namespace riskcomp {

/// Counter-derived xoshiro256++ stream.
///
/// Two streams built from the same (master_seed, stream_id) reproduce the
/// same sequence bit for bit; distinct stream ids give statistically
/// independent sequences, so replicate r of a simulation can always be
/// re-run in isolation and simulations merge deterministically regardless
/// of execution order.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform01();

  /// Uniform integer on [0, bound). bound must be >= 1.
  std::uint64_t uniform_below(std::uint64_t bound);

  /// Standard normal via the Marsaglia polar method (second draw cached).
  double normal();

  /// Gamma(shape, rate) via Marsaglia-Tsang squeeze.
  double gamma(double shape, double rate);

  /// Central Student-t with 3 degrees of freedom (normal / sqrt(chi2_3/3)).
  double student_t3();

  bool bernoulli(double prob);

 private:
  std::array<std::uint64_t, 4> state_;
  std::uint64_t master_seed_ = 0;
  std::uint64_t stream_id_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Stream for replicate `replicate_index` of a run seeded by `master_seed`.
RngStream derive_stream(std::uint64_t master_seed, std::uint64_t replicate_index);

}  // namespace riskcomp

#endif  // RISKCOMP_RNG_HPP
