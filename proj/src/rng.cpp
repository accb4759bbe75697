#include "riskcomp/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace riskcomp {

namespace {

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

inline std::uint64_t splitmix64_next(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), stream_id_(stream_id) {
  // Seed by xoring two independent splitmix sequences, one walked from the
  // master seed and one from the stream id, so both inputs avalanche fully.
  std::uint64_t a = master_seed;
  std::uint64_t b = stream_id ^ 0x6a09e667f3bcc909ULL;
  bool all_zero = true;
  for (auto& s : state_) {
    s = splitmix64_next(a) ^ rotl64(splitmix64_next(b), 31);
    all_zero = all_zero && s == 0;
  }
  if (all_zero) state_[0] = 1;
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl64(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl64(state_[3], 45);
  return result;
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: bound must be >= 1");
  const std::uint64_t min = (-bound) % bound;  // 2^64 mod bound
  std::uint64_t r;
  do {
    r = next_u64();
  } while (r < min);
  return r % bound;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  has_spare_ = true;
  return u * f;
}

double RngStream::gamma(double shape, double rate) {
  if (shape <= 0.0 || rate <= 0.0)
    throw std::invalid_argument("gamma: shape and rate must be positive");
  if (shape < 1.0) {
    // Boost the shape by one, then correct with U^{1/shape}.
    double u;
    do {
      u = uniform01();
    } while (u == 0.0);
    return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / (3.0 * std::sqrt(d));
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v / rate;
  }
}

double RngStream::student_t3() {
  const double z = normal();
  double w = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double g = normal();
    w += g * g;
  }
  return z / std::sqrt(w / 3.0);
}

bool RngStream::bernoulli(double prob) {
  if (prob < 0.0 || prob > 1.0)
    throw std::invalid_argument("bernoulli: prob must be in [0,1]");
  return uniform01() < prob;
}

RngStream derive_stream(std::uint64_t master_seed, std::uint64_t replicate_index) {
  return RngStream(master_seed, replicate_index);
}

}  // namespace riskcomp
