#include "riskcomp/mc.hpp"

#include <cmath>
#include <stdexcept>

namespace riskcomp::mc {

std::vector<double> sample_contaminated(RngStream& stream, std::int64_t n, double alpha) {
  if (alpha < 0.0 || alpha > 1.0)
    throw std::invalid_argument("sample_contaminated: alpha must be in [0,1]");
  if (n < 0) throw std::invalid_argument("sample_contaminated: n must be non-negative");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& x : out) {
    if (stream.uniform01() < alpha)
      x = 4.0 * stream.student_t3();
    else
      x = stream.normal();
  }
  return out;
}

std::vector<double> sample_normal(RngStream& stream, std::int64_t n, double mu, double sigma2) {
  if (sigma2 <= 0.0) throw std::invalid_argument("sample_normal: sigma2 must be positive");
  if (n < 0) throw std::invalid_argument("sample_normal: n must be non-negative");
  const double sigma = std::sqrt(sigma2);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& x : out) x = mu + sigma * stream.normal();
  return out;
}

}  // namespace riskcomp::mc
