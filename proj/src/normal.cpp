#include "projlab/normal.hpp"

#include <cmath>
#include <numbers>

namespace projlab {

double normal_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double scaled_normal_cdf(double x, double variance) noexcept {
  if (variance <= 0.0) return x >= 0.0 ? 1.0 : 0.0;
  return normal_cdf(x / std::sqrt(variance));
}

}  // namespace projlab
