#pragma once

namespace projlab {

/// Standard Gaussian distribution function, via erfc so both tails keep
/// full relative precision.
double normal_cdf(double x) noexcept;

/// CDF of N(0, v); v == 0 is the right-continuous step at the origin.
double scaled_normal_cdf(double x, double variance) noexcept;

}  // namespace projlab
