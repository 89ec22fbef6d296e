#pragma once

#include <vector>

#include "projlab/empirical.hpp"
#include "projlab/mixtures.hpp"
#include "projlab/projector.hpp"
#include "projlab/random.hpp"

namespace projlab {

/// Lower-triangular L with L L^T = C + jitter_used * I.
struct CholeskyFactor {
  std::vector<double> grid;
  Matrix lower;
  double jitter_used = 0.0;
};

/// Jitters tried in order.
inline constexpr double kJitterLadder[] = {0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6};

/// Factors C + jitter I with the smallest jitter from the ladder whose factor
/// reproduces it within 1e-8 relative Frobenius error. Throws
/// std::invalid_argument for an asymmetric matrix or one with an eigenvalue
/// below -1e-9, FactorizationError when even 1e-6 is not enough.
CholeskyFactor cholesky_with_jitter(const GridCovariance& c);

/// L g with g standard Gaussian.
ProcessPath sample_gp_path(const CholeskyFactor& f, RandomStream& rng);

/// L paths within_l + between with a single shared between draw.
/// Throws std::invalid_argument when the grids differ.
std::vector<ProcessPath> sample_decomposed(const CholeskyFactor& within, const CholeskyFactor& between, int L,
                                           RandomStream& rng);

/// P(sup_t |B(t)| <= x) for a standard Brownian bridge B.
double kolmogorov_cdf(double x);

/// Inverse of kolmogorov_cdf on (0, 1).
double kolmogorov_quantile(double p);

}  // namespace projlab
