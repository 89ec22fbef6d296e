#pragma once

#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "projlab/mixtures.hpp"
#include "projlab/projector.hpp"
#include "projlab/random.hpp"

namespace projlab {

/// Finite weighted point set: m x d points and m weights summing to 1.
class DiscreteMeasure {
 public:
  /// Throws std::invalid_argument on negative weights, a sum off by more than
  /// 1e-12, a size mismatch, or an empty point set.
  DiscreteMeasure(Matrix points, Vector weights);

  /// Empirical measure of the rows of `points`.
  static DiscreteMeasure uniform(Matrix points);
  /// One-dimensional measure from atom positions and weights.
  static DiscreteMeasure on_line(std::span<const double> positions, std::span<const double> weights);

  int dimension() const noexcept { return static_cast<int>(points_.cols()); }
  int size() const noexcept { return static_cast<int>(points_.rows()); }
  const Matrix& points() const noexcept { return points_; }
  const Vector& weights() const noexcept { return weights_; }

 private:
  Matrix points_;
  Vector weights_;
};

struct DblOptions {
  /// Cap on the merged support size of the two measures.
  int max_support = 400;
  /// Certification tolerance for the duality gap and constraint violations.
  double tolerance = 1e-9;
  /// Nearest neighbours per point in the initial constraint set (d >= 2).
  int initial_neighbours = 8;
};

struct DblResult {
  double value = 0.0;
  double duality_gap = 0.0;
  double max_violation = 0.0;  ///< worst Lipschitz or box violation of the maximizer
  int support = 0;             ///< merged support size with nonzero signed weight
  int constraint_rounds = 0;
  int constraints = 0;
  long pivots = 0;
};

/// Exact bounded-Lipschitz distance
///     sup { sum_i f(x_i) (a_i - b_i) : |f| <= 1, |f(x) - f(y)| <= |x - y| }
/// as a linear program over the f-values on the merged support. Lipschitz
/// constraints are generated lazily until the maximizer satisfies all of them,
/// and the optimum is certified by a feasible dual with gap below tolerance.
/// Throws DimensionError, SupportSizeError or LpError.
DblResult dbl_exact_detailed(const DiscreteMeasure& a, const DiscreteMeasure& b,
                             const DblOptions& options = {});

double dbl_exact(const DiscreteMeasure& a, const DiscreteMeasure& b, const DblOptions& options = {});

struct Discretization {
  DiscreteMeasure measure;
  /// Upper bound on D_BL(empirical measure of the samples, measure).
  double perturbation_bound;
  /// Largest within-bin diameter (1-d); 0 when no coarsening happened.
  double max_bin_diameter;
};

/// Coarsens an n x d sample to at most max_support atoms: identity when n is
/// small enough, quantile binning in 1-d (atom at the bin median), systematic
/// subsampling in d >= 2 (bound reported as the trivial 2).
Discretization dbl_discretize(const Matrix& samples, int max_support);

/// Quantile discretization of the 1-d mixture Q with m equal-mass atoms at the
/// levels (k - 1/2) / m. perturbation_bound is sum_k min(diam_k, 2) / m over
/// the quantile bins (tails count as 2).
Discretization discretize_mixture(const MixingMeasure& mixing, int m);

using Cdf = std::function<double(double)>;

/// sup_t |F_n(t) - F(t)| over the cadlag empirical CDF, evaluated exactly at
/// the order statistics.
double ks_1d(std::span<const double> sample, const Cdf& cdf);

/// sup_t |F_a(t) - F_b(t)| over the merged order statistics.
double ks_two_sample_1d(std::span<const double> a, std::span<const double> b);

/// c(alpha) * sqrt((n + m) / (n m)) with the asymptotic Kolmogorov quantile c.
double ks_two_sample_critical(int n, int m, double alpha);

/// Maps a unit direction u to the CDF of u^T Y under the reference law.
using DirectionalCdf = std::function<Cdf(const Vector& direction)>;
using HalfspaceReference = std::variant<Matrix, DirectionalCdf>;

/// Lower bound for the halfspace norm: the largest 1-d KS statistic over the
/// d coordinate axes plus M random unit directions. Direction k is drawn from
/// its own substream, so a larger M only adds directions. For d = 1 this is
/// ks_1d / ks_two_sample_1d on the single axis.
double halfspace_ks(const Matrix& a, const HalfspaceReference& reference, int directions,
                    RandomStream& rng);

/// u^T Y ~ Q(./|u|) for Y ~ int N_{d,v} R(dv), any d.
DirectionalCdf mixture_direction_cdf(const MixingMeasure& mixing);

/// For (Y, Y~) i.i.d. Q in R^{2d} and u = (u1, u2): a mixture over pairs of
/// atoms of N(0, |u1|^2 v_j + |u2|^2 v_k).
DirectionalCdf product_mixture_direction_cdf(const MixingMeasure& mixing, int d);

}  // namespace projlab
