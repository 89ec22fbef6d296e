#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "projlab/projector.hpp"
#include "projlab/random.hpp"

namespace projlab {

/// A finitely supported probability measure R on [0, inf), the law of the
/// variance v in the limit Q = int N_{d,v} R(dv).
class MixingMeasure {
 public:
  enum class Kind { PointMass, TwoPoint, TruncatedPoisson, Custom };

  struct Atom {
    double v;
    double p;
  };

  static MixingMeasure point_mass(double v);
  static MixingMeasure two_point(double v1, double p1, double v2);
  /// Poisson(lambda) cut at the smallest k_max whose tail mass is below 1e-12,
  /// renormalized over 0..k_max.
  static MixingMeasure truncated_poisson(double lambda);
  /// Throws std::invalid_argument unless v >= 0, p >= 0 and sum p = 1 within 1e-12.
  static MixingMeasure custom(std::vector<Atom> atoms);

  Kind kind() const noexcept { return kind_; }
  std::span<const Atom> atoms() const noexcept { return atoms_; }
  /// Poisson rate for TruncatedPoisson, 0 otherwise.
  double lambda() const noexcept { return lambda_; }

  bool has_atom_at_zero() const noexcept;
  double mean() const noexcept;

  /// Draw v ~ R.
  double sample(RandomStream& rng) const;

  /// {"atoms": [[v, p], ...], "kind": ...}; "lambda" is added for Poisson.
  nlohmann::json to_json() const;
  /// Accepts {"atoms": [[v, p], ...]}, {"point_mass": v} or {"truncated_poisson": lambda}.
  static MixingMeasure from_json(const nlohmann::json& j);

 private:
  MixingMeasure(Kind kind, std::vector<Atom> atoms, double lambda = 0.0);

  Kind kind_;
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
  double lambda_ = 0.0;
};

std::string to_string(MixingMeasure::Kind kind);

/// The normal scale mixture Q = int N_{d,v} R(dv).
struct MixtureLaw {
  int d = 1;
  MixingMeasure mixing;

  bool atom_at_zero() const noexcept { return mixing.has_atom_at_zero(); }
};

/// Q(u) = sum_k p_k Phi(u / sqrt(v_k)); an atom at v = 0 contributes 1{u >= 0}.
double mixture_cdf(const MixingMeasure& mixing, double u) noexcept;

/// Same as mixture_cdf; throws DimensionError unless law.d == 1.
double mixture_cdf_1d(const MixtureLaw& law, double u);

/// Generalized inverse inf{u : Q(u) >= p} for p in (0, 1).
double mixture_quantile(const MixingMeasure& mixing, double p);

/// n x d matrix; each row draws v ~ R and then d i.i.d. N(0, v) coordinates.
Matrix sample_mixture(const MixtureLaw& law, int n, RandomStream& rng);

/// The covariance kernels of B_Q (Full), B_Q' (Within) and B_Q'' (Between)
/// for the half-line indicators 1_{(-inf, t]}.
enum class KernelKind { Full, Within, Between };

std::string to_string(KernelKind kind);

double cov_kernel(KernelKind kind, const MixingMeasure& mixing, double s, double t);

/// All three kernels at (s, t) from one set of shared subexpressions.
struct KernelTriple {
  double full;
  double within;
  double between;
};
KernelTriple cov_kernels(const MixingMeasure& mixing, double s, double t);

struct GridCovariance {
  std::vector<double> grid;
  KernelKind kind;
  Matrix matrix;
};

/// Kernel evaluated on a strictly increasing grid; throws std::invalid_argument
/// otherwise.
GridCovariance grid_covariance(KernelKind kind, const MixingMeasure& mixing,
                               std::span<const double> grid);

/// The m quantiles of Q at levels k / (m + 1), k = 1..m, deduplicated so the
/// result is strictly increasing (atoms of Q can repeat a quantile).
std::vector<double> quantile_grid(const MixingMeasure& mixing, int m);

}  // namespace projlab
