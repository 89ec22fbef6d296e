#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "projlab/metrics.hpp"
#include "projlab/mixtures.hpp"
#include "projlab/projector.hpp"
#include "projlab/random.hpp"

namespace projlab {

/// Entry k (1-based) of a length-q vector: scale * k^index_exponent * q^dim_exponent,
/// or fixed values that only instantiate at q = values.size().
struct VectorProfile {
  double scale = 1.0;
  double index_exponent = 0.0;
  double dim_exponent = 0.0;
  std::optional<std::vector<double>> values;

  static VectorProfile constant(double c) { return {c, 0.0, 0.0, std::nullopt}; }
  static VectorProfile fixed(std::vector<double> v) { return {1.0, 0.0, 0.0, std::move(v)}; }

  Vector at(int q) const;
};

enum class ComponentLaw { Gaussian, Rademacher, Uniform };

/// X = U (mu_k + sigma_k Z_k)_k with i.i.d. mean-0 variance-1 Z_k.
struct RotatedIndependent {
  enum class Rotation { Identity, Haar, Fixed };

  VectorProfile mu = VectorProfile::constant(0.0);
  VectorProfile sigma = VectorProfile::constant(1.0);
  ComponentLaw law = ComponentLaw::Gaussian;
  Rotation rotation = Rotation::Identity;
  /// Seed of the fixed Haar rotation drawn per dimension (Rotation::Haar).
  std::uint64_t rotation_seed = 0;
  /// Explicit q x q orthogonal matrix (Rotation::Fixed).
  std::optional<Matrix> rotation_matrix;

  /// The rotation used at dimension q; identity when none.
  Matrix rotation_at(int q) const;
};

/// Components i.i.d. with P(X_k = sqrt(q)) = lambda / q, else 0.
struct SparseSpike {
  double lambda = 1.0;
};

/// Standard Gaussian on R^q.
struct GaussianIso {};

/// X = eps sqrt(q) e_1 with a random sign; violates the inner-product condition.
struct NonConvergent {};

/// X = sqrt(V) Z with V ~ R and Z standard Gaussian on R^q; the projected law
/// is exactly Q = int N_{d,v} R(dv) for every q.
struct GaussianScaleMixture {
  MixingMeasure mixing = MixingMeasure::point_mass(1.0);
};

/// Rows of a fixed data matrix, resampled uniformly with replacement.
struct Empirical {
  Matrix data;
  std::string origin;
};

/// A high-dimensional distribution family P^(q).
struct SourceSpec {
  using Variant = std::variant<RotatedIndependent, SparseSpike, GaussianIso, NonConvergent,
                               GaussianScaleMixture, Empirical>;
  Variant variant = GaussianIso{};

  std::string name() const;
  /// Throws DimensionError when the family cannot be instantiated at q.
  void check_dimension(int q) const;

  nlohmann::json to_json() const;
  /// Empirical sources are read from "path" (with optional "header").
  static SourceSpec from_json(const nlohmann::json& j);
};

/// n x q matrix of i.i.d. rows from P^(q).
Matrix sample_source(const SourceSpec& spec, int q, int n, RandomStream& rng);

/// Projected law gamma^T P when it is finitely supported (NonConvergent,
/// Empirical); nullopt otherwise.
std::optional<DiscreteMeasure> projected_population(const SourceSpec& spec, const ProjectionMatrix& p);

struct A2Report {
  std::vector<double> norm_stats;   ///< |X|^2 / q
  std::vector<double> inner_stats;  ///< X^T X~ / q for independent pairs
  double dbl_to_R = 0.0;
  double dbl_bound = 0.0;  ///< discretization slack included in dbl_to_R
  double inner_exceed_frac = 0.0;
  double double_sum = 0.0;  ///< (1/n^2) sum_{i,j} min(|X_i^T X_j / q|, 1), diagonal included
};

struct A2Options {
  double eps = 0.1;
  int max_support = 200;
};

/// Rows entering double_sum in a2_statistics; the statistic is quadratic in m.
inline constexpr int kDoubleSumRows = 4000;

/// Draws m independent pairs (X, X~) and reports the norm and inner-product
/// statistics. double_sum is taken over the first members of the first
/// min(m, kDoubleSumRows) pairs.
A2Report a2_statistics(const SourceSpec& spec, int q, int m, const MixingMeasure& ref, RandomStream& rng,
                       const A2Options& options = {});

/// The same statistics for a fixed n x q data matrix. inner_stats uses the
/// disjoint consecutive row pairs (0,1), (2,3), ...
A2Report empirical_a2_report(const Matrix& data, const MixingMeasure& ref, const A2Options& options = {});

/// D_BL between the empirical law of `values` and R, with both sides coarsened
/// to at most max_support atoms.
std::pair<double, double> dbl_to_mixing(std::span<const double> values, const MixingMeasure& ref,
                                        int max_support);

struct A3Stats {
  double mean_energy;   ///< |mu|^2 / q
  double scale_energy;  ///< |sigma|^2 / q
  double max_scale;     ///< max_k sigma_k^2 / q
};

A3Stats a3_statistics(std::span<const double> mu, std::span<const double> sigma, int q);

struct CsvOptions {
  bool header = false;
};

/// Comma-separated numeric data, one observation per line. Throws ParseError
/// with a 1-based row and column on bad cells, non-finite values, ragged rows
/// or an empty file.
SourceSpec load_dataset(const std::filesystem::path& path, const CsvOptions& options = {});

/// Same parser on an in-memory string.
Matrix parse_csv(const std::string& text, const CsvOptions& options = {});

}  // namespace projlab
