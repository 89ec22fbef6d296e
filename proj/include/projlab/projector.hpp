#pragma once

#include <Eigen/Dense>

#include "projlab/random.hpp"

namespace projlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest accepted condition number of the d x d Gram matrix Z^T Z.
inline constexpr double kMaxGramCondition = 1e12;

/// A q x d column-orthonormal matrix together with the Gaussian matrix it was
/// built from. Immutable after construction.
class ProjectionMatrix {
 public:
  int ambient_dim() const noexcept { return static_cast<int>(gamma_.rows()); }
  int target_dim() const noexcept { return static_cast<int>(gamma_.cols()); }

  const Matrix& gamma() const noexcept { return gamma_; }
  /// The raw matrix Z with gamma = Z (Z^T Z)^{-1/2}.
  const Matrix& z() const noexcept { return z_; }
  /// Eigenvalues of Z^T Z, ascending.
  const Vector& gram_eigenvalues() const noexcept { return gram_eigenvalues_; }

 private:
  friend ProjectionMatrix orthonormalize(const Matrix& z);

  ProjectionMatrix(Matrix gamma, Matrix z, Vector eigenvalues)
      : gamma_(std::move(gamma)), z_(std::move(z)), gram_eigenvalues_(std::move(eigenvalues)) {}

  Matrix gamma_;
  Matrix z_;
  Vector gram_eigenvalues_;
};

/// Z -> Z (Z^T Z)^{-1/2}. The inverse square root comes from the symmetric
/// eigendecomposition of the d x d Gram matrix, so no q x q work is done.
/// Throws DegeneracyError when the Gram condition number exceeds 1e12.
ProjectionMatrix orthonormalize(const Matrix& z);

/// Haar-distributed q x d column-orthonormal projector.
/// Throws DimensionError unless 1 <= d <= q.
ProjectionMatrix sample_projector(int q, int d, RandomStream& rng);

/// Applies x -> gamma^T x to every row of an n x q matrix.
Matrix project(const ProjectionMatrix& p, const Matrix& points);

/// Spectral norm of (Z^T Z / q)^{1/2} - I_d, the correction factor in
/// gamma = q^{-1/2} Z (I + O_p(q^{-1/2})).
double surrogate_deviation(const ProjectionMatrix& p);

/// max |gamma^T gamma - I_d| entrywise.
double orthonormality_error(const ProjectionMatrix& p);

}  // namespace projlab
