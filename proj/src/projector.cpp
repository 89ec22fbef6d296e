#include "projlab/projector.hpp"

#include <cmath>
#include <sstream>

#include "projlab/errors.hpp"

namespace projlab {

ProjectionMatrix orthonormalize(const Matrix& z) {
  if (z.cols() < 1 || z.rows() < z.cols()) {
    std::ostringstream msg;
    msg << "orthonormalize: need q >= d >= 1, got " << z.rows() << "x" << z.cols();
    throw DimensionError(msg.str());
  }
  const Matrix gram = z.transpose() * z;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  if (eig.info() != Eigen::Success) throw DegeneracyError("orthonormalize: eigensolver failed");

  const Vector& lambda = eig.eigenvalues();
  const double lo = lambda.minCoeff();
  const double hi = lambda.maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxGramCondition) {
    std::ostringstream msg;
    msg << "orthonormalize: Gram matrix is rank deficient (eigenvalues " << lo << " .. " << hi
        << ")";
    throw DegeneracyError(msg.str());
  }
  const Matrix& v = eig.eigenvectors();
  const Matrix inv_sqrt = v * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
  return ProjectionMatrix(z * inv_sqrt, z, lambda);
}

ProjectionMatrix sample_projector(int q, int d, RandomStream& rng) {
  if (d < 1 || d > q) {
    std::ostringstream msg;
    msg << "sample_projector: need 1 <= d <= q, got q=" << q << " d=" << d;
    throw DimensionError(msg.str());
  }
  Matrix z(q, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < q; ++i) z(i, j) = rng.normal();
  return orthonormalize(z);
}

Matrix project(const ProjectionMatrix& p, const Matrix& points) {
  if (points.cols() != p.ambient_dim()) {
    std::ostringstream msg;
    msg << "project: points have " << points.cols() << " columns, projector expects "
        << p.ambient_dim();
    throw DimensionError(msg.str());
  }
  return points * p.gamma();
}

double surrogate_deviation(const ProjectionMatrix& p) {
  // (Z^T Z / q)^{1/2} - I shares eigenvectors with Z^T Z, so its spectral
  // norm is the largest |sqrt(lambda / q) - 1|.
  const double q = p.ambient_dim();
  double worst = 0.0;
  for (double lambda : p.gram_eigenvalues())
    worst = std::max(worst, std::abs(std::sqrt(lambda / q) - 1.0));
  return worst;
}

double orthonormality_error(const ProjectionMatrix& p) {
  const int d = p.target_dim();
  const Matrix gram = p.gamma().transpose() * p.gamma();
  return (gram - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
}

}  // namespace projlab
