#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "projlab/errors.hpp"
#include "projlab/metrics.hpp"
#include "projlab/normal.hpp"
#include "projlab/projector.hpp"

using namespace projlab;

namespace {

// Classical Gram-Schmidt, independent of the eigendecomposition route.
Matrix gram_schmidt(const Matrix& z) {
  Matrix q = z;
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    for (Eigen::Index k = 0; k < j; ++k) q.col(j) -= q.col(k).dot(q.col(j)) * q.col(k);
    q.col(j).normalize();
  }
  return q;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return 0.5 * (v[(v.size() - 1) / 2] + v[v.size() / 2]);
}

}  // namespace

TEST_CASE("q = d = 1 gives a fair random sign") {
  RandomStream rng(1);
  int plus = 0;
  for (int i = 0; i < 4000; ++i) {
    const double g = sample_projector(1, 1, rng).gamma()(0, 0);
    CHECK(std::abs(std::abs(g) - 1.0) < 1e-15);
    plus += g > 0;
  }
  // Binomial(4000, 1/2): sd ~ 31.6, allow 4 sd.
  CHECK(std::abs(plus - 2000) < 127);
}

TEST_CASE("full dimension is orthogonal") {
  RandomStream rng(2);
  const ProjectionMatrix p = sample_projector(3, 3, rng);
  CHECK(orthonormality_error(p) <= 1e-10);
  CHECK((p.gamma() * p.gamma().transpose() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("invariants across shapes") {
  RandomStream rng(3);
  for (int q : {1, 2, 10, 100, 2000})
    for (int d : {1, 2, 5, 8}) {
      if (d > q) continue;
      const ProjectionMatrix p = sample_projector(q, d, rng);
      CHECK(p.ambient_dim() == q);
      CHECK(p.target_dim() == d);
      CHECK(orthonormality_error(p) <= 1e-10);
      for (int j = 0; j < d; ++j) CHECK(std::abs(p.gamma().col(j).norm() - 1.0) <= 1e-10);
      // gamma = z (z^T z)^{-1/2}  <=>  gamma (z^T z)^{1/2} = z
      const Matrix g = p.z().transpose() * p.z();
      Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
      const Matrix sq = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() *
                        eig.eigenvectors().transpose();
      CHECK((p.gamma() * sq - p.z()).cwiseAbs().maxCoeff() <= 1e-9 * p.z().cwiseAbs().maxCoeff());
    }
}

TEST_CASE("dimension errors") {
  RandomStream rng(4);
  CHECK_THROWS_AS(sample_projector(3, 4, rng), DimensionError);
  CHECK_THROWS_AS(sample_projector(3, 0, rng), DimensionError);
  CHECK_THROWS_AS(orthonormalize(Matrix(2, 3)), DimensionError);
  const ProjectionMatrix p = sample_projector(4, 2, rng);
  CHECK_THROWS_AS(project(p, Matrix::Zero(3, 5)), DimensionError);
}

TEST_CASE("rank deficient input") {
  Matrix z(5, 2);
  z.col(0) << 1, 2, 3, 4, 5;
  z.col(1) = 2.0 * z.col(0);
  CHECK_THROWS_AS(orthonormalize(z), DegeneracyError);
  z.col(1)(0) += 1e-9;  // condition number ~ 1e20
  CHECK_THROWS_AS(orthonormalize(z), DegeneracyError);
  CHECK_THROWS_AS(orthonormalize(Matrix::Zero(4, 1)), DegeneracyError);
}

TEST_CASE("orthonormal input is a fixed point") {
  RandomStream rng(5);
  const ProjectionMatrix p = sample_projector(7, 3, rng);
  const ProjectionMatrix again = orthonormalize(p.gamma());
  CHECK((again.gamma() - p.gamma()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("scaled identity loses its scale") {
  Matrix z = Matrix::Zero(6, 3);
  z.topRows(3) = 2.5 * Matrix::Identity(3, 3);
  const ProjectionMatrix p = orthonormalize(z);
  Matrix expected = Matrix::Zero(6, 3);
  expected.topRows(3) = Matrix::Identity(3, 3);
  CHECK((p.gamma() - expected).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("agrees with Gram-Schmidt up to a rotation") {
  RandomStream rng(6);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix z(6, 2);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 2; ++j) z(i, j) = rng.normal();
    const Matrix a = orthonormalize(z).gamma();
    const Matrix b = gram_schmidt(z);
    CHECK(orthonormality_error(orthonormalize(z)) <= 1e-10);
    // Same span <=> same orthogonal projection.
    CHECK((a * a.transpose() - b * b.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    const Matrix rot = b.transpose() * a;
    CHECK((rot.transpose() * rot - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("project examples") {
  RandomStream rng(7);
  const ProjectionMatrix id = orthonormalize(Matrix::Identity(4, 4));
  Matrix pts(3, 4);
  pts << 1, 2, 3, 4, -1, 0, 5, 2, 0.5, 0.25, 0, 9;
  CHECK((project(id, pts) - pts).cwiseAbs().maxCoeff() == 0.0);

  const ProjectionMatrix p = sample_projector(10, 3, rng);
  CHECK(project(p, Matrix::Zero(5, 10)).cwiseAbs().maxCoeff() == 0.0);

  Matrix z(2, 1);
  z << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  Matrix x(1, 2);
  x << 1, -1;
  CHECK(std::abs(project(orthonormalize(z), x)(0, 0)) < 1e-15);
}

TEST_CASE("entries of sqrt(q) gamma are approximately standard normal") {
  RandomStream rng(8);
  const int q = 500, draws = 10000;
  std::vector<double> g(draws);
  for (auto& x : g) x = std::sqrt(q) * sample_projector(q, 2, rng).gamma()(0, 0);
  double mean = 0;
  for (double x : g) mean += x;
  mean /= draws;
  double var = 0;
  for (double x : g) var += (x - mean) * (x - mean);
  var /= draws - 1;
  CHECK(std::abs(mean) < 4.0 * std::sqrt(var / draws));
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("surrogate deviation") {
  Matrix z = Matrix::Zero(100, 2);
  z(0, 0) = 10.0;
  z(1, 1) = 10.0;
  CHECK(surrogate_deviation(orthonormalize(z)) <= 1e-12);

  RandomStream rng(9);
  std::vector<double> small, large;
  for (int i = 0; i < 1000; ++i) small.push_back(surrogate_deviation(sample_projector(100, 2, rng)));
  for (int i = 0; i < 200; ++i) large.push_back(surrogate_deviation(sample_projector(10000, 2, rng)));
  const double m100 = median(small);
  CHECK(m100 > 0.3 / 10.0);
  CHECK(m100 < 3.0 / 10.0);
  const double ratio = median(large) / m100;
  CHECK(ratio > 0.05);
  CHECK(ratio < 0.2);
}

TEST_CASE("rotation invariance of a single coordinate") {
  RandomStream rng(10);
  const int q = 50, m = 10000;
  Vector x = Vector::Zero(q), y = Vector::Ones(q);
  x(0) = std::sqrt(static_cast<double>(q));
  std::vector<double> a(m), b(m);
  for (int i = 0; i < m; ++i) a[i] = sample_projector(q, 1, rng).gamma().col(0).dot(x);
  for (int i = 0; i < m; ++i) b[i] = sample_projector(q, 1, rng).gamma().col(0).dot(y);
  CHECK(ks_two_sample_1d(a, b) < ks_two_sample_critical(m, m, 0.001));
}

TEST_CASE("Poincare marginal at q = 1000") {
  RandomStream rng(11);
  const int q = 1000, n = 100000;
  Vector x = Vector::Ones(q);
  std::vector<double> v(n);
  for (auto& s : v) s = sample_projector(q, 1, rng).gamma().col(0).dot(x);
  CHECK(ks_1d(v, normal_cdf) <= 0.01);
}
