#include "projlab/gp.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "projlab/errors.hpp"

namespace projlab {

CholeskyFactor cholesky_with_jitter(const GridCovariance& c) {
  const Matrix& a = c.matrix;
  const auto m = a.rows();
  if (a.cols() != m || static_cast<Eigen::Index>(c.grid.size()) != m)
    throw std::invalid_argument("cholesky_with_jitter: matrix and grid sizes differ");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("cholesky_with_jitter: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-9) {
    std::ostringstream msg;
    msg << "cholesky_with_jitter: covariance has eigenvalue " << eig.eigenvalues().minCoeff();
    throw std::invalid_argument(msg.str());
  }

  for (double jitter : kJitterLadder) {
    const Matrix target = a + jitter * Matrix::Identity(m, m);
    Eigen::LLT<Matrix> llt(target);
    if (llt.info() != Eigen::Success) continue;
    Matrix lower = llt.matrixL();
    if (!lower.allFinite()) continue;
    const double norm = target.norm();
    const double err = (lower * lower.transpose() - target).norm();
    if (norm > 0.0 && err <= 1e-8 * norm) return {c.grid, std::move(lower), jitter};
  }
  throw FactorizationError("cholesky_with_jitter: not positive definite even with jitter 1e-6");
}

ProcessPath sample_gp_path(const CholeskyFactor& f, RandomStream& rng) {
  const auto m = f.lower.rows();
  Vector g(m);
  for (Eigen::Index i = 0; i < m; ++i) g(i) = rng.normal();
  const Vector v = f.lower.triangularView<Eigen::Lower>() * g;
  return {f.grid, std::vector<double>(v.data(), v.data() + m)};
}

std::vector<ProcessPath> sample_decomposed(const CholeskyFactor& within, const CholeskyFactor& between, int L,
                                           RandomStream& rng) {
  if (within.grid != between.grid) throw std::invalid_argument("sample_decomposed: factors use different grids");
  if (L < 1) throw std::invalid_argument("sample_decomposed: L must be >= 1");
  const ProcessPath shared = sample_gp_path(between, rng);
  std::vector<ProcessPath> out;
  out.reserve(L);
  for (int l = 0; l < L; ++l) {
    ProcessPath p = sample_gp_path(within, rng);
    for (std::size_t j = 0; j < p.values.size(); ++j) p.values[j] += shared.values[j];
    out.push_back(std::move(p));
  }
  return out;
}

double kolmogorov_cdf(double x) {
  if (!(x > 0.0)) return 0.0;
  if (x < 1.0) {
    // Theta-function form for small x.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double s = 0.0;
    for (int k = 1;; ++k) {
      const double term = std::exp(-(2.0 * k - 1.0) * (2.0 * k - 1.0) * pi2 / (8.0 * x * x));
      s += term;
      if (term < 1e-16 * s || term == 0.0) break;
    }
    return std::sqrt(2.0 * std::numbers::pi) / x * s;
  }
  double s = 0.0;
  for (int k = 1;; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 == 1) ? term : -term;
    if (term < 1e-16) break;
  }
  return 1.0 - 2.0 * s;
}

double kolmogorov_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("kolmogorov_quantile: p must lie in (0, 1)");
  double lo = 1e-3, hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (kolmogorov_cdf(mid) >= p)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace projlab
