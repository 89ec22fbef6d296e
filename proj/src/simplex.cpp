#include "projlab/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "projlab/errors.hpp"

namespace projlab {

namespace {

// Tableau with rows 0..m-1 for constraints and row m for the objective;
// columns 0..n-1 for the current nonbasic variables and column n for the
// right-hand side. Variable labels: 0..n-1 structural, n..n+m-1 slacks.
class Tableau {
 public:
  Tableau(const Matrix& a, const Vector& b, const Vector& c)
      : m_(static_cast<int>(a.rows())),
        n_(static_cast<int>(a.cols())),
        stride_(n_ + 1),
        data_(static_cast<std::size_t>(m_ + 1) * stride_, 0.0),
        basic_(m_),
        nonbasic_(n_) {
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) at(i, j) = a(i, j);
      at(i, n_) = b(i);
      basic_[i] = n_ + i;
    }
    for (int j = 0; j < n_; ++j) {
      at(m_, j) = -c(j);
      nonbasic_[j] = j;
    }
  }

  double& at(int i, int j) { return data_[static_cast<std::size_t>(i) * stride_ + j]; }
  double at(int i, int j) const { return data_[static_cast<std::size_t>(i) * stride_ + j]; }

  void pivot(int r, int s, double tol) {
    double* prow = &data_[static_cast<std::size_t>(r) * stride_];
    const double inv = 1.0 / prow[s];
    for (int j = 0; j <= n_; ++j)
      if (j != s) prow[j] *= inv;
    prow[s] = inv;
    for (int i = 0; i <= m_; ++i) {
      if (i == r) continue;
      double* row = &data_[static_cast<std::size_t>(i) * stride_];
      const double f = row[s];
      if (std::abs(f) <= tol * 1e-3) {
        row[s] = 0.0;
        continue;
      }
      for (int j = 0; j <= n_; ++j) row[j] -= f * prow[j];
      row[s] = -f * inv;
    }
    std::swap(basic_[r], nonbasic_[s]);
  }

  int rows() const { return m_; }
  int cols() const { return n_; }
  int basic(int i) const { return basic_[i]; }
  int nonbasic(int j) const { return nonbasic_[j]; }

 private:
  int m_;
  int n_;
  int stride_;
  std::vector<double> data_;
  std::vector<int> basic_;
  std::vector<int> nonbasic_;
};

}  // namespace

void certify(const Matrix& a, const Vector& b, const Vector& c, LpSolution& s) {
  const auto m = a.rows();
  const auto n = a.cols();
  const Vector x = Eigen::Map<const Vector>(s.x.data(), n);
  const Vector y = Eigen::Map<const Vector>(s.dual.data(), m);

  const Vector slack = a * x - b;
  double primal = std::max(0.0, slack.size() ? slack.maxCoeff() : 0.0);
  if (n > 0) primal = std::max(primal, -x.minCoeff());
  const Vector reduced = c - a.transpose() * y;
  double dual = std::max(0.0, reduced.size() ? reduced.maxCoeff() : 0.0);
  if (m > 0) dual = std::max(dual, -y.minCoeff());

  s.objective = c.dot(x);
  s.dual_objective = b.dot(y);
  s.primal_infeasibility = primal;
  s.dual_infeasibility = dual;
  s.gap = s.dual_objective - s.objective;
}

LpSolution solve_lp(const Matrix& a, const Vector& b, const Vector& c, const LpOptions& options) {
  if (a.rows() != b.size() || a.cols() != c.size())
    throw DimensionError("solve_lp: inconsistent A, b, c shapes");
  if (b.size() > 0 && b.minCoeff() < 0.0)
    throw LpError("solve_lp: right-hand side must be nonnegative (origin must be feasible)");

  Tableau t(a, b, c);
  const int m = t.rows();
  const int n = t.cols();
  const double tol = options.pivot_tolerance;

  LpSolution sol;
  int degenerate = 0;
  for (;;) {
    const bool bland = degenerate >= options.degenerate_streak;

    // Entering column: most negative reduced cost (Dantzig) or the
    // lowest-labelled negative one (Bland).
    int s = -1;
    for (int j = 0; j < n; ++j) {
      const double rc = t.at(m, j);
      if (rc >= -tol) continue;
      if (s < 0) {
        s = j;
      } else if (bland ? t.nonbasic(j) < t.nonbasic(s) : rc < t.at(m, s)) {
        s = j;
      }
    }
    if (s < 0) break;

    // Leaving row: minimum ratio, ties broken by the lowest basic label.
    int r = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      const double col = t.at(i, s);
      if (col <= tol) continue;
      const double ratio = t.at(i, n) / col;
      if (r < 0 || ratio < best - 1e-14 ||
          (ratio <= best + 1e-14 && t.basic(i) < t.basic(r))) {
        r = i;
        best = std::min(best, ratio);
      }
    }
    if (r < 0) throw LpError("solve_lp: problem is unbounded");

    degenerate = (best <= tol) ? degenerate + 1 : 0;
    t.pivot(r, s, tol);
    if (++sol.pivots > options.max_pivots) throw LpError("solve_lp: pivot budget exhausted");
  }

  sol.x.assign(n, 0.0);
  sol.dual.assign(m, 0.0);
  for (int i = 0; i < m; ++i)
    if (t.basic(i) < n) sol.x[t.basic(i)] = std::max(0.0, t.at(i, n));
  for (int j = 0; j < n; ++j)
    if (t.nonbasic(j) >= n) sol.dual[t.nonbasic(j) - n] = std::max(0.0, t.at(m, j));
  certify(a, b, c, sol);
  return sol;
}

}  // namespace projlab
