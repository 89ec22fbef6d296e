#pragma once

#include <vector>

#include "projlab/projector.hpp"

namespace projlab {

struct LpOptions {
  /// Pivot and reduced-cost tolerance.
  double pivot_tolerance = 1e-11;
  /// Degenerate pivots in a row before switching to Bland's rule.
  int degenerate_streak = 50;
  long max_pivots = 2'000'000;
};

/// Primal/dual pair returned by solve_lp, with its own optimality certificate.
struct LpSolution {
  double objective = 0.0;
  std::vector<double> x;     ///< primal, length n
  std::vector<double> dual;  ///< one multiplier per constraint row, length m
  long pivots = 0;
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;  ///< max(A x - b)_+ and max(-x)_+
  double dual_infeasibility = 0.0;    ///< max(c - A^T y)_+ and max(-y)_+
  double gap = 0.0;                   ///< b^T y - c^T x
};

/// Dense tableau simplex for
///     maximize c^T x  subject to  A x <= b,  x >= 0,
/// with b >= 0 so the origin is a feasible starting basis. Uses Dantzig's
/// rule and falls back to Bland's rule on long degenerate streaks.
/// Throws LpError when b has a negative entry, the problem is unbounded, or
/// the pivot budget runs out.
LpSolution solve_lp(const Matrix& a, const Vector& b, const Vector& c, const LpOptions& options = {});

/// Recomputes the certificate fields of `s` against (A, b, c).
void certify(const Matrix& a, const Vector& b, const Vector& c, LpSolution& s);

}  // namespace projlab
