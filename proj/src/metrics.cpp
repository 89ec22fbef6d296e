#include "projlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "projlab/errors.hpp"
#include "projlab/normal.hpp"
#include "projlab/simplex.hpp"

namespace projlab {

DiscreteMeasure::DiscreteMeasure(Matrix points, Vector weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.rows() < 1 || points_.cols() < 1)
    throw std::invalid_argument("DiscreteMeasure: empty point set");
  if (points_.rows() != weights_.size())
    throw std::invalid_argument("DiscreteMeasure: points and weights differ in length");
  if (weights_.minCoeff() < 0.0) throw std::invalid_argument("DiscreteMeasure: negative weight");
  if (std::abs(weights_.sum() - 1.0) > 1e-12)
    throw std::invalid_argument("DiscreteMeasure: weights must sum to 1");
}

DiscreteMeasure DiscreteMeasure::uniform(Matrix points) {
  const auto n = points.rows();
  if (n < 1) throw std::invalid_argument("DiscreteMeasure: empty point set");
  Vector w = Vector::Constant(n, 1.0 / static_cast<double>(n));
  // Absorb the rounding of 1/n so the sum check is exact to ~1 ulp.
  w(n - 1) = 1.0 - w.head(n - 1).sum();
  return DiscreteMeasure(std::move(points), std::move(w));
}

DiscreteMeasure DiscreteMeasure::on_line(std::span<const double> positions,
                                         std::span<const double> weights) {
  Matrix p(positions.size(), 1);
  Vector w(weights.size());
  for (std::size_t i = 0; i < positions.size(); ++i) p(i, 0) = positions[i];
  for (std::size_t i = 0; i < weights.size(); ++i) w(i) = weights[i];
  return DiscreteMeasure(std::move(p), std::move(w));
}

namespace {

struct SignedSupport {
  Matrix points;  // k x d
  std::vector<double> weight;
  int merged_size = 0;
};

// Union of both supports with identical points merged and zero-weight points
// dropped. Dropping is exact: a bounded Lipschitz function on a subset
// extends to the whole space (McShane extension, then clipping to [-1, 1]).
SignedSupport merge_supports(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  const int d = a.dimension();
  std::vector<std::pair<std::vector<double>, double>> entries;
  entries.reserve(a.size() + b.size());
  auto add = [&](const DiscreteMeasure& m, double sign) {
    for (int i = 0; i < m.size(); ++i) {
      std::vector<double> x(d);
      for (int j = 0; j < d; ++j) x[j] = m.points()(i, j);
      entries.emplace_back(std::move(x), sign * m.weights()(i));
    }
  };
  add(a, 1.0);
  add(b, -1.0);
  std::sort(entries.begin(), entries.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });

  std::vector<std::pair<std::vector<double>, double>> merged;
  for (auto& e : entries) {
    if (!merged.empty() && merged.back().first == e.first)
      merged.back().second += e.second;
    else
      merged.push_back(std::move(e));
  }

  SignedSupport out;
  out.merged_size = static_cast<int>(merged.size());
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < merged.size(); ++i)
    if (std::abs(merged[i].second) > 1e-15) keep.push_back(i);
  out.points.resize(static_cast<Eigen::Index>(keep.size()), d);
  for (std::size_t r = 0; r < keep.size(); ++r) {
    for (int j = 0; j < d; ++j) out.points(r, j) = merged[keep[r]].first[j];
    out.weight.push_back(merged[keep[r]].second);
  }
  return out;
}

struct PairConstraint {
  int i;
  int j;
  double bound;  // |x_i - x_j| < 2
};

}  // namespace

DblResult dbl_exact_detailed(const DiscreteMeasure& a, const DiscreteMeasure& b,
                             const DblOptions& options) {
  if (a.dimension() != b.dimension()) {
    std::ostringstream msg;
    msg << "dbl_exact: dimensions differ (" << a.dimension() << " vs " << b.dimension() << ")";
    throw DimensionError(msg.str());
  }
  const SignedSupport sup = merge_supports(a, b);
  if (sup.merged_size > options.max_support) {
    std::ostringstream msg;
    msg << "dbl_exact: merged support " << sup.merged_size << " exceeds cap "
        << options.max_support << "; coarsen with dbl_discretize";
    throw SupportSizeError(msg.str());
  }

  DblResult result;
  const int k = static_cast<int>(sup.weight.size());
  const int d = a.dimension();
  result.support = k;
  if (k < 2) return result;

  // Pairwise distances; pairs at distance >= 2 are implied by the box.
  Matrix dist(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j <= i; ++j) dist(i, j) = dist(j, i) = (sup.points.row(i) - sup.points.row(j)).norm();

  std::vector<PairConstraint> active;
  std::vector<char> used(static_cast<std::size_t>(k) * k, 0);
  auto activate = [&](int i, int j) {
    if (i > j) std::swap(i, j);
    if (dist(i, j) >= 2.0) return;
    char& flag = used[static_cast<std::size_t>(i) * k + j];
    if (flag) return;
    flag = 1;
    active.push_back({i, j, dist(i, j)});
  };

  if (d == 1) {
    // On the line, adjacent constraints imply all the others.
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int l, int r) { return sup.points(l, 0) < sup.points(r, 0); });
    for (int t = 0; t + 1 < k; ++t) activate(order[t], order[t + 1]);
  } else {
    const int nb = std::min(options.initial_neighbours, k - 1);
    std::vector<int> order(k);
    for (int i = 0; i < k; ++i) {
      std::iota(order.begin(), order.end(), 0);
      std::partial_sort(order.begin(), order.begin() + nb + 1, order.end(),
                        [&](int l, int r) { return dist(i, l) < dist(i, r); });
      for (int t = 0; t <= nb; ++t)
        if (order[t] != i) activate(i, order[t]);
    }
  }

  // Variables g = f + 1 in [0, 2] keep the origin feasible.
  Vector c(k);
  double weight_sum = 0.0;
  for (int i = 0; i < k; ++i) {
    c(i) = sup.weight[i];
    weight_sum += sup.weight[i];
  }

  for (;;) {
    ++result.constraint_rounds;
    const int rows = k + 2 * static_cast<int>(active.size());
    Matrix lp_a = Matrix::Zero(rows, k);
    Vector lp_b(rows);
    for (int i = 0; i < k; ++i) {
      lp_a(i, i) = 1.0;
      lp_b(i) = 2.0;
    }
    int r = k;
    for (const auto& pc : active) {
      lp_a(r, pc.i) = 1.0;
      lp_a(r, pc.j) = -1.0;
      lp_b(r++) = pc.bound;
      lp_a(r, pc.j) = 1.0;
      lp_a(r, pc.i) = -1.0;
      lp_b(r++) = pc.bound;
    }
    const LpSolution sol = solve_lp(lp_a, lp_b, c);
    result.pivots += sol.pivots;
    result.constraints = rows;

    const double scale = 1.0 + std::abs(sol.objective);
    if (sol.dual_infeasibility > options.tolerance || std::abs(sol.gap) > options.tolerance * scale) {
      std::ostringstream msg;
      msg << "dbl_exact: optimality not certified (gap " << sol.gap << ", dual infeasibility "
          << sol.dual_infeasibility << ")";
      throw LpError(msg.str());
    }

    // Full primal check over every pair and the box.
    double worst = sol.primal_infeasibility;
    std::vector<std::pair<double, std::pair<int, int>>> violated;
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) {
        const double excess = std::abs(sol.x[i] - sol.x[j]) - dist(i, j);
        worst = std::max(worst, excess);
        if (excess > options.tolerance) violated.push_back({excess, {i, j}});
      }
    }
    if (violated.empty()) {
      result.value = std::max(0.0, sol.objective - weight_sum);
      result.duality_gap = sol.gap;
      result.max_violation = std::max(0.0, worst);
      return result;
    }
    std::sort(violated.begin(), violated.end(), std::greater<>());
    const std::size_t add = std::min<std::size_t>(violated.size(), 4 * static_cast<std::size_t>(k));
    for (std::size_t t = 0; t < add; ++t) activate(violated[t].second.first, violated[t].second.second);
  }
}

double dbl_exact(const DiscreteMeasure& a, const DiscreteMeasure& b, const DblOptions& options) {
  return dbl_exact_detailed(a, b, options).value;
}

Discretization dbl_discretize(const Matrix& samples, int max_support) {
  const auto n = samples.rows();
  if (n < 1) throw std::invalid_argument("dbl_discretize: empty sample");
  if (max_support < 1) throw std::invalid_argument("dbl_discretize: max_support must be >= 1");
  if (n <= max_support) return {DiscreteMeasure::uniform(samples), 0.0, 0.0};

  if (samples.cols() >= 2) {
    Matrix sub(max_support, samples.cols());
    for (int k = 0; k < max_support; ++k)
      sub.row(k) = samples.row(static_cast<Eigen::Index>((static_cast<double>(k) + 0.5) * n / max_support));
    return {DiscreteMeasure::uniform(std::move(sub)), 2.0, 0.0};
  }

  std::vector<double> v(samples.data(), samples.data() + n);
  std::sort(v.begin(), v.end());
  std::vector<double> pos, w;
  double bound = 0.0, widest = 0.0;
  for (int k = 0; k < max_support; ++k) {
    const auto lo = static_cast<std::size_t>(k * n / max_support);
    const auto hi = static_cast<std::size_t>((k + 1) * n / max_support);
    const std::size_t count = hi - lo;
    const double median = (count % 2 == 1) ? v[lo + count / 2]
                                           : 0.5 * (v[lo + count / 2 - 1] + v[lo + count / 2]);
    const double diam = v[hi - 1] - v[lo];
    const double mass = static_cast<double>(count) / static_cast<double>(n);
    pos.push_back(median);
    w.push_back(mass);
    bound += mass * std::min(diam, 2.0);
    widest = std::max(widest, diam);
  }
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  w.back() += 1.0 - total;
  return {DiscreteMeasure::on_line(pos, w), bound, widest};
}

Discretization discretize_mixture(const MixingMeasure& mixing, int m) {
  if (m < 1) throw std::invalid_argument("discretize_mixture: m must be >= 1");
  std::vector<double> pos(m), w(m, 1.0 / m);
  for (int k = 0; k < m; ++k) pos[k] = mixture_quantile(mixing, (k + 0.5) / m);
  double bound = 0.0, widest = 0.0;
  for (int k = 0; k < m; ++k) {
    double diam = 2.0;
    if (k > 0 && k + 1 < m) {
      diam = mixture_quantile(mixing, (k + 1.0) / m) - mixture_quantile(mixing, static_cast<double>(k) / m);
      widest = std::max(widest, diam);
    }
    bound += std::min(diam, 2.0) / m;
  }
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  w.back() += 1.0 - total;
  return {DiscreteMeasure::on_line(pos, w), bound, widest};
}

double ks_1d(std::span<const double> sample, const Cdf& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_1d: empty sample");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return std::clamp(d, 0.0, 1.0);
}

double ks_two_sample_1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample_1d: empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

double ks_two_sample_critical(int n, int m, double alpha) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt((static_cast<double>(n) + m) / (static_cast<double>(n) * m));
}

namespace {

std::vector<double> project_rows(const Matrix& a, const Vector& u) {
  const Vector p = a * u;
  return std::vector<double>(p.data(), p.data() + p.size());
}

}  // namespace

double halfspace_ks(const Matrix& a, const HalfspaceReference& reference, int directions,
                    RandomStream& rng) {
  const int d = static_cast<int>(a.cols());
  if (d < 1 || a.rows() < 1) throw DimensionError("halfspace_ks: empty sample");
  if (directions < 1) throw std::invalid_argument("halfspace_ks: need at least one direction");
  if (const auto* sample = std::get_if<Matrix>(&reference); sample && sample->cols() != d) {
    std::ostringstream msg;
    msg << "halfspace_ks: reference sample has " << sample->cols() << " columns, expected " << d;
    throw DimensionError(msg.str());
  }

  auto along = [&](const Vector& u) {
    const std::vector<double> pa = project_rows(a, u);
    if (const auto* sample = std::get_if<Matrix>(&reference))
      return ks_two_sample_1d(pa, project_rows(*sample, u));
    return ks_1d(pa, std::get<DirectionalCdf>(reference)(u));
  };

  const std::uint64_t base = rng.next_u64();
  double best = 0.0;
  for (int j = 0; j < d; ++j) best = std::max(best, along(Vector::Unit(d, j)));
  if (d == 1) return best;

  const RandomStream root(base);
  for (int k = 0; k < directions; ++k) {
    RandomStream sub = root.substream(static_cast<std::uint64_t>(k));
    Vector u(d);
    do {
      for (int j = 0; j < d; ++j) u(j) = sub.normal();
    } while (u.norm() == 0.0);
    u.normalize();
    best = std::max(best, along(u));
  }
  return best;
}

DirectionalCdf mixture_direction_cdf(const MixingMeasure& mixing) {
  return [mixing](const Vector& u) -> Cdf {
    const double scale = u.norm();
    return [mixing, scale](double t) { return mixture_cdf(mixing, t / scale); };
  };
}

DirectionalCdf product_mixture_direction_cdf(const MixingMeasure& mixing, int d) {
  return [mixing, d](const Vector& u) -> Cdf {
    if (u.size() != 2 * d) throw DimensionError("product_mixture_direction_cdf: direction must have 2d entries");
    const double s1 = u.head(d).squaredNorm();
    const double s2 = u.tail(d).squaredNorm();
    return [mixing, s1, s2](double t) {
      double f = 0.0;
      for (const auto& x : mixing.atoms())
        for (const auto& y : mixing.atoms()) f += x.p * y.p * scaled_normal_cdf(t, s1 * x.v + s2 * y.v);
      return std::clamp(f, 0.0, 1.0);
    };
  };
}

}  // namespace projlab
