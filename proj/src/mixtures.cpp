#include "projlab/mixtures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "projlab/errors.hpp"
#include "projlab/normal.hpp"

namespace projlab {

namespace {

constexpr double kMassTolerance = 1e-12;
constexpr double kPoissonTail = 1e-12;

void check_atoms(const std::vector<MixingMeasure::Atom>& atoms) {
  if (atoms.empty()) throw std::invalid_argument("mixing measure needs at least one atom");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.v >= 0.0) || !std::isfinite(a.v))
      throw std::invalid_argument("mixing measure atoms must be finite and >= 0");
    if (!(a.p >= 0.0)) throw std::invalid_argument("mixing measure weights must be >= 0");
    total += a.p;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "mixing measure weights sum to " << total << ", expected 1";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

MixingMeasure::MixingMeasure(Kind kind, std::vector<Atom> atoms, double lambda)
    : kind_(kind), atoms_(std::move(atoms)), lambda_(lambda) {
  cumulative_.reserve(atoms_.size());
  double c = 0.0;
  for (const auto& a : atoms_) cumulative_.push_back(c += a.p);
}

MixingMeasure MixingMeasure::point_mass(double v) {
  std::vector<Atom> atoms{{v, 1.0}};
  check_atoms(atoms);
  return MixingMeasure(Kind::PointMass, std::move(atoms));
}

MixingMeasure MixingMeasure::two_point(double v1, double p1, double v2) {
  std::vector<Atom> atoms{{v1, p1}, {v2, 1.0 - p1}};
  check_atoms(atoms);
  return MixingMeasure(Kind::TwoPoint, std::move(atoms));
}

MixingMeasure MixingMeasure::truncated_poisson(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("truncated_poisson: lambda must be positive");
  // Unnormalized pmf relative to the k = 0 term avoids underflow of e^{-lambda}
  // for moderate lambda; log-space normalization follows.
  std::vector<double> log_pmf;
  double log_term = -lambda;
  for (int k = 0;; ++k) {
    if (k > 0) log_term += std::log(lambda) - std::log(static_cast<double>(k));
    log_pmf.push_back(log_term);
    // Tail beyond k: bounded by the geometric series once k + 1 > lambda.
    const double next = log_term + std::log(lambda) - std::log(k + 1.0);
    if (k + 1 > lambda) {
      const double ratio = lambda / (k + 2.0);
      const double tail = std::exp(next) / (1.0 - ratio);
      if (tail < kPoissonTail) break;
    }
  }
  std::vector<Atom> atoms;
  atoms.reserve(log_pmf.size());
  double total = 0.0;
  for (double lp : log_pmf) total += std::exp(lp);
  for (std::size_t k = 0; k < log_pmf.size(); ++k)
    atoms.push_back({static_cast<double>(k), std::exp(log_pmf[k]) / total});
  return MixingMeasure(Kind::TruncatedPoisson, std::move(atoms), lambda);
}

MixingMeasure MixingMeasure::custom(std::vector<Atom> atoms) {
  check_atoms(atoms);
  return MixingMeasure(Kind::Custom, std::move(atoms));
}

bool MixingMeasure::has_atom_at_zero() const noexcept {
  return std::any_of(atoms_.begin(), atoms_.end(),
                     [](const Atom& a) { return a.v == 0.0 && a.p > 0.0; });
}

double MixingMeasure::mean() const noexcept {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.p * a.v;
  return m;
}

double MixingMeasure::sample(RandomStream& rng) const {
  const double u = rng.uniform() * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto k = std::min<std::size_t>(it - cumulative_.begin(), atoms_.size() - 1);
  return atoms_[k].v;
}

nlohmann::json MixingMeasure::to_json() const {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : atoms_) atoms.push_back({a.v, a.p});
  nlohmann::json j{{"atoms", atoms}, {"kind", to_string(kind_)}};
  if (kind_ == Kind::TruncatedPoisson) j["lambda"] = lambda_;
  return j;
}

MixingMeasure MixingMeasure::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("mixing measure must be a JSON object");
  if (j.contains("truncated_poisson")) return truncated_poisson(j.at("truncated_poisson").get<double>());
  if (j.contains("point_mass")) return point_mass(j.at("point_mass").get<double>());
  if (j.contains("kind") && j.at("kind") == "truncated-poisson" && j.contains("lambda"))
    return truncated_poisson(j.at("lambda").get<double>());
  if (!j.contains("atoms")) throw std::invalid_argument("mixing measure needs an \"atoms\" array");
  std::vector<Atom> atoms;
  for (const auto& pair : j.at("atoms")) {
    if (!pair.is_array() || pair.size() != 2)
      throw std::invalid_argument("each atom must be a [v, p] pair");
    atoms.push_back({pair[0].get<double>(), pair[1].get<double>()});
  }
  check_atoms(atoms);
  if (atoms.size() == 1) return MixingMeasure(Kind::PointMass, std::move(atoms));
  if (atoms.size() == 2) return MixingMeasure(Kind::TwoPoint, std::move(atoms));
  return MixingMeasure(Kind::Custom, std::move(atoms));
}

std::string to_string(MixingMeasure::Kind kind) {
  switch (kind) {
    case MixingMeasure::Kind::PointMass: return "point-mass";
    case MixingMeasure::Kind::TwoPoint: return "two-point";
    case MixingMeasure::Kind::TruncatedPoisson: return "truncated-poisson";
    case MixingMeasure::Kind::Custom: return "custom";
  }
  return "custom";
}

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Full: return "full";
    case KernelKind::Within: return "within";
    case KernelKind::Between: return "between";
  }
  return "full";
}

double mixture_cdf(const MixingMeasure& mixing, double u) noexcept {
  double q = 0.0;
  for (const auto& a : mixing.atoms()) q += a.p * scaled_normal_cdf(u, a.v);
  return std::clamp(q, 0.0, 1.0);
}

double mixture_cdf_1d(const MixtureLaw& law, double u) {
  if (law.d != 1) throw DimensionError("mixture_cdf_1d: law must have d = 1");
  return mixture_cdf(law.mixing, u);
}

double mixture_quantile(const MixingMeasure& mixing, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("mixture_quantile: p must lie in (0, 1)");
  double vmax = 0.0;
  for (const auto& a : mixing.atoms()) vmax = std::max(vmax, a.v);
  if (vmax == 0.0) return 0.0;
  double hi = std::sqrt(vmax);
  while (mixture_cdf(mixing, hi) < p) hi *= 2.0;
  double lo = -std::sqrt(vmax);
  while (mixture_cdf(mixing, lo) >= p) lo *= 2.0;
  // Invariant: Q(lo) < p <= Q(hi).
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mixture_cdf(mixing, mid) >= p)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

Matrix sample_mixture(const MixtureLaw& law, int n, RandomStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_mixture: n must be >= 1");
  Matrix out(n, law.d);
  for (int i = 0; i < n; ++i) {
    const double sd = std::sqrt(law.mixing.sample(rng));
    for (int j = 0; j < law.d; ++j) out(i, j) = sd * rng.normal();
  }
  return out;
}

KernelTriple cov_kernels(const MixingMeasure& mixing, double s, double t) {
  double qs = 0.0, qt = 0.0, qmin = 0.0, cross = 0.0;
  const double lo = std::min(s, t);
  for (const auto& a : mixing.atoms()) {
    const double fs = scaled_normal_cdf(s, a.v);
    const double ft = scaled_normal_cdf(t, a.v);
    qs += a.p * fs;
    qt += a.p * ft;
    qmin += a.p * scaled_normal_cdf(lo, a.v);
    cross += a.p * fs * ft;
  }
  const double within = qmin - cross;
  const double between = cross - qs * qt;
  return {qmin - qs * qt, within, between};
}

double cov_kernel(KernelKind kind, const MixingMeasure& mixing, double s, double t) {
  const KernelTriple k = cov_kernels(mixing, s, t);
  switch (kind) {
    case KernelKind::Full: return k.full;
    case KernelKind::Within: return k.within;
    case KernelKind::Between: return k.between;
  }
  return k.full;
}

GridCovariance grid_covariance(KernelKind kind, const MixingMeasure& mixing,
                               std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("grid_covariance: empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw std::invalid_argument("grid_covariance: grid must be strictly increasing");
  const auto m = static_cast<Eigen::Index>(grid.size());
  Matrix c(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) c(i, j) = c(j, i) = cov_kernel(kind, mixing, grid[i], grid[j]);
  return {std::vector<double>(grid.begin(), grid.end()), kind, std::move(c)};
}

std::vector<double> quantile_grid(const MixingMeasure& mixing, int m) {
  if (m < 1) throw std::invalid_argument("quantile_grid: m must be >= 1");
  std::vector<double> grid;
  grid.reserve(m);
  for (int k = 1; k <= m; ++k) {
    const double u = mixture_quantile(mixing, static_cast<double>(k) / (m + 1));
    if (grid.empty() || u > grid.back()) grid.push_back(u);
  }
  return grid;
}

}  // namespace projlab
