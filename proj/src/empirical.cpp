#include "projlab/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <sstream>

#include "projlab/errors.hpp"
#include "projlab/normal.hpp"

namespace projlab {

namespace {

Cdf step_cdf(std::vector<double> sorted_values) {
  auto values = std::make_shared<const std::vector<double>>(std::move(sorted_values));
  return [values](double t) {
    const auto it = std::upper_bound(values->begin(), values->end(), t);
    return static_cast<double>(it - values->begin()) / static_cast<double>(values->size());
  };
}

std::vector<double> first_column(const Matrix& m) {
  std::vector<double> out(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[i] = m(i, 0);
  return out;
}

void require_line_projector(const ProjectionMatrix& p) {
  if (p.target_dim() != 1) throw DimensionError("process paths need a d = 1 projector");
}

}  // namespace

std::optional<ReferenceProvider> analytic_reference(const SourceSpec& spec, int q) {
  spec.check_dimension(q);
  if (std::holds_alternative<GaussianIso>(spec.variant))
    return ReferenceProvider([](const ProjectionMatrix&, RandomStream&) -> Cdf { return normal_cdf; });

  if (const auto* s = std::get_if<GaussianScaleMixture>(&spec.variant)) {
    MixingMeasure mixing = s->mixing;
    return ReferenceProvider([mixing](const ProjectionMatrix&, RandomStream&) -> Cdf {
      return [mixing](double t) { return mixture_cdf(mixing, t); };
    });
  }

  if (const auto* s = std::get_if<RotatedIndependent>(&spec.variant);
      s != nullptr && s->law == ComponentLaw::Gaussian) {
    const Vector mu = s->mu.at(q);
    const Vector sigma = s->sigma.at(q);
    const Matrix rot = s->rotation_at(q);
    return ReferenceProvider([mu, sigma, rot](const ProjectionMatrix& p, RandomStream&) -> Cdf {
      require_line_projector(p);
      // gamma^T U (mu + sigma Z) is normal with these moments.
      const Vector w = rot.transpose() * p.gamma().col(0);
      const double mean = w.dot(mu);
      const double var = w.cwiseProduct(sigma).squaredNorm();
      return [mean, var](double t) { return scaled_normal_cdf(t - mean, var); };
    });
  }

  if (std::holds_alternative<NonConvergent>(spec.variant) || std::holds_alternative<Empirical>(spec.variant)) {
    SourceSpec copy = spec;
    return ReferenceProvider([copy](const ProjectionMatrix& p, RandomStream&) -> Cdf {
      require_line_projector(p);
      const auto pop = projected_population(copy, p);
      std::vector<double> v = first_column(pop->points());
      std::sort(v.begin(), v.end());
      return step_cdf(std::move(v));
    });
  }
  return std::nullopt;
}

ReferenceProvider plugin_reference(const SourceSpec& spec, int q, int aux_size) {
  if (aux_size < 1) throw std::invalid_argument("plugin_reference: aux_size must be >= 1");
  spec.check_dimension(q);
  SourceSpec copy = spec;
  return [copy, q, aux_size](const ProjectionMatrix& p, RandomStream& rng) -> Cdf {
    require_line_projector(p);
    // Chunked so memory stays bounded for large aux_size * q.
    std::vector<double> values;
    values.reserve(aux_size);
    const int chunk = std::max(1, std::min(aux_size, 4'000'000 / std::max(q, 1)));
    for (int done = 0; done < aux_size; done += chunk) {
      const int rows = std::min(chunk, aux_size - done);
      const Matrix projected = project(p, sample_source(copy, q, rows, rng));
      for (Eigen::Index i = 0; i < projected.rows(); ++i) values.push_back(projected(i, 0));
    }
    std::sort(values.begin(), values.end());
    return step_cdf(std::move(values));
  };
}

ReferenceProvider default_reference(const SourceSpec& spec, int q, int aux_size) {
  if (auto analytic = analytic_reference(spec, q)) return *analytic;
  return plugin_reference(spec, q, aux_size);
}

std::uint64_t data_fingerprint(const Matrix& data) {
  std::uint64_t h = hash_combine(static_cast<std::uint64_t>(data.rows()), static_cast<std::uint64_t>(data.cols()));
  const double* p = data.data();
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, p + i, sizeof bits);
    h = hash_combine(h, bits);
  }
  return h;
}

ProcessPath process_from_projected(std::span<const double> projected, std::span<const double> grid,
                                   const Cdf& reference) {
  if (projected.empty()) throw std::invalid_argument("process_from_projected: no data");
  for (std::size_t j = 1; j < grid.size(); ++j)
    if (!(grid[j] > grid[j - 1])) throw std::invalid_argument("process grid must be strictly increasing");
  std::vector<double> x(projected.begin(), projected.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  const double root_n = std::sqrt(n);
  ProcessPath path;
  path.grid.assign(grid.begin(), grid.end());
  path.values.reserve(grid.size());
  for (double t : grid) {
    const auto count = std::upper_bound(x.begin(), x.end(), t) - x.begin();
    path.values.push_back(root_n * (static_cast<double>(count) / n - reference(t)));
  }
  return path;
}

ProcessPath one_projection_process(const SourceSpec& spec, int q, int n, const ProjectionMatrix& gamma,
                                   std::span<const double> grid, const std::optional<Cdf>& reference,
                                   RandomStream& rng) {
  require_line_projector(gamma);
  Cdf cdf;
  if (reference) {
    cdf = *reference;
  } else {
    const auto analytic = analytic_reference(spec, q);
    if (!analytic)
      throw MissingReferenceError("source '" + spec.name() +
                                  "' has no analytic projected law; supply a plug-in reference");
    cdf = (*analytic)(gamma, rng);
  }
  const Matrix projected = project(gamma, sample_source(spec, q, n, rng));
  return process_from_projected(first_column(projected), grid, cdf);
}

MultiProjectionRun multi_projection_run(const SourceSpec& spec, int q, int n, int L, std::span<const double> grid,
                                        const ReferenceProvider& reference, RandomStream& rng) {
  if (L < 1) throw std::invalid_argument("multi_projection_run: L must be >= 1");
  const Matrix data = sample_source(spec, q, n, rng);
  MultiProjectionRun run;
  run.shared_data_id = data_fingerprint(data);
  for (int l = 0; l < L; ++l) {
    const ProjectionMatrix gamma = sample_projector(q, 1, rng);
    const Cdf cdf = reference(gamma, rng);
    run.paths.push_back(process_from_projected(first_column(project(gamma, data)), grid, cdf));
  }
  return run;
}

Matrix hoeffding_pair_sample(const SourceSpec& spec, int q, int d, int m, RandomStream& rng) {
  if (m < 1) throw std::invalid_argument("hoeffding_pair_sample: m must be >= 1");
  Matrix out(m, 2 * d);
  for (int i = 0; i < m; ++i) {
    const ProjectionMatrix gamma = sample_projector(q, d, rng);
    const Matrix pair = project(gamma, sample_source(spec, q, 2, rng));
    out.block(i, 0, 1, d) = pair.row(0);
    out.block(i, d, 1, d) = pair.row(1);
  }
  return out;
}

double sup_statistic(const ProcessPath& path) {
  double s = 0.0;
  for (double v : path.values) s = std::max(s, std::abs(v));
  return s;
}

FunctionalEstimate conditional_mean_functional(const std::function<double(const ProcessPath&)>& functional,
                                               double sup_norm, const MultiProjectionRun& run) {
  if (run.paths.empty()) throw std::invalid_argument("conditional_mean_functional: empty run");
  if (!(sup_norm >= 0.0)) throw std::invalid_argument("conditional_mean_functional: sup_norm must be >= 0");
  double total = 0.0;
  for (const auto& path : run.paths) total += functional(path);
  const double L = static_cast<double>(run.paths.size());
  return {total / L, sup_norm / std::sqrt(L)};
}

void require_no_atom_at_zero(const MixingMeasure& mixing) {
  if (mixing.has_atom_at_zero())
    throw ConditionError(
        "mixing measure has an atom at 0: the halfspace class violates condition C3, so the "
        "empirical-process limit theorems do not apply");
}

}  // namespace projlab
