#include "projlab/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "projlab/empirical.hpp"
#include "projlab/errors.hpp"
#include "projlab/gp.hpp"
#include "projlab/metrics.hpp"
#include "projlab/normal.hpp"

namespace projlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct TaskOutput {
  std::vector<std::pair<std::string, double>> stats;
  nlohmann::json jitter = nlohmann::json::array();

  void add(std::string name, double value) { stats.emplace_back(std::move(name), value); }
};

struct Cell {
  int index;
  int q;
  int n;
};

std::vector<double> column(const Matrix& m, int c = 0) {
  std::vector<double> v(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) v[i] = m(i, c);
  return v;
}

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + mid));
}

/// Type-7 sample quantile.
double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// ---------------------------------------------------------------------------
// Experiments. Each consumes only the task stream.

TaskOutput poincare_marginal(const ExperimentConfig& c, const Cell& cell, RandomStream& rng) {
  TaskOutput out;
  const int q = cell.q;
  Vector x = sample_source(c.source, q, 1, rng).row(0).transpose();
  if (x.norm() == 0.0) x = Vector::Unit(q, 0);
  x *= std::sqrt(static_cast<double>(q)) / x.norm();

  double ortho = 0.0;
  std::vector<double> deviations;
  auto draw = [&](const Vector& v, int count) {
    std::vector<double> values(count);
    for (int i = 0; i < count; ++i) {
      const ProjectionMatrix p = sample_projector(q, c.d, rng);
      ortho = std::max(ortho, orthonormality_error(p));
      if (deviations.size() < 1000) deviations.push_back(surrogate_deviation(p));
      values[i] = p.gamma().col(0).dot(v);
    }
    return values;
  };

  const std::vector<double> marginal = draw(x, cell.n);
  out.add("ks_marginal", ks_1d(marginal, normal_cdf));

  Vector y = Vector::Zero(q);
  y(q - 1) = std::sqrt(static_cast<double>(q));
  const std::vector<double> a = draw(x, c.rotation_samples);
  const std::vector<double> b = draw(y, c.rotation_samples);
  const double ks_rot = ks_two_sample_1d(a, b);
  const double critical = ks_two_sample_critical(c.rotation_samples, c.rotation_samples, 0.001);
  out.add("ks_rotation", ks_rot);
  out.add("ks_rotation_critical", critical);
  out.add("rotation_pass", ks_rot < critical ? 1.0 : 0.0);
  out.add("orthonormality_error", ortho);
  out.add("surrogate_deviation_median", median(deviations));
  return out;
}

TaskOutput df_convergence(const ExperimentConfig& c, const Cell& cell, RandomStream& rng) {
  TaskOutput out;
  const MixingMeasure r = effective_mixing(c);
  const ProjectionMatrix p = sample_projector(cell.q, c.d, rng);
  const Matrix y = project(p, sample_source(c.source, cell.q, cell.n, rng));

  const Discretization sample = dbl_discretize(y, c.max_support);
  double bound = sample.perturbation_bound;
  DblResult res;
  if (c.d == 1) {
    const Discretization ref = discretize_mixture(r, c.max_support);
    bound += ref.perturbation_bound;
    res = dbl_exact_detailed(sample.measure, ref.measure);
  } else {
    const Matrix ref = sample_mixture({c.d, r}, c.max_support, rng);
    bound = 2.0;
    res = dbl_exact_detailed(sample.measure, DiscreteMeasure::uniform(ref));
  }
  out.add("dbl", res.value);
  out.add("dbl_bound", bound);
  out.add("dbl_gap", res.duality_gap);
  out.add("ks_halfspace", halfspace_ks(y, mixture_direction_cdf(r), c.directions, rng));
  return out;
}

TaskOutput counterexample(const ExperimentConfig& c, const Cell& cell, RandomStream& rng) {
  TaskOutput out;
  const ProjectionMatrix p1 = sample_projector(cell.q, c.d, rng);
  const ProjectionMatrix p2 = sample_projector(cell.q, c.d, rng);
  auto pop1 = projected_population(c.source, p1);
  auto pop2 = projected_population(c.source, p2);
  double bound = 0.0;
  if (!pop1 || !pop2 || pop1->size() + pop2->size() > 400) {
    const Discretization a = dbl_discretize(project(p1, sample_source(c.source, cell.q, cell.n, rng)), c.max_support);
    const Discretization b = dbl_discretize(project(p2, sample_source(c.source, cell.q, cell.n, rng)), c.max_support);
    pop1 = a.measure;
    pop2 = b.measure;
    bound = a.perturbation_bound + b.perturbation_bound;
  }
  out.add("dbl_pair", dbl_exact(*pop1, *pop2));
  out.add("dbl_pair_bound", bound);

  const A2Report a2 = a2_statistics(c.source, cell.q, std::max(cell.n, 2), MixingMeasure::point_mass(1.0), rng,
                                    {c.eps, c.max_support});
  out.add("inner_exceed_frac", a2.inner_exceed_frac);
  return out;
}

TaskOutput a3_trend(const ExperimentConfig& c, const Cell& cell, RandomStream& rng) {
  TaskOutput out;
  const auto& src = std::get<RotatedIndependent>(c.source.variant);
  const Vector mu = src.mu.at(cell.q);
  const Vector sigma = src.sigma.at(cell.q);
  const A3Stats s = a3_statistics({mu.data(), static_cast<std::size_t>(mu.size())},
                                  {sigma.data(), static_cast<std::size_t>(sigma.size())}, cell.q);
  out.add("r1", s.mean_energy);
  out.add("r2", s.scale_energy);
  out.add("r3", s.max_scale);

  const A2Report a2 =
      a2_statistics(c.source, cell.q, std::max(cell.n, 2), effective_mixing(c), rng, {c.eps, c.max_support});
  const double norm_mean = std::accumulate(a2.norm_stats.begin(), a2.norm_stats.end(), 0.0) /
                           static_cast<double>(a2.norm_stats.size());
  out.add("norm_mean", norm_mean);
  out.add("inner_exceed_frac", a2.inner_exceed_frac);
  out.add("dbl_to_R", a2.dbl_to_R);
  out.add("dbl_to_R_bound", a2.dbl_bound);
  out.add("double_sum", a2.double_sum);
  return out;
}

TaskOutput ks_scaling(const ExperimentConfig& c, const Cell& cell, RandomStream& rng) {
  TaskOutput out;
  const ReferenceProvider reference = default_reference(c.source, cell.q, c.aux_sample_size);
  const ProjectionMatrix p = sample_projector(cell.q, 1, rng);
  const std::vector<double> y = column(project(p, sample_source(c.source, cell.q, cell.n, rng)));
  const double ks = ks_1d(y, reference(p, rng));
  out.add("ks", ks);
  out.add("sqrt_n_ks", std::sqrt(static_cast<double>(cell.n)) * ks);
  return out;
}

TaskOutput theorem2_law(const ExperimentConfig& c, const Cell& cell, RandomStream& rng) {
  TaskOutput out;
  const MixingMeasure r = effective_mixing(c);
  require_no_atom_at_zero(r);
  const std::vector<double> grid = quantile_grid(r, c.grid_size);
  const ReferenceProvider reference = default_reference(c.source, cell.q, c.aux_sample_size);

  const ProjectionMatrix p = sample_projector(cell.q, 1, rng);
  const std::vector<double> y = column(project(p, sample_source(c.source, cell.q, cell.n, rng)));
  const Cdf f = reference(p, rng);
  const ProcessPath path = process_from_projected(y, grid, f);
  out.add("sup_grid", sup_statistic(path));
  out.add("sup_exact", std::sqrt(static_cast<double>(cell.n)) * ks_1d(y, f));
  return out;
}

TaskOutput theorem3_coverage(const ExperimentConfig& c, const Cell& cell, RandomStream& rng) {
  TaskOutput out;
  const MixingMeasure r = effective_mixing(c);
  require_no_atom_at_zero(r);
  const std::vector<double> grid = quantile_grid(r, c.grid_size);
  const ReferenceProvider reference = default_reference(c.source, cell.q, c.aux_sample_size);

  const Matrix data = sample_source(c.source, cell.q, cell.n, rng);
  MultiProjectionRun run;
  run.shared_data_id = data_fingerprint(data);
  std::vector<double> sups;
  for (int l = 0; l < c.L; ++l) {
    const ProjectionMatrix p = sample_projector(cell.q, 1, rng);
    const std::vector<double> y = column(project(p, data));
    const Cdf f = reference(p, rng);
    run.paths.push_back(process_from_projected(y, grid, f));
    sups.push_back(std::sqrt(static_cast<double>(cell.n)) * ks_1d(y, f));
  }
  bool all_below = true;
  for (int l = 0; l < c.L; ++l) {
    out.add("sup_" + std::to_string(l + 1), sups[l]);
    all_below = all_below && sups[l] < c.kappa;
  }
  out.add("max_sup", *std::max_element(sups.begin(), sups.end()));
  out.add("all_below_kappa", all_below ? 1.0 : 0.0);

  const double kappa = c.kappa;
  const FunctionalEstimate grid_cover = conditional_mean_functional(
      [kappa](const ProcessPath& path) { return sup_statistic(path) < kappa ? 1.0 : 0.0; }, 1.0, run);
  double exact_cover = 0.0;
  for (double s : sups) exact_cover += s < kappa ? 1.0 : 0.0;
  out.add("conditional_mean", exact_cover / static_cast<double>(c.L));
  out.add("conditional_mean_grid", grid_cover.estimate);
  out.add("conditional_mean_bound", grid_cover.bound);
  return out;
}

TaskOutput hoeffding_d2(const ExperimentConfig& c, const Cell& cell, RandomStream& rng) {
  TaskOutput out;
  const MixingMeasure r = effective_mixing(c);
  const Matrix pairs = hoeffding_pair_sample(c.source, cell.q, c.d, cell.n, rng);
  out.add("halfspace_ks", halfspace_ks(pairs, product_mixture_direction_cdf(r, c.d), c.directions, rng));

  const MixtureLaw law{c.d, r};
  Matrix ref(cell.n, 2 * c.d);
  ref.leftCols(c.d) = sample_mixture(law, cell.n, rng);
  ref.rightCols(c.d) = sample_mixture(law, cell.n, rng);
  out.add("halfspace_ks_two_sample", halfspace_ks(pairs, ref, c.directions, rng));

  int equal = 0;
  for (Eigen::Index i = 0; i < pairs.rows(); ++i) {
    const double a = pairs.row(i).head(c.d).norm();
    const double b = pairs.row(i).tail(c.d).norm();
    if (std::abs(a - b) <= 1e-9 * std::max(1.0, std::max(a, b))) ++equal;
  }
  out.add("abs_equal_frac", static_cast<double>(equal) / static_cast<double>(pairs.rows()));
  return out;
}

double covariance_error(const std::vector<ProcessPath>& a, const std::vector<ProcessPath>& b, const Matrix& kernel) {
  const std::size_t count = a.size();
  const auto m = static_cast<Eigen::Index>(a.front().values.size());
  Matrix xa(count, m), xb(count, m);
  for (std::size_t i = 0; i < count; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      xa(i, j) = a[i].values[j];
      xb(i, j) = b[i].values[j];
    }
  const Eigen::RowVectorXd ma = xa.colwise().mean();
  const Eigen::RowVectorXd mb = xb.colwise().mean();
  xa.rowwise() -= ma;
  xb.rowwise() -= mb;
  const Matrix cov = xa.transpose() * xb / static_cast<double>(count - 1);
  return (cov - kernel).cwiseAbs().maxCoeff();
}

MixingMeasure random_mixing(RandomStream& rng) {
  const int atoms = 1 + static_cast<int>(rng.index(4));
  std::vector<MixingMeasure::Atom> a(atoms);
  double total = 0.0;
  for (auto& atom : a) {
    atom.v = rng.uniform() < 0.2 ? 0.0 : 4.0 * rng.uniform();
    atom.p = rng.uniform_pos();
    total += atom.p;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    a[i].p /= total;
    sum += a[i].p;
  }
  a.back().p = 1.0 - sum;
  return MixingMeasure::custom(std::move(a));
}

TaskOutput gp_validation(const ExperimentConfig& c, const Cell& cell, RandomStream& rng) {
  TaskOutput out;
  const MixingMeasure r = effective_mixing(c);
  const std::vector<double> grid = quantile_grid(r, c.grid_size);

  const GridCovariance full = grid_covariance(KernelKind::Full, r, grid);
  const GridCovariance within = grid_covariance(KernelKind::Within, r, grid);
  const GridCovariance between = grid_covariance(KernelKind::Between, r, grid);
  out.add("additivity_error", (full.matrix - within.matrix - between.matrix).cwiseAbs().maxCoeff());

  const MixingMeasure other = random_mixing(rng);
  std::vector<double> rgrid(c.grid_size);
  for (int j = 0; j < c.grid_size; ++j) rgrid[j] = -4.0 + 8.0 * (j + 0.5) / c.grid_size;
  const Matrix rf = grid_covariance(KernelKind::Full, other, rgrid).matrix;
  const Matrix rw = grid_covariance(KernelKind::Within, other, rgrid).matrix;
  const Matrix rb = grid_covariance(KernelKind::Between, other, rgrid).matrix;
  out.add("random_additivity_error", (rf - rw - rb).cwiseAbs().maxCoeff());

  const CholeskyFactor ff = cholesky_with_jitter(full);
  const CholeskyFactor fw = cholesky_with_jitter(within);
  const CholeskyFactor fb = cholesky_with_jitter(between);
  out.jitter.push_back({{"q", cell.q}, {"n", cell.n}, {"kernel", "full"}, {"jitter", ff.jitter_used}});
  out.jitter.push_back({{"q", cell.q}, {"n", cell.n}, {"kernel", "within"}, {"jitter", fw.jitter_used}});
  out.jitter.push_back({{"q", cell.q}, {"n", cell.n}, {"kernel", "between"}, {"jitter", fb.jitter_used}});
  out.add("jitter_full", ff.jitter_used);
  out.add("jitter_within", fw.jitter_used);
  out.add("jitter_between", fb.jitter_used);

  const int paths = std::max(cell.n, 2);
  std::vector<ProcessPath> direct, first, second;
  direct.reserve(paths);
  std::vector<double> sups;
  for (int i = 0; i < paths; ++i) {
    direct.push_back(sample_gp_path(ff, rng));
    sups.push_back(sup_statistic(direct.back()));
  }
  for (int i = 0; i < paths; ++i) {
    auto pair = sample_decomposed(fw, fb, 2, rng);
    first.push_back(std::move(pair[0]));
    second.push_back(std::move(pair[1]));
  }
  out.add("full_cov_error", covariance_error(direct, direct, full.matrix));
  out.add("decomposed_cov_error", covariance_error(first, first, full.matrix));
  out.add("between_cov_error", covariance_error(first, second, between.matrix));
  if (!r.has_atom_at_zero()) out.add("sup_ks_kolmogorov", ks_1d(sups, kolmogorov_cdf));
  return out;
}

TaskOutput run_task(const ExperimentConfig& c, const Cell& cell, RandomStream& rng) {
  switch (c.kind) {
    case ExperimentKind::PoincareMarginal: return poincare_marginal(c, cell, rng);
    case ExperimentKind::DfConvergence: return df_convergence(c, cell, rng);
    case ExperimentKind::Counterexample: return counterexample(c, cell, rng);
    case ExperimentKind::A3Trend: return a3_trend(c, cell, rng);
    case ExperimentKind::KsScaling: return ks_scaling(c, cell, rng);
    case ExperimentKind::Theorem2Law: return theorem2_law(c, cell, rng);
    case ExperimentKind::Theorem3Coverage: return theorem3_coverage(c, cell, rng);
    case ExperimentKind::HoeffdingD2: return hoeffding_d2(c, cell, rng);
    case ExperimentKind::GpValidation: return gp_validation(c, cell, rng);
  }
  throw std::logic_error("unhandled experiment kind");
}

// ---------------------------------------------------------------------------
// Cross-replicate statistics appended after the per-statistic means.

void cell_extras(const ExperimentConfig& c, const Cell& cell, const std::vector<TaskOutput>& reps,
                 const std::function<void(std::string, double, double)>& emit) {
  auto values = [&](const std::string& name) {
    std::vector<double> v;
    for (const auto& rep : reps)
      for (const auto& [k, x] : rep.stats)
        if (k == name) v.push_back(x);
    return v;
  };
  const auto nan = kNaN;
  switch (c.kind) {
    case ExperimentKind::Theorem2Law: {
      const auto sups = values("sup_exact");
      emit("sup_exact_p95", quantile(sups, 0.95), nan);
      emit("kolmogorov_p95", kolmogorov_quantile(0.95), nan);
      emit("sup_law_ks", ks_1d(sups, kolmogorov_cdf), nan);
      break;
    }
    case ExperimentKind::Theorem3Coverage: {
      emit("product_bound", std::pow(kolmogorov_cdf(c.kappa), c.L), nan);
      if (c.L >= 2 && reps.size() >= 3) {
        const auto a = values("sup_1");
        const auto b = values("sup_2");
        const double n = static_cast<double>(a.size());
        const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
        const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
        double sab = 0, saa = 0, sbb = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
          sab += (a[i] - ma) * (b[i] - mb);
          saa += (a[i] - ma) * (a[i] - ma);
          sbb += (b[i] - mb) * (b[i] - mb);
        }
        emit("sup_correlation", sab / std::sqrt(saa * sbb), nan);
      }
      break;
    }
    case ExperimentKind::Counterexample:
      emit("dbl_pair_median", median(values("dbl_pair")), nan);
      break;
    case ExperimentKind::PoincareMarginal:
      emit("surrogate_deviation_scaled", median(values("surrogate_deviation_median")) * std::sqrt(cell.q), nan);
      break;
    default:
      break;
  }
}

std::string format_double(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

RunRecord run_experiment(const ExperimentConfig& config) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();

  std::vector<Cell> cells;
  for (int q : config.q_ladder)
    for (int n : config.n_ladder) cells.push_back({static_cast<int>(cells.size()), q, n});
  const std::size_t reps = static_cast<std::size_t>(config.replicates);
  const std::size_t tasks = cells.size() * reps;

  std::vector<TaskOutput> results(tasks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks) return;
      {
        std::lock_guard lock(failure_mutex);
        if (failure) return;
      }
      const Cell& cell = cells[t / reps];
      const std::size_t rep = t % reps;
      try {
        RandomStream rng = derive_stream(config.master_seed, cell.index, rep);
        results[t] = run_task(config, cell, rng);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(config.workers, static_cast<int>(tasks)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  RunRecord record;
  record.config = config;
  const std::string name = to_string(config.kind);
  for (const Cell& cell : cells) {
    const auto first = results.begin() + static_cast<std::ptrdiff_t>(cell.index * reps);
    const std::vector<TaskOutput> cell_results(first, first + static_cast<std::ptrdiff_t>(reps));

    std::vector<std::string> order;
    for (std::size_t r = 0; r < reps; ++r) {
      const std::uint64_t seed = derive_seed(config.master_seed, cell.index, r);
      for (const auto& [stat, value] : cell_results[r].stats) {
        record.rows.push_back({name, cell.q, cell.n, config.L, static_cast<int>(r), stat, value, kNaN, seed});
        if (std::find(order.begin(), order.end(), stat) == order.end()) order.push_back(stat);
      }
      for (auto j : cell_results[r].jitter) {
        j["replicate"] = r;
        record.jitter.push_back(std::move(j));
      }
    }
    auto emit = [&](std::string stat, double value, double se) {
      record.rows.push_back({name, cell.q, cell.n, config.L, -1, std::move(stat), value, se, config.master_seed});
    };
    for (const auto& stat : order) {
      double sum = 0.0, sq = 0.0;
      std::size_t count = 0;
      for (const auto& rep : cell_results)
        for (const auto& [k, x] : rep.stats)
          if (k == stat) {
            sum += x;
            ++count;
          }
      const double mean = sum / static_cast<double>(count);
      for (const auto& rep : cell_results)
        for (const auto& [k, x] : rep.stats)
          if (k == stat) sq += (x - mean) * (x - mean);
      const double se =
          count > 1 ? std::sqrt(sq / static_cast<double>(count - 1) / static_cast<double>(count)) : kNaN;
      emit(stat, mean, se);
    }
    cell_extras(config, cell, cell_results, emit);
  }

  if (config.kind == ExperimentKind::KsScaling && config.n_ladder.size() >= 2) {
    for (int q : config.q_ladder) {
      std::vector<double> ns, means;
      for (int n : config.n_ladder) {
        ns.push_back(n);
        means.push_back(find_value(record, "ks", q, n));
      }
      record.rows.push_back(
          {name, q, 0, config.L, -1, "ks_slope", log_log_slope(ns, means), kNaN, config.master_seed});
    }
  }

  record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out = "experiment,q,n,L,replicate,statistic,value,stderr,seed\n";
  for (const auto& r : rows) {
    out += r.experiment;
    out += ',' + std::to_string(r.q);
    out += ',' + std::to_string(r.n);
    out += ',' + std::to_string(r.L);
    out += ',' + std::to_string(r.replicate);
    out += ',' + r.statistic;
    out += ',' + format_double(r.value);
    out += ',' + format_double(r.stderr_);
    out += ',' + std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

nlohmann::json sidecar(const RunRecord& record) {
  return {{"config", config_to_json(record.config)},
          {"version", record.version},
          {"wall_seconds", record.wall_seconds},
          {"rows", record.rows.size()},
          {"jitter", record.jitter}};
}

std::filesystem::path write_outputs(const RunRecord& record) {
  namespace fs = std::filesystem;
  const fs::path dir = record.config.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());

  const std::string stem = to_string(record.config.kind);
  const fs::path csv = dir / (stem + ".csv");
  const fs::path json = dir / (stem + ".json");
  {
    std::ofstream out(csv, std::ios::binary);
    out << to_csv(record.rows);
    if (!out) throw std::runtime_error("cannot write '" + csv.string() + "'");
  }
  {
    std::ofstream out(json, std::ios::binary);
    out << sidecar(record).dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write '" + json.string() + "'");
  }
  return csv;
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("log_log_slope: need two matching points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("log_log_slope: values must be positive");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

double find_value(const RunRecord& record, const std::string& statistic, int q, int n, int replicate) {
  for (const auto& r : record.rows)
    if (r.statistic == statistic && r.q == q && r.n == n && r.replicate == replicate) return r.value;
  throw std::out_of_range("no row for statistic '" + statistic + "'");
}

std::vector<double> replicate_values(const RunRecord& record, const std::string& statistic, int q, int n) {
  std::vector<double> v;
  for (const auto& r : record.rows)
    if (r.statistic == statistic && r.q == q && r.n == n && r.replicate >= 0) v.push_back(r.value);
  return v;
}

}  // namespace projlab
