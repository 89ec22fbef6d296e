#include "projlab/sources.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "projlab/errors.hpp"

namespace projlab {

Vector VectorProfile::at(int q) const {
  if (values) {
    if (static_cast<int>(values->size()) != q) {
      std::ostringstream msg;
      msg << "vector profile has " << values->size() << " fixed entries, dimension is " << q;
      throw DimensionError(msg.str());
    }
    return Eigen::Map<const Vector>(values->data(), q);
  }
  Vector v(q);
  const double dim_factor = std::pow(static_cast<double>(q), dim_exponent);
  for (int k = 0; k < q; ++k) v(k) = scale * std::pow(k + 1.0, index_exponent) * dim_factor;
  return v;
}

Matrix RotatedIndependent::rotation_at(int q) const {
  switch (rotation) {
    case Rotation::Identity:
      return Matrix::Identity(q, q);
    case Rotation::Haar: {
      RandomStream rng(hash_combine(rotation_seed, static_cast<std::uint64_t>(q)));
      return sample_projector(q, q, rng).gamma();
    }
    case Rotation::Fixed: {
      if (!rotation_matrix || rotation_matrix->rows() != q || rotation_matrix->cols() != q)
        throw DimensionError("rotation matrix does not match the dimension");
      return *rotation_matrix;
    }
  }
  return Matrix::Identity(q, q);
}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double component_draw(ComponentLaw law, RandomStream& rng) {
  switch (law) {
    case ComponentLaw::Gaussian: return rng.normal();
    case ComponentLaw::Rademacher: return rng.sign();
    case ComponentLaw::Uniform: return std::numbers::sqrt3 * (2.0 * rng.uniform() - 1.0);
  }
  return rng.normal();
}

std::string law_name(ComponentLaw law) {
  switch (law) {
    case ComponentLaw::Gaussian: return "gaussian";
    case ComponentLaw::Rademacher: return "rademacher";
    case ComponentLaw::Uniform: return "uniform";
  }
  return "gaussian";
}

ComponentLaw law_from_name(const std::string& s) {
  if (s == "gaussian") return ComponentLaw::Gaussian;
  if (s == "rademacher") return ComponentLaw::Rademacher;
  if (s == "uniform") return ComponentLaw::Uniform;
  throw std::invalid_argument("unknown component law '" + s + "'");
}

nlohmann::json profile_to_json(const VectorProfile& p) {
  if (p.values) return nlohmann::json{{"values", *p.values}};
  return {{"scale", p.scale}, {"index_exponent", p.index_exponent}, {"dim_exponent", p.dim_exponent}};
}

VectorProfile profile_from_json(const nlohmann::json& j) {
  if (j.is_number()) return VectorProfile::constant(j.get<double>());
  VectorProfile p;
  if (j.contains("values")) {
    p.values = j.at("values").get<std::vector<double>>();
    return p;
  }
  p.scale = j.value("scale", 1.0);
  p.index_exponent = j.value("index_exponent", 0.0);
  p.dim_exponent = j.value("dim_exponent", 0.0);
  return p;
}

}  // namespace

std::string SourceSpec::name() const {
  return std::visit(Overloaded{[](const RotatedIndependent&) { return std::string("rotated-independent"); },
                               [](const SparseSpike&) { return std::string("sparse-spike"); },
                               [](const GaussianIso&) { return std::string("gaussian-iso"); },
                               [](const NonConvergent&) { return std::string("non-convergent"); },
                               [](const GaussianScaleMixture&) { return std::string("scale-mixture"); },
                               [](const Empirical&) { return std::string("empirical"); }},
                    variant);
}

void SourceSpec::check_dimension(int q) const {
  if (q < 1) throw DimensionError("source dimension must be >= 1");
  std::visit(Overloaded{[q](const RotatedIndependent& s) {
                          if (s.mu.values && static_cast<int>(s.mu.values->size()) != q)
                            throw DimensionError("mu has fixed length different from q");
                          if (s.sigma.values) {
                            if (static_cast<int>(s.sigma.values->size()) != q)
                              throw DimensionError("sigma has fixed length different from q");
                            for (double v : *s.sigma.values)
                              if (v < 0.0) throw DimensionError("sigma entries must be >= 0");
                          }
                          if (s.rotation == RotatedIndependent::Rotation::Fixed &&
                              (!s.rotation_matrix || s.rotation_matrix->rows() != q))
                            throw DimensionError("rotation matrix does not match q");
                        },
                        [q](const SparseSpike& s) {
                          if (!(s.lambda > 0.0) || s.lambda > q) {
                            std::ostringstream msg;
                            msg << "sparse-spike needs 0 < lambda <= q (lambda=" << s.lambda << ", q=" << q << ")";
                            throw DimensionError(msg.str());
                          }
                        },
                        [](const GaussianIso&) {}, [](const NonConvergent&) {},
                        [](const GaussianScaleMixture&) {},
                        [q](const Empirical& s) {
                          if (s.data.cols() != q) {
                            std::ostringstream msg;
                            msg << "empirical source has " << s.data.cols() << " columns, requested q=" << q;
                            throw DimensionError(msg.str());
                          }
                        }},
             variant);
}

nlohmann::json SourceSpec::to_json() const {
  return std::visit(
      Overloaded{[](const RotatedIndependent& s) {
                   nlohmann::json j{{"kind", "rotated-independent"},
                                    {"mu", profile_to_json(s.mu)},
                                    {"sigma", profile_to_json(s.sigma)},
                                    {"component", law_name(s.law)}};
                   if (s.rotation == RotatedIndependent::Rotation::Haar) {
                     j["rotation"] = "haar";
                     j["rotation_seed"] = s.rotation_seed;
                   } else {
                     j["rotation"] = s.rotation == RotatedIndependent::Rotation::Fixed ? "fixed" : "identity";
                   }
                   return j;
                 },
                 [](const SparseSpike& s) { return nlohmann::json{{"kind", "sparse-spike"}, {"lambda", s.lambda}}; },
                 [](const GaussianIso&) { return nlohmann::json{{"kind", "gaussian-iso"}}; },
                 [](const NonConvergent&) { return nlohmann::json{{"kind", "non-convergent"}}; },
                 [](const GaussianScaleMixture& s) {
                   return nlohmann::json{{"kind", "scale-mixture"}, {"mixing", s.mixing.to_json()}};
                 },
                 [](const Empirical& s) {
                   return nlohmann::json{{"kind", "empirical"}, {"path", s.origin},
                                         {"rows", s.data.rows()}, {"columns", s.data.cols()}};
                 }},
      variant);
}

SourceSpec SourceSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw std::invalid_argument("source needs a \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gaussian-iso") return {GaussianIso{}};
  if (kind == "non-convergent") return {NonConvergent{}};
  if (kind == "sparse-spike") return {SparseSpike{j.at("lambda").get<double>()}};
  if (kind == "scale-mixture") return {GaussianScaleMixture{MixingMeasure::from_json(j.at("mixing"))}};
  if (kind == "rotated-independent") {
    RotatedIndependent s;
    if (j.contains("mu")) s.mu = profile_from_json(j.at("mu"));
    if (j.contains("sigma")) s.sigma = profile_from_json(j.at("sigma"));
    s.law = law_from_name(j.value("component", std::string("gaussian")));
    const std::string rot = j.value("rotation", std::string("identity"));
    if (rot == "haar") {
      s.rotation = RotatedIndependent::Rotation::Haar;
      s.rotation_seed = j.value("rotation_seed", std::uint64_t{0});
    } else if (rot != "identity") {
      throw std::invalid_argument("rotation must be \"identity\" or \"haar\" in configs");
    }
    return {s};
  }
  if (kind == "empirical") {
    CsvOptions opts;
    opts.header = j.value("header", false);
    return load_dataset(j.at("path").get<std::string>(), opts);
  }
  throw std::invalid_argument("unknown source kind '" + kind + "'");
}

namespace {

void fill_sparse_spike(Matrix& out, double lambda, RandomStream& rng) {
  const auto q = out.cols();
  const double pi = lambda / static_cast<double>(q);
  const double height = std::sqrt(static_cast<double>(q));
  out.setZero();
  if (pi >= 1.0) {
    out.setConstant(height);
    return;
  }
  // Geometric gaps between successes over the row-major entry sequence.
  const double log_fail = std::log1p(-pi);
  const double total = static_cast<double>(out.rows()) * static_cast<double>(q);
  double pos = -1.0;
  for (;;) {
    pos += 1.0 + std::floor(std::log(rng.uniform_pos()) / log_fail);
    if (pos >= total) break;
    const auto idx = static_cast<std::int64_t>(pos);
    out(idx / q, idx % q) = height;
  }
}

}  // namespace

Matrix sample_source(const SourceSpec& spec, int q, int n, RandomStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_source: n must be >= 1");
  spec.check_dimension(q);
  Matrix out(n, q);
  std::visit(Overloaded{[&](const RotatedIndependent& s) {
                          const Vector mu = s.mu.at(q);
                          const Vector sigma = s.sigma.at(q);
                          for (int i = 0; i < n; ++i)
                            for (int k = 0; k < q; ++k) out(i, k) = mu(k) + sigma(k) * component_draw(s.law, rng);
                          if (s.rotation != RotatedIndependent::Rotation::Identity)
                            out = out * s.rotation_at(q).transpose();
                        },
                        [&](const SparseSpike& s) { fill_sparse_spike(out, s.lambda, rng); },
                        [&](const GaussianIso&) {
                          for (int i = 0; i < n; ++i)
                            for (int k = 0; k < q; ++k) out(i, k) = rng.normal();
                        },
                        [&](const NonConvergent&) {
                          out.setZero();
                          const double h = std::sqrt(static_cast<double>(q));
                          for (int i = 0; i < n; ++i) out(i, 0) = rng.sign() * h;
                        },
                        [&](const GaussianScaleMixture& s) {
                          for (int i = 0; i < n; ++i) {
                            const double sd = std::sqrt(s.mixing.sample(rng));
                            for (int k = 0; k < q; ++k) out(i, k) = sd * rng.normal();
                          }
                        },
                        [&](const Empirical& s) {
                          const auto rows = static_cast<std::uint64_t>(s.data.rows());
                          for (int i = 0; i < n; ++i) out.row(i) = s.data.row(static_cast<Eigen::Index>(rng.index(rows)));
                        }},
             spec.variant);
  return out;
}

std::optional<DiscreteMeasure> projected_population(const SourceSpec& spec, const ProjectionMatrix& p) {
  const int q = p.ambient_dim();
  spec.check_dimension(q);
  if (std::holds_alternative<NonConvergent>(spec.variant)) {
    Matrix pts(2, p.target_dim());
    const double h = std::sqrt(static_cast<double>(q));
    pts.row(0) = h * p.gamma().row(0);
    pts.row(1) = -h * p.gamma().row(0);
    return DiscreteMeasure::uniform(std::move(pts));
  }
  if (const auto* e = std::get_if<Empirical>(&spec.variant)) return DiscreteMeasure::uniform(project(p, e->data));
  return std::nullopt;
}

std::pair<double, double> dbl_to_mixing(std::span<const double> values, const MixingMeasure& ref,
                                        int max_support) {
  Matrix col(values.size(), 1);
  for (std::size_t i = 0; i < values.size(); ++i) col(i, 0) = values[i];
  // Repeated values (e.g. integer norms) collapse before coarsening.
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> pos, w;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    pos.push_back(sorted[i]);
    w.push_back(static_cast<double>(j - i) / static_cast<double>(sorted.size()));
    i = j;
  }
  double total = 0.0;
  for (double x : w) total += x;
  w.back() += 1.0 - total;

  Discretization sample_side{DiscreteMeasure::on_line(pos, w), 0.0, 0.0};
  if (static_cast<int>(pos.size()) > max_support) sample_side = dbl_discretize(col, max_support);

  std::vector<double> rpos, rw;
  for (const auto& a : ref.atoms()) {
    rpos.push_back(a.v);
    rw.push_back(a.p);
  }
  Discretization ref_side{DiscreteMeasure::on_line(rpos, rw), 0.0, 0.0};
  if (static_cast<int>(rpos.size()) > max_support) {
    // Equal-mass coarsening of the atom list by its quantiles.
    std::vector<double> qpos(max_support), qw(max_support, 1.0 / max_support);
    std::size_t k = 0;
    double cum = ref.atoms()[0].p;
    for (int t = 0; t < max_support; ++t) {
      const double level = (t + 0.5) / max_support;
      while (cum < level && k + 1 < rpos.size()) cum += ref.atoms()[++k].p;
      qpos[t] = rpos[k];
    }
    double s = 0.0;
    for (double x : qw) s += x;
    qw.back() += 1.0 - s;
    ref_side = {DiscreteMeasure::on_line(qpos, qw), 2.0, 0.0};
  }
  DblOptions opts;
  opts.max_support = std::max(400, 2 * max_support);
  const double value = dbl_exact(sample_side.measure, ref_side.measure, opts);
  return {value, sample_side.perturbation_bound + ref_side.perturbation_bound};
}

namespace {

double double_sum_statistic(const Matrix& x) {
  const double q = static_cast<double>(x.cols());
  const auto n = x.rows();
  constexpr Eigen::Index kBlock = 512;
  double s = 0.0;
  for (Eigen::Index b = 0; b < n; b += kBlock) {
    const Eigen::Index rows = std::min(kBlock, n - b);
    const Matrix gram = x.middleRows(b, rows) * x.transpose();
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) s += std::min(std::abs(gram(i, j)) / q, 1.0);
  }
  return s / (static_cast<double>(n) * static_cast<double>(n));
}

A2Report summarize(const Matrix& first, const Matrix& second, const MixingMeasure& ref, const A2Options& options,
                   const Matrix& for_double_sum) {
  const double q = static_cast<double>(first.cols());
  A2Report r;
  r.norm_stats.reserve(first.rows());
  for (Eigen::Index i = 0; i < first.rows(); ++i) r.norm_stats.push_back(first.row(i).squaredNorm() / q);
  std::size_t exceed = 0;
  for (Eigen::Index i = 0; i < second.rows(); ++i) {
    const double inner = first.row(i).dot(second.row(i)) / q;
    r.inner_stats.push_back(inner);
    if (std::abs(inner) >= options.eps) ++exceed;
  }
  r.inner_exceed_frac = r.inner_stats.empty() ? 0.0 : static_cast<double>(exceed) / r.inner_stats.size();
  const auto [value, bound] = dbl_to_mixing(r.norm_stats, ref, options.max_support);
  r.dbl_to_R = value;
  r.dbl_bound = bound;
  r.double_sum = double_sum_statistic(for_double_sum);
  return r;
}

}  // namespace

A2Report a2_statistics(const SourceSpec& spec, int q, int m, const MixingMeasure& ref, RandomStream& rng,
                       const A2Options& options) {
  if (m < 2) throw std::invalid_argument("a2_statistics: m must be >= 2");
  if (!(options.eps > 0.0)) throw std::invalid_argument("a2_statistics: eps must be positive");
  const Matrix x = sample_source(spec, q, m, rng);
  const Matrix x_tilde = sample_source(spec, q, m, rng);
  return summarize(x, x_tilde, ref, options, x.topRows(std::min<Eigen::Index>(m, kDoubleSumRows)));
}

A2Report empirical_a2_report(const Matrix& data, const MixingMeasure& ref, const A2Options& options) {
  const auto n = data.rows();
  if (n < 2) throw std::invalid_argument("empirical_a2_report: need at least two rows");
  const auto pairs = n / 2;
  Matrix first(pairs, data.cols()), second(pairs, data.cols());
  for (Eigen::Index i = 0; i < pairs; ++i) {
    first.row(i) = data.row(2 * i);
    second.row(i) = data.row(2 * i + 1);
  }
  A2Report r = summarize(first, second, ref, options, data);
  // Norm statistics cover every row, not only the first members of pairs.
  const double q = static_cast<double>(data.cols());
  r.norm_stats.clear();
  for (Eigen::Index i = 0; i < n; ++i) r.norm_stats.push_back(data.row(i).squaredNorm() / q);
  const auto [value, bound] = dbl_to_mixing(r.norm_stats, ref, options.max_support);
  r.dbl_to_R = value;
  r.dbl_bound = bound;
  return r;
}

A3Stats a3_statistics(std::span<const double> mu, std::span<const double> sigma, int q) {
  if (static_cast<int>(mu.size()) != q || static_cast<int>(sigma.size()) != q) {
    std::ostringstream msg;
    msg << "a3_statistics: expected vectors of length " << q << ", got " << mu.size() << " and " << sigma.size();
    throw DimensionError(msg.str());
  }
  double mu2 = 0.0, s2 = 0.0, smax = 0.0;
  for (int k = 0; k < q; ++k) {
    if (sigma[k] < 0.0) throw std::invalid_argument("a3_statistics: sigma must be nonnegative");
    mu2 += mu[k] * mu[k];
    const double v = sigma[k] * sigma[k];
    s2 += v;
    smax = std::max(smax, v);
  }
  return {mu2 / q, s2 / q, smax / q};
}

Matrix parse_csv(const std::string& text, const CsvOptions& options) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && options.header) continue;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    std::vector<double> row;
    std::size_t col = 0;
    std::size_t start = 0;
    for (;;) {
      ++col;
      const std::size_t end = std::min(line.find(',', start), line.size());
      std::size_t b = start, e = end;
      while (b < e && (line[b] == ' ' || line[b] == '\t')) ++b;
      while (e > b && (line[e - 1] == ' ' || line[e - 1] == '\t')) --e;
      double value = 0.0;
      const char* first = line.data() + b;
      const char* last = line.data() + e;
      if (!line.empty() && first < last && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, value);
      if (b == e || ec != std::errc() || ptr != last || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << "row " << line_no << ", column " << col << ": cannot parse '" << line.substr(b, e - b)
            << "' as a finite number";
        throw ParseError(msg.str(), line_no, col);
      }
      row.push_back(value);
      if (end >= line.size()) break;
      start = end + 1;
    }
    if (width == 0) width = row.size();
    if (row.size() != width) {
      std::ostringstream msg;
      msg << "row " << line_no << ": expected " << width << " columns, found " << row.size();
      throw ParseError(msg.str(), line_no, 0);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("dataset is empty", 0, 0);
  Matrix m(rows.size(), width);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j) m(i, j) = rows[i][j];
  return m;
}

SourceSpec load_dataset(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open dataset '" + path.string() + "'", 0, 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return {Empirical{parse_csv(buf.str(), options), path.string()}};
}

}  // namespace projlab
