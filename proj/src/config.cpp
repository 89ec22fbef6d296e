#include "projlab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "projlab/errors.hpp"

namespace projlab {

namespace {

struct KindInfo {
  ExperimentKind kind;
  const char* name;
  const char* description;
};

constexpr KindInfo kKinds[] = {
    {ExperimentKind::PoincareMarginal, "poincare-marginal",
     "KS of (gamma^T x)_1 against N(0, |x|^2/q), rotation invariance, orthonormality"},
    {ExperimentKind::DfConvergence, "df-convergence",
     "D_BL and halfspace KS between gamma^T P_n and the mixture limit Q"},
    {ExperimentKind::Counterexample, "counterexample",
     "D_BL between two independent projections of the same source"},
    {ExperimentKind::A3Trend, "a3-trend", "A3 statistics and A2 diagnostics of a rotated-independent source"},
    {ExperimentKind::KsScaling, "ks-scaling", "KS distance between gamma^T P_n and gamma^T P across n"},
    {ExperimentKind::Theorem2Law, "theorem2-law", "sup of the projected empirical process against the Kolmogorov law"},
    {ExperimentKind::Theorem3Coverage, "theorem3-coverage",
     "joint coverage of L projections of one dataset against the product bound"},
    {ExperimentKind::HoeffdingD2, "hoeffding-d2", "halfspace KS of shared-projector pairs against Q x Q"},
    {ExperimentKind::GpValidation, "gp-validation", "kernel additivity and Gaussian-process sample covariances"},
};

const std::set<std::string> kKeys = {"experiment", "source",     "mixing",      "q_ladder",        "n_ladder",
                                     "d",          "L",          "replicates",  "master_seed",     "eps",
                                     "kappa",      "grid_size",  "directions",  "max_support",     "aux_sample_size",
                                     "rotation_samples",         "output_dir",  "workers",         "version"};

template <class T>
T read(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(key, std::string("wrong type: ") + e.what());
  }
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& k : kKinds)
    if (k.kind == kind) return k.name;
  return "unknown";
}

ExperimentKind experiment_from_string(const std::string& name) {
  for (const auto& k : kKinds)
    if (name == k.name) return k.kind;
  throw ConfigError("experiment", "unknown experiment '" + name + "'");
}

const std::vector<ExperimentKind>& all_experiments() {
  static const std::vector<ExperimentKind> kinds = [] {
    std::vector<ExperimentKind> v;
    for (const auto& k : kKinds) v.push_back(k.kind);
    return v;
  }();
  return kinds;
}

std::string describe(ExperimentKind kind) {
  for (const auto& k : kKinds)
    if (k.kind == kind) return k.description;
  return "";
}

MixingMeasure effective_mixing(const ExperimentConfig& config) {
  if (config.mixing) return *config.mixing;
  const auto& v = config.source.variant;
  if (std::holds_alternative<GaussianIso>(v) || std::holds_alternative<NonConvergent>(v))
    return MixingMeasure::point_mass(1.0);
  if (const auto* s = std::get_if<SparseSpike>(&v)) return MixingMeasure::truncated_poisson(s->lambda);
  if (const auto* s = std::get_if<GaussianScaleMixture>(&v)) return s->mixing;
  throw ConfigError("mixing", "source '" + config.source.name() + "' needs an explicit mixing measure");
}

void validate(const ExperimentConfig& c) {
  auto ladder = [](const char* field, const std::vector<int>& v) {
    if (v.empty()) throw ConfigError(field, "ladder must be nonempty");
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] < 1) throw ConfigError(field, "entries must be >= 1");
      if (i > 0 && v[i] <= v[i - 1]) throw ConfigError(field, "ladder must be strictly increasing");
    }
  };
  ladder("q_ladder", c.q_ladder);
  ladder("n_ladder", c.n_ladder);
  if (c.replicates < 1) throw ConfigError("replicates", "must be >= 1");
  if (c.d < 1) throw ConfigError("d", "must be >= 1");
  if (c.d > c.q_ladder.front()) throw ConfigError("d", "must not exceed the smallest q");
  if (c.L < 1) throw ConfigError("L", "must be >= 1");
  if (!(c.eps > 0.0)) throw ConfigError("eps", "must be positive");
  if (!(c.kappa > 0.0)) throw ConfigError("kappa", "must be positive");
  if (c.grid_size < 1) throw ConfigError("grid_size", "must be >= 1");
  if (c.directions < 1) throw ConfigError("directions", "must be >= 1");
  if (c.max_support < 1 || c.max_support > 200)
    throw ConfigError("max_support", "must lie in [1, 200] so both sides fit the 400-atom LP cap");
  if (c.aux_sample_size < 1) throw ConfigError("aux_sample_size", "must be >= 1");
  if (c.rotation_samples < 2) throw ConfigError("rotation_samples", "must be >= 2");
  if (c.workers < 1) throw ConfigError("workers", "must be >= 1");

  for (int q : c.q_ladder) {
    try {
      c.source.check_dimension(q);
    } catch (const Error& e) {
      throw ConfigError("source", e.what());
    }
  }

  const bool needs_line = c.kind == ExperimentKind::Theorem2Law || c.kind == ExperimentKind::Theorem3Coverage ||
                          c.kind == ExperimentKind::KsScaling;
  if (needs_line && c.d != 1) throw ConfigError("d", to_string(c.kind) + " works with d = 1 paths");
  if (c.kind == ExperimentKind::A3Trend && !std::holds_alternative<RotatedIndependent>(c.source.variant))
    throw ConfigError("source", "a3-trend needs a rotated-independent source");

  const bool needs_mixing = c.kind == ExperimentKind::DfConvergence || c.kind == ExperimentKind::Theorem2Law ||
                            c.kind == ExperimentKind::Theorem3Coverage || c.kind == ExperimentKind::HoeffdingD2 ||
                            c.kind == ExperimentKind::GpValidation || c.kind == ExperimentKind::A3Trend;
  if (needs_mixing) {
    const MixingMeasure r = effective_mixing(c);
    if ((c.kind == ExperimentKind::Theorem2Law || c.kind == ExperimentKind::Theorem3Coverage) &&
        r.has_atom_at_zero())
      throw ConfigError("mixing",
                        "atom at 0: halfspace indicators violate condition C3, the process limit does not apply");
  }
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j{{"experiment", to_string(c.kind)},
                   {"source", c.source.to_json()},
                   {"q_ladder", c.q_ladder},
                   {"n_ladder", c.n_ladder},
                   {"d", c.d},
                   {"L", c.L},
                   {"replicates", c.replicates},
                   {"master_seed", c.master_seed},
                   {"eps", c.eps},
                   {"kappa", c.kappa},
                   {"grid_size", c.grid_size},
                   {"directions", c.directions},
                   {"max_support", c.max_support},
                   {"aux_sample_size", c.aux_sample_size},
                   {"rotation_samples", c.rotation_samples},
                   {"output_dir", c.output_dir.string()},
                   {"workers", c.workers}};
  try {
    j["mixing"] = effective_mixing(c).to_json();
  } catch (const ConfigError&) {
    j["mixing"] = nullptr;
  }
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config", "top level must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!kKeys.contains(key)) throw ConfigError(key, "unknown key");
  if (!j.contains("experiment")) throw ConfigError("experiment", "missing");

  ExperimentConfig c;
  c.kind = experiment_from_string(read<std::string>(j, "experiment", ""));
  if (j.contains("source")) {
    try {
      c.source = SourceSpec::from_json(j.at("source"));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("source", e.what());
    }
  }
  if (j.contains("mixing") && !j.at("mixing").is_null()) {
    try {
      c.mixing = MixingMeasure::from_json(j.at("mixing"));
    } catch (const std::exception& e) {
      throw ConfigError("mixing", e.what());
    }
  }
  c.q_ladder = read(j, "q_ladder", c.q_ladder);
  c.n_ladder = read(j, "n_ladder", c.n_ladder);
  c.d = read(j, "d", c.d);
  c.L = read(j, "L", c.L);
  c.replicates = read(j, "replicates", c.replicates);
  c.master_seed = read(j, "master_seed", c.master_seed);
  c.eps = read(j, "eps", c.eps);
  c.kappa = read(j, "kappa", c.kappa);
  c.grid_size = read(j, "grid_size", c.grid_size);
  c.directions = read(j, "directions", c.directions);
  c.max_support = read(j, "max_support", c.max_support);
  c.aux_sample_size = read(j, "aux_sample_size", c.aux_sample_size);
  c.rotation_samples = read(j, "rotation_samples", c.rotation_samples);
  c.output_dir = read<std::string>(j, "output_dir", c.output_dir.string());
  c.workers = read(j, "workers", c.workers);
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

}  // namespace projlab
