#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "projlab/mixtures.hpp"
#include "projlab/sources.hpp"

namespace projlab {

enum class ExperimentKind {
  PoincareMarginal,
  DfConvergence,
  Counterexample,
  A3Trend,
  KsScaling,
  Theorem2Law,
  Theorem3Coverage,
  HoeffdingD2,
  GpValidation,
};

std::string to_string(ExperimentKind kind);
/// Throws ConfigError("experiment", ...) for unknown names.
ExperimentKind experiment_from_string(const std::string& name);
const std::vector<ExperimentKind>& all_experiments();
/// One-line description for `projlab list-experiments`.
std::string describe(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Theorem2Law;
  SourceSpec source;
  /// The mixing measure R of the limit; derived from the source when absent.
  std::optional<MixingMeasure> mixing;
  std::vector<int> q_ladder{200};
  std::vector<int> n_ladder{2000};
  int d = 1;
  int L = 1;
  int replicates = 1;
  std::uint64_t master_seed = 0;
  double eps = 0.1;
  double kappa = 1.358;
  int grid_size = 101;
  int directions = 256;
  /// Atoms per side when coarsening for D_BL.
  int max_support = 200;
  /// Auxiliary sample size for plug-in reference CDFs.
  int aux_sample_size = 1'000'000;
  /// Independent draws per side of the rotation-invariance test.
  int rotation_samples = 10'000;
  std::filesystem::path output_dir = ".";
  int workers = 1;
};

/// The measure R used by an experiment: the configured one or the limit
/// implied by the source (delta_1 for GaussianIso and NonConvergent,
/// Poisson(lambda) for SparseSpike, the stored measure for scale mixtures).
/// Throws ConfigError("mixing", ...) when neither exists.
MixingMeasure effective_mixing(const ExperimentConfig& config);

/// Throws ConfigError naming the first invalid field.
void validate(const ExperimentConfig& config);

/// Parses and validates. Unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
/// Every field, defaults included.
nlohmann::json config_to_json(const ExperimentConfig& config);
/// Throws ConfigError("config", ...) for unreadable files or invalid JSON.
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace projlab
