#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "projlab/config.hpp"

namespace projlab {

inline constexpr const char* kVersion = "0.1.0";

/// One CSV line. replicate == -1 marks an aggregate over replicates; n == 0
/// marks a statistic taken across the n ladder.
struct ResultRow {
  std::string experiment;
  int q = 0;
  int n = 0;
  int L = 0;
  int replicate = 0;
  std::string statistic;
  double value = 0.0;
  double stderr_ = 0.0;  ///< NaN when undefined (written as an empty cell)
  std::uint64_t seed = 0;
};

struct RunRecord {
  ExperimentConfig config;
  std::vector<ResultRow> rows;
  double wall_seconds = 0.0;
  std::string version = kVersion;
  /// Jitter used by every Cholesky factorization, in task order.
  nlohmann::json jitter = nlohmann::json::array();
};

/// Runs replicates x ladder cells on config.workers threads. Cell c is the
/// pair (q_ladder[c / |n_ladder|], n_ladder[c % |n_ladder|]) and replicate r
/// of cell c draws only from derive_stream(master_seed, c, r), so the rows do
/// not depend on the worker count. Does not touch the file system.
RunRecord run_experiment(const ExperimentConfig& config);

/// The CSV document: header plus one LF-terminated line per row. Numbers use
/// the shortest round-trip representation.
std::string to_csv(const std::vector<ResultRow>& rows);

/// The JSON sidecar: config echo, version, wall time and jitter diagnostics.
nlohmann::json sidecar(const RunRecord& record);

/// Writes <output_dir>/<experiment>.csv and <experiment>.json and returns the
/// CSV path. Throws std::runtime_error on I/O failure.
std::filesystem::path write_outputs(const RunRecord& record);

/// Least-squares slope of log y against log x.
double log_log_slope(std::span<const double> x, std::span<const double> y);

/// Value of the first row matching (statistic, q, n, replicate); throws
/// std::out_of_range when absent.
double find_value(const RunRecord& record, const std::string& statistic, int q, int n, int replicate = -1);

/// Per-replicate values of a statistic in replicate order.
std::vector<double> replicate_values(const RunRecord& record, const std::string& statistic, int q, int n);

}  // namespace projlab
