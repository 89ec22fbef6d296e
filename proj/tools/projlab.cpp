#include <cstdint>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "projlab/config.hpp"
#include "projlab/errors.hpp"
#include "projlab/runner.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random projection experiments"};
  app.set_version_flag("--version", projlab::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;

  auto* run = app.add_subcommand("run", "Run one experiment and write CSV + JSON outputs");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  run->add_option("--seed", seed, "Master seed (overrides master_seed)");
  run->add_option("--workers", workers, "Worker threads (overrides workers)");

  auto* check = app.add_subcommand("validate", "Parse and validate a config without running it");
  check->add_option("--config", config_path, "Experiment config (JSON)")->required();

  auto* list = app.add_subcommand("list-experiments", "List the available experiment kinds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  if (list->parsed()) {
    for (auto kind : projlab::all_experiments())
      std::cout << projlab::to_string(kind) << "\t" << projlab::describe(kind) << "\n";
    return 0;
  }

  projlab::ExperimentConfig config;
  try {
    config = projlab::load_config(config_path);
    if (out_dir) config.output_dir = *out_dir;
    if (seed) config.master_seed = *seed;
    if (workers) config.workers = *workers;
    projlab::validate(config);
  } catch (const projlab::ConfigError& e) {
    std::cerr << "config error [" << e.field() << "]: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  if (check->parsed()) {
    std::cout << "ok: " << projlab::to_string(config.kind) << "\n";
    return 0;
  }

  try {
    const projlab::RunRecord record = projlab::run_experiment(config);
    const auto path = projlab::write_outputs(record);
    std::cout << path.string() << " (" << record.rows.size() << " rows, " << record.wall_seconds << " s)\n";
  } catch (const projlab::ConfigError& e) {
    std::cerr << "config error [" << e.field() << "]: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}
