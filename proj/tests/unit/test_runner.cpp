#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "projlab/config.hpp"
#include "projlab/errors.hpp"
#include "projlab/runner.hpp"

using namespace projlab;
namespace fs = std::filesystem;

namespace {

std::string field_of(const std::string& text) {
  try {
    config_from_json(nlohmann::json::parse(text));
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("projlab_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(PROJLAB_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_theorem2() {
  ExperimentConfig c;
  c.kind = ExperimentKind::Theorem2Law;
  c.q_ladder = {20, 40};
  c.n_ladder = {100, 200};
  c.replicates = 7;
  c.master_seed = 99;
  return c;
}

}  // namespace

TEST_CASE("experiment names round trip") {
  for (auto kind : all_experiments()) {
    CHECK(experiment_from_string(to_string(kind)) == kind);
    CHECK_FALSE(describe(kind).empty());
  }
  CHECK(all_experiments().size() == 9u);
  CHECK_THROWS_AS(experiment_from_string("nope"), ConfigError);
}

TEST_CASE("config validation names the field") {
  CHECK(field_of(R"({"experiment": "theorem2-law", "q_ladder": []})") == "q_ladder");
  CHECK(field_of(R"({"experiment": "theorem2-law", "n_ladder": [100, 100]})") == "n_ladder");
  CHECK(field_of(R"({"experiment": "theorem2-law", "replicates": 0})") == "replicates");
  CHECK(field_of(R"({"experiment": "theorem2-law", "replicates": "x"})") == "replicates");
  CHECK(field_of(R"({"experiment": "bogus"})") == "experiment");
  CHECK(field_of(R"({"q_ladder": [1]})") == "experiment");
  CHECK(field_of(R"({"experiment": "theorem2-law", "colour": 1})") == "colour");
  CHECK(field_of(R"({"experiment": "theorem2-law", "source": {"kind": "sparse-spike", "lambda": 2},
                     "q_ladder": [200]})") == "mixing");
  CHECK(field_of(R"({"experiment": "df-convergence", "source": {"kind": "sparse-spike", "lambda": 5},
                     "q_ladder": [3, 10]})") == "source");
  CHECK(field_of(R"({"experiment": "a3-trend", "source": {"kind": "gaussian-iso"}})") == "source");
  CHECK(field_of(R"({"experiment": "theorem2-law", "d": 2})") == "d");
  CHECK(field_of(R"({"experiment": "theorem2-law", "workers": 0})") == "workers");
  CHECK(field_of(R"({"experiment": "theorem2-law", "max_support": 201})") == "max_support");
  CHECK(field_of(R"({"experiment": "theorem2-law", "mixing": {"atoms": [[1, 0.5]]}})") == "mixing");
  CHECK(field_of(R"([1, 2])") == "config");
  CHECK(field_of(R"({"experiment": "gp-validation", "mixing": {"atoms": [[1, 0.5], [4, 0.5]]}})").empty());
}

TEST_CASE("defaults are echoed explicitly") {
  const ExperimentConfig c = config_from_json(nlohmann::json::parse(R"({"experiment": "df-convergence",
      "source": {"kind": "sparse-spike", "lambda": 2}, "q_ladder": [200, 2000]})"));
  const nlohmann::json j = config_to_json(c);
  for (const char* key : {"experiment", "source", "mixing", "q_ladder", "n_ladder", "d", "L", "replicates",
                          "master_seed", "eps", "kappa", "grid_size", "directions", "max_support",
                          "aux_sample_size", "rotation_samples", "output_dir", "workers"})
    CHECK(j.contains(key));
  CHECK(j["mixing"]["kind"] == "truncated-poisson");
  CHECK(j["eps"] == 0.1);
  CHECK(j["kappa"] == 1.358);
  const ExperimentConfig back = config_from_json(j);
  CHECK(config_to_json(back) == j);
}

TEST_CASE("csv format") {
  std::vector<ResultRow> rows{{"x", 10, 20, 1, 0, "stat", 0.1, std::nan(""), 5},
                              {"x", 10, 20, 1, -1, "stat", 1.0 / 3.0, 1e-300, 5}};
  const std::string csv = to_csv(rows);
  CHECK(csv ==
        "experiment,q,n,L,replicate,statistic,value,stderr,seed\n"
        "x,10,20,1,0,stat,0.1,,5\n"
        "x,10,20,1,-1,stat,0.3333333333333333,1e-300,5\n");
  CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("log-log slope") {
  const std::vector<double> x{1, 10, 100, 1000}, y{1, 0.1, 0.01, 0.001};
  CHECK(log_log_slope(x, y) == doctest::Approx(-1.0));
  const std::vector<double> z{2, 2 * std::sqrt(10.0), 20, 20 * std::sqrt(10.0)};
  CHECK(log_log_slope(x, z) == doctest::Approx(0.5));
  CHECK_THROWS_AS(log_log_slope(std::vector<double>{1}, std::vector<double>{1}), std::invalid_argument);
}

TEST_CASE("rows carry seeds and aggregates") {
  const RunRecord r = run_experiment(small_theorem2());
  CHECK(r.version == std::string(kVersion));
  const auto sups = replicate_values(r, "sup_exact", 40, 200);
  CHECK(sups.size() == 7u);
  double mean = 0.0;
  for (double s : sups) mean += s / 7.0;
  CHECK(find_value(r, "sup_exact", 40, 200) == doctest::Approx(mean).epsilon(1e-12));
  for (const auto& row : r.rows) {
    if (row.replicate >= 0) {
      CHECK(row.seed == derive_seed(99, row.q == 20 ? (row.n == 100 ? 0 : 1) : (row.n == 100 ? 2 : 3),
                                    static_cast<std::uint64_t>(row.replicate)));
    } else {
      CHECK(row.seed == 99u);
    }
  }
  CHECK_THROWS_AS(find_value(r, "nothing", 20, 100), std::out_of_range);
}

TEST_CASE("reruns and worker counts give identical CSV") {
  ExperimentConfig c = small_theorem2();
  const std::string one = to_csv(run_experiment(c).rows);
  CHECK(to_csv(run_experiment(c).rows) == one);
  c.workers = 8;
  CHECK(to_csv(run_experiment(c).rows) == one);
  c.workers = 3;
  CHECK(to_csv(run_experiment(c).rows) == one);
  c.master_seed = 100;
  CHECK(to_csv(run_experiment(c).rows) != one);
}

TEST_CASE("every experiment runs at small scale") {
  struct Case {
    const char* json;
    const char* stat;
  };
  const Case cases[] = {
      {R"({"experiment": "poincare-marginal", "q_ladder": [30], "n_ladder": [500], "d": 2,
           "rotation_samples": 300})", "ks_marginal"},
      {R"({"experiment": "df-convergence", "source": {"kind": "sparse-spike", "lambda": 2},
           "q_ladder": [50], "n_ladder": [300]})", "dbl"},
      {R"({"experiment": "df-convergence", "q_ladder": [50], "n_ladder": [300], "d": 2, "max_support": 100})",
       "dbl"},
      {R"({"experiment": "counterexample", "source": {"kind": "non-convergent"}, "q_ladder": [100],
           "n_ladder": [100]})", "dbl_pair"},
      {R"({"experiment": "a3-trend", "source": {"kind": "rotated-independent",
           "sigma": {"scale": 1, "index_exponent": 0.5}}, "mixing": {"point_mass": 1},
           "q_ladder": [10, 100], "n_ladder": [50]})", "r2"},
      {R"({"experiment": "ks-scaling", "q_ladder": [20], "n_ladder": [100, 400], "replicates": 3})", "ks"},
      {R"({"experiment": "theorem3-coverage", "source": {"kind": "scale-mixture",
           "mixing": {"atoms": [[1, 0.5], [4, 0.5]]}}, "q_ladder": [20], "n_ladder": [200], "L": 3,
           "replicates": 3})", "all_below_kappa"},
      {R"({"experiment": "hoeffding-d2", "q_ladder": [20], "n_ladder": [200], "directions": 16})",
       "halfspace_ks"},
      {R"({"experiment": "gp-validation", "mixing": {"atoms": [[1, 0.5], [4, 0.5]]}, "q_ladder": [1],
           "n_ladder": [200], "grid_size": 21})", "additivity_error"},
      {R"({"experiment": "ks-scaling", "source": {"kind": "rotated-independent", "component": "rademacher"},
           "q_ladder": [20], "n_ladder": [100], "aux_sample_size": 1000})", "ks"},
  };
  for (const auto& c : cases) {
    CAPTURE(c.json);
    const ExperimentConfig config = config_from_json(nlohmann::json::parse(c.json));
    const RunRecord r = run_experiment(config);
    bool found = false;
    for (const auto& row : r.rows) {
      found = found || row.statistic == c.stat;
      CHECK(std::isfinite(row.value));
    }
    CHECK(found);
  }
}

TEST_CASE("ks-scaling emits a slope row") {
  ExperimentConfig c;
  c.kind = ExperimentKind::KsScaling;
  c.q_ladder = {20};
  c.n_ladder = {100, 1600};
  c.replicates = 20;
  const RunRecord r = run_experiment(c);
  const double slope = find_value(r, "ks_slope", 20, 0);
  CHECK(slope < -0.2);
  CHECK(slope > -0.8);
}

TEST_CASE("atom at zero is refused before running") {
  ExperimentConfig c = small_theorem2();
  c.source = {SparseSpike{2.0}};
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
  c.kind = ExperimentKind::Theorem3Coverage;
  c.mixing = MixingMeasure::truncated_poisson(2.0);
  c.source = {GaussianIso{}};
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("outputs on disk") {
  ExperimentConfig c = small_theorem2();
  c.output_dir = scratch("outputs") / "nested";
  const RunRecord r = run_experiment(c);
  const fs::path csv = write_outputs(r);
  CHECK(csv.filename() == "theorem2-law.csv");
  CHECK(slurp(csv) == to_csv(r.rows));
  const auto side = nlohmann::json::parse(slurp(c.output_dir / "theorem2-law.json"));
  CHECK(side["version"] == kVersion);
  CHECK(side["config"] == config_to_json(c));
  CHECK(side["rows"] == r.rows.size());
}

TEST_CASE("cli exit codes and outputs") {
  const fs::path dir = scratch("cli");
  const fs::path good = dir / "good.json";
  std::ofstream(good) << R"({"experiment": "theorem2-law", "q_ladder": [20], "n_ladder": [50], "replicates": 4})";
  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << R"({"experiment": "theorem2-law", "replicates": 0})";
  const fs::path broken = dir / "broken.json";
  std::ofstream(broken) << "{ not json";
  const fs::path runtime = dir / "runtime.json";
  std::ofstream(runtime) << R"({"experiment": "gp-validation", "mixing": {"atoms": [[1, 1]]},
                                "q_ladder": [1], "n_ladder": [10], "grid_size": 5})";

  CHECK(run_cli("list-experiments") == 0);
  CHECK(run_cli("validate --config " + good.string()) == 0);
  CHECK(run_cli("validate --config " + bad.string()) == 1);
  CHECK(run_cli("validate --config " + broken.string()) == 1);
  CHECK(run_cli("validate --config " + (dir / "missing.json").string()) == 1);
  CHECK(run_cli("run") == 1);

  CHECK(run_cli("run --config " + good.string() + " --out " + (dir / "a").string()) == 0);
  CHECK(run_cli("run --config " + good.string() + " --out " + (dir / "b").string() + " --workers 4") == 0);
  CHECK(slurp(dir / "a" / "theorem2-law.csv") == slurp(dir / "b" / "theorem2-law.csv"));
  CHECK(run_cli("run --config " + good.string() + " --out " + (dir / "c").string() + " --seed 5") == 0);
  CHECK(slurp(dir / "a" / "theorem2-law.csv") != slurp(dir / "c" / "theorem2-law.csv"));
  CHECK(nlohmann::json::parse(slurp(dir / "c" / "theorem2-law.json"))["config"]["master_seed"] == 5);

  // An output path that is a regular file cannot become a directory.
  std::ofstream(dir / "blocker") << "x";
  CHECK(run_cli("run --config " + runtime.string() + " --out " + (dir / "blocker").string()) == 2);
}
