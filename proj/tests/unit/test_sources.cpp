#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <vector>

#include "projlab/errors.hpp"
#include "projlab/sources.hpp"

using namespace projlab;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

}  // namespace

TEST_CASE("gaussian source shape and moments") {
  RandomStream rng(1);
  const Matrix x = sample_source({GaussianIso{}}, 4, 3, rng);
  CHECK(x.rows() == 3);
  CHECK(x.cols() == 4);
  const Matrix big = sample_source({GaussianIso{}}, 4, 100000, rng);
  for (int j = 0; j < 4; ++j) CHECK(std::abs(big.col(j).mean()) < 4.0 / std::sqrt(100000.0));
}

TEST_CASE("sparse spike rows") {
  RandomStream rng(2);
  const int q = 2000, n = 20000;
  const Matrix x = sample_source({SparseSpike{2.0}}, q, n, rng);
  const double nonzero = (x.array() != 0.0).cast<double>().sum() / (static_cast<double>(q) * n);
  CHECK(std::abs(nonzero - 0.001) < 4.0 * std::sqrt(0.001 / (static_cast<double>(q) * n)));
  CHECK(((x.array() == 0.0) || (x.array() == std::sqrt(2000.0))).all());
  int zero_rows = 0;
  for (int i = 0; i < n; ++i) zero_rows += x.row(i).cwiseAbs().maxCoeff() == 0.0;
  const double p0 = 0.1351999253975;  // (1 - 1/1000)^2000
  CHECK(std::abs(zero_rows / static_cast<double>(n) - p0) < 4.0 * std::sqrt(p0 * (1 - p0) / n));

  CHECK_THROWS_AS(sample_source({SparseSpike{3.0}}, 2, 1, rng), DimensionError);
  CHECK_THROWS_AS(SourceSpec{SparseSpike{0.0}}.check_dimension(5), DimensionError);
}

TEST_CASE("sparse spike norms are exactly binomial") {
  RandomStream rng(3);
  const int q = 20, m = 100000;
  const double p = 2.0 / q;
  const A2Report r = a2_statistics({SparseSpike{2.0}}, q, m, MixingMeasure::truncated_poisson(2.0), rng);
  std::vector<int> counts(q + 1, 0);
  for (double v : r.norm_stats) {
    // |X|^2 / q counts the spikes, up to the rounding of sqrt(q)^2.
    const double k = std::round(v);
    REQUIRE(std::abs(v - k) <= 1e-12 * std::max(1.0, k));
    ++counts[static_cast<int>(k)];
  }
  double pmf = std::pow(1 - p, q);
  for (int k = 0; k <= q; ++k) {
    const double se = std::sqrt(pmf * (1 - pmf) / m);
    CHECK(std::abs(counts[k] / static_cast<double>(m) - pmf) <= 4.0 * se + 1e-12);
    pmf *= static_cast<double>(q - k) / (k + 1) * p / (1 - p);
  }
}

TEST_CASE("non-convergent rows") {
  RandomStream rng(4);
  const Matrix x = sample_source({NonConvergent{}}, 100, 50, rng);
  for (int i = 0; i < 50; ++i) {
    CHECK(std::abs(x(i, 0)) == 10.0);
    CHECK(x.row(i).tail(99).cwiseAbs().maxCoeff() == 0.0);
    CHECK(x.row(i).squaredNorm() / 100.0 == 1.0);
  }
}

TEST_CASE("a2 statistics") {
  RandomStream rng(5);
  const A2Report g = a2_statistics({GaussianIso{}}, 1000, 2000, MixingMeasure::point_mass(1.0), rng);
  CHECK(g.norm_stats.size() == 2000u);
  CHECK(g.inner_stats.size() == 2000u);
  CHECK(g.inner_exceed_frac <= 0.01);
  CHECK(std::abs(std::accumulate(g.norm_stats.begin(), g.norm_stats.end(), 0.0) / 2000 - 1.0) <= 0.01);
  CHECK(g.double_sum >= 0.0);
  CHECK(g.double_sum <= 1.0);

  A2Options half;
  half.eps = 0.5;
  for (int q : {3, 50, 400}) {
    const A2Report nc = a2_statistics({NonConvergent{}}, q, 2000, MixingMeasure::point_mass(1.0), rng, half);
    CHECK(nc.inner_exceed_frac == 1.0);
  }

  const A2Report s =
      a2_statistics({SparseSpike{2.0}}, 2000, 2000, MixingMeasure::truncated_poisson(2.0), rng);
  CHECK(s.dbl_to_R <= 0.1);
  for (double v : s.norm_stats) CHECK(std::abs(v - std::round(v)) <= 1e-12 * std::max(1.0, v));
}

TEST_CASE("empirical a2 report") {
  const A2Report zero = empirical_a2_report(Matrix::Zero(6, 5), MixingMeasure::point_mass(0.0));
  CHECK(zero.dbl_to_R == 0.0);
  CHECK(zero.double_sum == 0.0);

  Matrix pm = Matrix::Zero(6, 9);
  for (int i = 0; i < 6; ++i) pm(i, 0) = (i % 2 ? -3.0 : 3.0);
  CHECK(empirical_a2_report(pm, MixingMeasure::point_mass(1.0)).double_sum == doctest::Approx(1.0));

  RandomStream rng(6);
  double worst_dbl = 0.0, worst_sum = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    const A2Report r =
        empirical_a2_report(sample_source({GaussianIso{}}, 1000, 500, rng), MixingMeasure::point_mass(1.0));
    worst_dbl = std::max(worst_dbl, r.dbl_to_R);
    worst_sum = std::max(worst_sum, r.double_sum);
  }
  CHECK(worst_dbl <= 0.08);
  CHECK(worst_sum <= 0.1);
}

TEST_CASE("a3 statistics") {
  for (int q : {1, 7, 100}) {
    const std::vector<double> mu(q, 0.0), sigma(q, 1.0);
    const A3Stats s = a3_statistics(mu, sigma, q);
    CHECK(s.mean_energy == 0.0);
    CHECK(s.scale_energy == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.max_scale == doctest::Approx(1.0 / q).epsilon(1e-15));
  }
  const int q = 64;
  std::vector<double> mu(q, std::pow(q, -0.25)), sigma(q);
  for (int k = 0; k < q; ++k) sigma[k] = std::sqrt(k + 1.0);
  const A3Stats s = a3_statistics(mu, sigma, q);
  CHECK(s.mean_energy == doctest::Approx(1.0 / std::sqrt(q)).epsilon(1e-12));
  CHECK(s.scale_energy == doctest::Approx((q + 1) / 2.0).epsilon(1e-12));
  // Independent pairwise summation.
  std::vector<double> sq(q);
  for (int k = 0; k < q; ++k) sq[k] = sigma[k] * sigma[k];
  while (sq.size() > 1) {
    std::vector<double> next;
    for (std::size_t i = 0; i < sq.size(); i += 2) next.push_back(sq[i] + (i + 1 < sq.size() ? sq[i + 1] : 0.0));
    sq = next;
  }
  CHECK(std::abs(s.scale_energy - sq[0] / q) <= 1e-12 * s.scale_energy);
  CHECK_THROWS_AS(a3_statistics(mu, std::vector<double>(3, 1.0), q), DimensionError);
}

TEST_CASE("vector profiles") {
  VectorProfile p{2.0, 0.5, -1.0, std::nullopt};
  const Vector v = p.at(4);
  CHECK(v(0) == doctest::Approx(2.0 / 4.0));
  CHECK(v(3) == doctest::Approx(2.0 * 2.0 / 4.0));
  const VectorProfile f = VectorProfile::fixed({1.0, 2.0});
  CHECK(f.at(2)(1) == 2.0);
  CHECK_THROWS(f.at(3));
}

TEST_CASE("rotated independent sources") {
  RandomStream rng(7);
  for (ComponentLaw law : {ComponentLaw::Gaussian, ComponentLaw::Rademacher, ComponentLaw::Uniform}) {
    RotatedIndependent s;
    s.law = law;
    s.mu = VectorProfile::constant(0.5);
    s.sigma = VectorProfile::constant(2.0);
    const Matrix x = sample_source({s}, 3, 100000, rng);
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(x.col(j).mean() - 0.5) < 4 * 2.0 / std::sqrt(100000.0));
      const double var = (x.col(j).array() - x.col(j).mean()).square().sum() / (100000 - 1);
      CHECK(var == doctest::Approx(4.0).epsilon(0.03));
    }
  }
  RotatedIndependent h;
  h.rotation = RotatedIndependent::Rotation::Haar;
  h.rotation_seed = 3;
  const Matrix u = h.rotation_at(6);
  CHECK((u.transpose() * u - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((h.rotation_at(6) - u).cwiseAbs().maxCoeff() == 0.0);
  // A rotation preserves the norm of each draw in distribution: E|X|^2 = q.
  const Matrix x = sample_source({h}, 6, 50000, rng);
  CHECK(x.rowwise().squaredNorm().mean() == doctest::Approx(6.0).epsilon(0.02));
}

TEST_CASE("projected populations") {
  RandomStream rng(8);
  const ProjectionMatrix p = sample_projector(100, 1, rng);
  const auto pop = projected_population({NonConvergent{}}, p);
  REQUIRE(pop.has_value());
  CHECK(pop->size() == 2);
  CHECK(std::abs(pop->points()(0, 0) + pop->points()(1, 0)) < 1e-12);
  CHECK(std::abs(std::abs(pop->points()(0, 0)) - 10.0 * std::abs(p.gamma()(0, 0))) < 1e-12);
  CHECK_FALSE(projected_population({GaussianIso{}}, p).has_value());
}

TEST_CASE("csv parsing") {
  const Matrix m = parse_csv("1,2\n3,4\n5,6");
  CHECK(m.rows() == 3);
  CHECK(m.cols() == 2);
  CHECK(m(2, 1) == 6.0);
  CHECK(parse_csv("1.5,-2e3\r\n\n3,4\n")(0, 1) == -2000.0);

  try {
    parse_csv("a,b\n1,2");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.row() == 1);
    CHECK(e.column() == 1);
  }
  CsvOptions header;
  header.header = true;
  CHECK(parse_csv("a,b\n1,2", header).rows() == 1);

  try {
    parse_csv("1,2\n3,NaN\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.row() == 2);
    CHECK(e.column() == 2);
  }
  CHECK_THROWS_AS(parse_csv("1,inf"), ParseError);
  CHECK_THROWS_AS(parse_csv("1,2\n3"), ParseError);
  CHECK_THROWS_AS(parse_csv(""), ParseError);
  CHECK_THROWS_AS(parse_csv("1,,2"), ParseError);
}

TEST_CASE("load_dataset and empirical resampling") {
  const auto path = write_temp("projlab_sources_test.csv", "1,2\n3,4\n5,6\n");
  const SourceSpec spec = load_dataset(path);
  REQUIRE(std::holds_alternative<Empirical>(spec.variant));
  const Matrix& data = std::get<Empirical>(spec.variant).data;
  CHECK(data.rows() == 3);
  CHECK(data.cols() == 2);
  CHECK(data(1, 0) == 3.0);
  CHECK_THROWS_AS(spec.check_dimension(3), DimensionError);
  CHECK_THROWS_AS(load_dataset(write_temp("projlab_empty.csv", "")), ParseError);

  RandomStream rng(9);
  const Matrix x = sample_source(spec, 2, 1'000'000, rng);
  CHECK(x.col(0).mean() == doctest::Approx(3.0).epsilon(0.01));
  CHECK(x.col(1).squaredNorm() / 1e6 == doctest::Approx((4.0 + 16.0 + 36.0) / 3.0).epsilon(0.01));

  const SourceSpec again = SourceSpec::from_json(spec.to_json());
  CHECK((std::get<Empirical>(again.variant).data - data).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("source json round trip") {
  RotatedIndependent r;
  r.law = ComponentLaw::Rademacher;
  r.sigma = VectorProfile{1.0, 0.5, 0.0, std::nullopt};
  r.rotation = RotatedIndependent::Rotation::Haar;
  r.rotation_seed = 12;
  for (const SourceSpec& s : {SourceSpec{GaussianIso{}}, SourceSpec{SparseSpike{2.5}}, SourceSpec{NonConvergent{}},
                              SourceSpec{GaussianScaleMixture{MixingMeasure::two_point(1, 0.5, 4)}}, SourceSpec{r}}) {
    const SourceSpec back = SourceSpec::from_json(s.to_json());
    CHECK(back.name() == s.name());
    CHECK(back.to_json() == s.to_json());
  }
  CHECK_THROWS(SourceSpec::from_json(nlohmann::json::parse(R"({"kind": "nope"})")));
}
