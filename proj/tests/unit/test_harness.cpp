#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "nodalab/errors.hpp"
#include "nodalab/harness.hpp"

using namespace nodalab;

namespace {

constexpr double kPi = std::numbers::pi;

ExperimentConfig plane_density(int dim_v) {
  ExperimentConfig c;
  c.kind = ExperimentKind::Density;
  c.field.geometry = describe(GeometryKind::Plane2);
  c.field.spectrum = SpectralMeasure::monochromatic(GeometryKind::Plane2, 2.0 * kPi);
  c.field.dim_v = dim_v;
  c.region = Region::box({0, 0, 0}, {2, 2, 0});
  c.resolution = 0.06;
  c.replications = 8;
  c.seed = 4;
  return c;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("summary statistics") {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    const Summary s = summarize(v);
    CHECK(s.n == 4);
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.standard_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    // t(0.975, 3) = 3.182446
    CHECK(s.ci_high - s.mean == doctest::Approx(3.182446 * s.standard_error).epsilon(1e-5));
    CHECK(s.mean - s.ci_low == doctest::Approx(s.ci_high - s.mean));
  }

  TEST_CASE("confidence intervals are calibrated") {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> n01;
    int covered = 0;
    for (int run = 0; run < 100; ++run) {
      std::vector<double> v(20);
      for (double& x : v) x = 3.0 + n01(rng);
      const Summary s = summarize(v);
      if (s.ci_low <= 3.0 && 3.0 <= s.ci_high) ++covered;
    }
    CHECK(covered >= 90);
  }

  TEST_CASE("parallel replications are ordered and worker independent") {
    auto f = [](int i) { return std::sin(1.0 + i) * 1e3; };
    const auto a = parallel_replications(97, 1, f);
    const auto b = parallel_replications(97, 8, f);
    CHECK(a == b);
    for (int i = 0; i < 97; ++i) CHECK(a[static_cast<std::size_t>(i)] == f(i));

    std::atomic<int> calls{0};
    auto failing = [&](int i) -> double {
      ++calls;
      if (i == 13 || i == 40) throw NumericError("replication " + std::to_string(i));
      return 0.0;
    };
    try {
      parallel_replications(50, 4, failing);
      FAIL("expected an exception");
    } catch (const NumericError& e) {
      CHECK(std::string(e.what()) == "replication 13");
    }
  }

  TEST_CASE("matrix oracle") {
    ExperimentConfig c;
    c.kind = ExperimentKind::MatrixOracle;
    c.samples = 100000;
    c.relative_tolerance = 0.01;
    for (auto [n, k, expected] : {std::tuple{2, 2, 1.0}, std::tuple{2, 1, std::sqrt(kPi / 2.0)},
                                  std::tuple{1, 1, std::sqrt(2.0 / kPi)}, std::tuple{3, 3, 2.0 * std::sqrt(2.0 / kPi)}}) {
      c.matrix_n = n;
      c.matrix_k = k;
      const auto r = run_matrix_oracle(c);
      CHECK(r.target == doctest::Approx(expected));
      CHECK(std::abs(r.measured_constant / expected - 1.0) < 0.01);
      CHECK(r.pass);
      CHECK(r.predictions["paper"].get<double>() == doctest::Approx(std::tgamma(n + 1.0) / std::tgamma(n - k + 1.0)));
    }
    c.matrix_n = 2;
    c.matrix_k = 2;
    c.workers = 1;
    const auto one = to_json(run_matrix_oracle(c)).dump();
    c.workers = 8;
    CHECK(to_json(run_matrix_oracle(c)).dump() == one);
  }

  TEST_CASE("spacing experiment on the line") {
    ExperimentConfig c;
    c.kind = ExperimentKind::Spacing;
    c.field.geometry = describe(GeometryKind::Line1);
    c.field.spectrum = SpectralMeasure::monochromatic(GeometryKind::Line1, 1.0);
    c.segment = {Point::line(0.0), {1, 0, 0}, 200.0 * kPi};
    c.resolution = 0.05;
    c.replications = 20;
    c.relative_tolerance = 0.02;
    const auto r = run_spacing(c);
    CHECK(r.pass);
    CHECK(r.details["spacing_measured"].get<double>() == doctest::Approx(kPi).epsilon(0.01));
    CHECK(r.details["spacing_ricedef"].get<double>() == doctest::Approx(kPi));
  }

  TEST_CASE("density reports are byte identical across worker counts") {
    ExperimentConfig c = plane_density(2);
    c.workers = 1;
    const std::string a = to_json(run_density(c)).dump(2);
    c.workers = 8;
    const std::string b = to_json(run_density(c)).dump(2);
    CHECK(a == b);
    c.seed = 5;
    CHECK(to_json(run_density(c)).dump(2) != a);
  }

  TEST_CASE("density measured constant is close to pi") {
    ExperimentConfig c = plane_density(2);
    c.region = Region::box({0, 0, 0}, {6, 6, 0});
    c.replications = 16;
    c.workers = 4;
    const auto r = run_density(c);
    CHECK(r.target == doctest::Approx(kPi));
    CHECK(r.measured_constant == doctest::Approx(kPi).epsilon(0.06));
    CHECK(r.details.contains("constant_ci95"));
  }

  TEST_CASE("config round trip") {
    ExperimentConfig c = plane_density(1);
    c.mode = ConstantMode::Paper;
    c.convention = SpacingConvention::RiceDef;
    c.field.component_scales = {2.0};
    const auto j = config_to_json(c);
    CHECK_FALSE(j.contains("workers"));
    const ExperimentConfig back = config_from_json(j);
    CHECK(config_to_json(back) == j);
    CHECK(back.mode == ConstantMode::Paper);
    CHECK(back.field.dim_v == 1);

    ExperimentConfig m;
    m.kind = ExperimentKind::MatrixOracle;
    m.matrix_n = 3;
    m.matrix_k = 2;
    CHECK(config_to_json(config_from_json(config_to_json(m))) == config_to_json(m));
    CHECK(parse_experiment("matrix") == ExperimentKind::MatrixOracle);
  }

  TEST_CASE("invalid configurations are rejected") {
    ExperimentConfig c = plane_density(2);
    c.replications = 0;
    CHECK_THROWS(validate(c));
    c = plane_density(2);
    c.resolution = -1.0;
    CHECK_THROWS(validate(c));
    c = plane_density(2);
    c.field.dim_v = 3;
    CHECK_THROWS(run_density(c));
  }

  TEST_CASE("universality with one member and mismatched members") {
    ExperimentConfig c = plane_density(2);
    c.region = Region::box({0, 0, 0}, {4, 4, 0});
    c.relative_tolerance = 0.1;
    const auto u = run_universality({c});
    REQUIRE(u.members.size() == 1);
    CHECK(u.cis_overlap);
    CHECK(u.common_target == doctest::Approx(kPi));
    CHECK(u.pass == u.members[0].pass);
    const auto j = to_json(u);
    CHECK(j["table"].size() == 1);

    CHECK_THROWS(run_universality({c, plane_density(1)}));
  }
}
