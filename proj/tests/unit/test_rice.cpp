#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "nodalab/errors.hpp"
#include "nodalab/rice.hpp"

using namespace nodalab;

namespace {

constexpr double kPi = std::numbers::pi;

FieldSpec make_spec(GeometryKind k, double param, int dim_v = 1) {
  FieldSpec s;
  s.geometry = describe(k);
  s.spectrum = SpectralMeasure::monochromatic(k, param);
  s.dim_v = dim_v;
  return s;
}

// Kac-Rice density of an n-vector field on R^n' with iid N(0, kappa2) derivatives,
// written out by hand for the supported pairs.
double kac_rice_density(int dim_x, int dim_v, double kappa2) {
  if (dim_x == 1 && dim_v == 1) return std::sqrt(kappa2) / kPi;
  if (dim_x == 2 && dim_v == 1) return std::sqrt(kappa2) / 2.0;
  if (dim_x == 2 && dim_v == 2) return kappa2 / (2.0 * kPi);
  // E|det| of a 3x3 Gaussian matrix is 2 sqrt(2/pi) kappa2^{3/2}.
  return 2.0 * std::sqrt(2.0 / kPi) * std::pow(kappa2, 1.5) / std::pow(2.0 * kPi, 1.5);
}

}  // namespace

TEST_SUITE("rice") {
  TEST_CASE("level-crossing density and spacing") {
    CHECK(rice_level_density(0.0, 1.0) == doctest::Approx(1.0 / kPi));
    CHECK(rice_level_density(1.0, 4.0) == doctest::Approx(2.0 * std::exp(-0.5) / kPi));
    CHECK_THROWS_AS(rice_level_density(0.0, 0.0), DomainError);

    const FieldSpec line = make_spec(GeometryKind::Line1, 3.0);
    CHECK(second_moment(line) == doctest::Approx(9.0));
    CHECK(spacing(line, SpacingConvention::RiceDef) == doctest::Approx(kPi / 3.0));
    CHECK(spacing(line, SpacingConvention::Wavelength) == doctest::Approx(2.0 * kPi / 3.0));

    const FieldSpec plane = make_spec(GeometryKind::Plane2, 2.0 * kPi);
    CHECK(spacing(plane, SpacingConvention::Wavelength) == doctest::Approx(1.0));
    const FieldSpec sphere = make_spec(GeometryKind::Sphere2, 10.0);
    CHECK(second_moment(sphere) == doctest::Approx(55.0));
    const FieldSpec disk = make_spec(GeometryKind::Hyperbolic2, 3.0);
    CHECK(second_moment(disk) == doctest::Approx((0.25 + 9.0) / 2.0));
  }

  TEST_CASE("spacing does not depend on the component variance") {
    FieldSpec a = make_spec(GeometryKind::Plane2, 5.0);
    FieldSpec b = a;
    b.component_scales = {9.0};
    CHECK(spacing(a, SpacingConvention::RiceDef) == spacing(b, SpacingConvention::RiceDef));
    CHECK(literal_spacing_formula(b, 0) == doctest::Approx(literal_spacing_formula(a, 0) / 3.0));
    CHECK(literal_spacing_formula(a, 0) == doctest::Approx(kPi / std::sqrt(2.0 * 25.0)));
  }

  TEST_CASE("chi means against Monte Carlo") {
    CHECK(chi_mean(1) == doctest::Approx(std::sqrt(2.0 / kPi)));
    CHECK(chi_mean(2) == doctest::Approx(std::sqrt(kPi / 2.0)));
    CHECK(chi_mean(3) == doctest::Approx(2.0 * std::sqrt(2.0 / kPi)));
    CHECK_THROWS_AS(chi_mean(0), DomainError);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n01;
    for (int m = 1; m <= 5; ++m) {
      const int reps = 200000;
      double s = 0.0;
      double s2 = 0.0;
      for (int i = 0; i < reps; ++i) {
        double r2 = 0.0;
        for (int j = 0; j < m; ++j) {
          const double x = n01(rng);
          r2 += x * x;
        }
        const double r = std::sqrt(r2);
        s += r;
        s2 += r * r;
      }
      const double mean = s / reps;
      const double se = std::sqrt((s2 / reps - mean * mean) / reps);
      CHECK(std::abs(mean - chi_mean(m)) < 4.0 * se);
    }
  }

  TEST_CASE("expected parallelotope volumes") {
    const std::vector<double> ones2{1.0, 1.0};
    CHECK(expected_parallelotope_volume(2, 2, ones2, ConstantMode::Chi) == doctest::Approx(1.0));
    const std::vector<double> one{1.0};
    CHECK(expected_parallelotope_volume(2, 1, one, ConstantMode::Chi) == doctest::Approx(std::sqrt(kPi / 2.0)));
    CHECK(expected_parallelotope_volume(1, 1, one, ConstantMode::Chi) == doctest::Approx(std::sqrt(2.0 / kPi)));
    const std::vector<double> scaled{2.0, 3.0};
    CHECK(expected_parallelotope_volume(3, 2, scaled, ConstantMode::Chi) ==
          doctest::Approx(6.0 * chi_mean(3) * chi_mean(2)));
    CHECK(expected_parallelotope_volume(2, 2, ones2, ConstantMode::Paper) == doctest::Approx(2.0));
    const std::vector<double> three{1.0, 1.0, 1.0};
    CHECK_THROWS_AS(expected_parallelotope_volume(2, 3, three, ConstantMode::Chi), DomainError);
    CHECK_THROWS_AS(expected_parallelotope_volume(2, 2, one, ConstantMode::Chi), DomainError);

    // Monte Carlo oracle for n = 3, k = 2 with unit columns: |a x b|.
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n01;
    double s = 0.0;
    const int reps = 200000;
    for (int i = 0; i < reps; ++i) {
      double a[3];
      double b[3];
      for (int j = 0; j < 3; ++j) {
        a[j] = n01(rng);
        b[j] = n01(rng);
      }
      const double cx = a[1] * b[2] - a[2] * b[1];
      const double cy = a[2] * b[0] - a[0] * b[2];
      const double cz = a[0] * b[1] - a[1] * b[0];
      s += std::sqrt(cx * cx + cy * cy + cz * cz);
    }
    const std::vector<double> unit{1.0, 1.0};
    CHECK(s / reps == doctest::Approx(expected_parallelotope_volume(3, 2, unit, ConstantMode::Chi)).epsilon(0.01));
  }

  TEST_CASE("dimensionless constants") {
    CHECK(predicted_constant(2, 2, ConstantMode::Chi, SpacingConvention::Wavelength) == doctest::Approx(kPi));
    CHECK(predicted_constant(2, 1, ConstantMode::Chi, SpacingConvention::Wavelength) ==
          doctest::Approx(kPi / std::sqrt(2.0)));
    CHECK(predicted_constant(3, 3, ConstantMode::Chi, SpacingConvention::Wavelength) ==
          doctest::Approx(8.0 * kPi / (3.0 * std::sqrt(3.0))));
    CHECK(predicted_constant(1, 1, ConstantMode::Chi, SpacingConvention::RiceDef) == doctest::Approx(1.0));
    CHECK(predicted_constant(1, 1, ConstantMode::Chi, SpacingConvention::Wavelength) == doctest::Approx(2.0));
    // Stated constants.
    CHECK(predicted_constant(2, 2, ConstantMode::Paper, SpacingConvention::Wavelength) == doctest::Approx(kPi));
    CHECK(predicted_constant(2, 1, ConstantMode::Paper, SpacingConvention::Wavelength) ==
          doctest::Approx(2.0 * std::sqrt(kPi / 2.0)));
    CHECK(predicted_constant(3, 3, ConstantMode::Paper, SpacingConvention::Wavelength) ==
          doctest::Approx(6.0 * std::pow(kPi / 2.0, 1.5)));
    CHECK_THROWS_AS(predicted_constant(2, 3, ConstantMode::Chi, SpacingConvention::Wavelength), DomainError);

    // Oracle: Kac-Rice density times the cell volume, for both conventions.
    const double kappa2 = 1.7;
    for (auto [dx, dv] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{2, 2}, std::pair{3, 3}}) {
      for (auto conv : {SpacingConvention::RiceDef, SpacingConvention::Wavelength}) {
        const double cell = std::pow(spacing_from_moment(kappa2, dx, conv), dv);
        CHECK(predicted_constant(dx, dv, ConstantMode::Chi, conv) ==
              doctest::Approx(kac_rice_density(dx, dv, kappa2) * cell));
      }
    }
  }

  TEST_CASE("expected measures") {
    const FieldSpec sphere = make_spec(GeometryKind::Sphere2, 10.0, 2);
    CHECK(predicted_measure(sphere, Region::full_sphere(), ConstantMode::Chi, SpacingConvention::Wavelength) ==
          doctest::Approx(110.0));
    CHECK(predicted_measure_for_volume(sphere, 0.0, ConstantMode::Chi, SpacingConvention::Wavelength) == 0.0);
    CHECK_THROWS_AS(predicted_measure_for_volume(sphere, -1.0, ConstantMode::Chi, SpacingConvention::Wavelength),
                    DomainError);

    // Unit-wavelength plane waves: pi zeros per unit square.
    const FieldSpec plane = make_spec(GeometryKind::Plane2, 2.0 * kPi, 2);
    CHECK(predicted_measure(plane, Region::box({0, 0, 0}, {1, 1, 0}), ConstantMode::Chi,
                            SpacingConvention::Wavelength) == doctest::Approx(kPi));
    // Results agree between conventions: only the bookkeeping differs.
    for (auto mode : {ConstantMode::Chi}) {
      CHECK(predicted_measure_for_volume(plane, 3.0, mode, SpacingConvention::RiceDef) ==
            doctest::Approx(predicted_measure_for_volume(plane, 3.0, mode, SpacingConvention::Wavelength)));
    }

    FieldSpec scaled = plane;
    scaled.component_scales = {4.0, 0.25};
    CHECK(predicted_measure_for_volume(scaled, 2.0, ConstantMode::Chi, SpacingConvention::Wavelength) ==
          predicted_measure_for_volume(plane, 2.0, ConstantMode::Chi, SpacingConvention::Wavelength));
  }

  TEST_CASE("mixtures combine through the second moment") {
    const std::vector<std::pair<double, double>> atoms{{1.0, 0.5}, {3.0, 0.5}};
    FieldSpec mix;
    mix.geometry = describe(GeometryKind::Line1);
    mix.spectrum = SpectralMeasure::mixture(GeometryKind::Line1, atoms);
    CHECK(second_moment(mix) == doctest::Approx(0.5 * 1.0 + 0.5 * 9.0));
    CHECK(spacing(mix, SpacingConvention::RiceDef) == doctest::Approx(kPi / std::sqrt(5.0)));

    const std::vector<std::pair<double, double>> plane_atoms{{2.0, 0.25}, {4.0, 0.75}};
    FieldSpec pm;
    pm.geometry = describe(GeometryKind::Plane2);
    pm.spectrum = SpectralMeasure::mixture(GeometryKind::Plane2, plane_atoms);
    CHECK(second_moment(pm) == doctest::Approx((0.25 * 4.0 + 0.75 * 16.0) / 2.0));
  }

  TEST_CASE("prediction report") {
    const FieldSpec plane = make_spec(GeometryKind::Plane2, 2.0 * kPi, 1);
    const PredictionReport r = predict(plane, 4.0);
    CHECK(r.spacing_wavelength == doctest::Approx(1.0));
    CHECK(r.constant_chi_wavelength == doctest::Approx(kPi / std::sqrt(2.0)));
    CHECK(r.constant_paper == doctest::Approx(2.0 * std::sqrt(kPi / 2.0)));
    const auto j = to_json(r);
    CHECK(j.contains("expected_measure"));
    CHECK(j["expected_measure"]["chi_wavelength"].get<double>() == doctest::Approx(4.0 * kPi / std::sqrt(2.0)));
  }

  TEST_CASE("names round trip") {
    for (auto c : {SpacingConvention::RiceDef, SpacingConvention::Wavelength}) CHECK(parse_convention(to_string(c)) == c);
    for (auto m : {ConstantMode::Paper, ConstantMode::Chi}) CHECK(parse_mode(to_string(m)) == m);
    CHECK_THROWS_AS(parse_mode("exact"), DomainError);
  }
}
