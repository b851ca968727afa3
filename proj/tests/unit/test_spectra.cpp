#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "nodalab/errors.hpp"
#include "nodalab/special.hpp"
#include "nodalab/spectra.hpp"

using namespace nodalab;

namespace {

constexpr double kPi = std::numbers::pi;

// Radial part of the Laplace-Beltrami operator by central differences.
double radial_laplacian(const SpectralPoint& sp, double r, double h) {
  const double f0 = covariance(sp, r);
  const double fp = covariance(sp, r + h);
  const double fm = covariance(sp, r - h);
  const double d2 = (fp - 2.0 * f0 + fm) / (h * h);
  const double d1 = (fp - fm) / (2.0 * h);
  switch (sp.kind) {
    case GeometryKind::Line1: return d2;
    case GeometryKind::Plane2: return d2 + d1 / r;
    case GeometryKind::Space3: return d2 + 2.0 * d1 / r;
    case GeometryKind::Sphere2: return d2 + d1 / std::tan(r);
    case GeometryKind::Hyperbolic2: return d2 + d1 / std::tanh(r);
  }
  return 0.0;
}

// Laplace's integral P_nu(cosh r) = (1/pi) int_0^pi (cosh r + sinh r cos t)^nu dt
// with nu = -1/2 + i lambda, by composite Simpson.
double conical_oracle(double lambda, double r) {
  const int n = 4000;
  const std::complex<double> nu(-0.5, lambda);
  std::complex<double> s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = kPi * i / n;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * std::pow(std::complex<double>(std::cosh(r) + std::sinh(r) * std::cos(t), 0.0), nu);
  }
  return (s * (kPi / n / 3.0) / kPi).real();
}

}  // namespace

TEST_SUITE("spectra") {
  TEST_CASE("special functions") {
    CHECK(special::bessel_j0(0.0) == doctest::Approx(1.0));
    CHECK(special::bessel_j0(1.0) == doctest::Approx(0.7651976865579666).epsilon(1e-13));
    CHECK(special::bessel_j0(10.0) == doctest::Approx(-0.2459357644513483).epsilon(1e-12));
    CHECK(special::bessel_j0(20.0) == doctest::Approx(0.1670246643405831).epsilon(1e-11));
    CHECK(std::abs(special::bessel_j0(2.404825557695773)) < 1e-12);
    CHECK(special::legendre_p(4, 0.0) == doctest::Approx(0.375));
    CHECK(special::legendre_p(2, 0.5) == doctest::Approx(-0.125));
    CHECK(special::sinc(0.0) == doctest::Approx(1.0));
    CHECK(special::sinc(1e-9) == doctest::Approx(1.0));
  }

  TEST_CASE("legendre rows are orthonormal and differentiate correctly") {
    const int l = 7;
    // 2 pi int |Pbar_l^m|^2 sin t dt = 1 by Gauss-free midpoint quadrature.
    const int n = 4000;
    std::vector<double> norm(l + 1, 0.0);
    for (int i = 0; i < n; ++i) {
      const double t = kPi * (i + 0.5) / n;
      const auto row = special::legendre_row(l, t);
      for (int m = 0; m <= l; ++m) norm[m] += row.value[m] * row.value[m] * std::sin(t) * (kPi / n);
    }
    for (int m = 0; m <= l; ++m) CHECK(2.0 * kPi * norm[m] == doctest::Approx(1.0).epsilon(1e-5));
    const double t = 0.83;
    const double h = 1e-5;
    const auto row = special::legendre_row(l, t);
    const auto rp = special::legendre_row(l, t + h);
    const auto rm = special::legendre_row(l, t - h);
    for (int m = 0; m <= l; ++m) {
      CHECK(row.dtheta[m] == doctest::Approx((rp.value[m] - rm.value[m]) / (2 * h)).epsilon(1e-7));
      if (m > 0) CHECK(row.over_sin[m] == doctest::Approx(row.value[m] / std::sin(t)).epsilon(1e-12));
    }
  }

  TEST_CASE("eigenvalue examples") {
    CHECK(eigenvalue({GeometryKind::Plane2, 2 * kPi}) == doctest::Approx(-4 * kPi * kPi));
    CHECK(eigenvalue({GeometryKind::Hyperbolic2, 8.0}) == doctest::Approx(-64.25));
    CHECK(eigenvalue({GeometryKind::Sphere2, 1.0}) == doctest::Approx(-2.0));
    // Finite-difference Laplace-Beltrami stencil on the degree-1 covariance cos(theta).
    const SpectralPoint s1{GeometryKind::Sphere2, 1.0};
    const double ratio = radial_laplacian(s1, 0.01, 1e-4) / covariance(s1, 0.01);
    CHECK(ratio == doctest::Approx(-2.0).epsilon(1e-5));
  }

  TEST_CASE("spherical functions are eigenfunctions with the stated eigenvalue") {
    const std::vector<SpectralPoint> pts{{GeometryKind::Line1, 1.7},  {GeometryKind::Plane2, 2.0},
                                         {GeometryKind::Space3, 1.3}, {GeometryKind::Sphere2, 6.0},
                                         {GeometryKind::Hyperbolic2, 3.0}, {GeometryKind::Hyperbolic2, 0.0}};
    for (const auto& sp : pts) {
      for (double r : {0.3, 0.9, 1.6}) {
        const double lhs = radial_laplacian(sp, r, 1e-3);
        const double rhs = eigenvalue(sp) * covariance(sp, r);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-4).scale(std::abs(eigenvalue(sp))));
      }
    }
  }

  TEST_CASE("covariance examples") {
    for (const SpectralPoint sp : {SpectralPoint{GeometryKind::Plane2, 3.0}, SpectralPoint{GeometryKind::Sphere2, 4.0},
                                   SpectralPoint{GeometryKind::Hyperbolic2, 8.0}, SpectralPoint{GeometryKind::Line1, 2.0},
                                   SpectralPoint{GeometryKind::Space3, 2.0}}) {
      CHECK(covariance(sp, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(covariance({GeometryKind::Sphere2, 1.0}, 0.7) == doctest::Approx(std::cos(0.7)));
    CHECK(std::abs(covariance({GeometryKind::Plane2, 1.0}, 2.404826)) < 1e-5);
    CHECK(covariance({GeometryKind::Space3, 2.0}, 1.0) == doctest::Approx(std::sin(2.0) / 2.0));
    CHECK(covariance({GeometryKind::Line1, 2.0}, 1.0) == doctest::Approx(std::cos(2.0)));
  }

  TEST_CASE("hyperbolic spherical function against Laplace's integral") {
    for (double lambda : {0.0, 1.0, 8.0}) {
      for (double r : {0.25, 1.0, 2.0, 3.5}) {
        CHECK(covariance({GeometryKind::Hyperbolic2, lambda}, r) ==
              doctest::Approx(conical_oracle(lambda, r)).epsilon(1e-8).scale(1.0));
        CHECK(std::abs(harish_chandra(lambda, r).imag()) < 1e-9);
      }
    }
  }

  TEST_CASE("spectral validation") {
    CHECK_THROWS_AS(validate(SpectralPoint{GeometryKind::Sphere2, 2.5}), DomainError);
    CHECK_THROWS_AS(validate(SpectralPoint{GeometryKind::Sphere2, -1.0}), DomainError);
    CHECK_THROWS_AS(validate(SpectralPoint{GeometryKind::Plane2, 0.0}), DomainError);
    CHECK_THROWS_AS(validate(SpectralPoint{GeometryKind::Hyperbolic2, -1.0}), DomainError);
    SpectralMeasure bad = SpectralMeasure::monochromatic(GeometryKind::Plane2, 1.0);
    bad.atoms[0].weight = 0.5;
    CHECK_THROWS_AS(validate(bad), DomainError);
    CHECK(SpectralMeasure::monochromatic(GeometryKind::Sphere2, 0.0).trivial());
  }

  TEST_CASE("mixture covariance examples") {
    const auto one = SpectralMeasure::monochromatic(GeometryKind::Plane2, 2.0);
    CHECK(mixture_covariance(one, 0.8) == doctest::Approx(covariance({GeometryKind::Plane2, 2.0}, 0.8)));
    const std::vector<std::pair<double, double>> p12{{1.0, 1.0}, {2.0, 1.0}};
    CHECK(mixture_covariance(SpectralMeasure::mixture(GeometryKind::Plane2, p12), 0.0) == doctest::Approx(1.0));
    const std::vector<std::pair<double, double>> l13{{1.0, 0.5}, {3.0, 0.5}};
    CHECK(mixture_covariance(SpectralMeasure::mixture(GeometryKind::Line1, l13), kPi) == doctest::Approx(-1.0));
    const CovarianceModel model(SpectralMeasure::mixture(GeometryKind::Line1, l13));
    CHECK(model(0.0) == doctest::Approx(1.0));
  }

  TEST_CASE("covariance matrices") {
    const auto m = SpectralMeasure::monochromatic(GeometryKind::Sphere2, 6.0);
    const std::vector<Point> one{Point::sphere(1.0, 2.0)};
    const auto c1 = covariance_matrix(m, one);
    CHECK(c1.rows() == 1);
    CHECK(c1(0, 0) == doctest::Approx(1.0));
    const std::vector<Point> twin{Point::sphere(1.0, 2.0), Point::sphere(1.0, 2.0)};
    const auto c2 = covariance_matrix(m, twin);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(c2(i, j) == doctest::Approx(1.0));
    const std::vector<Point> too_many(kMaxCovariancePoints + 1, Point::sphere(1.0, 1.0));
    CHECK_THROWS_AS(covariance_matrix(m, too_many), DomainError);
  }

  TEST_CASE("covariance matrices are positive semidefinite") {
    std::mt19937_64 eng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    struct Case {
      SpectralMeasure m;
      std::function<Point()> draw;
    };
    const std::vector<std::pair<double, double>> mix{{2.0, 0.3}, {5.0, 0.7}};
    const std::vector<Case> cases{
        {SpectralMeasure::monochromatic(GeometryKind::Sphere2, 6.0),
         [&] { return Point::sphere(std::acos(1.0 - 2.0 * u(eng)), 2.0 * kPi * u(eng)); }},
        {SpectralMeasure::mixture(GeometryKind::Plane2, mix), [&] { return Point::plane(3 * u(eng), 3 * u(eng)); }},
        {SpectralMeasure::monochromatic(GeometryKind::Space3, 4.0),
         [&] { return Point::space(2 * u(eng), 2 * u(eng), 2 * u(eng)); }},
        {SpectralMeasure::monochromatic(GeometryKind::Hyperbolic2, 4.0),
         [&] { return Point::disk(std::polar(0.7 * std::sqrt(u(eng)), 2.0 * kPi * u(eng))); }},
    };
    for (const auto& c : cases) {
      std::vector<Point> pts;
      for (int i = 0; i < 50; ++i) pts.push_back(c.draw());
      const Eigen::MatrixXd k = covariance_matrix(c.m, pts);
      CHECK((k - k.transpose()).cwiseAbs().maxCoeff() < 1e-14);
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
      CHECK(es.eigenvalues().minCoeff() >= -1e-8);
    }
  }
}
