#include "nodalab/spectra.hpp"

#include <cmath>
#include <numbers>

#include "nodalab/errors.hpp"
#include "nodalab/special.hpp"

namespace nodalab {

void validate(const SpectralPoint& sp) {
  if (!std::isfinite(sp.param)) throw DomainError("non-finite spectral parameter");
  switch (sp.kind) {
    case GeometryKind::Sphere2:
      if (sp.param < 0.0 || sp.param != std::floor(sp.param)) {
        throw DomainError("sphere degree must be a non-negative integer");
      }
      break;
    case GeometryKind::Hyperbolic2:
      if (sp.param < 0.0) throw DomainError("hyperbolic spectral parameter must be >= 0");
      break;
    default:
      if (!(sp.param > 0.0)) throw DomainError("wavenumber must be positive");
      break;
  }
}

double eigenvalue(const SpectralPoint& sp) {
  validate(sp);
  switch (sp.kind) {
    case GeometryKind::Sphere2: return -sp.param * (sp.param + 1.0);
    case GeometryKind::Hyperbolic2: {
      const double rho = describe(sp.kind).rho;
      return -(sp.param * sp.param + rho * rho);
    }
    default: return -sp.param * sp.param;
  }
}

std::complex<double> harish_chandra(double lambda, double r, double tol) {
  if (r < 0.0) throw DomainError("negative distance");
  if (r == 0.0) return 1.0;
  const double z = std::tanh(0.5 * r);
  const double one_minus = 1.0 - z * z;
  const std::complex<double> expo(0.5, lambda);
  auto f = [&](double theta) {
    // Busemann bracket <z, e^{i theta}> for real z.
    const double dist2 = 1.0 - 2.0 * z * std::cos(theta) + z * z;
    return std::exp(expo * std::log(one_minus / dist2));
  };

  std::size_t n = 32;
  std::complex<double> sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += f(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
  std::complex<double> estimate = sum / static_cast<double>(n);
  constexpr std::size_t kMaxNodes = std::size_t{1} << 22;
  while (n < kMaxNodes) {
    for (std::size_t k = 0; k < n; ++k) {
      sum += f(2.0 * std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(n));
    }
    n *= 2;
    const std::complex<double> next = sum / static_cast<double>(n);
    if (std::abs(next - estimate) < tol) return next;
    estimate = next;
  }
  throw NumericError("spherical function quadrature did not converge");
}

double covariance(const SpectralPoint& sp, double r) {
  validate(sp);
  if (!(r >= 0.0)) throw DomainError("covariance distance must be non-negative");
  switch (sp.kind) {
    case GeometryKind::Line1: return std::cos(sp.param * r);
    case GeometryKind::Plane2: return special::bessel_j0(sp.param * r);
    case GeometryKind::Space3: return special::sinc(sp.param * r);
    case GeometryKind::Sphere2: return special::legendre_p(static_cast<int>(sp.param), std::cos(r));
    case GeometryKind::Hyperbolic2: {
      const std::complex<double> v = harish_chandra(sp.param, r);
      if (std::abs(v.imag()) > 1e-8) throw NumericError("spherical function has a non-negligible imaginary part");
      return v.real();
    }
  }
  throw DomainError("unknown geometry kind");
}

SpectralMeasure SpectralMeasure::monochromatic(GeometryKind kind, double param) {
  SpectralMeasure m{kind, {{SpectralPoint{kind, param}, 1.0}}};
  validate(m);
  return m;
}

SpectralMeasure SpectralMeasure::mixture(GeometryKind kind, std::span<const std::pair<double, double>> param_weight) {
  SpectralMeasure m{kind, {}};
  double total = 0.0;
  for (const auto& [param, weight] : param_weight) {
    if (!(weight > 0.0)) throw DomainError("mixture weights must be positive");
    total += weight;
  }
  for (const auto& [param, weight] : param_weight) m.atoms.push_back({SpectralPoint{kind, param}, weight / total});
  validate(m);
  return m;
}

bool SpectralMeasure::trivial() const {
  for (const auto& a : atoms) {
    if (eigenvalue(a.point) != 0.0) return false;
  }
  return true;
}

void validate(const SpectralMeasure& m) {
  if (m.atoms.empty()) throw DomainError("spectral measure has no atoms");
  double total = 0.0;
  for (const auto& a : m.atoms) {
    if (a.point.kind != m.kind) throw DomainError("spectral atoms must share the measure's geometry");
    validate(a.point);
    if (!(a.weight > 0.0)) throw DomainError("spectral weights must be positive");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("spectral weights must sum to one");
}

double mixture_covariance(const SpectralMeasure& m, double r) {
  double acc = 0.0;
  for (const auto& a : m.atoms) acc += a.weight * covariance(a.point, r);
  return acc;
}

CovarianceModel::CovarianceModel(SpectralMeasure measure) : measure_(std::move(measure)) { validate(measure_); }

Eigen::MatrixXd covariance_matrix(const SpectralMeasure& m, std::span<const Point> points) {
  validate(m);
  if (points.size() > kMaxCovariancePoints) throw DomainError("covariance_matrix accepts at most 1000 points");
  const GeometryDescriptor g = describe(m.kind);
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, i) = mixture_covariance(m, 0.0);
    for (Eigen::Index j = 0; j < i; ++j) {
      const double c = mixture_covariance(
          m, distance(g, points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]));
      out(i, j) = c;
      out(j, i) = c;
    }
  }
  return out;
}

}  // namespace nodalab
