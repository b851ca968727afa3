#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "nodalab/geometry.hpp"

namespace nodalab {

/// Spectral parameter of a monochromatic field: wavenumber kappa > 0 on flat
/// spaces, degree l on the sphere, lambda >= 0 on the hyperbolic disk.
struct SpectralPoint {
  GeometryKind kind = GeometryKind::Plane2;
  double param = 1.0;

  bool operator==(const SpectralPoint&) const = default;
};

void validate(const SpectralPoint& sp);

/// Laplace-Beltrami eigenvalue K <= 0 of the monochromatic eigenspace.
double eigenvalue(const SpectralPoint& sp);

/// Elementary spherical function at intrinsic distance r.
double covariance(const SpectralPoint& sp, double r);

/// Spherical function on the disk by trapezoid quadrature over the boundary
/// circle, doubling nodes until successive sums agree to `tol`. The complex
/// result is returned; its imaginary part vanishes analytically.
std::complex<double> harish_chandra(double lambda, double r, double tol = 1e-9);

struct SpectralAtom {
  SpectralPoint point;
  double weight = 1.0;
};

/// Finitely supported probability measure on spectral parameters.
struct SpectralMeasure {
  GeometryKind kind = GeometryKind::Plane2;
  std::vector<SpectralAtom> atoms;

  static SpectralMeasure monochromatic(GeometryKind kind, double param);
  /// Builds a mixture and rescales the weights to sum to one.
  static SpectralMeasure mixture(GeometryKind kind, std::span<const std::pair<double, double>> param_weight);

  bool trivial() const;
};

void validate(const SpectralMeasure& m);

double mixture_covariance(const SpectralMeasure& m, double r);

/// Gamma(r) = sum_i w_i phi_i(r) as a callable.
class CovarianceModel {
 public:
  explicit CovarianceModel(SpectralMeasure measure);
  double operator()(double r) const { return mixture_covariance(measure_, r); }
  const SpectralMeasure& measure() const { return measure_; }
  GeometryDescriptor geometry() const { return describe(measure_.kind); }

 private:
  SpectralMeasure measure_;
};

inline constexpr std::size_t kMaxCovariancePoints = 1000;

/// Matrix (Gamma(d(p_i, p_j)))_{ij}.
Eigen::MatrixXd covariance_matrix(const SpectralMeasure& m, std::span<const Point> points);

}  // namespace nodalab
