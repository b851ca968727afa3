#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace nodalab {

enum class GeometryKind { Line1, Plane2, Space3, Sphere2, Hyperbolic2 };
enum class CurvatureSign { Flat, Positive, Negative };

/// One of the five supported homogeneous spaces. Sphere has radius 1, the
/// hyperbolic disk has curvature -1 (Poincare model).
struct GeometryDescriptor {
  GeometryKind kind = GeometryKind::Plane2;
  int dim_x = 2;
  CurvatureSign curvature_sign = CurvatureSign::Flat;
  double rho = 0.0;  // half-sum of positive roots; 1/2 on the hyperbolic disk

  bool operator==(const GeometryDescriptor&) const = default;
};

GeometryDescriptor describe(GeometryKind kind);
bool is_flat(GeometryKind kind);
std::string_view to_string(GeometryKind kind);
/// Accepts "line", "plane", "space", "sphere", "hyperbolic" (and the enum spellings).
GeometryKind parse_geometry(std::string_view name);

/// Chart coordinates. Flat spaces: Cartesian (x, y, z). Sphere2: (theta, phi)
/// colatitude/longitude. Hyperbolic2: (Re z, Im z) in the unit disk.
struct Point {
  std::array<double, 3> c{0.0, 0.0, 0.0};

  static Point line(double x) { return {{x, 0.0, 0.0}}; }
  static Point plane(double x, double y) { return {{x, y, 0.0}}; }
  static Point space(double x, double y, double z) { return {{x, y, z}}; }
  static Point sphere(double theta, double phi) { return {{theta, phi, 0.0}}; }
  static Point disk(std::complex<double> z) { return {{z.real(), z.imag(), 0.0}}; }

  double operator[](std::size_t i) const { return c[i]; }
  std::complex<double> z() const { return {c[0], c[1]}; }
  bool operator==(const Point&) const = default;
};

/// Tangent vector in the orthonormal frame at a point. Flat: Cartesian axes;
/// sphere: (e_theta, e_phi); disk: the Cartesian axes rescaled by (1-|z|^2)/2.
using Tangent = std::array<double, 3>;

struct GeodesicSegment {
  Point base;
  Tangent direction{1.0, 0.0, 0.0};
  double length = 1.0;
};

/// Throws DomainError if p is outside the chart domain.
void validate_point(const GeometryDescriptor& g, const Point& p);

double distance(const GeometryDescriptor& g, const Point& p, const Point& q);

/// Point at arc length t along the segment, t in [0, seg.length].
Point geodesic_point(const GeometryDescriptor& g, const GeodesicSegment& seg, double t);

/// Riemannian exponential map: follow the geodesic from p with initial velocity v.
Point exp_map(const GeometryDescriptor& g, const Point& p, const Tangent& v);

/// Largest ball radius accepted for hyperbolic regions.
inline constexpr double kHyperbolicRadiusBound = 4.0;

/// A coordinate box (flat: Cartesian; sphere: colatitude/longitude) or a
/// geodesic ball centred at the origin of the disk.
struct Region {
  enum class Shape { Box, Ball };
  Shape shape = Shape::Box;
  std::array<double, 3> lo{0.0, 0.0, 0.0};
  std::array<double, 3> hi{1.0, 1.0, 1.0};
  double radius = 0.0;

  static Region box(std::array<double, 3> lo, std::array<double, 3> hi) {
    return {Shape::Box, lo, hi, 0.0};
  }
  static Region full_sphere();
  static Region ball(double radius) { return {Shape::Ball, {}, {}, radius}; }
};

void validate_region(const GeometryDescriptor& g, const Region& region);
double region_volume(const GeometryDescriptor& g, const Region& region);
bool region_contains(const GeometryDescriptor& g, const Region& region, const Point& p);

/// Tensor-product grid over a region in chart parameters. Parameter axes are
/// Cartesian coordinates for flat spaces, (theta, phi) on the sphere and
/// geodesic polar (r, angle) on the disk. Node index runs fastest along axis 0.
struct RegionGrid {
  GeometryDescriptor geometry;
  Region region;
  double resolution = 0.0;     // requested bound on node spacing
  double spacing = 0.0;        // largest intrinsic edge length actually realised
  std::vector<std::vector<double>> axes;
  std::vector<Point> nodes;
  std::vector<double> weights;  // exact cell volumes

  int dims() const { return static_cast<int>(axes.size()); }
  std::size_t axis_nodes(int a) const { return axes[static_cast<std::size_t>(a)].size(); }
  std::size_t node_index(std::size_t i, std::size_t j = 0, std::size_t k = 0) const;
  std::size_t cell_count() const { return weights.size(); }
  std::size_t cell_index(std::size_t i, std::size_t j = 0, std::size_t k = 0) const;
  /// Node indices of a cell's corners: 2, 4 (counter-clockwise) or 8 entries.
  std::vector<std::size_t> cell_corners(std::size_t cell) const;
  /// Lower-corner axis indices of a cell.
  std::array<std::size_t, 3> cell_position(std::size_t cell) const;
  double total_weight() const;

  /// Chart point for a tuple of parameter values.
  Point point_at(const std::array<double, 3>& params) const;
  /// Inverse of point_at (angles normalised into the axis range where possible).
  std::array<double, 3> params_of(const Point& p) const;
};

RegionGrid grid_region(const GeometryDescriptor& g, const Region& region, double resolution);

}  // namespace nodalab
