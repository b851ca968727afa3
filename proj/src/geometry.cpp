#include "nodalab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nodalab/errors.hpp"

namespace nodalab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Vec3 = std::array<double, 3>;

Vec3 sphere_to_unit(const Point& p) {
  const double st = std::sin(p[0]);
  return {st * std::cos(p[1]), st * std::sin(p[1]), std::cos(p[0])};
}

Point unit_to_sphere(const Vec3& v) {
  const double rxy = std::hypot(v[0], v[1]);
  const double theta = std::atan2(rxy, v[2]);
  double phi = std::atan2(v[1], v[0]);
  if (phi < 0.0) phi += kTwoPi;
  if (phi >= kTwoPi) phi -= kTwoPi;
  return Point::sphere(theta, phi);
}

double norm(const Tangent& v, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
  return std::sqrt(s);
}

std::vector<double> linspace(double lo, double hi, std::size_t cells) {
  std::vector<double> out(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells);
  }
  out.back() = hi;
  return out;
}

std::size_t cells_for(double extent, double h, std::size_t minimum = 1) {
  const auto n = static_cast<std::size_t>(std::ceil(extent / h - 1e-12));
  return std::max(n, minimum);
}

}  // namespace

GeometryDescriptor describe(GeometryKind kind) {
  switch (kind) {
    case GeometryKind::Line1: return {kind, 1, CurvatureSign::Flat, 0.0};
    case GeometryKind::Plane2: return {kind, 2, CurvatureSign::Flat, 0.0};
    case GeometryKind::Space3: return {kind, 3, CurvatureSign::Flat, 0.0};
    case GeometryKind::Sphere2: return {kind, 2, CurvatureSign::Positive, 0.0};
    case GeometryKind::Hyperbolic2: return {kind, 2, CurvatureSign::Negative, 0.5};
  }
  throw DomainError("unknown geometry kind");
}

bool is_flat(GeometryKind kind) {
  return kind == GeometryKind::Line1 || kind == GeometryKind::Plane2 || kind == GeometryKind::Space3;
}

std::string_view to_string(GeometryKind kind) {
  switch (kind) {
    case GeometryKind::Line1: return "line";
    case GeometryKind::Plane2: return "plane";
    case GeometryKind::Space3: return "space";
    case GeometryKind::Sphere2: return "sphere";
    case GeometryKind::Hyperbolic2: return "hyperbolic";
  }
  return "?";
}

GeometryKind parse_geometry(std::string_view name) {
  if (name == "line" || name == "Line1") return GeometryKind::Line1;
  if (name == "plane" || name == "Plane2") return GeometryKind::Plane2;
  if (name == "space" || name == "Space3") return GeometryKind::Space3;
  if (name == "sphere" || name == "Sphere2") return GeometryKind::Sphere2;
  if (name == "hyperbolic" || name == "Hyperbolic2" || name == "disk") return GeometryKind::Hyperbolic2;
  throw DomainError("unknown geometry '" + std::string(name) + "'");
}

void validate_point(const GeometryDescriptor& g, const Point& p) {
  for (double v : p.c) {
    if (!std::isfinite(v)) throw DomainError("non-finite chart coordinate");
  }
  switch (g.kind) {
    case GeometryKind::Sphere2:
      if (p[0] < 0.0 || p[0] > kPi) throw DomainError("colatitude outside [0, pi]");
      if (p[1] < 0.0 || p[1] > kTwoPi) throw DomainError("longitude outside [0, 2pi]");
      break;
    case GeometryKind::Hyperbolic2:
      if (std::norm(p.z()) >= 1.0) throw DomainError("disk coordinate with |z| >= 1");
      break;
    default:
      break;
  }
}

double distance(const GeometryDescriptor& g, const Point& p, const Point& q) {
  validate_point(g, p);
  validate_point(g, q);
  switch (g.kind) {
    case GeometryKind::Line1: return std::abs(p[0] - q[0]);
    case GeometryKind::Plane2: return std::hypot(p[0] - q[0], p[1] - q[1]);
    case GeometryKind::Space3: return std::hypot(p[0] - q[0], p[1] - q[1], p[2] - q[2]);
    case GeometryKind::Sphere2: {
      const Vec3 a = sphere_to_unit(p);
      const Vec3 b = sphere_to_unit(q);
      const Vec3 cr{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
      const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
      return std::atan2(std::hypot(cr[0], cr[1], cr[2]), dot);
    }
    case GeometryKind::Hyperbolic2: {
      const std::complex<double> z = p.z();
      const std::complex<double> w = q.z();
      // Equivalent to arccosh(1 + 2|z-w|^2 / ((1-|z|^2)(1-|w|^2))) but accurate at short range.
      const double ratio = std::abs(z - w) / std::abs(1.0 - std::conj(z) * w);
      return 2.0 * std::atanh(std::min(ratio, 1.0));
    }
  }
  throw DomainError("unknown geometry kind");
}

Point exp_map(const GeometryDescriptor& g, const Point& p, const Tangent& v) {
  validate_point(g, p);
  const double len = norm(v, g.dim_x);
  switch (g.kind) {
    case GeometryKind::Line1:
    case GeometryKind::Plane2:
    case GeometryKind::Space3: {
      Point out = p;
      for (int i = 0; i < g.dim_x; ++i) out.c[static_cast<std::size_t>(i)] += v[static_cast<std::size_t>(i)];
      return out;
    }
    case GeometryKind::Sphere2: {
      if (len == 0.0) return p;
      const double th = p[0];
      const double ph = p[1];
      const Vec3 base = sphere_to_unit(p);
      const Vec3 e_th{std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th)};
      const Vec3 e_ph{-std::sin(ph), std::cos(ph), 0.0};
      const double c = std::cos(len);
      const double s = std::sin(len) / len;
      Vec3 q{};
      for (std::size_t i = 0; i < 3; ++i) q[i] = c * base[i] + s * (v[0] * e_th[i] + v[1] * e_ph[i]);
      return unit_to_sphere(q);
    }
    case GeometryKind::Hyperbolic2: {
      if (len == 0.0) return p;
      const std::complex<double> a = p.z();
      const std::complex<double> w = std::tanh(0.5 * len) * std::complex<double>(v[0], v[1]) / len;
      // Mobius transport 0 -> a; its derivative at 0 is the positive real 1 - |a|^2.
      const std::complex<double> z = (w + a) / (1.0 + std::conj(a) * w);
      return Point::disk(z);
    }
  }
  throw DomainError("unknown geometry kind");
}

Point geodesic_point(const GeometryDescriptor& g, const GeodesicSegment& seg, double t) {
  if (!(seg.length > 0.0)) throw DomainError("geodesic segment length must be positive");
  if (!(t >= 0.0 && t <= seg.length)) throw DomainError("geodesic parameter outside [0, length]");
  const double n = norm(seg.direction, g.dim_x);
  if (std::abs(n - 1.0) > 1e-9) throw DomainError("geodesic direction must have unit norm");
  Tangent v{};
  for (int i = 0; i < g.dim_x; ++i) v[static_cast<std::size_t>(i)] = t * seg.direction[static_cast<std::size_t>(i)];
  return exp_map(g, seg.base, v);
}

Region Region::full_sphere() { return box({0.0, 0.0, 0.0}, {kPi, kTwoPi, 0.0}); }

void validate_region(const GeometryDescriptor& g, const Region& region) {
  if (g.kind == GeometryKind::Hyperbolic2) {
    if (region.shape != Region::Shape::Ball) throw DomainError("hyperbolic regions must be centred geodesic balls");
    if (!(region.radius > 0.0)) throw DomainError("ball radius must be positive");
    if (region.radius > kHyperbolicRadiusBound) {
      throw DomainError("ball radius exceeds the hyperbolic validity bound");
    }
    return;
  }
  if (region.shape != Region::Shape::Box) throw DomainError("flat and spherical regions must be boxes");
  for (int i = 0; i < g.dim_x; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (!(region.lo[k] < region.hi[k])) throw DomainError("empty region box");
  }
  if (g.kind == GeometryKind::Sphere2) {
    if (region.lo[0] < 0.0 || region.hi[0] > kPi) throw DomainError("colatitude range outside [0, pi]");
    if (region.lo[1] < 0.0 || region.hi[1] > kTwoPi) throw DomainError("longitude range outside [0, 2pi]");
  }
}

double region_volume(const GeometryDescriptor& g, const Region& region) {
  validate_region(g, region);
  switch (g.kind) {
    case GeometryKind::Sphere2:
      return (std::cos(region.lo[0]) - std::cos(region.hi[0])) * (region.hi[1] - region.lo[1]);
    case GeometryKind::Hyperbolic2:
      return kTwoPi * (std::cosh(region.radius) - 1.0);
    default: {
      double v = 1.0;
      for (int i = 0; i < g.dim_x; ++i) {
        const auto k = static_cast<std::size_t>(i);
        v *= region.hi[k] - region.lo[k];
      }
      return v;
    }
  }
}

bool region_contains(const GeometryDescriptor& g, const Region& region, const Point& p) {
  switch (g.kind) {
    case GeometryKind::Hyperbolic2:
      return distance(g, Point::disk(0.0), p) <= region.radius;
    case GeometryKind::Sphere2: {
      if (p[0] < region.lo[0] || p[0] > region.hi[0]) return false;
      if (region.hi[1] - region.lo[1] >= kTwoPi) return true;
      double phi = std::fmod(p[1], kTwoPi);
      if (phi < 0.0) phi += kTwoPi;
      return (phi >= region.lo[1] && phi <= region.hi[1]) || (phi + kTwoPi <= region.hi[1]);
    }
    default:
      for (int i = 0; i < g.dim_x; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (p[k] < region.lo[k] || p[k] > region.hi[k]) return false;
      }
      return true;
  }
}

std::size_t RegionGrid::node_index(std::size_t i, std::size_t j, std::size_t k) const {
  const std::size_t n0 = axes[0].size();
  const std::size_t n1 = axes.size() > 1 ? axes[1].size() : 1;
  return i + n0 * (j + n1 * k);
}

std::size_t RegionGrid::cell_index(std::size_t i, std::size_t j, std::size_t k) const {
  const std::size_t c0 = axes[0].size() - 1;
  const std::size_t c1 = axes.size() > 1 ? axes[1].size() - 1 : 1;
  return i + c0 * (j + c1 * k);
}

std::array<std::size_t, 3> RegionGrid::cell_position(std::size_t cell) const {
  const std::size_t c0 = axes[0].size() - 1;
  const std::size_t c1 = axes.size() > 1 ? axes[1].size() - 1 : 1;
  return {cell % c0, (cell / c0) % c1, cell / (c0 * c1)};
}

std::vector<std::size_t> RegionGrid::cell_corners(std::size_t cell) const {
  const auto [i, j, k] = cell_position(cell);
  switch (dims()) {
    case 1: return {node_index(i), node_index(i + 1)};
    case 2:
      return {node_index(i, j), node_index(i + 1, j), node_index(i + 1, j + 1), node_index(i, j + 1)};
    default: {
      std::vector<std::size_t> out(8);
      for (std::size_t b = 0; b < 8; ++b) out[b] = node_index(i + (b & 1U), j + ((b >> 1U) & 1U), k + ((b >> 2U) & 1U));
      return out;
    }
  }
}

double RegionGrid::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

Point RegionGrid::point_at(const std::array<double, 3>& params) const {
  switch (geometry.kind) {
    case GeometryKind::Sphere2: return Point::sphere(params[0], params[1]);
    case GeometryKind::Hyperbolic2:
      return Point::disk(std::polar(std::tanh(0.5 * params[0]), params[1]));
    default: return Point{params};
  }
}

std::array<double, 3> RegionGrid::params_of(const Point& p) const {
  switch (geometry.kind) {
    case GeometryKind::Sphere2: {
      double phi = p[1];
      const double lo = axes[1].front();
      while (phi < lo) phi += kTwoPi;
      while (phi >= lo + kTwoPi) phi -= kTwoPi;
      return {p[0], phi, 0.0};
    }
    case GeometryKind::Hyperbolic2: {
      const std::complex<double> z = p.z();
      double ang = std::arg(z);
      if (ang < 0.0) ang += kTwoPi;
      return {2.0 * std::atanh(std::abs(z)), ang, 0.0};
    }
    default: return p.c;
  }
}

RegionGrid grid_region(const GeometryDescriptor& g, const Region& region, double resolution) {
  validate_region(g, region);
  if (!(resolution > 0.0)) throw DomainError("grid resolution must be positive");
  RegionGrid grid;
  grid.geometry = g;
  grid.region = region;
  grid.resolution = resolution;

  switch (g.kind) {
    case GeometryKind::Sphere2: {
      const double t0 = region.lo[0];
      const double t1 = region.hi[0];
      const double max_sin = (t0 <= kPi / 2 && t1 >= kPi / 2) ? 1.0 : std::max(std::sin(t0), std::sin(t1));
      const std::size_t nt = cells_for(t1 - t0, resolution);
      const std::size_t np = cells_for((region.hi[1] - region.lo[1]) * max_sin, resolution, 3);
      grid.axes = {linspace(t0, t1, nt), linspace(region.lo[1], region.hi[1], np)};
      const double dphi = (region.hi[1] - region.lo[1]) / static_cast<double>(np);
      grid.spacing = std::max((t1 - t0) / static_cast<double>(nt), max_sin * dphi);
      for (std::size_t j = 0; j < np; ++j) {
        for (std::size_t i = 0; i < nt; ++i) {
          grid.weights.push_back((std::cos(grid.axes[0][i]) - std::cos(grid.axes[0][i + 1])) * dphi);
        }
      }
      break;
    }
    case GeometryKind::Hyperbolic2: {
      const double radius = region.radius;
      const std::size_t nr = cells_for(radius, resolution);
      const std::size_t na = cells_for(kTwoPi * std::sinh(radius), resolution, 4);
      grid.axes = {linspace(0.0, radius, nr), linspace(0.0, kTwoPi, na)};
      const double dang = kTwoPi / static_cast<double>(na);
      grid.spacing = std::max(radius / static_cast<double>(nr), std::sinh(radius) * dang);
      for (std::size_t j = 0; j < na; ++j) {
        for (std::size_t i = 0; i < nr; ++i) {
          grid.weights.push_back((std::cosh(grid.axes[0][i + 1]) - std::cosh(grid.axes[0][i])) * dang);
        }
      }
      break;
    }
    default: {
      grid.spacing = 0.0;
      for (int a = 0; a < g.dim_x; ++a) {
        const auto k = static_cast<std::size_t>(a);
        const std::size_t n = cells_for(region.hi[k] - region.lo[k], resolution);
        grid.axes.push_back(linspace(region.lo[k], region.hi[k], n));
        grid.spacing = std::max(grid.spacing, (region.hi[k] - region.lo[k]) / static_cast<double>(n));
      }
      const std::size_t c0 = grid.axes[0].size() - 1;
      const std::size_t c1 = g.dim_x > 1 ? grid.axes[1].size() - 1 : 1;
      const std::size_t c2 = g.dim_x > 2 ? grid.axes[2].size() - 1 : 1;
      for (std::size_t k = 0; k < c2; ++k) {
        for (std::size_t j = 0; j < c1; ++j) {
          for (std::size_t i = 0; i < c0; ++i) {
            double w = grid.axes[0][i + 1] - grid.axes[0][i];
            if (g.dim_x > 1) w *= grid.axes[1][j + 1] - grid.axes[1][j];
            if (g.dim_x > 2) w *= grid.axes[2][k + 1] - grid.axes[2][k];
            grid.weights.push_back(w);
          }
        }
      }
      break;
    }
  }

  const std::size_t n0 = grid.axes[0].size();
  const std::size_t n1 = grid.dims() > 1 ? grid.axes[1].size() : 1;
  const std::size_t n2 = grid.dims() > 2 ? grid.axes[2].size() : 1;
  grid.nodes.reserve(n0 * n1 * n2);
  for (std::size_t k = 0; k < n2; ++k) {
    for (std::size_t j = 0; j < n1; ++j) {
      for (std::size_t i = 0; i < n0; ++i) {
        std::array<double, 3> params{grid.axes[0][i], grid.dims() > 1 ? grid.axes[1][j] : 0.0,
                                     grid.dims() > 2 ? grid.axes[2][k] : 0.0};
        grid.nodes.push_back(grid.point_at(params));
      }
    }
  }
  return grid;
}

}  // namespace nodalab
