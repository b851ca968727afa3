#include "nodalab/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "nodalab/errors.hpp"

namespace nodalab {

namespace {

void write_coords(std::ostream& out, GeometryKind kind, const Point& p) {
  const std::size_t n = coordinate_names(kind).size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out << ',';
    out << p.c[i];
  }
}

}  // namespace

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  q += '"';
  return q;
}

std::vector<std::string> coordinate_names(GeometryKind kind) {
  switch (kind) {
    case GeometryKind::Line1: return {"x"};
    case GeometryKind::Plane2: return {"x", "y"};
    case GeometryKind::Space3: return {"x", "y", "z"};
    case GeometryKind::Sphere2: return {"theta", "phi"};
    case GeometryKind::Hyperbolic2: return {"re", "im"};
  }
  return {};
}

void write_grid_csv(std::ostream& out, const Realization& field, const RegionGrid& grid) {
  const GeometryKind kind = field.geometry().kind;
  const auto names = coordinate_names(kind);
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << csv_field(names[i]);
  for (int c = 0; c < field.dim_v(); ++c) out << ",value_" << c;
  out << "\r\n";

  std::vector<std::vector<double>> values;
  for (int c = 0; c < field.dim_v(); ++c) {
    values.push_back(field.values_on_grid(c, grid));
    const double s = std::sqrt(field.spec().scale(c));
    for (double& v : values.back()) v *= s;
  }
  out.precision(17);
  for (std::size_t n = 0; n < grid.nodes.size(); ++n) {
    write_coords(out, kind, grid.nodes[n]);
    for (const auto& v : values) out << ',' << v[n];
    out << "\r\n";
  }
}

void write_points_csv(std::ostream& out, GeometryKind kind, std::span<const Point> points) {
  const auto names = coordinate_names(kind);
  out << "index";
  for (const auto& n : names) out << ',' << csv_field(n);
  out << "\r\n";
  out.precision(17);
  for (std::size_t i = 0; i < points.size(); ++i) {
    out << i << ',';
    write_coords(out, kind, points[i]);
    out << "\r\n";
  }
}

void write_segments_csv(std::ostream& out, GeometryKind kind, std::span<const std::array<Point, 2>> segments) {
  const auto names = coordinate_names(kind);
  out << "segment,endpoint";
  for (const auto& n : names) out << ',' << csv_field(n);
  out << "\r\n";
  out.precision(17);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    for (int e = 0; e < 2; ++e) {
      out << i << ',' << e << ',';
      write_coords(out, kind, segments[i][static_cast<std::size_t>(e)]);
      out << "\r\n";
    }
  }
}

Raster render(const Realization& field, int component, const Region& region, int width, int height) {
  if (width < 1 || height < 1) throw DomainError("raster size must be positive");
  if (component < 0 || component >= field.dim_v()) throw DomainError("component out of range");
  const GeometryDescriptor& g = field.geometry();
  if (g.kind == GeometryKind::Line1) throw DomainError("cannot rasterise a 1-D field");
  validate_region(g, region);

  Raster img{width, height, std::vector<unsigned char>(static_cast<std::size_t>(width) * height, 0)};
  const double clip = 3.0;  // standardised units, i.e. 3 sqrt(beta) physically
  const auto shade = [&](double v) {
    const double t = (std::clamp(v, -clip, clip) + clip) / (2.0 * clip);
    return static_cast<unsigned char>(std::lround(255.0 * t));
  };

  const double edge = g.kind == GeometryKind::Hyperbolic2 ? std::tanh(0.5 * region.radius) : 0.0;
  for (int row = 0; row < height; ++row) {
    const double fy = (row + 0.5) / height;  // 0 at the top
    for (int col = 0; col < width; ++col) {
      const double fx = (col + 0.5) / width;
      Point p;
      switch (g.kind) {
        case GeometryKind::Plane2:
        case GeometryKind::Space3:
          p.c[0] = region.lo[0] + fx * (region.hi[0] - region.lo[0]);
          p.c[1] = region.hi[1] - fy * (region.hi[1] - region.lo[1]);
          p.c[2] = 0.5 * (region.lo[2] + region.hi[2]);
          break;
        case GeometryKind::Sphere2:
          p = Point::sphere(region.lo[0] + fy * (region.hi[0] - region.lo[0]),
                            region.lo[1] + fx * (region.hi[1] - region.lo[1]));
          break;
        case GeometryKind::Hyperbolic2: {
          const std::complex<double> z(edge * (2.0 * fx - 1.0), edge * (1.0 - 2.0 * fy));
          if (std::abs(z) > edge) continue;
          p = Point::disk(z);
          break;
        }
        case GeometryKind::Line1: break;
      }
      img.pixels[static_cast<std::size_t>(row) * width + col] = shade(field.value(component, p));
    }
  }
  return img;
}

void write_pgm(std::ostream& out, const Raster& raster) {
  out << "P5\n" << raster.width << ' ' << raster.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(raster.pixels.data()), static_cast<std::streamsize>(raster.pixels.size()));
}

nlohmann::json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid JSON in '" + path.string() + "': " + e.what());
  }
}

std::string canonical_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace nodalab
