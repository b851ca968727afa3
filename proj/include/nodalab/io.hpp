#pragma once

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nodalab/geometry.hpp"
#include "nodalab/sampler.hpp"

namespace nodalab {

/// RFC 4180 quoting: fields with commas, quotes or line breaks are quoted.
std::string csv_field(std::string_view s);

/// Column names for chart coordinates ("x,y", "theta,phi", "re,im", ...).
std::vector<std::string> coordinate_names(GeometryKind kind);

/// One row per grid node: chart coordinates then every component in physical units.
void write_grid_csv(std::ostream& out, const Realization& field, const RegionGrid& grid);

void write_points_csv(std::ostream& out, GeometryKind kind, std::span<const Point> points);
/// Nodal polyline pieces as (segment, endpoint, coordinates...) rows.
void write_segments_csv(std::ostream& out, GeometryKind kind, std::span<const std::array<Point, 2>> segments);

struct Raster {
  int width = 0;
  int height = 0;
  std::vector<unsigned char> pixels;  // row-major, row 0 at the top
};

/// Grey-scale image of one component: values clipped to +-3 sqrt(beta) and mapped
/// onto 0..255. Flat 2-D fields fill the region box, 3-D fields show the slice
/// through the box centre, the sphere is drawn equirectangular and the disk as a
/// square around the ball with outside pixels set to 0.
Raster render(const Realization& field, int component, const Region& region, int width, int height);

/// Binary P5 PGM.
void write_pgm(std::ostream& out, const Raster& raster);

/// Parses a JSON file; ConfigError on I/O or syntax problems.
nlohmann::json load_json_file(const std::filesystem::path& path);

/// Canonical form: keys sorted, two-space indent, trailing newline.
std::string canonical_json(const nlohmann::json& j);

}  // namespace nodalab
