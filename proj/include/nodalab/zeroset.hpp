#pragma once

#include <array>
#include <vector>

#include "nodalab/field.hpp"
#include "nodalab/geometry.hpp"

namespace nodalab {

class Realization;

enum class EstimateKind { Count1D, CountPoints, Length };

struct ZeroSetEstimate {
  EstimateKind kind = EstimateKind::Count1D;
  double value = 0.0;
  bool refinement_checked = false;
  bool refinement_flag = false;  // value moved by more than 5% under one refinement
  double refined_value = 0.0;
  double region_volume = 0.0;    // segment length for Count1D
  double grid_spacing = 0.0;     // step for Count1D
  double tolerance = 0.0;        // bisection / Newton tolerance used
  int perturbed_nodes = 0;       // samples that hit the level exactly and were nudged
  int newton_failures = 0;       // candidate cells that needed subdivision
  int fallback_cells = 0;        // cells counted by the winding test after subdivision failed
  std::vector<Point> zeros;                    // located zeros (collect = true)
  std::vector<std::array<Point, 2>> segments;  // nodal polyline pieces (collect = true)
};

struct ZeroSetOptions {
  bool check_refinement = true;
  bool collect = false;
  double newton_tolerance = 1e-9;
  int newton_iterations = 60;
  double bisection_tolerance = 1e-8;
};

/// Crossings of the standardised component with the level u along a geodesic
/// segment, sampled every `step` and localised by bisection.
ZeroSetEstimate count_level_crossings(const FieldView& field, int component, const GeodesicSegment& seg,
                                      double level, double step, const ZeroSetOptions& opts = {});
/// Same for a realization with `level` in physical units (divided by sqrt(beta)).
ZeroSetEstimate count_level_crossings(const Realization& field, int component, const GeodesicSegment& seg,
                                      double level, double step, const ZeroSetOptions& opts = {});

/// Isolated zeros of a field with dim_v == dim_x in {2, 3} inside the grid's region.
ZeroSetEstimate count_point_zeros(const FieldView& field, const RegionGrid& grid, const ZeroSetOptions& opts = {});

/// Length of the nodal set of one component over a 2-D region (marching squares,
/// segments measured with the intrinsic metric).
ZeroSetEstimate nodal_length(const FieldView& field, int component, const RegionGrid& grid,
                             const ZeroSetOptions& opts = {});

}  // namespace nodalab
