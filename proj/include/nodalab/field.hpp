#pragma once

#include <span>
#include <vector>

#include "nodalab/geometry.hpp"

namespace nodalab {

/// Read-only access to a vector-valued field on one of the geometries.
///
/// `value` and `gradient` return the *standardised* field: each component is
/// divided by its own standard deviation. Zero sets do not depend on positive
/// rescaling, and the zero-set code only ever looks at this view, which is
/// what makes its estimates exactly scale invariant.
class FieldView {
 public:
  virtual ~FieldView() = default;

  virtual const GeometryDescriptor& geometry() const = 0;
  virtual int dim_v() const = 0;
  virtual double value(int component, const Point& p) const = 0;
  /// Row-major dim_v x dim_x Jacobian in the orthonormal frame at p.
  virtual void gradient(const Point& p, std::span<double> out) const = 0;
  /// All component values and the Jacobian in one pass.
  virtual void jet(const Point& p, std::span<double> values, std::span<double> jacobian) const {
    for (int c = 0; c < dim_v(); ++c) values[static_cast<std::size_t>(c)] = value(c, p);
    gradient(p, jacobian);
  }
  /// Whether p lies where the field may be evaluated.
  virtual bool in_domain(const Point& p) const { (void)p; return true; }

  /// Values at every grid node; overridden where a separable fast path exists.
  virtual std::vector<double> values_on_grid(int component, const RegionGrid& grid) const {
    std::vector<double> out(grid.nodes.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = value(component, grid.nodes[i]);
    return out;
  }
};

}  // namespace nodalab
