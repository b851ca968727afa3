#pragma once

#include <functional>
#include <vector>

#include "nodalab/field.hpp"

namespace testing_fields {

// Field given by closures in chart coordinates; the Jacobian is taken in the
// Cartesian frame, which is the orthonormal frame on flat spaces.
class FunctionField final : public nodalab::FieldView {
 public:
  using Fn = std::function<double(const nodalab::Point&)>;
  using Grad = std::function<std::array<double, 3>(const nodalab::Point&)>;

  FunctionField(nodalab::GeometryKind kind, std::vector<Fn> f, std::vector<Grad> g)
      : g_(nodalab::describe(kind)), f_(std::move(f)), grad_(std::move(g)) {}

  const nodalab::GeometryDescriptor& geometry() const override { return g_; }
  int dim_v() const override { return static_cast<int>(f_.size()); }
  double value(int c, const nodalab::Point& p) const override { return f_[static_cast<std::size_t>(c)](p); }
  void gradient(const nodalab::Point& p, std::span<double> out) const override {
    const int dx = g_.dim_x;
    for (std::size_t c = 0; c < f_.size(); ++c) {
      const auto gr = grad_[c](p);
      for (int k = 0; k < dx; ++k) out[c * static_cast<std::size_t>(dx) + static_cast<std::size_t>(k)] = gr[static_cast<std::size_t>(k)];
    }
  }

 private:
  nodalab::GeometryDescriptor g_;
  std::vector<Fn> f_;
  std::vector<Grad> grad_;
};

}  // namespace testing_fields
