#include "nodalab/zeroset.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "nodalab/errors.hpp"
#include "nodalab/sampler.hpp"

namespace nodalab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRefinementChange = 0.05;
constexpr double kCellSlack = 0.25;

bool positive(double v) { return v >= 0.0; }

bool refinement_moved(double coarse, double fine) {
  const double scale = std::max(std::abs(coarse), std::abs(fine));
  if (scale == 0.0) return false;
  return std::abs(fine - coarse) > kRefinementChange * scale;
}

bool angular_axis(const RegionGrid& grid, int axis) {
  return axis == 1 &&
         (grid.geometry.kind == GeometryKind::Sphere2 || grid.geometry.kind == GeometryKind::Hyperbolic2);
}

struct CellBox {
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};
};

CellBox cell_box(const RegionGrid& grid, std::size_t cell) {
  const auto pos = grid.cell_position(cell);
  CellBox box;
  for (int d = 0; d < grid.dims(); ++d) {
    const auto k = static_cast<std::size_t>(d);
    box.lo[k] = grid.axes[k][pos[k]];
    box.hi[k] = grid.axes[k][pos[k] + 1];
  }
  return box;
}

Point cell_point(const RegionGrid& grid, const CellBox& box, const std::array<double, 3>& frac) {
  std::array<double, 3> params{};
  for (int d = 0; d < grid.dims(); ++d) {
    const auto k = static_cast<std::size_t>(d);
    params[k] = box.lo[k] + frac[k] * (box.hi[k] - box.lo[k]);
  }
  return grid.point_at(params);
}

bool inside_cell(const RegionGrid& grid, const CellBox& box, const Point& p) {
  const auto params = grid.params_of(p);
  for (int d = 0; d < grid.dims(); ++d) {
    const auto k = static_cast<std::size_t>(d);
    const double width = box.hi[k] - box.lo[k];
    double x = params[k];
    if (angular_axis(grid, d)) {
      const double mid = 0.5 * (box.lo[k] + box.hi[k]);
      x = mid + std::remainder(x - mid, kTwoPi);
    }
    if (x < box.lo[k] - kCellSlack * width || x > box.hi[k] + kCellSlack * width) return false;
  }
  return true;
}

bool near_cell(const RegionGrid& grid, const CellBox& box, const Point& p) {
  const auto params = grid.params_of(p);
  for (int d = 0; d < grid.dims(); ++d) {
    const auto k = static_cast<std::size_t>(d);
    const double width = box.hi[k] - box.lo[k];
    double x = params[k];
    if (angular_axis(grid, d)) {
      const double mid = 0.5 * (box.lo[k] + box.hi[k]);
      x = mid + std::remainder(x - mid, kTwoPi);
    }
    if (x < box.lo[k] - width || x > box.hi[k] + width) return false;
  }
  return true;
}

// Root of the affine least-squares fit to the corner values, in cell fractions;
// the cell centre when the fit is singular or points outside the cell.
std::array<double, 3> affine_guess(const std::vector<std::vector<double>>& values,
                                   const std::vector<std::size_t>& corners, int n) {
  static constexpr std::array<std::array<int, 2>, 4> square{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  const double m = static_cast<double>(corners.size());
  for (std::size_t b = 0; b < corners.size(); ++b) {
    for (int d = 0; d < n; ++d) {
      const int bit = n == 2 ? square[b][static_cast<std::size_t>(d)] : static_cast<int>((b >> d) & 1U);
      for (int c = 0; c < n; ++c) {
        const double v = values[static_cast<std::size_t>(c)][corners[b]];
        a(c, d) += (bit ? 2.0 : -2.0) * v / m;
      }
    }
    for (int c = 0; c < n; ++c) mean(c) += values[static_cast<std::size_t>(c)][corners[b]] / m;
  }
  std::array<double, 3> frac{0.5, 0.5, 0.5};
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) return frac;
  const Eigen::VectorXd x = -lu.solve(mean);
  for (int d = 0; d < n; ++d) {
    const double f = 0.5 + x(d);
    if (!std::isfinite(f) || f < 0.0 || f > 1.0) return {0.5, 0.5, 0.5};
    frac[static_cast<std::size_t>(d)] = f;
  }
  return frac;
}

// Embedding used only to bucket zeros for de-duplication.
std::array<double, 3> embed(const GeometryDescriptor& g, const Point& p) {
  if (g.kind == GeometryKind::Sphere2) {
    const double s = std::sin(p[0]);
    return {s * std::cos(p[1]), s * std::sin(p[1]), std::cos(p[0])};
  }
  return p.c;
}

class ZeroSet {
 public:
  ZeroSet(const GeometryDescriptor& g, double radius) : g_(g), radius_(radius), bucket_(std::max(radius * 2.0, 1e-9)) {}

  bool insert(const Point& p) {
    if (near(p, radius_)) return false;
    buckets_[hash(key_of(p))].push_back(points_.size());
    points_.push_back(p);
    return true;
  }

  // Any stored point closer than r; r must not exceed the bucket size.
  bool near(const Point& p, double r) const {
    const auto key = key_of(p);
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        for (long long dz = -1; dz <= 1; ++dz) {
          auto it = buckets_.find(hash({key[0] + dx, key[1] + dy, key[2] + dz}));
          if (it == buckets_.end()) continue;
          for (std::size_t idx : it->second) {
            if (distance(g_, points_[idx], p) < r) return true;
          }
        }
      }
    }
    return false;
  }

  const std::vector<Point>& points() const { return points_; }

 private:
  std::array<long long, 3> key_of(const Point& p) const {
    const auto e = embed(g_, p);
    return {static_cast<long long>(std::floor(e[0] / bucket_)), static_cast<long long>(std::floor(e[1] / bucket_)),
            static_cast<long long>(std::floor(e[2] / bucket_))};
  }

  static std::uint64_t hash(const std::array<long long, 3>& k) {
    return static_cast<std::uint64_t>(k[0]) * 0x9E3779B97F4A7C15ULL ^
           static_cast<std::uint64_t>(k[1]) * 0xC2B2AE3D27D4EB4FULL ^
           static_cast<std::uint64_t>(k[2]) * 0x165667B19E3779F9ULL;
  }

  GeometryDescriptor g_;
  double radius_;
  double bucket_;
  std::vector<Point> points_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

struct NewtonResult {
  bool converged = false;
  Point point;
};

// Damped Newton with exp-map steps. With a leash, iterates that wander more
// than one cell width outside `box` are abandoned.
NewtonResult newton(const FieldView& field, Point p, double max_step, const ZeroSetOptions& opts,
                    const RegionGrid* grid = nullptr, const CellBox* box = nullptr) {
  const GeometryDescriptor& g = field.geometry();
  const int n = field.dim_v();
  const auto nn = static_cast<std::size_t>(n);
  // Values and Jacobian come together; an accepted trial point reuses them.
  std::array<double, 3> f{};
  std::array<double, 9> jac{};
  std::array<double, 3> f_new{};
  std::array<double, 9> jac_new{};
  auto eval = [&](const Point& q, std::array<double, 3>& vals, std::array<double, 9>& j) {
    field.jet(q, std::span<double>(vals.data(), nn), std::span<double>(j.data(), nn * nn));
    double m = 0.0;
    for (std::size_t c = 0; c < nn; ++c) m = std::max(m, std::abs(vals[c]));
    return m;
  };

  double res = eval(p, f, jac);
  for (int it = 0; it < opts.newton_iterations; ++it) {
    if (res <= opts.newton_tolerance) return {true, p};
    Eigen::MatrixXd m(n, n);
    Eigen::VectorXd rhs(n);
    for (int r = 0; r < n; ++r) {
      rhs(r) = f[static_cast<std::size_t>(r)];
      for (int c = 0; c < n; ++c) m(r, c) = jac[static_cast<std::size_t>(r * n + c)];
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible()) return {false, p};
    Eigen::VectorXd delta = -lu.solve(rhs);
    const double len = delta.norm();
    if (!std::isfinite(len)) return {false, p};
    if (len > max_step) delta *= max_step / len;

    double t = 1.0;
    bool moved = false;
    for (int half = 0; half < 12; ++half, t *= 0.5) {
      Tangent v{};
      for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = t * delta(k);
      const Point q = exp_map(g, p, v);
      if (!field.in_domain(q)) continue;
      const double r_new = eval(q, f_new, jac_new);
      if (r_new < res) {
        if (grid && box && !near_cell(*grid, *box, q)) return {false, q};
        p = q;
        res = r_new;
        f = f_new;
        jac = jac_new;
        moved = true;
        break;
      }
    }
    if (!moved) return {res <= opts.newton_tolerance, p};
  }
  return {res <= opts.newton_tolerance, p};
}

int winding(const std::vector<double>& f1, const std::vector<double>& f2, const std::vector<std::size_t>& corners) {
  double total = 0.0;
  for (std::size_t k = 0; k < corners.size(); ++k) {
    const std::size_t a = corners[k];
    const std::size_t b = corners[(k + 1) % corners.size()];
    const double ta = std::atan2(f2[a], f1[a]);
    const double tb = std::atan2(f2[b], f1[b]);
    total += std::remainder(tb - ta, kTwoPi);
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

ZeroSetEstimate level_crossings_impl(const FieldView& field, int component, const GeodesicSegment& seg, double level,
                                     double step, const ZeroSetOptions& opts) {
  if (component < 0 || component >= field.dim_v()) throw DomainError("component index out of range");
  if (!(step > 0.0)) throw DomainError("step must be positive");
  if (!(seg.length > 0.0)) throw DomainError("segment length must be positive");
  const GeometryDescriptor& g = field.geometry();

  ZeroSetEstimate est;
  est.kind = EstimateKind::Count1D;
  est.region_volume = seg.length;
  est.grid_spacing = step;
  est.tolerance = opts.bisection_tolerance;

  auto f = [&](double t) {
    const Point p = geodesic_point(g, seg, t);
    if (!field.in_domain(p)) throw DomainError("segment leaves the field's validity domain");
    return field.value(component, p) - level;
  };

  const auto n = static_cast<std::size_t>(std::ceil(seg.length / step - 1e-12));
  std::vector<double> ts(n + 1);
  std::vector<double> vs(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    ts[i] = (i == n) ? seg.length : seg.length * static_cast<double>(i) / static_cast<double>(n);
    vs[i] = f(ts[i]);
    if (vs[i] == 0.0) {
      const double nudge = (seg.length / static_cast<double>(n)) / 100.0;
      ts[i] = (i == n) ? ts[i] - nudge : ts[i] + nudge;
      vs[i] = f(ts[i]);
      ++est.perturbed_nodes;
    }
  }

  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (positive(vs[i]) == positive(vs[i + 1])) continue;
    ++count;
    if (opts.collect) {
      double a = ts[i];
      double b = ts[i + 1];
      const bool pa = positive(vs[i]);
      while (b - a > opts.bisection_tolerance) {
        const double mid = 0.5 * (a + b);
        if (positive(f(mid)) == pa) {
          a = mid;
        } else {
          b = mid;
        }
      }
      est.zeros.push_back(geodesic_point(g, seg, 0.5 * (a + b)));
    }
  }
  est.value = static_cast<double>(count);

  if (opts.check_refinement) {
    ZeroSetOptions fine = opts;
    fine.check_refinement = false;
    fine.collect = false;
    const ZeroSetEstimate refined = level_crossings_impl(field, component, seg, level, step / 2.0, fine);
    est.refinement_checked = true;
    est.refined_value = refined.value;
    est.refinement_flag = refinement_moved(est.value, refined.value);
  }
  return est;
}

}  // namespace

ZeroSetEstimate count_level_crossings(const FieldView& field, int component, const GeodesicSegment& seg, double level,
                                      double step, const ZeroSetOptions& opts) {
  return level_crossings_impl(field, component, seg, level, step, opts);
}

ZeroSetEstimate count_level_crossings(const Realization& field, int component, const GeodesicSegment& seg,
                                      double level, double step, const ZeroSetOptions& opts) {
  if (component < 0 || component >= field.dim_v()) throw DomainError("component index out of range");
  const double standardised = level == 0.0 ? 0.0 : level / std::sqrt(field.spec().scale(component));
  return level_crossings_impl(static_cast<const FieldView&>(field), component, seg, standardised, step, opts);
}

ZeroSetEstimate count_point_zeros(const FieldView& field, const RegionGrid& grid, const ZeroSetOptions& opts) {
  const GeometryDescriptor& g = field.geometry();
  if (grid.geometry.kind != g.kind) throw DomainError("grid geometry does not match the field");
  const int n = field.dim_v();
  if (n != g.dim_x || (n != 2 && n != 3)) throw DomainError("point-zero counting needs dim_v == dim_x in {2, 3}");

  std::vector<std::vector<double>> values;
  values.reserve(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) values.push_back(field.values_on_grid(c, grid));

  ZeroSetEstimate est;
  est.kind = EstimateKind::CountPoints;
  est.region_volume = grid.total_weight();
  est.grid_spacing = grid.spacing;
  est.tolerance = opts.newton_tolerance;

  ZeroSet found(g, 0.5 * grid.spacing);
  const double max_step = 2.0 * grid.spacing;
  const std::size_t sub = std::size_t{1} << static_cast<unsigned>(n);

  std::vector<Point> fallback;
  auto accept = [&](const Point& p) {
    if (!region_contains(g, grid.region, p)) return;
    found.insert(p);
  };

  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    const auto corners = grid.cell_corners(cell);
    bool candidate = true;
    for (int c = 0; c < n && candidate; ++c) {
      const auto& v = values[static_cast<std::size_t>(c)];
      bool any_pos = false;
      bool any_neg = false;
      for (std::size_t k : corners) {
        if (positive(v[k])) {
          any_pos = true;
        } else {
          any_neg = true;
        }
      }
      candidate = any_pos && any_neg;
    }
    if (!candidate) continue;

    const CellBox box = cell_box(grid, cell);
    const NewtonResult first =
        newton(field, cell_point(grid, box, affine_guess(values, corners, n)), max_step, opts, &grid, &box);
    if (first.converged && inside_cell(grid, box, first.point)) {
      accept(first.point);
      continue;
    }

    ++est.newton_failures;
    // Split the cell in 2^n and restart Newton only in sub-cells that still
    // pass the sign test.
    const std::size_t side = 3;
    const std::size_t lattice = n == 2 ? 9 : 27;
    std::array<std::array<double, 3>, 27> lv{};
    for (std::size_t q = 0; q < lattice; ++q) {
      const std::array<double, 3> frac{0.5 * static_cast<double>(q % side), 0.5 * static_cast<double>((q / side) % side),
                                       0.5 * static_cast<double>(q / (side * side))};
      const Point lp = cell_point(grid, box, frac);
      for (int c = 0; c < n; ++c) lv[q][static_cast<std::size_t>(c)] = field.value(c, lp);
    }
    bool located = false;
    for (std::size_t s = 0; s < sub; ++s) {
      const std::size_t ox = s & 1U;
      const std::size_t oy = (s >> 1U) & 1U;
      const std::size_t oz = (s >> 2U) & 1U;
      bool sub_candidate = true;
      for (int c = 0; c < n && sub_candidate; ++c) {
        bool any_pos = false;
        bool any_neg = false;
        for (std::size_t b = 0; b < sub; ++b) {
          const std::size_t q = (ox + (b & 1U)) + side * (oy + ((b >> 1U) & 1U)) + side * side * (oz + ((b >> 2U) & 1U));
          if (positive(lv[q][static_cast<std::size_t>(c)])) {
            any_pos = true;
          } else {
            any_neg = true;
          }
        }
        sub_candidate = any_pos && any_neg;
      }
      if (!sub_candidate) continue;
      const std::array<double, 3> frac{ox ? 0.75 : 0.25, oy ? 0.75 : 0.25, oz ? 0.75 : 0.25};
      const NewtonResult r = newton(field, cell_point(grid, box, frac), max_step, opts, &grid, &box);
      if (r.converged && inside_cell(grid, box, r.point)) {
        accept(r.point);
        located = true;
      }
    }
    if (!located && n == 2 && winding(values[0], values[1], corners) != 0) {
      fallback.push_back(cell_point(grid, box, {0.5, 0.5, 0.5}));
    }
  }
  // Winding-only cells are usually a zero Newton already found next door, or a
  // near-tangency; count them only when nothing lies within one cell width.
  for (const Point& c : fallback) {
    if (!region_contains(g, grid.region, c) || found.near(c, grid.spacing)) continue;
    found.insert(c);
    ++est.fallback_cells;
  }

  est.value = static_cast<double>(found.points().size());
  if (opts.collect) est.zeros = found.points();

  if (opts.check_refinement) {
    ZeroSetOptions fine = opts;
    fine.check_refinement = false;
    fine.collect = false;
    const RegionGrid refined_grid = grid_region(grid.geometry, grid.region, grid.resolution / 2.0);
    const ZeroSetEstimate refined = count_point_zeros(field, refined_grid, fine);
    est.refinement_checked = true;
    est.refined_value = refined.value;
    est.refinement_flag = refinement_moved(est.value, refined.value);
  }
  return est;
}

ZeroSetEstimate nodal_length(const FieldView& field, int component, const RegionGrid& grid,
                             const ZeroSetOptions& opts) {
  const GeometryDescriptor& g = field.geometry();
  if (grid.geometry.kind != g.kind) throw DomainError("grid geometry does not match the field");
  if (g.dim_x != 2) throw DomainError("nodal length is defined for two-dimensional geometries");
  if (component < 0 || component >= field.dim_v()) throw DomainError("component index out of range");

  const std::vector<double> v = field.values_on_grid(component, grid);

  ZeroSetEstimate est;
  est.kind = EstimateKind::Length;
  est.region_volume = grid.total_weight();
  est.grid_spacing = grid.spacing;

  double total = 0.0;
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    const auto corners = grid.cell_corners(cell);
    std::array<double, 4> f{};
    std::array<bool, 4> s{};
    for (std::size_t k = 0; k < 4; ++k) {
      f[k] = v[corners[k]];
      s[k] = positive(f[k]);
    }
    if (s[0] == s[1] && s[1] == s[2] && s[2] == s[3]) continue;

    const CellBox box = cell_box(grid, cell);
    // Corner fractions in counter-clockwise order, matching cell_corners.
    constexpr std::array<std::array<double, 2>, 4> frac{{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}};
    std::array<Point, 4> cross{};
    std::array<bool, 4> has{};
    for (std::size_t e = 0; e < 4; ++e) {
      const std::size_t a = e;
      const std::size_t b = (e + 1) % 4;
      if (s[a] == s[b]) continue;
      const double t = f[a] / (f[a] - f[b]);
      cross[e] = cell_point(grid, box,
                            {frac[a][0] + t * (frac[b][0] - frac[a][0]), frac[a][1] + t * (frac[b][1] - frac[a][1]), 0.0});
      has[e] = true;
    }

    auto add = [&](std::size_t e1, std::size_t e2) {
      total += distance(g, cross[e1], cross[e2]);
      if (opts.collect) est.segments.push_back({cross[e1], cross[e2]});
    };

    const int crossings = static_cast<int>(has[0]) + has[1] + has[2] + has[3];
    if (crossings == 2) {
      std::array<std::size_t, 2> idx{};
      std::size_t m = 0;
      for (std::size_t e = 0; e < 4; ++e) {
        if (has[e]) idx[m++] = e;
      }
      add(idx[0], idx[1]);
    } else if (crossings == 4) {
      const bool centre = positive(field.value(component, cell_point(grid, box, {0.5, 0.5, 0.0})));
      if (centre == s[0]) {
        add(0, 1);  // isolate corner 1
        add(2, 3);  // isolate corner 3
      } else {
        add(3, 0);  // isolate corner 0
        add(1, 2);  // isolate corner 2
      }
    }
  }
  est.value = total;

  if (opts.check_refinement) {
    ZeroSetOptions fine = opts;
    fine.check_refinement = false;
    fine.collect = false;
    const RegionGrid refined_grid = grid_region(grid.geometry, grid.region, grid.resolution / 2.0);
    const ZeroSetEstimate refined = nodal_length(field, component, refined_grid, fine);
    est.refinement_checked = true;
    est.refined_value = refined.value;
    est.refinement_flag = refinement_moved(est.value, refined.value);
  }
  return est;
}

}  // namespace nodalab
