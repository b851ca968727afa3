#include "nodalab/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "nodalab/errors.hpp"
#include "nodalab/special.hpp"

namespace nodalab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

Mat3 quaternion_matrix(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  w /= n;
  x /= n;
  y /= n;
  z /= n;
  return {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
           {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
           {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
}

Vec3 apply(const Mat3& m, const Vec3& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2], m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
          m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

// Copies of the six icosahedral axes, each turned by a fixed rotation. Every
// copy is a spherical 5-design, so the union has second moment exactly I/3.
std::vector<Vec3> space_directions(int copies) {
  const double gr = 0.5 * (1.0 + std::sqrt(5.0));
  const std::array<Vec3, 6> axes{{{0, 1, gr}, {0, -1, gr}, {1, gr, 0}, {-1, gr, 0}, {gr, 0, 1}, {gr, 0, -1}}};
  const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(copies) * 6);
  for (int k = 0; k < copies; ++k) {
    const double zc = 1.0 - (2.0 * k + 1.0) / static_cast<double>(copies);
    const double rc = std::sqrt(std::max(0.0, 1.0 - zc * zc));
    const double az = golden_angle * k;
    const double half = 0.5 * golden_angle * (k + 1);
    const Mat3 rot = quaternion_matrix(std::cos(half), std::sin(half) * rc * std::cos(az),
                                       std::sin(half) * rc * std::sin(az), std::sin(half) * zc);
    for (const Vec3& a : axes) {
      const double n = std::hypot(a[0], a[1], a[2]);
      out.push_back(apply(rot, {a[0] / n, a[1] / n, a[2] / n}));
    }
  }
  return out;
}

struct DiskWave {
  double amp = 0.0;  // e^{B/2}
  double cos = 0.0;  // cos(lambda B)
  double sin = 0.0;
  double dbx = 0.0;  // dB/dx, Cartesian disk coordinate
  double dby = 0.0;
};

DiskWave disk_wave(std::complex<double> z, std::complex<double> b, double lambda) {
  const double r2 = std::norm(z);
  const std::complex<double> diff = z - b;
  const double d2 = std::norm(diff);
  const double ratio = (1.0 - r2) / d2;
  const double phase = lambda * std::log(ratio);
  DiskWave w;
  w.amp = std::sqrt(ratio);
  w.cos = std::cos(phase);
  w.sin = std::sin(phase);
  w.dbx = -2.0 * z.real() / (1.0 - r2) - 2.0 * diff.real() / d2;
  w.dby = -2.0 * z.imag() / (1.0 - r2) - 2.0 * diff.imag() / d2;
  return w;
}

std::vector<std::complex<double>> boundary_nodes(int n, double offset) {
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] = std::polar(1.0, offset + kTwoPi * j / n);
  return out;
}

}  // namespace

void validate(const FieldSpec& spec) {
  validate(spec.spectrum);
  if (spec.spectrum.kind != spec.geometry.kind) throw DomainError("spectrum geometry does not match field geometry");
  if (spec.geometry != describe(spec.geometry.kind)) throw DomainError("inconsistent geometry descriptor");
  if (spec.dim_v < 1 || spec.dim_v > 3) throw DomainError("dim_v must be 1, 2 or 3");
  if (spec.n_waves < 0) throw DomainError("n_waves must be non-negative");
  if (!spec.component_scales.empty()) {
    if (spec.component_scales.size() != static_cast<std::size_t>(spec.dim_v)) {
      throw DomainError("component_scales must have dim_v entries");
    }
    for (double b : spec.component_scales) {
      if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("component scales must be positive");
    }
  }
  if (spec.geometry.kind == GeometryKind::Hyperbolic2) {
    if (!(spec.r_max > 0.0) || spec.r_max > kHyperbolicRadiusBound) {
      throw DomainError("r_max must lie in (0, hyperbolic radius bound]");
    }
  }
}

double hyperbolic_truncation_error(double lambda, double r_max, int n_waves) {
  if (n_waves < 1) throw DomainError("n_waves must be positive");
  const GeometryDescriptor g = describe(GeometryKind::Hyperbolic2);
  const double kappa2 = 0.5 * (lambda * lambda + 0.25);
  std::map<double, double> reference;
  auto phi = [&](double d) {
    auto it = reference.find(d);
    if (it != reference.end()) return it->second;
    const double v = harish_chandra(lambda, d).real();
    reference.emplace(d, v);
    return v;
  };

  double worst = 0.0;
  const std::array<double, 4> offsets{0.0, 0.25, 0.5, 0.75};
  const std::array<double, 2> base_radii{r_max, 0.5 * r_max};
  const std::array<double, 10> distance_fractions{0.0, 0.01, 0.03, 0.0625, 0.125, 0.25, 0.375, 0.5, 0.75, 1.0};
  for (double off : offsets) {
    const auto nodes = boundary_nodes(n_waves, off * kTwoPi / n_waves);
    for (double br : base_radii) {
      const Point z0 = Point::disk(std::tanh(0.5 * br));
      const double frame = 0.5 * (1.0 - std::norm(z0.z()));
      std::vector<std::complex<double>> e0(nodes.size());
      double gx = 0.0;
      double gy = 0.0;
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        const DiskWave w = disk_wave(z0.z(), nodes[j], lambda);
        e0[j] = {w.amp * w.cos, w.amp * w.sin};
        // |(1/2 + i lambda) dB| e^{B/2}
        const double mod2 = (0.25 + lambda * lambda) * w.amp * w.amp * frame * frame;
        gx += mod2 * w.dbx * w.dbx;
        gy += mod2 * w.dby * w.dby;
      }
      gx /= n_waves;
      gy /= n_waves;
      worst = std::max({worst, std::abs(gx / kappa2 - 1.0), std::abs(gy / kappa2 - 1.0)});

      for (int dir = 0; dir < 4; ++dir) {
        const double psi = kPi * dir / 2.0 + 0.3;
        for (double frac : distance_fractions) {
          const double d = frac * r_max;
          const Point w = exp_map(g, z0, {d * std::cos(psi), d * std::sin(psi), 0.0});
          if (distance(g, Point::disk(0.0), w) > r_max) continue;
          double c = 0.0;
          for (std::size_t j = 0; j < nodes.size(); ++j) {
            const DiskWave v = disk_wave(w.z(), nodes[j], lambda);
            c += v.amp * (e0[j].real() * v.cos + e0[j].imag() * v.sin);
          }
          c /= n_waves;
          worst = std::max(worst, std::abs(c - phi(d)));
        }
      }
    }
  }
  return worst;
}

int minimal_hyperbolic_waves(double lambda, double r_max) {
  for (int n = 8; n <= (1 << 16); n *= 2) {
    if (hyperbolic_truncation_error(lambda, r_max, n) <= kHyperbolicCertificateTolerance) return n;
  }
  throw NumericError("no admissible hyperbolic wave count up to 65536");
}

FieldModel::FieldModel(FieldSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  switch (spec_.geometry.kind) {
    case GeometryKind::Line1: spec_.n_waves = 1; break;
    case GeometryKind::Plane2:
      if (spec_.n_waves == 0) spec_.n_waves = kDefaultPlaneWaves;
      spec_.n_waves = std::max(spec_.n_waves, 2);
      break;
    case GeometryKind::Space3:
      if (spec_.n_waves == 0) spec_.n_waves = kDefaultSpaceWaves;
      spec_.n_waves = 6 * ((spec_.n_waves + 5) / 6);
      break;
    case GeometryKind::Sphere2: spec_.n_waves = 0; break;
    case GeometryKind::Hyperbolic2: {
      if (spec_.n_waves == 0) {
        int needed = 8;
        for (const auto& atom : spec_.spectrum.atoms) {
          needed = std::max(needed, minimal_hyperbolic_waves(atom.point.param, spec_.r_max));
        }
        spec_.n_waves = needed;
      } else {
        for (const auto& atom : spec_.spectrum.atoms) {
          if (hyperbolic_truncation_error(atom.point.param, spec_.r_max, spec_.n_waves) >
              kHyperbolicCertificateTolerance) {
            const int needed = minimal_hyperbolic_waves(atom.point.param, spec_.r_max);
            throw CertificationError("hyperbolic sampler fails the covariance self-check at n_waves=" +
                                         std::to_string(spec_.n_waves) + "; minimal admissible n_waves is " +
                                         std::to_string(needed),
                                     needed);
          }
        }
      }
      break;
    }
  }
}

Realization FieldModel::sample(SeedSpec seed) const {
  Rng rng(seed);
  const int n = spec_.n_waves;
  std::vector<Realization::Component> comps(static_cast<std::size_t>(spec_.dim_v));
  for (auto& comp : comps) {
    for (const auto& atom : spec_.spectrum.atoms) {
      const double w = atom.weight;
      switch (spec_.geometry.kind) {
        case GeometryKind::Line1:
        case GeometryKind::Plane2:
        case GeometryKind::Space3: {
          Realization::FlatTable t;
          t.kappa = atom.point.param;
          t.amplitude = std::sqrt(w / n);
          if (spec_.geometry.kind == GeometryKind::Line1) {
            t.directions = {{1.0, 0.0, 0.0}};
          } else if (spec_.geometry.kind == GeometryKind::Plane2) {
            const double alpha = kTwoPi * rng.uniform();
            for (int j = 0; j < n; ++j) {
              const double a = alpha + kPi * j / n;
              t.directions.push_back({std::cos(a), std::sin(a), 0.0});
            }
          } else {
            const double qw = rng.normal();
            const double qx = rng.normal();
            const double qy = rng.normal();
            const double qz = rng.normal();
            const Mat3 rot = quaternion_matrix(qw, qx, qy, qz);
            for (const Vec3& d : space_directions(n / 6)) t.directions.push_back(apply(rot, d));
          }
          t.a.resize(t.directions.size());
          t.b.resize(t.directions.size());
          for (std::size_t j = 0; j < t.directions.size(); ++j) {
            t.a[j] = rng.normal();
            t.b[j] = rng.normal();
          }
          comp.flat.push_back(std::move(t));
          break;
        }
        case GeometryKind::Sphere2: {
          Realization::SphereTable t;
          t.degree = static_cast<int>(atom.point.param);
          t.amplitude = std::sqrt(4.0 * kPi * w / (2.0 * t.degree + 1.0));
          t.zeta.resize(static_cast<std::size_t>(2 * t.degree + 1));
          for (double& z : t.zeta) z = rng.normal();
          comp.sphere.push_back(std::move(t));
          break;
        }
        case GeometryKind::Hyperbolic2: {
          Realization::DiskTable t;
          t.lambda = atom.point.param;
          t.amplitude = std::sqrt(w / n);
          t.boundary = boundary_nodes(n, kTwoPi * rng.uniform());
          t.a.resize(static_cast<std::size_t>(n));
          t.b.resize(static_cast<std::size_t>(n));
          for (int j = 0; j < n; ++j) {
            t.a[static_cast<std::size_t>(j)] = rng.normal();
            t.b[static_cast<std::size_t>(j)] = rng.normal();
          }
          comp.disk.push_back(std::move(t));
          break;
        }
      }
    }
  }
  return Realization(spec_, std::move(comps));
}

Realization sample(const FieldSpec& spec, SeedSpec seed) { return FieldModel(spec).sample(seed); }

Realization::Realization(FieldSpec spec, std::vector<Component> components)
    : spec_(std::move(spec)), components_(std::move(components)) {}

void Realization::check_component(int component) const {
  if (component < 0 || component >= spec_.dim_v) throw DomainError("component index out of range");
}

bool Realization::in_domain(const Point& p) const {
  if (spec_.geometry.kind != GeometryKind::Hyperbolic2) return true;
  return std::abs(p.z()) <= std::tanh(0.5 * spec_.r_max) * (1.0 + 1e-12);
}

void Realization::check_domain(const Point& p) const {
  validate_point(spec_.geometry, p);
  if (!in_domain(p)) throw DomainError("point outside the sampler's validity radius");
}

double Realization::value(int component, const Point& p) const {
  check_component(component);
  check_domain(p);
  const Component& comp = components_[static_cast<std::size_t>(component)];
  double acc = 0.0;
  for (const auto& t : comp.flat) {
    double s = 0.0;
    for (std::size_t j = 0; j < t.directions.size(); ++j) {
      const auto& u = t.directions[j];
      const double ph = t.kappa * (u[0] * p[0] + u[1] * p[1] + u[2] * p[2]);
      s += t.a[j] * std::cos(ph) + t.b[j] * std::sin(ph);
    }
    acc += t.amplitude * s;
  }
  for (const auto& t : comp.sphere) {
    const auto row = special::legendre_row(t.degree, p[0]);
    const auto l = static_cast<std::size_t>(t.degree);
    double s = t.zeta[l] * row.value[0];
    for (std::size_t m = 1; m <= l; ++m) {
      const double md = static_cast<double>(m);
      s += std::numbers::sqrt2 * row.value[m] * (t.zeta[l + m] * std::cos(md * p[1]) + t.zeta[l - m] * std::sin(md * p[1]));
    }
    acc += t.amplitude * s;
  }
  for (const auto& t : comp.disk) {
    double s = 0.0;
    const std::complex<double> z = p.z();
    for (std::size_t j = 0; j < t.boundary.size(); ++j) {
      const double ratio = (1.0 - std::norm(z)) / std::norm(z - t.boundary[j]);
      const double ph = t.lambda * std::log(ratio);
      s += std::sqrt(ratio) * (t.a[j] * std::cos(ph) + t.b[j] * std::sin(ph));
    }
    acc += t.amplitude * s;
  }
  return acc;
}

void Realization::gradient(const Point& p, std::span<double> out) const {
  std::array<double, 3> values{};
  jet(p, std::span<double>(values.data(), static_cast<std::size_t>(spec_.dim_v)), out);
}

void Realization::jet(const Point& p, std::span<double> values, std::span<double> out) const {
  check_domain(p);
  const int dx = spec_.geometry.dim_x;
  if (out.size() != static_cast<std::size_t>(spec_.dim_v * dx)) throw DomainError("gradient buffer has wrong size");
  if (values.size() != static_cast<std::size_t>(spec_.dim_v)) throw DomainError("value buffer has wrong size");
  std::fill(out.begin(), out.end(), 0.0);
  for (int c = 0; c < spec_.dim_v; ++c) {
    const Component& comp = components_[static_cast<std::size_t>(c)];
    double* row = out.data() + static_cast<std::ptrdiff_t>(c * dx);
    double val = 0.0;
    for (const auto& t : comp.flat) {
      double s = 0.0;
      std::array<double, 3> g{};
      for (std::size_t j = 0; j < t.directions.size(); ++j) {
        const auto& u = t.directions[j];
        const double ph = t.kappa * (u[0] * p[0] + u[1] * p[1] + u[2] * p[2]);
        const double cs = std::cos(ph);
        const double sn = std::sin(ph);
        s += t.a[j] * cs + t.b[j] * sn;
        const double d = -t.a[j] * sn + t.b[j] * cs;
        for (int k = 0; k < dx; ++k) g[static_cast<std::size_t>(k)] += d * u[static_cast<std::size_t>(k)];
      }
      val += t.amplitude * s;
      for (int k = 0; k < dx; ++k) row[k] += t.amplitude * t.kappa * g[static_cast<std::size_t>(k)];
    }
    for (const auto& t : comp.sphere) {
      const auto rl = special::legendre_row(t.degree, p[0]);
      const auto l = static_cast<std::size_t>(t.degree);
      double s = t.zeta[l] * rl.value[0];
      double dth = t.zeta[l] * rl.dtheta[0];
      double dph = 0.0;
      for (std::size_t m = 1; m <= l; ++m) {
        const double md = static_cast<double>(m);
        const double cm = std::cos(md * p[1]);
        const double sm = std::sin(md * p[1]);
        const double even = t.zeta[l + m] * cm + t.zeta[l - m] * sm;
        s += std::numbers::sqrt2 * rl.value[m] * even;
        dth += std::numbers::sqrt2 * rl.dtheta[m] * even;
        dph += std::numbers::sqrt2 * md * rl.over_sin[m] * (-t.zeta[l + m] * sm + t.zeta[l - m] * cm);
      }
      val += t.amplitude * s;
      row[0] += t.amplitude * dth;
      row[1] += t.amplitude * dph;
    }
    for (const auto& t : comp.disk) {
      const std::complex<double> z = p.z();
      const double frame = 0.5 * (1.0 - std::norm(z));
      double s = 0.0;
      double gx = 0.0;
      double gy = 0.0;
      for (std::size_t j = 0; j < t.boundary.size(); ++j) {
        const DiskWave w = disk_wave(z, t.boundary[j], t.lambda);
        s += w.amp * (t.a[j] * w.cos + t.b[j] * w.sin);
        // d/dB of e^{B/2}(a cos(lambda B) + b sin(lambda B)).
        const double ddb = w.amp * ((0.5 * t.a[j] + t.lambda * t.b[j]) * w.cos +
                                    (0.5 * t.b[j] - t.lambda * t.a[j]) * w.sin);
        gx += ddb * w.dbx;
        gy += ddb * w.dby;
      }
      val += t.amplitude * s;
      row[0] += t.amplitude * frame * gx;
      row[1] += t.amplitude * frame * gy;
    }
    values[static_cast<std::size_t>(c)] = val;
  }
}

double Realization::eval(int component, const Point& p) const {
  return std::sqrt(spec_.scale(component)) * value(component, p);
}

std::vector<double> Realization::eval_gradient(const Point& p) const {
  const int dx = spec_.geometry.dim_x;
  std::vector<double> out(static_cast<std::size_t>(spec_.dim_v * dx));
  gradient(p, out);
  for (int c = 0; c < spec_.dim_v; ++c) {
    const double s = std::sqrt(spec_.scale(c));
    for (int k = 0; k < dx; ++k) out[static_cast<std::size_t>(c * dx + k)] *= s;
  }
  return out;
}

std::vector<double> Realization::values_on_grid(int component, const RegionGrid& grid) const {
  check_component(component);
  if (grid.geometry.kind != spec_.geometry.kind) throw DomainError("grid geometry does not match the field");
  const Component& comp = components_[static_cast<std::size_t>(component)];
  const std::size_t n0 = grid.axes[0].size();
  const std::size_t n1 = grid.dims() > 1 ? grid.axes[1].size() : 1;
  const std::size_t n2 = grid.dims() > 2 ? grid.axes[2].size() : 1;
  std::vector<double> out(grid.nodes.size(), 0.0);

  switch (spec_.geometry.kind) {
    case GeometryKind::Line1:
    case GeometryKind::Plane2:
    case GeometryKind::Space3: {
      // exp(i kappa u.x) factorises over the Cartesian axes.
      const int dims = grid.dims();
      std::array<std::vector<std::complex<double>>, 3> ph;
      std::vector<std::complex<double>> plane(n1 * n2);
      for (const auto& t : comp.flat) {
        for (std::size_t j = 0; j < t.directions.size(); ++j) {
          const auto& u = t.directions[j];
          for (int d = 0; d < dims; ++d) {
            const auto& ax = grid.axes[static_cast<std::size_t>(d)];
            auto& v = ph[static_cast<std::size_t>(d)];
            v.resize(ax.size());
            const double k = t.kappa * u[static_cast<std::size_t>(d)];
            for (std::size_t i = 0; i < ax.size(); ++i) v[i] = std::polar(1.0, k * ax[i]);
          }
          const std::complex<double> coef(t.amplitude * t.a[j], -t.amplitude * t.b[j]);
          for (std::size_t kk = 0; kk < n2; ++kk) {
            for (std::size_t jj = 0; jj < n1; ++jj) {
              std::complex<double> f = coef;
              if (dims > 1) f *= ph[1][jj];
              if (dims > 2) f *= ph[2][kk];
              plane[jj + n1 * kk] = f;
            }
          }
          const auto& px = ph[0];
          for (std::size_t kk = 0; kk < n2; ++kk) {
            for (std::size_t jj = 0; jj < n1; ++jj) {
              const std::complex<double> f = plane[jj + n1 * kk];
              double* dst = out.data() + (jj + n1 * kk) * n0;
              for (std::size_t i = 0; i < n0; ++i) dst[i] += f.real() * px[i].real() - f.imag() * px[i].imag();
            }
          }
        }
      }
      return out;
    }
    case GeometryKind::Sphere2: {
      for (const auto& t : comp.sphere) {
        const auto l = static_cast<std::size_t>(t.degree);
        // Longitude factors per column: c_m(phi) = sqrt2 (zeta_m cos + zeta_-m sin).
        std::vector<double> lon((l + 1) * n1);
        for (std::size_t jj = 0; jj < n1; ++jj) {
          const double phi = grid.axes[1][jj];
          lon[jj * (l + 1)] = t.zeta[l];
          for (std::size_t m = 1; m <= l; ++m) {
            const double md = static_cast<double>(m);
            lon[jj * (l + 1) + m] =
                std::numbers::sqrt2 * (t.zeta[l + m] * std::cos(md * phi) + t.zeta[l - m] * std::sin(md * phi));
          }
        }
        for (std::size_t i = 0; i < n0; ++i) {
          const auto row = special::legendre_row(t.degree, grid.axes[0][i]);
          for (std::size_t jj = 0; jj < n1; ++jj) {
            double s = 0.0;
            const double* lc = lon.data() + jj * (l + 1);
            for (std::size_t m = 0; m <= l; ++m) s += row.value[m] * lc[m];
            out[grid.node_index(i, jj)] += t.amplitude * s;
          }
        }
      }
      return out;
    }
    case GeometryKind::Hyperbolic2:
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (!in_domain(grid.nodes[i])) throw DomainError("grid extends beyond the sampler's validity radius");
        out[i] = value(component, grid.nodes[i]);
      }
      return out;
  }
  return out;
}

std::vector<CovarianceProbe> empirical_covariance(const FieldModel& model, std::uint64_t seed,
                                                  std::uint64_t first_stream, int replications,
                                                  std::span<const std::pair<Point, Point>> pairs) {
  if (replications < 100) throw DomainError("empirical_covariance needs at least 100 replications");
  std::vector<double> sum(pairs.size(), 0.0);
  std::vector<double> sum2(pairs.size(), 0.0);
  for (int r = 0; r < replications; ++r) {
    const Realization real = model.sample({seed, first_stream + static_cast<std::uint64_t>(r)});
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const double prod = real.value(0, pairs[i].first) * real.value(0, pairs[i].second);
      sum[i] += prod;
      sum2[i] += prod * prod;
    }
  }
  const GeometryDescriptor& g = model.spec().geometry;
  std::vector<CovarianceProbe> out;
  const double n = replications;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double mean = sum[i] / n;
    const double var = std::max(0.0, (sum2[i] - n * mean * mean) / (n - 1.0));
    out.push_back({distance(g, pairs[i].first, pairs[i].second), mean, std::sqrt(var / n)});
  }
  return out;
}

}  // namespace nodalab
