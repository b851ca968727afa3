#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "nodalab/field.hpp"
#include "nodalab/geometry.hpp"
#include "nodalab/rng.hpp"
#include "nodalab/spectra.hpp"

namespace nodalab {

/// Everything needed to draw realizations of an invariant Gaussian field.
struct FieldSpec {
  GeometryDescriptor geometry = describe(GeometryKind::Plane2);
  SpectralMeasure spectrum = SpectralMeasure::monochromatic(GeometryKind::Plane2, 1.0);
  int dim_v = 1;
  /// Wave count per spectral atom: directions on flat spaces, boundary nodes on
  /// the disk. 0 selects the default (flat) or the certified minimum (disk).
  int n_waves = 0;
  /// Radius of validity on the disk.
  double r_max = 2.0;
  /// Per-component variances beta_i; empty means all ones.
  std::vector<double> component_scales;

  double scale(int component) const {
    return component_scales.empty() ? 1.0 : component_scales[static_cast<std::size_t>(component)];
  }
};

void validate(const FieldSpec& spec);

inline constexpr int kDefaultPlaneWaves = 128;
inline constexpr int kDefaultSpaceWaves = 96;
/// Largest admissible deterministic error of the hyperbolic sampler: covariance
/// deviation (absolute) and mean-square gradient deviation (relative).
inline constexpr double kHyperbolicCertificateTolerance = 0.01;

/// Deterministic truncation error of N equispaced boundary waves for spectral
/// parameter lambda, maximised over probe pairs inside the ball of radius r_max
/// and over rotations of the node set.
double hyperbolic_truncation_error(double lambda, double r_max, int n_waves);

/// Smallest power-of-two wave count passing the covariance self-check.
int minimal_hyperbolic_waves(double lambda, double r_max);

class Realization;

/// A validated spec with its wave count resolved (and certified on the disk).
class FieldModel {
 public:
  explicit FieldModel(FieldSpec spec);

  const FieldSpec& spec() const { return spec_; }
  int resolved_waves() const { return spec_.n_waves; }
  Realization sample(SeedSpec seed) const;

 private:
  FieldSpec spec_;
};

/// One sampled field. Coefficient tables per (component, atom) make evaluation
/// deterministic and exact, including first derivatives.
class Realization final : public FieldView {
 public:
  struct FlatTable {
    double kappa = 1.0;
    double amplitude = 1.0;  // sqrt(w / N)
    std::vector<std::array<double, 3>> directions;
    std::vector<double> a, b;
  };
  struct SphereTable {
    int degree = 0;
    double amplitude = 1.0;  // sqrt(4 pi w / (2l + 1))
    std::vector<double> zeta;  // index l + m for m = -l..l
  };
  struct DiskTable {
    double lambda = 0.0;
    double amplitude = 1.0;  // sqrt(w / N)
    std::vector<std::complex<double>> boundary;
    std::vector<double> a, b;
  };
  struct Component {
    std::vector<FlatTable> flat;
    std::vector<SphereTable> sphere;
    std::vector<DiskTable> disk;
  };

  Realization(FieldSpec spec, std::vector<Component> components);

  const FieldSpec& spec() const { return spec_; }
  const std::vector<Component>& components() const { return components_; }

  /// Field value in physical units (variance beta_i). Throws DomainError outside
  /// the validity domain.
  double eval(int component, const Point& p) const;
  /// dim_v x dim_x Jacobian in physical units.
  std::vector<double> eval_gradient(const Point& p) const;

  const GeometryDescriptor& geometry() const override { return spec_.geometry; }
  int dim_v() const override { return spec_.dim_v; }
  double value(int component, const Point& p) const override;
  void gradient(const Point& p, std::span<double> out) const override;
  void jet(const Point& p, std::span<double> values, std::span<double> jacobian) const override;
  bool in_domain(const Point& p) const override;
  std::vector<double> values_on_grid(int component, const RegionGrid& grid) const override;

 private:
  void check_domain(const Point& p) const;
  void check_component(int component) const;

  FieldSpec spec_;
  std::vector<Component> components_;
};

Realization sample(const FieldSpec& spec, SeedSpec seed);

struct CovarianceProbe {
  double distance = 0.0;
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Mean of Phi(p) Phi(q) for component 0 over streams first_stream ..
/// first_stream + replications - 1, on the standardised field.
std::vector<CovarianceProbe> empirical_covariance(const FieldModel& model, std::uint64_t seed,
                                                  std::uint64_t first_stream, int replications,
                                                  std::span<const std::pair<Point, Point>> pairs);

}  // namespace nodalab
