#pragma once

#include <json.hpp>

#include <span>
#include <string_view>

#include "nodalab/geometry.hpp"
#include "nodalab/sampler.hpp"
#include "nodalab/spectra.hpp"

namespace nodalab {

/// RiceDef: Lambda = pi / sqrt(kappa2), the typical spacing read off Rice's
/// formula. Wavelength: Lambda = 2 pi / sqrt(dim_x kappa2), the convention that
/// reproduces the textbook wavelength of plane and Helgason waves.
enum class SpacingConvention { RiceDef, Wavelength };

/// Paper: constants (dim X)!/(dim X - dim V)! (pi/2)^{dim V / 2} as stated.
/// Chi: constants assembled from the Kac-Rice density with chi-distribution means.
enum class ConstantMode { Paper, Chi };

std::string_view to_string(SpacingConvention c);
std::string_view to_string(ConstantMode m);
SpacingConvention parse_convention(std::string_view s);
ConstantMode parse_mode(std::string_view s);

/// Directional second spectral moment of a unit-variance component:
/// sum_i w_i |K_i| / dim_x.
double second_moment(const SpectralMeasure& m);
double second_moment(const FieldSpec& spec);

/// Expected number of u-crossings per unit length of a unit-variance stationary process.
double rice_level_density(double u, double kappa2);

/// Typical spacing; independent of the component variances.
double spacing(const FieldSpec& spec, SpacingConvention convention);
double spacing_from_moment(double kappa2, int dim_x, SpacingConvention convention);

/// The literal closed form pi / sqrt(dim_x * beta * sum_i w_i |K_i|) for component
/// `component`. Reported for comparison only; it depends on beta.
double literal_spacing_formula(const FieldSpec& spec, int component);

/// Mean of the chi distribution with m degrees of freedom.
double chi_mean(int m);

/// Expected k-volume of the parallelotope spanned by k independent centred
/// Gaussian vectors in R^n with per-column standard deviations sigma.
double expected_parallelotope_volume(int n, int k, std::span<const double> sigma, ConstantMode mode);

/// Dimensionless zero-set density E[measure] * cell / Vol; geometry-free.
double predicted_constant(int dim_x, int dim_v, ConstantMode mode, SpacingConvention convention);

/// Elementary-cell volume Lambda^{dim_v} of the unit-variance field.
double cell_volume(const FieldSpec& spec, SpacingConvention convention);

/// Expected zero-set measure in a region (counts for dim_v == dim_x, length
/// for dim_v == 1 on 2-D spaces, crossings per unit length on the line).
double predicted_measure(const FieldSpec& spec, const Region& region, ConstantMode mode,
                         SpacingConvention convention);
double predicted_measure_for_volume(const FieldSpec& spec, double volume, ConstantMode mode,
                                    SpacingConvention convention);

struct PredictionReport {
  double kappa2 = 0.0;
  double spacing_ricedef = 0.0;
  double spacing_wavelength = 0.0;
  double literal_spacing = 0.0;
  double cell_ricedef = 0.0;
  double cell_wavelength = 0.0;
  double constant_paper = 0.0;
  double constant_chi_ricedef = 0.0;
  double constant_chi_wavelength = 0.0;
  double region_volume = 0.0;
  /// Expected measure in the region, keyed "<mode>_<convention>".
  nlohmann::json expected;
};

PredictionReport predict(const FieldSpec& spec, double region_volume);
nlohmann::json to_json(const PredictionReport& r);

}  // namespace nodalab
