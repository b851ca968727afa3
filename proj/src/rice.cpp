#include "nodalab/rice.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nodalab/errors.hpp"

namespace nodalab {

namespace {

constexpr double kPi = std::numbers::pi;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

bool supported_pair(int dim_x, int dim_v) {
  return (dim_x == 1 && dim_v == 1) || (dim_x == 2 && dim_v == 1) || (dim_x == 2 && dim_v == 2) ||
         (dim_x == 3 && dim_v == 3);
}

}  // namespace

std::string_view to_string(SpacingConvention c) {
  return c == SpacingConvention::RiceDef ? "ricedef" : "wavelength";
}

std::string_view to_string(ConstantMode m) { return m == ConstantMode::Paper ? "paper" : "chi"; }

SpacingConvention parse_convention(std::string_view s) {
  if (s == "ricedef" || s == "RiceDef") return SpacingConvention::RiceDef;
  if (s == "wavelength" || s == "Wavelength") return SpacingConvention::Wavelength;
  throw DomainError("unknown spacing convention '" + std::string(s) + "'");
}

ConstantMode parse_mode(std::string_view s) {
  if (s == "paper") return ConstantMode::Paper;
  if (s == "chi") return ConstantMode::Chi;
  throw DomainError("unknown constant mode '" + std::string(s) + "'");
}

double second_moment(const SpectralMeasure& m) {
  validate(m);
  const int dim = describe(m.kind).dim_x;
  double acc = 0.0;
  for (const auto& a : m.atoms) acc += a.weight * std::abs(eigenvalue(a.point));
  return acc / dim;
}

double second_moment(const FieldSpec& spec) { return second_moment(spec.spectrum); }

double rice_level_density(double u, double kappa2) {
  if (!(kappa2 > 0.0)) throw DomainError("second spectral moment must be positive");
  return std::exp(-0.5 * u * u) * std::sqrt(kappa2) / kPi;
}

double spacing_from_moment(double kappa2, int dim_x, SpacingConvention convention) {
  if (!(kappa2 > 0.0)) throw DomainError("typical spacing is undefined for a trivial spectrum");
  if (convention == SpacingConvention::RiceDef) return kPi / std::sqrt(kappa2);
  return 2.0 * kPi / std::sqrt(dim_x * kappa2);
}

double spacing(const FieldSpec& spec, SpacingConvention convention) {
  return spacing_from_moment(second_moment(spec), spec.geometry.dim_x, convention);
}

double literal_spacing_formula(const FieldSpec& spec, int component) {
  const double k = second_moment(spec) * spec.geometry.dim_x;
  if (!(k > 0.0)) throw DomainError("typical spacing is undefined for a trivial spectrum");
  return kPi / std::sqrt(spec.geometry.dim_x * spec.scale(component) * k);
}

double chi_mean(int m) {
  if (m < 1) throw DomainError("chi degrees of freedom must be >= 1");
  return std::numbers::sqrt2 * std::exp(std::lgamma(0.5 * (m + 1)) - std::lgamma(0.5 * m));
}

double expected_parallelotope_volume(int n, int k, std::span<const double> sigma, ConstantMode mode) {
  if (k < 0 || n < 1) throw DomainError("parallelotope dimensions must satisfy n >= 1, k >= 0");
  if (k > n) throw DomainError("parallelotope needs k <= n");
  if (sigma.size() != static_cast<std::size_t>(k)) throw DomainError("need one sigma per column");
  double scale = 1.0;
  for (double s : sigma) scale *= s;
  if (mode == ConstantMode::Paper) return factorial(n) / factorial(n - k) * scale;
  double prod = 1.0;
  for (int i = 0; i < k; ++i) prod *= chi_mean(n - i);
  return scale * prod;
}

double predicted_constant(int dim_x, int dim_v, ConstantMode mode, SpacingConvention convention) {
  if (dim_x < 1 || dim_v < 1 || dim_v > dim_x) throw DomainError("need 1 <= dim_v <= dim_x");
  if (mode == ConstantMode::Paper) {
    return factorial(dim_x) / factorial(dim_x - dim_v) * std::pow(kPi / 2.0, 0.5 * dim_v);
  }
  // Kac-Rice: density = (2 pi)^{-k/2} kappa2^{k/2} prod chi_mean(n - i); the cell
  // Lambda^k scales as kappa2^{-k/2}, so evaluate both at kappa2 = 1.
  const double unit_cell = spacing_from_moment(1.0, dim_x, convention);
  double prod = 1.0;
  for (int i = 0; i < dim_v; ++i) prod *= chi_mean(dim_x - i);
  return std::pow(2.0 * kPi, -0.5 * dim_v) * std::pow(unit_cell, dim_v) * prod;
}

double cell_volume(const FieldSpec& spec, SpacingConvention convention) {
  return std::pow(spacing(spec, convention), spec.dim_v);
}

double predicted_measure_for_volume(const FieldSpec& spec, double volume, ConstantMode mode,
                                    SpacingConvention convention) {
  if (!supported_pair(spec.geometry.dim_x, spec.dim_v)) {
    throw DomainError("unsupported (dim_x, dim_v) pair for zero-set predictions");
  }
  if (volume < 0.0) throw DomainError("region volume must be non-negative");
  if (volume == 0.0) return 0.0;
  return predicted_constant(spec.geometry.dim_x, spec.dim_v, mode, convention) * volume /
         cell_volume(spec, convention);
}

double predicted_measure(const FieldSpec& spec, const Region& region, ConstantMode mode,
                         SpacingConvention convention) {
  return predicted_measure_for_volume(spec, region_volume(spec.geometry, region), mode, convention);
}

PredictionReport predict(const FieldSpec& spec, double region_volume) {
  PredictionReport r;
  const int dx = spec.geometry.dim_x;
  r.kappa2 = second_moment(spec);
  r.spacing_ricedef = spacing(spec, SpacingConvention::RiceDef);
  r.spacing_wavelength = spacing(spec, SpacingConvention::Wavelength);
  r.literal_spacing = literal_spacing_formula(spec, 0);
  r.cell_ricedef = cell_volume(spec, SpacingConvention::RiceDef);
  r.cell_wavelength = cell_volume(spec, SpacingConvention::Wavelength);
  r.constant_paper = predicted_constant(dx, spec.dim_v, ConstantMode::Paper, SpacingConvention::Wavelength);
  r.constant_chi_ricedef = predicted_constant(dx, spec.dim_v, ConstantMode::Chi, SpacingConvention::RiceDef);
  r.constant_chi_wavelength = predicted_constant(dx, spec.dim_v, ConstantMode::Chi, SpacingConvention::Wavelength);
  r.region_volume = region_volume;
  r.expected = nlohmann::json::object();
  if (supported_pair(dx, spec.dim_v)) {
    for (ConstantMode m : {ConstantMode::Paper, ConstantMode::Chi}) {
      for (SpacingConvention c : {SpacingConvention::RiceDef, SpacingConvention::Wavelength}) {
        r.expected[std::string(to_string(m)) + "_" + std::string(to_string(c))] =
            predicted_measure_for_volume(spec, region_volume, m, c);
      }
    }
  }
  return r;
}

nlohmann::json to_json(const PredictionReport& r) {
  return {{"kappa2", r.kappa2},
          {"spacing", {{"ricedef", r.spacing_ricedef}, {"wavelength", r.spacing_wavelength}, {"literal_formula", r.literal_spacing}}},
          {"cell_volume", {{"ricedef", r.cell_ricedef}, {"wavelength", r.cell_wavelength}}},
          {"constant",
           {{"paper", r.constant_paper}, {"chi_ricedef", r.constant_chi_ricedef}, {"chi_wavelength", r.constant_chi_wavelength}}},
          {"region_volume", r.region_volume},
          {"expected_measure", r.expected}};
}

}  // namespace nodalab
