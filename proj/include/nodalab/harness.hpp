#pragma once

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nodalab/geometry.hpp"
#include "nodalab/rice.hpp"
#include "nodalab/sampler.hpp"

namespace nodalab {

enum class ExperimentKind { Spacing, Density, Covariance, MatrixOracle };

std::string_view to_string(ExperimentKind k);
ExperimentKind parse_experiment(std::string_view s);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Density;
  FieldSpec field;
  GeodesicSegment segment;  // spacing experiments
  Region region;            // density experiments
  int replications = 100;
  std::uint64_t seed = 0;
  /// Grid spacing (density) or sampling step (spacing), in intrinsic units.
  double resolution = 0.05;
  SpacingConvention convention = SpacingConvention::Wavelength;
  ConstantMode mode = ConstantMode::Chi;
  /// Relative bound; the effective tolerance is max(relative, 4 SE).
  double relative_tolerance = 0.03;
  /// Number of replications (from index 0) that also run the grid-refinement check.
  int refinement_checks = 1;
  int workers = 1;
  // Covariance experiments.
  int probe_count = 20;
  double probe_max_distance = 0.0;  // 0: two wavelengths, clipped to the domain
  double covariance_floor = 0.02;
  // Matrix oracle.
  int matrix_n = 2;
  int matrix_k = 2;
  long long samples = 100000;
};

void validate(const ExperimentConfig& c);

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double standard_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Mean, standard error and a two-sided 95% Student-t confidence interval.
Summary summarize(std::span<const double> values);

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<double> values;  // per replication (or per probe for covariance)
  Summary summary;
  nlohmann::json predictions;
  nlohmann::json details;      // kind-specific measured quantities
  double measured_constant = 0.0;
  double measured_constant_se = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool refinement_flag = false;
  double wall_clock_seconds = 0.0;
};

/// Runs fn(0..count-1) on up to `workers` threads; results are stored by index.
std::vector<double> parallel_replications(int count, int workers, const std::function<double(int)>& fn);

ExperimentReport run_spacing(const ExperimentConfig& config);
ExperimentReport run_density(const ExperimentConfig& config);
ExperimentReport run_covariance(const ExperimentConfig& config);
ExperimentReport run_matrix_oracle(const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config);

struct UniversalityReport {
  std::vector<ExperimentReport> members;
  double common_target = 0.0;
  bool cis_overlap = false;
  bool pass = false;
};

/// Density experiments on several geometries with matching dim_v.
UniversalityReport run_universality(const std::vector<ExperimentConfig>& configs);

nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const nlohmann::json& j);
/// Canonical report JSON. Timing is excluded unless asked for, so that equal
/// configs give byte-identical documents.
nlohmann::json to_json(const ExperimentReport& r, bool include_timing = false);
nlohmann::json to_json(const UniversalityReport& r, bool include_timing = false);

}  // namespace nodalab
