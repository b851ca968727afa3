#include "nodalab/harness.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <limits>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "nodalab/errors.hpp"
#include "nodalab/rng.hpp"
#include "nodalab/zeroset.hpp"

namespace nodalab {

namespace {

constexpr double kPi = std::numbers::pi;

double t_quantile_975(std::size_t df) {
  static constexpr std::array<double, 30> table{
      12.706205, 4.302653, 3.182446, 2.776445, 2.570582, 2.446912, 2.364624, 2.306004, 2.262157, 2.228139,
      2.200985,  2.178813, 2.160369, 2.144787, 2.131450, 2.119905, 2.109816, 2.100922, 2.093024, 2.085963,
      2.079614,  2.073873, 2.068658, 2.063899, 2.059539, 2.055529, 2.051831, 2.048407, 2.045230, 2.042272};
  if (df == 0) return std::numeric_limits<double>::infinity();
  if (df <= table.size()) return table[df - 1];
  const double d = static_cast<double>(df);
  return 1.959964 + 2.372 / d + 2.823 / (d * d);
}

template <class T>
std::vector<T> parallel_map(int count, int workers, const std::function<T(int)>& fn) {
  std::vector<T> out(static_cast<std::size_t>(count));
  workers = std::clamp(workers, 1, std::max(count, 1));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          out[static_cast<std::size_t>(i)] = fn(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

struct Replication {
  double value = 0.0;
  bool checked = false;
  bool flag = false;
  int newton_failures = 0;
  int fallback_cells = 0;
  int perturbed = 0;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double effective_tolerance(double relative, double se_relative) { return std::max(relative, 4.0 * se_relative); }

Point probe_base(const FieldSpec& spec) {
  switch (spec.geometry.kind) {
    case GeometryKind::Line1: return Point::line(0.37);
    case GeometryKind::Plane2: return Point::plane(0.3, -0.2);
    case GeometryKind::Space3: return Point::space(0.3, -0.2, 0.1);
    case GeometryKind::Sphere2: return Point::sphere(1.0, 0.5);
    case GeometryKind::Hyperbolic2: return Point::disk(std::tanh(0.25 * spec.r_max));
  }
  return {};
}

Tangent probe_direction(const FieldSpec& spec) {
  switch (spec.geometry.kind) {
    case GeometryKind::Line1: return {1.0, 0.0, 0.0};
    case GeometryKind::Space3: {
      const double n = std::sqrt(1.0 + 4.0 + 4.0);
      return {1.0 / n, 2.0 / n, -2.0 / n};
    }
    case GeometryKind::Hyperbolic2: return {-1.0, 0.0, 0.0};
    default: return {std::cos(0.7), std::sin(0.7), 0.0};
  }
}

nlohmann::json summary_json(const Summary& s) {
  return {{"n", s.n}, {"mean", s.mean}, {"standard_error", s.standard_error}, {"ci95", {s.ci_low, s.ci_high}}};
}

nlohmann::json spectrum_json(const SpectralMeasure& m) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : m.atoms) atoms.push_back({{"param", a.point.param}, {"weight", a.weight}});
  return {{"geometry", std::string(to_string(m.kind))}, {"atoms", atoms}};
}

}  // namespace

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Spacing: return "spacing";
    case ExperimentKind::Density: return "density";
    case ExperimentKind::Covariance: return "covariance";
    case ExperimentKind::MatrixOracle: return "matrix_oracle";
  }
  return "?";
}

ExperimentKind parse_experiment(std::string_view s) {
  if (s == "spacing") return ExperimentKind::Spacing;
  if (s == "density") return ExperimentKind::Density;
  if (s == "covariance") return ExperimentKind::Covariance;
  if (s == "matrix_oracle" || s == "matrix") return ExperimentKind::MatrixOracle;
  throw ConfigError("unknown experiment kind '" + std::string(s) + "'");
}

void validate(const ExperimentConfig& c) {
  if (c.kind != ExperimentKind::MatrixOracle) {
    validate(c.field);
    if (c.replications < 2) throw ConfigError("replication count must be at least 2");
  }
  if (c.workers < 1) throw ConfigError("workers must be >= 1");
  if (!(c.relative_tolerance >= 0.0)) throw ConfigError("relative tolerance must be non-negative");
  switch (c.kind) {
    case ExperimentKind::Spacing:
      if (!(c.resolution > 0.0)) throw ConfigError("sampling step must be positive");
      if (!(c.segment.length > 0.0)) throw ConfigError("segment length must be positive");
      break;
    case ExperimentKind::Density:
      if (!(c.resolution > 0.0)) throw ConfigError("grid resolution must be positive");
      validate_region(c.field.geometry, c.region);
      break;
    case ExperimentKind::Covariance:
      if (c.replications < 100) throw ConfigError("covariance experiments need at least 100 replications");
      if (c.probe_count < 1) throw ConfigError("probe count must be positive");
      break;
    case ExperimentKind::MatrixOracle:
      if (c.matrix_k < 1 || c.matrix_k > c.matrix_n || c.matrix_n > 4) {
        throw ConfigError("matrix oracle needs 1 <= k <= n <= 4");
      }
      if (c.samples < 100000) throw ConfigError("matrix oracle needs at least 1e5 samples");
      break;
  }
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.n = values.size();
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n < 2) {
    s.ci_low = s.ci_high = s.mean;
    return s;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  const double sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  s.standard_error = sd / std::sqrt(static_cast<double>(s.n));
  const double half = t_quantile_975(s.n - 1) * s.standard_error;
  s.ci_low = s.mean - half;
  s.ci_high = s.mean + half;
  return s;
}

std::vector<double> parallel_replications(int count, int workers, const std::function<double(int)>& fn) {
  return parallel_map<double>(count, workers, fn);
}

ExperimentReport run_spacing(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  validate(config);
  if (config.kind != ExperimentKind::Spacing) throw ConfigError("run_spacing needs a spacing config");
  const FieldModel model(config.field);
  const auto reps = parallel_map<Replication>(config.replications, config.workers, [&](int r) {
    const Realization real = model.sample({config.seed, static_cast<std::uint64_t>(r)});
    ZeroSetOptions opts;
    opts.check_refinement = r < config.refinement_checks;
    const ZeroSetEstimate est = count_level_crossings(real, 0, config.segment, 0.0, config.resolution, opts);
    return Replication{est.value, est.refinement_checked, est.refinement_flag, 0, 0, est.perturbed_nodes};
  });

  ExperimentReport rep;
  rep.config = config;
  int perturbed = 0;
  for (const auto& r : reps) {
    rep.values.push_back(r.value);
    rep.refinement_flag = rep.refinement_flag || r.flag;
    perturbed += r.perturbed;
  }
  rep.summary = summarize(rep.values);
  const double len = config.segment.length;
  const PredictionReport pred = predict(config.field, len);
  rep.predictions = to_json(pred);
  rep.predictions["crossing_density"] = rice_level_density(0.0, pred.kappa2);

  const double mean = rep.summary.mean;
  const double measured_spacing = mean > 0.0 ? len / mean : std::numeric_limits<double>::infinity();
  const double spacing_se = mean > 0.0 ? len * rep.summary.standard_error / (mean * mean) : 0.0;
  rep.measured_constant = measured_spacing / pred.spacing_ricedef;
  rep.measured_constant_se = spacing_se / pred.spacing_ricedef;
  rep.target = 1.0;
  rep.tolerance = effective_tolerance(config.relative_tolerance, rep.measured_constant_se);
  rep.pass = std::abs(rep.measured_constant - rep.target) <= rep.tolerance;
  rep.details = {{"segment_length", len},
                 {"mean_crossings", mean},
                 {"crossing_density", mean / len},
                 {"spacing_measured", measured_spacing},
                 {"spacing_measured_se", spacing_se},
                 {"spacing_ricedef", pred.spacing_ricedef},
                 {"spacing_wavelength", pred.spacing_wavelength},
                 {"spacing_literal_formula", pred.literal_spacing},
                 {"relative_error_ricedef", measured_spacing / pred.spacing_ricedef - 1.0},
                 {"relative_error_wavelength", measured_spacing / pred.spacing_wavelength - 1.0},
                 {"density_times_cell", (mean / len) * spacing(config.field, config.convention)},
                 {"perturbed_nodes", perturbed}};
  rep.wall_clock_seconds = seconds_since(start);
  return rep;
}

ExperimentReport run_density(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  validate(config);
  if (config.kind != ExperimentKind::Density) throw ConfigError("run_density needs a density config");
  const FieldSpec& spec = config.field;
  const int dx = spec.geometry.dim_x;
  const bool points = spec.dim_v == dx;
  if (!points && !(spec.dim_v == 1 && dx == 2)) {
    throw DomainError("density experiments support (dim_x, dim_v) in {(2,1), (2,2), (3,3)}");
  }
  if (points && dx < 2) throw DomainError("density experiments need dim_x >= 2");

  const FieldModel model(spec);
  const RegionGrid grid = grid_region(spec.geometry, config.region, config.resolution);
  const double vol = region_volume(spec.geometry, config.region);

  const auto reps = parallel_map<Replication>(config.replications, config.workers, [&](int r) {
    const Realization real = model.sample({config.seed, static_cast<std::uint64_t>(r)});
    ZeroSetOptions opts;
    opts.check_refinement = r < config.refinement_checks;
    const ZeroSetEstimate est = points ? count_point_zeros(real, grid, opts) : nodal_length(real, 0, grid, opts);
    return Replication{est.value, est.refinement_checked, est.refinement_flag, est.newton_failures, est.fallback_cells,
                       0};
  });

  ExperimentReport rep;
  rep.config = config;
  int newton_failures = 0;
  int fallback = 0;
  nlohmann::json refinement = nlohmann::json::array();
  for (std::size_t i = 0; i < reps.size(); ++i) {
    rep.values.push_back(reps[i].value);
    rep.refinement_flag = rep.refinement_flag || reps[i].flag;
    newton_failures += reps[i].newton_failures;
    fallback += reps[i].fallback_cells;
    if (reps[i].checked) refinement.push_back({{"replication", i}, {"flag", reps[i].flag}});
  }
  rep.summary = summarize(rep.values);
  const PredictionReport pred = predict(spec, vol);
  rep.predictions = to_json(pred);

  const double cell = cell_volume(spec, config.convention);
  rep.measured_constant = rep.summary.mean / vol * cell;
  rep.measured_constant_se = rep.summary.standard_error / vol * cell;
  rep.target = predicted_constant(dx, spec.dim_v, config.mode, config.convention);
  const double se_rel = rep.measured_constant_se / rep.target;
  rep.tolerance = effective_tolerance(config.relative_tolerance, se_rel);
  rep.pass = std::abs(rep.measured_constant / rep.target - 1.0) <= rep.tolerance;
  rep.details = {{"measure", points ? "point_count" : "nodal_length"},
                 {"region_volume", vol},
                 {"grid_spacing", grid.spacing},
                 {"grid_cells", grid.cell_count()},
                 {"resolved_waves", model.resolved_waves()},
                 {"mean_measure", rep.summary.mean},
                 {"density", rep.summary.mean / vol},
                 {"constant_ci95", {rep.summary.ci_low / vol * cell, rep.summary.ci_high / vol * cell}},
                 {"constant_vs_paper", rep.measured_constant / pred.constant_paper - 1.0},
                 {"constant_vs_chi", rep.measured_constant / predicted_constant(dx, spec.dim_v, ConstantMode::Chi,
                                                                                config.convention) - 1.0},
                 {"newton_failures", newton_failures},
                 {"fallback_cells", fallback},
                 {"refinement_checks", refinement}};
  rep.wall_clock_seconds = seconds_since(start);
  return rep;
}

ExperimentReport run_covariance(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  validate(config);
  const FieldSpec& spec = config.field;
  const GeometryDescriptor& g = spec.geometry;
  const FieldModel model(spec);

  double reach = config.probe_max_distance;
  if (reach <= 0.0) reach = 2.0 * spacing(spec, SpacingConvention::Wavelength);
  if (g.kind == GeometryKind::Sphere2) reach = std::min(reach, kPi);
  if (g.kind == GeometryKind::Hyperbolic2) reach = std::min(reach, 1.5 * spec.r_max);

  const Point base = probe_base(spec);
  const GeodesicSegment ray{base, probe_direction(spec), reach};
  std::vector<Point> partners;
  for (int i = 1; i <= config.probe_count; ++i) {
    partners.push_back(geodesic_point(g, ray, reach * i / config.probe_count));
  }

  const auto products = parallel_map<std::vector<double>>(config.replications, config.workers, [&](int r) {
    const Realization real = model.sample({config.seed, static_cast<std::uint64_t>(r)});
    const double v0 = real.value(0, base);
    std::vector<double> out;
    out.reserve(partners.size());
    for (const Point& q : partners) out.push_back(v0 * real.value(0, q));
    return out;
  });

  ExperimentReport rep;
  rep.config = config;
  rep.pass = true;
  nlohmann::json probes = nlohmann::json::array();
  double worst = 0.0;
  std::vector<double> column(products.size());
  for (std::size_t i = 0; i < partners.size(); ++i) {
    for (std::size_t r = 0; r < products.size(); ++r) column[r] = products[r][i];
    const Summary s = summarize(column);
    const double d = distance(g, base, partners[i]);
    const double analytic = mixture_covariance(spec.spectrum, d);
    const double tol = std::max(config.covariance_floor, 4.0 * s.standard_error);
    const bool ok = std::abs(s.mean - analytic) <= tol;
    rep.pass = rep.pass && ok;
    worst = std::max(worst, std::abs(s.mean - analytic));
    rep.values.push_back(s.mean);
    probes.push_back({{"distance", d},
                      {"empirical", s.mean},
                      {"standard_error", s.standard_error},
                      {"analytic", analytic},
                      {"tolerance", tol},
                      {"pass", ok}});
  }
  rep.summary = summarize(rep.values);
  rep.predictions = to_json(predict(spec, 0.0));
  rep.measured_constant = worst;
  rep.target = 0.0;
  rep.tolerance = config.covariance_floor;
  rep.details = {{"probes", probes}, {"resolved_waves", model.resolved_waves()}, {"max_abs_deviation", worst}};
  rep.wall_clock_seconds = seconds_since(start);
  return rep;
}

ExperimentReport run_matrix_oracle(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  validate(config);
  const int n = config.matrix_n;
  const int k = config.matrix_k;
  constexpr long long kChunk = 10000;
  const int chunks = static_cast<int>((config.samples + kChunk - 1) / kChunk);

  struct Moments {
    double sum = 0.0;
    double sum2 = 0.0;
    long long count = 0;
  };
  const auto parts = parallel_map<Moments>(chunks, config.workers, [&](int c) {
    Rng rng({config.seed, static_cast<std::uint64_t>(c)});
    const long long begin = static_cast<long long>(c) * kChunk;
    const long long end = std::min(config.samples, begin + kChunk);
    Eigen::MatrixXd m(k, n);
    Moments out;
    for (long long s = begin; s < end; ++s) {
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = rng.normal();
      }
      const double vol = std::sqrt(std::max(0.0, (m * m.transpose()).determinant()));
      out.sum += vol;
      out.sum2 += vol * vol;
      ++out.count;
    }
    return out;
  });

  ExperimentReport rep;
  rep.config = config;
  Moments total;
  for (const auto& p : parts) {
    total.sum += p.sum;
    total.sum2 += p.sum2;
    total.count += p.count;
    rep.values.push_back(p.sum / static_cast<double>(p.count));
  }
  const double cnt = static_cast<double>(total.count);
  Summary s;
  s.n = static_cast<std::size_t>(total.count);
  s.mean = total.sum / cnt;
  s.standard_error = std::sqrt(std::max(0.0, (total.sum2 - cnt * s.mean * s.mean) / (cnt - 1.0)) / cnt);
  s.ci_low = s.mean - 1.959964 * s.standard_error;
  s.ci_high = s.mean + 1.959964 * s.standard_error;
  rep.summary = s;

  const std::vector<double> ones(static_cast<std::size_t>(k), 1.0);
  const double paper = expected_parallelotope_volume(n, k, ones, ConstantMode::Paper);
  const double chi = expected_parallelotope_volume(n, k, ones, ConstantMode::Chi);
  rep.predictions = {{"paper", paper}, {"chi", chi}};
  rep.measured_constant = s.mean;
  rep.measured_constant_se = s.standard_error;
  rep.target = config.mode == ConstantMode::Paper ? paper : chi;
  rep.tolerance = effective_tolerance(config.relative_tolerance, s.standard_error / rep.target);
  rep.pass = std::abs(s.mean / rep.target - 1.0) <= rep.tolerance;
  const auto within = [&](double v) { return std::abs(s.mean / v - 1.0) <= effective_tolerance(config.relative_tolerance, s.standard_error / v); };
  rep.details = {{"n", n},
                 {"k", k},
                 {"samples", total.count},
                 {"chi_consistent", within(chi)},
                 {"paper_consistent", within(paper)},
                 {"relative_error_chi", s.mean / chi - 1.0},
                 {"relative_error_paper", s.mean / paper - 1.0}};
  rep.wall_clock_seconds = seconds_since(start);
  return rep;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::Spacing: return run_spacing(config);
    case ExperimentKind::Density: return run_density(config);
    case ExperimentKind::Covariance: return run_covariance(config);
    case ExperimentKind::MatrixOracle: return run_matrix_oracle(config);
  }
  throw ConfigError("unknown experiment kind");
}

UniversalityReport run_universality(const std::vector<ExperimentConfig>& configs) {
  if (configs.empty()) throw ConfigError("universality needs at least one configuration");
  const int dim_v = configs.front().field.dim_v;
  for (const auto& c : configs) {
    if (c.kind != ExperimentKind::Density) throw ConfigError("universality members must be density experiments");
    if (c.field.dim_v != dim_v) throw DomainError("universality members must share dim_v");
  }
  UniversalityReport out;
  out.pass = true;
  for (const auto& c : configs) {
    out.members.push_back(run_density(c));
    out.pass = out.pass && out.members.back().pass;
  }
  out.common_target = out.members.front().target;
  out.cis_overlap = true;
  for (std::size_t i = 0; i < out.members.size(); ++i) {
    for (std::size_t j = i + 1; j < out.members.size(); ++j) {
      const auto& a = out.members[i].details["constant_ci95"];
      const auto& b = out.members[j].details["constant_ci95"];
      const bool overlap = a[0].get<double>() <= b[1].get<double>() && b[0].get<double>() <= a[1].get<double>();
      out.cis_overlap = out.cis_overlap && overlap;
    }
  }
  out.pass = out.pass && out.cis_overlap;
  return out;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(c.kind));
  j["seed"] = c.seed;
  j["replications"] = c.replications;
  j["relative_tolerance"] = c.relative_tolerance;
  j["mode"] = std::string(to_string(c.mode));
  j["convention"] = std::string(to_string(c.convention));
  if (c.kind == ExperimentKind::MatrixOracle) {
    j["n"] = c.matrix_n;
    j["k"] = c.matrix_k;
    j["samples"] = c.samples;
    return j;
  }
  j["field"] = {{"geometry", std::string(to_string(c.field.geometry.kind))},
                {"spectrum", spectrum_json(c.field.spectrum)},
                {"dim_v", c.field.dim_v},
                {"n_waves", c.field.n_waves},
                {"r_max", c.field.r_max},
                {"component_scales", c.field.component_scales}};
  j["resolution"] = c.resolution;
  j["refinement_checks"] = c.refinement_checks;
  if (c.kind == ExperimentKind::Spacing) {
    j["segment"] = {{"base", c.segment.base.c}, {"direction", c.segment.direction}, {"length", c.segment.length}};
  }
  if (c.kind == ExperimentKind::Density) {
    if (c.region.shape == Region::Shape::Ball) {
      j["region"] = {{"shape", "ball"}, {"radius", c.region.radius}};
    } else {
      j["region"] = {{"shape", "box"}, {"lo", c.region.lo}, {"hi", c.region.hi}};
    }
  }
  if (c.kind == ExperimentKind::Covariance) {
    j["probe_count"] = c.probe_count;
    j["probe_max_distance"] = c.probe_max_distance;
    j["covariance_floor"] = c.covariance_floor;
  }
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  try {
    ExperimentConfig c;
    c.kind = parse_experiment(j.at("kind").get<std::string>());
    c.seed = j.value("seed", std::uint64_t{0});
    c.workers = j.value("workers", 1);
    c.replications = j.value("replications", c.replications);
    c.relative_tolerance = j.value("relative_tolerance", c.relative_tolerance);
    c.mode = parse_mode(j.value("mode", std::string("chi")));
    c.convention = parse_convention(j.value("convention", std::string("wavelength")));
    if (c.kind == ExperimentKind::MatrixOracle) {
      c.matrix_n = j.value("n", 2);
      c.matrix_k = j.value("k", 2);
      c.samples = j.value("samples", 100000LL);
      return c;
    }
    const auto& f = j.at("field");
    const GeometryKind kind = parse_geometry(f.at("geometry").get<std::string>());
    c.field.geometry = describe(kind);
    const auto& sp = f.at("spectrum");
    if (sp.contains("geometry") && parse_geometry(sp.at("geometry").get<std::string>()) != kind) {
      throw ConfigError("spectrum geometry does not match field geometry");
    }
    std::vector<std::pair<double, double>> atoms;
    for (const auto& a : sp.at("atoms")) atoms.emplace_back(a.at("param").get<double>(), a.value("weight", 1.0));
    c.field.spectrum = SpectralMeasure::mixture(kind, atoms);
    c.field.dim_v = f.value("dim_v", 1);
    c.field.n_waves = f.value("n_waves", 0);
    c.field.r_max = f.value("r_max", 2.0);
    c.field.component_scales = f.value("component_scales", std::vector<double>{});
    c.resolution = j.value("resolution", c.resolution);
    c.refinement_checks = j.value("refinement_checks", c.refinement_checks);
    if (j.contains("segment")) {
      const auto& s = j.at("segment");
      c.segment.base = Point{s.at("base").get<std::array<double, 3>>()};
      c.segment.direction = s.at("direction").get<std::array<double, 3>>();
      c.segment.length = s.at("length").get<double>();
    }
    if (j.contains("region")) {
      const auto& r = j.at("region");
      if (r.at("shape").get<std::string>() == "ball") {
        c.region = Region::ball(r.at("radius").get<double>());
      } else {
        c.region = Region::box(r.at("lo").get<std::array<double, 3>>(), r.at("hi").get<std::array<double, 3>>());
      }
    }
    c.probe_count = j.value("probe_count", c.probe_count);
    c.probe_max_distance = j.value("probe_max_distance", c.probe_max_distance);
    c.covariance_floor = j.value("covariance_floor", c.covariance_floor);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
}

nlohmann::json to_json(const ExperimentReport& r, bool include_timing) {
  nlohmann::json j{{"config", config_to_json(r.config)},
                   {"values", r.values},
                   {"summary", summary_json(r.summary)},
                   {"predictions", r.predictions},
                   {"details", r.details},
                   {"measured_constant", r.measured_constant},
                   {"measured_constant_se", r.measured_constant_se},
                   {"target", r.target},
                   {"tolerance", r.tolerance},
                   {"pass", r.pass},
                   {"refinement_flag", r.refinement_flag}};
  if (include_timing) j["wall_clock_seconds"] = r.wall_clock_seconds;
  return j;
}

nlohmann::json to_json(const UniversalityReport& r, bool include_timing) {
  nlohmann::json members = nlohmann::json::array();
  nlohmann::json table = nlohmann::json::array();
  for (const auto& m : r.members) {
    members.push_back(to_json(m, include_timing));
    table.push_back({{"geometry", std::string(to_string(m.config.field.geometry.kind))},
                     {"constant", m.measured_constant},
                     {"standard_error", m.measured_constant_se},
                     {"ci95", m.details.at("constant_ci95")},
                     {"paper_constant", m.predictions.at("constant").at("paper")},
                     {"pass", m.pass}});
  }
  return {{"members", members},
          {"table", table},
          {"common_target", r.common_target},
          {"cis_overlap", r.cis_overlap},
          {"pass", r.pass}};
}

}  // namespace nodalab
