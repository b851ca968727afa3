#include "nodalab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include "nodalab/errors.hpp"
#include "nodalab/harness.hpp"
#include "nodalab/io.hpp"
#include "nodalab/rice.hpp"
#include "nodalab/sampler.hpp"
#include "nodalab/zeroset.hpp"

namespace nodalab {

namespace {

namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

struct Options {
  std::string config;
  std::string out = ".";
  std::string geometry;
  std::string spectrum;
  int dimv = 1;
  std::string scales;
  int waves = 0;
  double rmax = 2.0;
  std::uint64_t seed = 0;
  double grid = 0.0;     // node spacing in wavelengths; 0 picks the command default
  double extent = 0.0;   // region size in wavelengths; 0 picks the geometry default
  double radius = 0.0;   // disk ball radius; 0 means r_max
  int reps = 0;
  int workers = 1;
  std::string mode = "chi";
  std::string convention = "wavelength";
  double tol = -1.0;
  int refine = 1;
  int width = 512;
  int height = 0;
  int probes = 20;
  double floor = 0.02;
  std::string target;
  int n = 2;
  int k = 2;
  long long samples = 100000;
  bool timing = false;
  bool collect = false;
};

double parse_number(const std::string& s) {
  std::string t = s;
  double factor = 1.0;
  if (t.size() >= 2 && t.substr(t.size() - 2) == "pi") {
    factor = kPi;
    t = t.substr(0, t.size() - 2);
    if (t.empty()) return factor;
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw ConfigError("bad number '" + s + "'");
    return v * factor;
  } catch (const std::logic_error&) {
    throw ConfigError("bad number '" + s + "'");
  }
}

GeometryKind geometry_or(const Options& o, GeometryKind fallback) {
  return o.geometry.empty() ? fallback : parse_geometry(o.geometry);
}

double default_param(GeometryKind g) {
  switch (g) {
    case GeometryKind::Line1: return 1.0;
    case GeometryKind::Plane2:
    case GeometryKind::Space3: return 2.0 * kPi;
    case GeometryKind::Sphere2: return 10.0;
    case GeometryKind::Hyperbolic2: return 8.0;
  }
  return 1.0;
}

SpectralMeasure parse_spectrum(const std::string& text, GeometryKind g) {
  if (text.empty()) return SpectralMeasure::monochromatic(g, default_param(g));
  if (text.rfind("mono:", 0) == 0) return SpectralMeasure::monochromatic(g, parse_number(text.substr(5)));
  if (text.rfind("mixture:", 0) == 0) {
    const nlohmann::json j = load_json_file(text.substr(8));
    if (j.is_object() && j.contains("geometry") && parse_geometry(j.at("geometry").get<std::string>()) != g) {
      throw ConfigError("mixture file geometry does not match --geometry");
    }
    const nlohmann::json& atoms = j.is_array() ? j : j.at("atoms");
    std::vector<std::pair<double, double>> pairs;
    try {
      for (const auto& a : atoms) {
        if (a.is_array()) {
          pairs.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
        } else {
          pairs.emplace_back(a.at("param").get<double>(), a.value("weight", 1.0));
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("malformed mixture file: ") + e.what());
    }
    return SpectralMeasure::mixture(g, pairs);
  }
  throw ConfigError("spectrum must be mono:<param> or mixture:<file>");
}

FieldSpec build_field(const Options& o, GeometryKind g, int dimv) {
  FieldSpec f;
  f.geometry = describe(g);
  f.spectrum = parse_spectrum(o.spectrum, g);
  f.dim_v = dimv;
  f.n_waves = o.waves;
  f.r_max = o.rmax;
  if (!o.scales.empty()) {
    std::stringstream ss(o.scales);
    std::string item;
    while (std::getline(ss, item, ',')) f.component_scales.push_back(parse_number(item));
  }
  validate(f);
  return f;
}

double wavelength(const FieldSpec& f) { return spacing(f, SpacingConvention::Wavelength); }

Region default_region(const Options& o, const FieldSpec& f, double plane_extent, double space_extent) {
  const double lam = wavelength(f);
  switch (f.geometry.kind) {
    case GeometryKind::Plane2: {
      const double e = (o.extent > 0 ? o.extent : plane_extent) * lam;
      return Region::box({0.0, 0.0, 0.0}, {e, e, 0.0});
    }
    case GeometryKind::Space3: {
      const double e = (o.extent > 0 ? o.extent : space_extent) * lam;
      return Region::box({0.0, 0.0, 0.0}, {e, e, e});
    }
    case GeometryKind::Sphere2: return Region::full_sphere();
    case GeometryKind::Hyperbolic2: return Region::ball(o.radius > 0 ? o.radius : f.r_max);
    case GeometryKind::Line1: {
      const double e = (o.extent > 0 ? o.extent : 100.0) * lam;
      return Region::box({0.0, 0.0, 0.0}, {e, 0.0, 0.0});
    }
  }
  return {};
}

GeodesicSegment default_segment(const Options& o, const FieldSpec& f) {
  const double lam = wavelength(f);
  const double len = (o.extent > 0 ? o.extent : 100.0) * lam;
  switch (f.geometry.kind) {
    case GeometryKind::Line1: return {Point::line(0.0), {1.0, 0.0, 0.0}, len};
    case GeometryKind::Plane2: return {Point::plane(0.0, 0.0), {std::cos(0.3), std::sin(0.3), 0.0}, len};
    case GeometryKind::Space3: {
      const double n = std::sqrt(14.0);
      return {Point::space(0.0, 0.0, 0.0), {1.0 / n, 2.0 / n, 3.0 / n}, len};
    }
    case GeometryKind::Sphere2: return {Point::sphere(0.5 * kPi, 0.0), {0.0, 1.0, 0.0}, len};
    case GeometryKind::Hyperbolic2: {
      // A diameter of the validity ball.
      const double r = f.r_max * (1.0 - 1e-9);
      return {Point::disk(-std::tanh(0.5 * r)), {1.0, 0.0, 0.0}, 2.0 * r};
    }
  }
  return {};
}

void apply_common(const Options& o, ExperimentConfig& c) {
  c.seed = o.seed;
  c.workers = o.workers;
  c.mode = parse_mode(o.mode);
  c.convention = parse_convention(o.convention);
  c.refinement_checks = o.refine;
  if (o.tol >= 0.0) c.relative_tolerance = o.tol;
}

ExperimentConfig spacing_config(const Options& o, const FieldSpec& f, int default_reps) {
  ExperimentConfig c;
  c.kind = ExperimentKind::Spacing;
  c.field = f;
  c.segment = default_segment(o, f);
  c.replications = o.reps > 0 ? o.reps : default_reps;
  c.resolution = (o.grid > 0 ? o.grid : 0.02) * wavelength(f);
  c.relative_tolerance = 0.02;
  apply_common(o, c);
  return c;
}

ExperimentConfig density_config(const Options& o, const FieldSpec& f, int default_reps) {
  ExperimentConfig c;
  c.kind = ExperimentKind::Density;
  c.field = f;
  const bool three = f.geometry.kind == GeometryKind::Space3;
  c.region = default_region(o, f, 10.0, 4.0);
  c.replications = o.reps > 0 ? o.reps : default_reps;
  c.resolution = (o.grid > 0 ? o.grid : (three ? 0.1 : 0.06)) * wavelength(f);
  c.relative_tolerance = three ? 0.05 : 0.03;
  apply_common(o, c);
  return c;
}

ExperimentConfig covariance_config(const Options& o, const FieldSpec& f) {
  ExperimentConfig c;
  c.kind = ExperimentKind::Covariance;
  c.field = f;
  c.replications = o.reps > 0 ? o.reps : 2000;
  c.probe_count = o.probes;
  c.covariance_floor = o.floor;
  c.probe_max_distance = o.extent > 0 ? o.extent * wavelength(f) : 0.0;
  apply_common(o, c);
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  f << text;
}

nlohmann::json cli_echo(const std::string& command, const Options& o) {
  // Effective flag values; output location and worker count do not affect results.
  return {{"command", command},    {"target", o.target},   {"geometry", o.geometry}, {"spectrum", o.spectrum},
          {"dimv", o.dimv},        {"scales", o.scales},   {"waves", o.waves},       {"rmax", o.rmax},
          {"seed", o.seed},        {"grid", o.grid},       {"extent", o.extent},     {"radius", o.radius},
          {"reps", o.reps},        {"mode", o.mode},       {"convention", o.convention},
          {"tol", o.tol},          {"refine", o.refine},   {"probes", o.probes},     {"floor", o.floor},
          {"n", o.n},              {"k", o.k},             {"samples", o.samples}};
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s << std::setprecision(prec) << v;
  return s.str();
}

void print_report(std::ostream& out, const std::string& label, const ExperimentReport& r) {
  out << label << ": constant " << fmt(r.measured_constant, 6) << " +- " << fmt(r.measured_constant_se, 3)
      << "  target " << fmt(r.target, 6) << "  tolerance " << fmt(r.tolerance, 3) << "  "
      << (r.pass ? "PASS" : "FAIL") << (r.refinement_flag ? "  (refinement flag)" : "") << "\n";
}

int finish(const fs::path& path, nlohmann::json report, const Options& o, const std::string& command, bool pass) {
  report["cli"] = cli_echo(command, o);
  write_text(path, canonical_json(report));
  return pass ? 0 : 1;
}

int cmd_field(const Options& o, std::ostream& out) {
  const GeometryKind g = geometry_or(o, GeometryKind::Plane2);
  const FieldSpec spec = build_field(o, g, o.dimv);
  const FieldModel model(spec);
  const Realization field = model.sample({o.seed, 0});
  const Region region = default_region(o, spec, 5.0, 2.0);
  const double res = (o.grid > 0 ? o.grid : 0.05) * wavelength(spec);
  const fs::path dir(o.out);
  fs::create_directories(dir);

  nlohmann::json meta;
  meta["field"] = config_to_json([&] {
    ExperimentConfig c;
    c.kind = ExperimentKind::Density;
    c.field = spec;
    c.region = region;
    c.resolution = res;
    c.seed = o.seed;
    return c;
  }());
  meta["resolved_waves"] = model.resolved_waves();
  meta["cli"] = cli_echo("field", o);
  out << "field: " << to_string(g) << ", dim_v " << spec.dim_v << ", wavelength " << fmt(wavelength(spec)) << "\n";
  if (g == GeometryKind::Hyperbolic2) {
    nlohmann::json cert = nlohmann::json::array();
    for (const auto& a : spec.spectrum.atoms) {
      const double err = hyperbolic_truncation_error(a.point.param, spec.r_max, model.resolved_waves());
      cert.push_back({{"lambda", a.point.param}, {"waves", model.resolved_waves()}, {"error", err}});
      out << "covariance self-check: lambda " << a.point.param << ", " << model.resolved_waves()
          << " boundary waves, max error " << fmt(err, 3) << " (tolerance " << kHyperbolicCertificateTolerance
          << ")\n";
    }
    meta["certificate"] = cert;
  }

  const RegionGrid grid = grid_region(spec.geometry, region, res);
  {
    std::ostringstream csv;
    write_grid_csv(csv, field, grid);
    write_text(dir / "field.csv", csv.str());
  }
  nlohmann::json rasters = nlohmann::json::array();
  if (g != GeometryKind::Line1) {
    int h = o.height;
    if (h <= 0) h = g == GeometryKind::Sphere2 ? std::max(1, o.width / 2) : o.width;
    for (int c = 0; c < spec.dim_v; ++c) {
      const Raster img = render(field, c, region, o.width, h);
      std::ostringstream pgm;
      write_pgm(pgm, img);
      const std::string name = "field_" + std::to_string(c) + ".pgm";
      write_text(dir / name, pgm.str());
      rasters.push_back(name);
    }
  }
  meta["files"] = {{"csv", "field.csv"}, {"rasters", rasters}};
  meta["grid_nodes"] = grid.nodes.size();
  write_text(dir / "field.json", canonical_json(meta));
  out << "wrote " << (dir / "field.csv").string() << " (" << grid.nodes.size() << " nodes)";
  if (!rasters.empty()) out << " and " << rasters.size() << " raster(s)";
  out << "\n";
  return 0;
}

int cmd_spacing(const Options& o, std::ostream& out) {
  const GeometryKind g = geometry_or(o, GeometryKind::Line1);
  const ExperimentConfig c = spacing_config(o, build_field(o, g, 1), 500);
  const ExperimentReport r = run_spacing(c);
  out << "spacing: measured " << fmt(r.details["spacing_measured"].get<double>(), 6) << " +- "
      << fmt(r.details["spacing_measured_se"].get<double>(), 3) << ", Rice "
      << fmt(r.details["spacing_ricedef"].get<double>(), 6) << ", wavelength "
      << fmt(r.details["spacing_wavelength"].get<double>(), 6) << "\n";
  print_report(out, "ratio to Rice spacing", r);
  return finish(fs::path(o.out) / "spacing.json", to_json(r, o.timing), o, "spacing", r.pass);
}

int cmd_zeros(const Options& o, std::ostream& out) {
  const GeometryKind g = geometry_or(o, GeometryKind::Plane2);
  const FieldSpec f = build_field(o, g, o.dimv);
  const ExperimentConfig c = density_config(o, f, 100);
  const ExperimentReport r = run_density(c);
  nlohmann::json report = to_json(r, o.timing);
  if (o.collect) {
    const Realization field = FieldModel(f).sample({o.seed, 0});
    const RegionGrid grid = grid_region(f.geometry, c.region, c.resolution);
    ZeroSetOptions zo;
    zo.collect = true;
    zo.check_refinement = false;
    std::ostringstream csv;
    if (f.dim_v == f.geometry.dim_x) {
      const ZeroSetEstimate e = count_point_zeros(field, grid, zo);
      write_points_csv(csv, g, e.zeros);
      write_text(fs::path(o.out) / "zeros.csv", csv.str());
    } else {
      const ZeroSetEstimate e = nodal_length(field, 0, grid, zo);
      write_segments_csv(csv, g, e.segments);
      write_text(fs::path(o.out) / "nodal_segments.csv", csv.str());
    }
  }
  out << "zeros: mean measure " << fmt(r.summary.mean, 6) << " over " << r.summary.n << " replications\n";
  print_report(out, std::string(to_string(g)), r);
  return finish(fs::path(o.out) / "zeros.json", report, o, "zeros", r.pass);
}

int cmd_verify(const Options& o, std::ostream& out) {
  const fs::path dir(o.out);
  const std::string& t = o.target;
  if (t == "universality") {
    if (o.dimv != 1 && o.dimv != 2) throw ConfigError("universality needs --dimv 1 or 2");
    std::vector<ExperimentConfig> configs;
    const std::vector<GeometryKind> kinds = o.geometry.empty()
        ? std::vector<GeometryKind>{GeometryKind::Plane2, GeometryKind::Sphere2, GeometryKind::Hyperbolic2}
        : std::vector<GeometryKind>{parse_geometry(o.geometry)};
    for (GeometryKind g : kinds) configs.push_back(density_config(o, build_field(o, g, o.dimv), 200));
    const UniversalityReport r = run_universality(configs);
    out << "universality (dim_v " << o.dimv << "), common target " << fmt(r.common_target, 6) << "\n";
    for (const auto& m : r.members) print_report(out, "  " + std::string(to_string(m.config.field.geometry.kind)), m);
    out << "confidence intervals overlap: " << (r.cis_overlap ? "yes" : "no") << "\n"
        << (r.pass ? "PASS" : "FAIL") << "\n";
    return finish(dir / ("verify_universality_dimv" + std::to_string(o.dimv) + ".json"), to_json(r, o.timing), o,
                  "verify", r.pass);
  }
  if (t == "covariance") {
    const std::vector<GeometryKind> kinds = o.geometry.empty()
        ? std::vector<GeometryKind>{GeometryKind::Plane2, GeometryKind::Sphere2, GeometryKind::Hyperbolic2}
        : std::vector<GeometryKind>{parse_geometry(o.geometry)};
    nlohmann::json members = nlohmann::json::array();
    bool pass = true;
    for (GeometryKind g : kinds) {
      Options local = o;
      if (o.spectrum.empty() && g == GeometryKind::Sphere2) local.spectrum = "mono:20";
      const ExperimentReport r = run_covariance(covariance_config(local, build_field(local, g, 1)));
      print_report(out, "  " + std::string(to_string(g)) + " max |deviation|", r);
      members.push_back(to_json(r, o.timing));
      pass = pass && r.pass;
    }
    out << (pass ? "PASS" : "FAIL") << "\n";
    return finish(dir / "verify_covariance.json", {{"members", members}, {"pass", pass}}, o, "verify", pass);
  }
  if (t == "rice") {
    nlohmann::json members = nlohmann::json::array();
    bool pass = true;
    std::vector<std::string> spectra;
    if (!o.spectrum.empty()) {
      spectra.push_back(o.spectrum);
    } else {
      spectra = {"mono:1", ""};
    }
    for (const auto& s : spectra) {
      Options local = o;
      local.spectrum = s;
      FieldSpec f;
      if (s.empty()) {
        f = build_field(local, GeometryKind::Line1, 1);
        const std::vector<std::pair<double, double>> atoms{{1.0, 0.5}, {3.0, 0.5}};
        f.spectrum = SpectralMeasure::mixture(GeometryKind::Line1, atoms);
      } else {
        f = build_field(local, geometry_or(local, GeometryKind::Line1), 1);
      }
      const ExperimentReport r = run_spacing(spacing_config(local, f, 500));
      print_report(out, "  kappa2 " + fmt(second_moment(f)), r);
      members.push_back(to_json(r, o.timing));
      pass = pass && r.pass;
    }
    out << (pass ? "PASS" : "FAIL") << "\n";
    return finish(dir / "verify_rice.json", {{"members", members}, {"pass", pass}}, o, "verify", pass);
  }
  if (t == "counting3d") {
    const FieldSpec f = build_field(o, GeometryKind::Space3, 3);
    const ExperimentReport r = run_density(density_config(o, f, 100));
    print_report(out, "  space (3,3)", r);
    out << "  paper constant " << fmt(r.predictions["constant"]["paper"].get<double>(), 6) << ", relative gap "
        << fmt(r.details["constant_vs_paper"].get<double>(), 3) << "\n"
        << (r.pass ? "PASS" : "FAIL") << "\n";
    return finish(dir / "verify_counting3d.json", to_json(r, o.timing), o, "verify", r.pass);
  }
  throw ConfigError("unknown verify target '" + t + "' (universality, covariance, rice, counting3d)");
}

int cmd_oracle(const Options& o, std::ostream& out) {
  if (o.target != "matrix") throw ConfigError("unknown oracle '" + o.target + "' (matrix)");
  ExperimentConfig c;
  c.kind = ExperimentKind::MatrixOracle;
  c.matrix_n = o.n;
  c.matrix_k = o.k;
  c.samples = o.samples;
  c.relative_tolerance = 0.01;
  apply_common(o, c);
  const ExperimentReport r = run_matrix_oracle(c);
  out << "E sqrt det(M M^T), " << o.k << "x" << o.n << ": " << fmt(r.summary.mean, 6) << " +- "
      << fmt(r.summary.standard_error, 3) << " (chi " << fmt(r.predictions["chi"].get<double>(), 6) << ", paper "
      << fmt(r.predictions["paper"].get<double>(), 6) << ")\n";
  print_report(out, "matrix oracle", r);
  return finish(fs::path(o.out) / "oracle_matrix.json", to_json(r, o.timing), o, "oracle", r.pass);
}

// Turns a JSON config object into flag tokens; they are placed before the
// command-line flags so that the latter win.
std::vector<std::string> config_tokens(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  std::vector<std::string> out;
  for (const auto& [key, value] : j.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
    } else if (value.is_string()) {
      out.push_back(flag + "=" + value.get<std::string>());
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) joined += (joined.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
      out.push_back(flag + "=" + joined);
    } else if (value.is_number()) {
      out.push_back(flag + "=" + value.dump());
    } else {
      throw ConfigError("unsupported value for config key '" + key + "'");
    }
  }
  return out;
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  const auto tokens = config_tokens(load_json_file(path));
  std::vector<std::string> out = args;
  std::size_t pos = 0;
  while (pos < out.size() && out[pos].rfind("-", 0) == 0) ++pos;
  if (pos < out.size()) ++pos;  // after the subcommand name
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(pos), tokens.begin(), tokens.end());
  return out;
}

void add_field_flags(CLI::App* sub, Options& o) {
  sub->add_option("--geometry", o.geometry, "line|plane|space|sphere|hyperbolic");
  sub->add_option("--spectrum", o.spectrum,
                  "mono:<param> (kappa, degree l or lambda; a trailing 'pi' multiplies by pi) or mixture:<json file>");
  sub->add_option("--scales", o.scales, "comma-separated component variances beta_i (default all 1)");
  sub->add_option("--waves", o.waves, "plane waves / boundary nodes; 0 selects the default or certified count");
  sub->add_option("--rmax", o.rmax, "hyperbolic validity radius r_max (<= 4)");
  sub->add_option("--seed", o.seed, "master seed");
}

void add_run_flags(CLI::App* sub, Options& o) {
  sub->add_option("--reps", o.reps, "replications (0: command default)");
  sub->add_option("--workers", o.workers, "worker threads; results do not depend on it")->check(CLI::PositiveNumber);
  sub->add_option("--grid", o.grid, "grid spacing or sampling step in wavelengths (0: command default)");
  sub->add_option("--extent", o.extent, "region size (box edge, segment length, probe reach) in wavelengths");
  sub->add_option("--radius", o.radius, "hyperbolic ball radius (default r_max)");
  sub->add_option("--mode", o.mode, "constant mode: chi|paper");
  sub->add_option("--convention", o.convention, "spacing convention: wavelength|ricedef");
  sub->add_option("--tol", o.tol, "relative tolerance (effective bound is max(tol, 4 SE))");
  sub->add_option("--refine", o.refine, "replications that also run the grid-refinement check");
  sub->add_flag("--timing", o.timing, "include wall-clock time in the JSON report");
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"nodalab: invariant Gaussian random fields and their zero sets"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.add_option("--config", o.config, "JSON file of flag values (keys are flag names); flags override it");
  app.add_option("--out", o.out, "output directory")->capture_default_str();

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON file of flag values; flags override it");
    sub->add_option("--out", o.out, "output directory");
  };

  CLI::App* field = app.add_subcommand("field", "sample one field; write a CSV grid dump and PGM rasters");
  common(field);
  add_field_flags(field, o);
  field->add_option("--dimv", o.dimv, "number of components (1..3)");
  field->add_option("--grid", o.grid, "CSV node spacing in wavelengths (default 0.05)");
  field->add_option("--extent", o.extent, "box edge in wavelengths (plane 5, space 2)");
  field->add_option("--radius", o.radius, "hyperbolic ball radius (default r_max)");
  field->add_option("--width", o.width, "raster width in pixels")->check(CLI::PositiveNumber);
  field->add_option("--height", o.height, "raster height (default: width, half of it for the sphere)");

  CLI::App* sp = app.add_subcommand("spacing", "zero spacing along a geodesic against Rice's formula");
  common(sp);
  add_field_flags(sp, o);
  add_run_flags(sp, o);

  CLI::App* zeros = app.add_subcommand("zeros", "zero-set density (point counts or nodal length) in a region");
  common(zeros);
  add_field_flags(zeros, o);
  add_run_flags(zeros, o);
  zeros->add_option("--dimv", o.dimv, "components: dim_v == dim_x counts points, dim_v 1 measures nodal length");
  zeros->add_flag("--collect", o.collect, "also write the zeros or nodal segments of replication 0 as CSV");

  CLI::App* verify = app.add_subcommand("verify", "preset checks: universality, covariance, rice, counting3d");
  common(verify);
  verify->add_option("target", o.target, "universality|covariance|rice|counting3d")->required();
  add_field_flags(verify, o);
  add_run_flags(verify, o);
  verify->add_option("--dimv", o.dimv, "universality: 2 (point counts) or 1 (nodal length)");
  verify->add_option("--probes", o.probes, "covariance: probe distances");
  verify->add_option("--floor", o.floor, "covariance: absolute tolerance floor");

  CLI::App* oracle = app.add_subcommand("oracle", "Monte Carlo oracles");
  common(oracle);
  oracle->add_option("target", o.target, "matrix")->required();
  oracle->add_option("--n", o.n, "ambient dimension n");
  oracle->add_option("--k", o.k, "number of Gaussian vectors k");
  oracle->add_option("--samples", o.samples, "sample count (>= 1e5)");
  oracle->add_option("--mode", o.mode, "target constant: chi|paper");
  oracle->add_option("--tol", o.tol, "relative tolerance (default 0.01)");
  oracle->add_option("--seed", o.seed, "master seed");
  oracle->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  oracle->add_flag("--timing", o.timing, "include wall-clock time in the JSON report");

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  std::string command;
  for (auto* s : {field, sp, zeros, verify, oracle}) {
    if (s->parsed()) command = s->get_name();
  }
  const auto write_error = [&](const std::string& type, const std::string& message, int code,
                               const nlohmann::json& extra) {
    err << "error: " << message << "\n";
    try {
      nlohmann::json j{{"error", {{"type", type}, {"message", message}}}, {"pass", false}};
      for (const auto& [k, v] : extra.items()) j["error"][k] = v;
      j["cli"] = cli_echo(command, o);
      write_text(fs::path(o.out) / (command + "_error.json"), canonical_json(j));
    } catch (const std::exception&) {
    }
    return code;
  };
  try {
    if (command == "field") return cmd_field(o, out);
    if (command == "spacing") return cmd_spacing(o, out);
    if (command == "zeros") return cmd_zeros(o, out);
    if (command == "verify") return cmd_verify(o, out);
    if (command == "oracle") return cmd_oracle(o, out);
  } catch (const CertificationError& e) {
    return write_error("certification", e.what(), 2, {{"minimal_waves", e.minimal_waves()}});
  } catch (const ConfigError& e) {
    return write_error("config", e.what(), 2, nlohmann::json::object());
  } catch (const DomainError& e) {
    return write_error("domain", e.what(), 2, nlohmann::json::object());
  } catch (const NumericError& e) {
    return write_error("numeric", e.what(), 1, nlohmann::json::object());
  } catch (const std::exception& e) {
    return write_error("internal", e.what(), 1, nlohmann::json::object());
  }
  return 2;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace nodalab
