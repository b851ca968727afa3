#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "nodalab/cli.hpp"
#include "nodalab/errors.hpp"
#include "nodalab/io.hpp"

using namespace nodalab;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nodalab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  if (out_text) *out_text = out.str() + err.str();
  return code;
}

FieldSpec make_spec(GeometryKind k, double param, int dim_v = 1) {
  FieldSpec s;
  s.geometry = describe(k);
  s.spectrum = SpectralMeasure::monochromatic(k, param);
  s.dim_v = dim_v;
  return s;
}

}  // namespace

TEST_SUITE("io_cli") {
  TEST_CASE("csv quoting") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_field("two\nlines") == "\"two\nlines\"");
    CHECK(coordinate_names(GeometryKind::Sphere2).size() == 2);
  }

  TEST_CASE("grid csv has a header and one row per node") {
    const FieldModel model(make_spec(GeometryKind::Plane2, 2 * kPi, 2));
    const Realization r = model.sample({1, 0});
    const RegionGrid grid = grid_region(r.geometry(), Region::box({0, 0, 0}, {1, 1, 0}), 0.25);
    std::ostringstream out;
    write_grid_csv(out, r, grid);
    const std::string s = out.str();
    std::size_t rows = 0;
    for (std::size_t pos = 0; (pos = s.find("\r\n", pos)) != std::string::npos; pos += 2) ++rows;
    CHECK(rows == grid.nodes.size() + 1);
    CHECK(s.rfind("x,y,", 0) == 0);
  }

  TEST_CASE("pgm rasters") {
    const FieldModel model(make_spec(GeometryKind::Plane2, 2 * kPi));
    const Raster r = render(model.sample({1, 0}), 0, Region::box({0, 0, 0}, {2, 2, 0}), 40, 30);
    CHECK(r.width == 40);
    CHECK(r.height == 30);
    CHECK(r.pixels.size() == 1200);
    std::ostringstream out;
    write_pgm(out, r);
    const std::string s = out.str();
    const std::string header = "P5\n40 30\n255\n";
    CHECK(s.substr(0, header.size()) == header);
    CHECK(s.size() == header.size() + 1200);

    // Degree 0 on the sphere is constant: every pixel takes one value.
    const FieldModel constant(make_spec(GeometryKind::Sphere2, 0.0));
    const Raster c = render(constant.sample({2, 0}), 0, Region::full_sphere(), 16, 8);
    for (unsigned char px : c.pixels) CHECK(px == c.pixels.front());

    const FieldModel line(make_spec(GeometryKind::Line1, 1.0));
    CHECK_THROWS(render(line.sample({1, 0}), 0, Region::box({0, 0, 0}, {1, 0, 0}), 4, 4));
  }

  TEST_CASE("canonical json sorts keys") {
    const nlohmann::json j{{"b", 1}, {"a", {{"d", 2}, {"c", 3}}}};
    CHECK(canonical_json(j) == "{\n  \"a\": {\n    \"c\": 3,\n    \"d\": 2\n  },\n  \"b\": 1\n}\n");
    const fs::path dir = scratch("json");
    std::ofstream(dir / "bad.json") << "{ not json";
    CHECK_THROWS_AS(load_json_file(dir / "bad.json"), ConfigError);
    CHECK_THROWS_AS(load_json_file(dir / "missing.json"), ConfigError);
  }

  TEST_CASE("exit codes for help and usage errors") {
    std::string text;
    CHECK(cli({"--help"}, &text) == 0);
    CHECK(text.find("verify") != std::string::npos);
    CHECK(cli({"spacing", "--help"}, &text) == 0);
    CHECK(text.find("--workers") != std::string::npos);
    CHECK(cli({}) == 2);
    CHECK(cli({"frobnicate"}) == 2);
    const fs::path dir = scratch("usage");
    CHECK(cli({"spacing", "--geometry", "torus", "--out", dir.string()}) == 2);
    CHECK(cli({"spacing", "--reps", "abc", "--out", dir.string()}) == 2);
    CHECK(cli({"zeros", "--geometry", "plane", "--spectrum", "mono:-1", "--out", dir.string()}) == 2);
  }

  TEST_CASE("field command writes CSV, rasters and a report") {
    const fs::path dir = scratch("field");
    CHECK(cli({"field", "--geometry", "plane", "--dimv", "2", "--extent", "1", "--width", "32", "--out", dir.string()}) == 0);
    CHECK(fs::exists(dir / "field.csv"));
    CHECK(fs::exists(dir / "field_0.pgm"));
    CHECK(fs::exists(dir / "field_1.pgm"));
    CHECK(fs::exists(dir / "field.json"));
    CHECK(slurp(dir / "field_0.pgm").rfind("P5\n32 32\n255\n", 0) == 0);
  }

  TEST_CASE("config files are overridden by flags") {
    const fs::path dir = scratch("config");
    std::ofstream(dir / "cfg.json") << R"({"geometry": "line", "spectrum": "mono:1", "reps": 3, "seed": 9})";
    CHECK(cli({"spacing", "--config", (dir / "cfg.json").string(), "--reps", "5", "--out", dir.string()}) == 0);
    const auto j = load_json_file(dir / "spacing.json");
    CHECK(j["config"]["replications"] == 5);
    CHECK(j["config"]["seed"] == 9);
    CHECK(j["details"]["spacing_measured"].get<double>() == doctest::Approx(kPi).epsilon(0.01));

    std::ofstream(dir / "unknown.json") << R"({"colour": "red"})";
    CHECK(cli({"spacing", "--config", (dir / "unknown.json").string(), "--out", dir.string()}) == 2);
  }

  TEST_CASE("oracle and certification errors") {
    const fs::path dir = scratch("oracle");
    CHECK(cli({"oracle", "matrix", "--n", "2", "--k", "2", "--samples", "100000", "--out", dir.string()}) == 0);
    const auto j = load_json_file(dir / "oracle_matrix.json");
    CHECK(j["measured_constant"].get<double>() == doctest::Approx(1.0).epsilon(0.01));
    CHECK(j["predictions"]["paper"].get<double>() == doctest::Approx(2.0));

    CHECK(cli({"zeros", "--geometry", "hyperbolic", "--spectrum", "mono:8", "--waves", "8", "--reps", "2", "--out",
               dir.string()}) == 2);
    CHECK(fs::exists(dir / "zeros_error.json"));
    const auto e = load_json_file(dir / "zeros_error.json");
    CHECK(e["error"]["type"] == "certification");
    CHECK(e["error"]["minimal_waves"].get<int>() > 8);
  }

  TEST_CASE("results do not depend on the worker count") {
    const fs::path a = scratch("workers_a");
    const fs::path b = scratch("workers_b");
    const std::vector<std::string> base{"zeros", "--geometry", "sphere", "--spectrum", "mono:6", "--dimv", "2", "--reps", "6"};
    auto with = [&](const fs::path& dir, const std::string& w) {
      auto args = base;
      args.insert(args.end(), {"--workers", w, "--out", dir.string()});
      return args;
    };
    CHECK(cli(with(a, "1")) != 2);
    CHECK(cli(with(b, "8")) != 2);
    CHECK(slurp(a / "zeros.json") == slurp(b / "zeros.json"));
  }
}
