#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "nodalab/cli.hpp"
#include "nodalab/errors.hpp"
#include "nodalab/harness.hpp"
#include "nodalab/rice.hpp"
#include "nodalab/sampler.hpp"
#include "nodalab/spectra.hpp"
#include "nodalab/zeroset.hpp"

namespace py = pybind11;
using namespace nodalab;

namespace {

Point to_point(const std::vector<double>& c) {
  if (c.empty() || c.size() > 3) throw DomainError("points have 1 to 3 chart coordinates");
  Point p;
  for (std::size_t i = 0; i < c.size(); ++i) p.c[i] = c[i];
  return p;
}

FieldSpec make_spec(const std::string& geometry, double param, int dim_v, int n_waves, double r_max,
                    std::vector<double> scales) {
  FieldSpec s;
  const GeometryKind k = parse_geometry(geometry);
  s.geometry = describe(k);
  s.spectrum = SpectralMeasure::monochromatic(k, param);
  s.dim_v = dim_v;
  s.n_waves = n_waves;
  s.r_max = r_max;
  s.component_scales = std::move(scales);
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Invariant Gaussian fields and their zero sets";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<CertificationError>(m, "CertificationError", PyExc_RuntimeError);

  m.def("distance", [](const std::string& g, const std::vector<double>& p, const std::vector<double>& q) {
    return distance(describe(parse_geometry(g)), to_point(p), to_point(q));
  }, py::arg("geometry"), py::arg("p"), py::arg("q"));

  m.def("eigenvalue", [](const std::string& g, double param) { return eigenvalue({parse_geometry(g), param}); },
        py::arg("geometry"), py::arg("param"));
  m.def("covariance", [](const std::string& g, double param, double r) {
    return covariance({parse_geometry(g), param}, r);
  }, py::arg("geometry"), py::arg("param"), py::arg("r"));

  m.def("chi_mean", &chi_mean, py::arg("m"));
  m.def("predicted_constant", [](int dim_x, int dim_v, const std::string& mode, const std::string& convention) {
    return predicted_constant(dim_x, dim_v, parse_mode(mode), parse_convention(convention));
  }, py::arg("dim_x"), py::arg("dim_v"), py::arg("mode") = "chi", py::arg("convention") = "wavelength");
  m.def("minimal_hyperbolic_waves", &minimal_hyperbolic_waves, py::arg("lam"), py::arg("r_max"));

  py::class_<Realization>(m, "Field")
      .def(py::init([](const std::string& geometry, double param, int dim_v, std::uint64_t seed, std::uint64_t stream,
                       int n_waves, double r_max, std::vector<double> scales) {
             return FieldModel(make_spec(geometry, param, dim_v, n_waves, r_max, std::move(scales)))
                 .sample({seed, stream});
           }),
           py::arg("geometry"), py::arg("param"), py::arg("dim_v") = 1, py::arg("seed") = 0, py::arg("stream") = 0,
           py::arg("n_waves") = 0, py::arg("r_max") = 2.0, py::arg("scales") = std::vector<double>{})
      .def_property_readonly("dim_v", &Realization::dim_v)
      .def_property_readonly("n_waves", [](const Realization& r) { return r.spec().n_waves; })
      .def("__call__", [](const Realization& r, const std::vector<double>& p, int component) {
             return r.eval(component, to_point(p));
           }, py::arg("point"), py::arg("component") = 0)
      .def("gradient", [](const Realization& r, const std::vector<double>& p) { return r.eval_gradient(to_point(p)); },
           py::arg("point"))
      .def("crossings", [](const Realization& r, const std::vector<double>& base, const std::vector<double>& direction,
                           double length, double level, double step) {
             Tangent d{0, 0, 0};
             for (std::size_t i = 0; i < direction.size() && i < 3; ++i) d[i] = direction[i];
             return count_level_crossings(r, 0, {to_point(base), d, length}, level, step).value;
           }, py::arg("base"), py::arg("direction"), py::arg("length"), py::arg("level") = 0.0, py::arg("step") = 0.01);

  m.def("run_experiment_json", [](const std::string& config, int workers) {
    ExperimentConfig c = config_from_json(nlohmann::json::parse(config));
    c.workers = workers;
    py::gil_scoped_release release;
    return to_json(run_experiment(c)).dump();
  }, py::arg("config"), py::arg("workers") = 1);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"));
}
