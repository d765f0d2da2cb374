// Python bindings for the main simulator operations.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "nltr/diagnostics.hpp"
#include "nltr/scenario.hpp"

namespace py = pybind11;

namespace {

py::array_t<double> field_to_array(const nltr::DensityField& f) {
  py::array_t<double> out({f.n_classes(), f.n_cells()});
  auto r = out.mutable_unchecked<2>();
  for (int i = 0; i < f.n_classes(); ++i)
    for (int k = 0; k < f.n_cells(); ++k) r(i, k) = f[i][k];
  return out;
}

py::dict run_to_dict(const nltr::RunResult& run) {
  py::dict out;
  const auto& g = run.snapshots.grid;
  py::array_t<double> x(g.n_cells);
  auto xr = x.mutable_unchecked<1>();
  for (int k = 0; k < g.n_cells; ++k) xr(k) = g.center(k);
  out["x"] = x;
  out["times"] = run.snapshots.times;
  py::list rho, vel;
  for (int s = 0; s < run.snapshots.n_slices(); ++s) {
    rho.append(field_to_array(run.snapshots.fields[s]));
    vel.append(field_to_array(run.snapshot_velocities[s]));
  }
  out["rho"] = rho;
  out["v"] = vel;

  py::list mass, tv, centroid, max_density;
  for (const auto& cls : run.summary.per_class) {
    py::list m, t, c, mx;
    for (const auto& cs : cls) {
      m.append(cs.mass);
      t.append(cs.tv);
      c.append(cs.centroid);
      mx.append(cs.max_density);
    }
    mass.append(m);
    tv.append(t);
    centroid.append(c);
    max_density.append(mx);
  }
  out["mass"] = mass;
  out["tv"] = tv;
  out["centroid"] = centroid;
  out["max_density"] = max_density;
  py::list clearance;
  for (const auto& c : run.summary.clearance_time)
    clearance.append(c ? py::object(py::float_(*c)) : py::none());
  out["clearance_time"] = clearance;
  out["frozen"] = run.frozen;
  return out;
}

nltr::SummaryOptions opts_from(py::object marker) {
  nltr::SummaryOptions opts;
  if (!marker.is_none()) opts.clearance_marker = marker.cast<double>();
  return opts;
}

}  // namespace

PYBIND11_MODULE(_nltr, m) {
  m.doc() = "Nonlocal multiclass traffic flow simulator";

  m.def(
      "run_preset",
      [](const std::string& name, int cells, const std::string& solver,
         py::object clearance_marker) {
        nltr::ScenarioConfig cfg = nltr::preset(name, cells);
        if (solver == "fv")
          cfg.solver = nltr::SolverKind::fv_nonlocal;
        else if (solver == "lwr")
          cfg.solver = nltr::SolverKind::fv_local_lwr;
        else if (solver == "lagrangian")
          cfg.solver = nltr::SolverKind::lagrangian;
        else if (!solver.empty())
          throw std::invalid_argument("solver must be fv | lwr | lagrangian");
        return run_to_dict(nltr::run_scenario(cfg, opts_from(clearance_marker)));
      },
      py::arg("name"), py::arg("cells") = -1, py::arg("solver") = "",
      py::arg("clearance_marker") = py::none(),
      "Run a built-in preset and return snapshots plus summary data.");

  m.def(
      "run_config",
      [](const std::string& json_text, py::object clearance_marker) {
        nltr::ScenarioConfig cfg =
            nltr::parse_config(nlohmann::json::parse(json_text));
        return run_to_dict(nltr::run_scenario(cfg, opts_from(clearance_marker)));
      },
      py::arg("config_json"), py::arg("clearance_marker") = py::none(),
      "Run a scenario from a JSON config string.");

  m.def("preset_names", &nltr::preset_names);

  m.def(
      "preset_config",
      [](const std::string& name, int cells) {
        return nltr::to_json(nltr::preset(name, cells)).dump(2);
      },
      py::arg("name"), py::arg("cells") = -1,
      "The JSON document a preset expands to.");

  m.def("normalization_constant", &nltr::normalization_constant, py::arg("f"),
        py::arg("b"));

  m.def(
      "kernel_values",
      [](double f, double b, py::array_t<double> xs) {
        nltr::KernelSpec spec(f, b);
        auto x = xs.unchecked<1>();
        py::array_t<double> out(x.shape(0));
        auto o = out.mutable_unchecked<1>();
        for (py::ssize_t i = 0; i < x.shape(0); ++i)
          o(i) = nltr::eval_kernel(spec, x(i));
        return out;
      },
      py::arg("f"), py::arg("b"), py::arg("x"));

  m.def(
      "convolve",
      [](double f, double b, py::array_t<double> field, double x_lo, double x_hi) {
        auto r = field.unchecked<1>();
        int n = static_cast<int>(r.shape(0));
        nltr::Grid1D g(x_lo, x_hi, n);
        std::vector<double> v(n);
        for (int k = 0; k < n; ++k) v[k] = r(k);
        auto out = nltr::convolve(nltr::discretize(nltr::KernelSpec(f, b), g), v,
                                  nltr::ConvEngine::fft);
        py::array_t<double> res(n);
        auto o = res.mutable_unchecked<1>();
        for (int k = 0; k < n; ++k) o(k) = out[k];
        return res;
      },
      py::arg("f"), py::arg("b"), py::arg("field"), py::arg("x_lo"), py::arg("x_hi"),
      "Discrete nonlocal average of a single-class field.");
}
