#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "gbhe/config.hpp"
#include "gbhe/driver.hpp"
#include "gbhe/errors.hpp"
#include "gbhe/kernel.hpp"
#include "gbhe/mesh.hpp"
#include "gbhe/mms.hpp"

namespace py = pybind11;
using namespace gbhe;

namespace {

py::dict row_dict(const ConvergenceRow& r) {
  py::dict d;
  d["level"] = r.level;
  d["h"] = r.h;
  d["cells_per_side"] = std::lround(1.0 / r.h);
  d["dt"] = r.dt;
  d["dofs"] = r.dofs;
  d["err_l2_inf"] = r.err_l2_inf;
  d["err_energy"] = r.err_energy;
  d["rate_l2"] = r.rate_l2;
  d["rate_energy"] = r.rate_energy;
  d["newton_max"] = r.newton_max;
  return d;
}

std::vector<double> weight_table(const KernelWeights& w) {
  std::vector<double> out;
  for (int k = 1; k <= w.n_steps(); ++k)
    for (int j = 1; j <= k; ++j) out.push_back(w.at(k, j));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Finite element solver for the generalized Burgers-Huxley equation with memory";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<StepFailure>(m, "StepFailure", PyExc_RuntimeError);
  py::register_exception<UnsupportedCase>(m, "UnsupportedCase", PyExc_ValueError);

  m.def(
      "mesh_counts",
      [](int n) {
        const Mesh mesh = generate_rect_mesh(Box{}, n);
        return py::make_tuple(mesh.num_vertices(), mesh.num_edges(), mesh.num_cells());
      },
      py::arg("n"), "(vertices, edges, cells) of the n x n unit-square mesh.");

  m.def(
      "memory_weights",
      [](double mu, double dt, int n_steps) {
        return weight_table(memory_weights(KernelSpec::power_law(mu), dt, n_steps));
      },
      py::arg("mu"), py::arg("dt"), py::arg("n_steps"),
      "Power-law memory weights w_kj, row by row (k = 1..N, j = 1..k).");

  m.def(
      "caputo_weights",
      [](double mu, double dt, int n_steps) { return weight_table(caputo_weights(mu, dt, n_steps)); },
      py::arg("mu"), py::arg("dt"), py::arg("n_steps"));

  m.def(
      "config_hash",
      [](const std::string& text) { return parse_config_string(text).hash; }, py::arg("text"));

  m.def(
      "convergence",
      [](const std::string& text, std::optional<int> levels) {
        const RunConfig cfg = parse_config_string(text);
        StudyConfig study = make_study(cfg, levels);
        std::vector<ConvergenceRow> rows;
        {
          py::gil_scoped_release release;
          rows = convergence_study(study);
        }
        py::list out;
        for (const auto& r : rows) out.append(row_dict(r));
        return out;
      },
      py::arg("config"), py::arg("levels") = py::none(),
      "Convergence study described by an INI string; returns one dict per level.");

  m.def(
      "simulate",
      [](const std::string& text) {
        const RunConfig cfg = parse_config_string(text);
        const Problem p = make_problem(cfg);
        Trajectory traj;
        {
          py::gil_scoped_release release;
          traj = run(p, {}, false);
        }
        const FieldStats st = field_statistics(*traj.space, traj.u.back());
        py::dict d;
        std::vector<double> times;
        std::vector<int> newton;
        std::vector<double> l2;
        for (const auto& s : traj.diagnostics) {
          times.push_back(s.time);
          newton.push_back(s.newton_iterations);
          l2.push_back(s.l2_norm);
        }
        d["times"] = times;
        d["newton_iterations"] = newton;
        d["l2_norm"] = l2;
        d["u"] = traj.u.back();
        d["max_abs"] = st.max_abs;
        d["mean"] = st.mean;
        d["variance"] = st.variance;
        return d;
      },
      py::arg("config"), "Single run described by an INI string; returns diagnostics and the final field.");
}
