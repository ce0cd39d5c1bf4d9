#include "shapelab/cli.hpp"
#include "shapelab/errors.hpp"
#include "shapelab/optimizer.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <tuple>

namespace py = pybind11;
using namespace shapelab;

namespace {

using ModeTuple = std::tuple<int, double, double>;

std::vector<FourierMode> to_modes(const std::vector<ModeTuple>& modes) {
  std::vector<FourierMode> out;
  for (const auto& [k, a, b] : modes) out.push_back({k, a, b});
  return out;
}

std::vector<ModeTuple> from_modes(const std::vector<FourierMode>& modes) {
  std::vector<ModeTuple> out;
  for (const auto& m : modes) out.emplace_back(m.k, m.a, m.b);
  return out;
}

py::dict report_dict(const EnergyReport& r) {
  py::dict d;
  d["lambda1"] = r.lambda1;
  d["lambda2"] = r.lambda2;
  d["tor"] = r.tor;
  d["vol"] = r.vol;
  d["f_pen"] = r.f_pen;
  d["h_val"] = r.h_val;
  d["E_base"] = r.E_base;
  d["F_total"] = r.F_total;
  d["gap_ok"] = r.gap_ok;
  d["mesh_h"] = r.mesh_h;
  if (r.has_distances) {
    d["d0"] = r.d_report.d0;
    d["d1"] = r.d_report.d1;
    d["asym"] = r.d_report.asym;
    d["d_star_sq"] = r.d_report.d_star_sq;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "penalized spectral shape functionals on planar star domains";
  m.attr("__version__") = tool_version();

  auto error = py::register_exception<Error>(m, "Error");
  auto validation = py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<SolverError>(m, "SolverError", error.ptr());
  py::register_exception<InvalidDomain>(m, "InvalidDomain", validation.ptr());

  py::class_<StarDomain>(m, "StarDomain")
      .def(py::init([](Point center, double r0, const std::vector<ModeTuple>& modes) {
             return StarDomain(center, r0, to_modes(modes));
           }),
           py::arg("center") = Point(0.0, 0.0), py::arg("r0") = 1.0, py::arg("modes") = std::vector<ModeTuple>{})
      .def_static("disk", &StarDomain::disk, py::arg("radius"), py::arg("center") = Point(0.0, 0.0))
      .def_property_readonly("center", &StarDomain::center)
      .def_property_readonly("r0", &StarDomain::r0)
      .def_property_readonly("modes", [](const StarDomain& d) { return from_modes(d.modes()); })
      .def("radius", &StarDomain::radius)
      .def("contains", &StarDomain::contains)
      .def("translated", &StarDomain::translated)
      .def("dilated", &StarDomain::dilated)
      .def("rotated", &StarDomain::rotated)
      .def("with_area", &StarDomain::with_area)
      .def("__repr__", [](const StarDomain& d) {
        std::ostringstream s;
        s << "StarDomain(r0=" << d.r0() << ", modes=" << d.modes().size() << ")";
        return s.str();
      });

  m.def("area", &area);
  m.def("barycenter", &barycenter);
  m.def("perimeter", &perimeter);

  py::class_<EnergyParams>(m, "EnergyParams")
      .def(py::init<>())
      .def_readwrite("v", &EnergyParams::v)
      .def_readwrite("vmax", &EnergyParams::vmax)
      .def_readwrite("eta", &EnergyParams::eta)
      .def_readwrite("torsion", &EnergyParams::torsion_coeff)
      .def_readwrite("tau", &EnergyParams::tau)
      .def_readwrite("c_nl", &EnergyParams::c_nl)
      .def_readwrite("c0", &EnergyParams::c0)
      .def_readwrite("h_norm", &EnergyParams::h_norm);

  py::class_<OptimizerConfig>(m, "OptimizerConfig")
      .def(py::init<>())
      .def_readwrite("max_modes", &OptimizerConfig::max_modes)
      .def_readwrite("max_iter", &OptimizerConfig::max_iter)
      .def_readwrite("grad_tol", &OptimizerConfig::grad_tol)
      .def_readwrite("h_coarse", &OptimizerConfig::h_coarse)
      .def_readwrite("h_fine", &OptimizerConfig::h_fine)
      .def_readwrite("fine_iterations", &OptimizerConfig::fine_iterations)
      .def_readwrite("jobs", &OptimizerConfig::jobs)
      .def_property(
          "penalized", [](const OptimizerConfig& c) { return c.volume == VolumeMode::penalized; },
          [](OptimizerConfig& c, bool p) { c.volume = p ? VolumeMode::penalized : VolumeMode::renormalize; });

  m.def(
      "eigenvalues",
      [](const StarDomain& d, double h) {
        const DomainSolution s = solve_domain(d, Resolution{h});
        return std::make_tuple(s.spectrum.lambda1, s.spectrum.lambda2);
      },
      py::arg("domain"), py::arg("h") = 0.02);
  m.def(
      "torsion", [](const StarDomain& d, double h) { return solve_domain(d, Resolution{h}).torsion.tor; },
      py::arg("domain"), py::arg("h") = 0.02);
  m.def(
      "evaluate",
      [](const StarDomain& d, const EnergyParams& p, double h) { return report_dict(evaluate(d, p, Resolution{h})); },
      py::arg("domain"), py::arg("params") = EnergyParams{}, py::arg("h") = 0.02);
  m.def(
      "hadamard",
      [](const StarDomain& d, const std::vector<ModeTuple>& field, double h) {
        const DomainSolution s = solve_domain(d, Resolution{h});
        const ShapeGradient g =
            hadamard(d, boundary_trace(s.system, s.spectrum, s.torsion), BoundaryField{to_modes(field)});
        py::dict out;
        out["dLambda1"] = g.dLambda1;
        out["dTor"] = g.dTor;
        out["dVol"] = g.dVol;
        out["dBary"] = Point(g.dBary);
        return out;
      },
      py::arg("domain"), py::arg("field"), py::arg("h") = 0.02,
      "First variations along the radial velocity sum a_k cos k t + b_k sin k t, given as (k, a, b).");
  m.def(
      "minimize",
      [](const StarDomain& start, const EnergyParams& p, const OptimizerConfig& cfg) {
        OptimizeResult r;
        {
          py::gil_scoped_release release;
          r = minimize(start, p, cfg);
        }
        py::dict out;
        out["domain"] = r.domain;
        out["converged"] = r.converged;
        out["stalled"] = r.stalled;
        out["accepted_steps"] = r.accepted_steps;
        out["objective"] = r.final_report.F_total;
        out["report"] = report_dict(r.final_report);
        py::list trace;
        for (const auto& row : r.trace) trace.append(py::make_tuple(row.iteration, row.objective, row.grad_norm, row.area));
        out["trace"] = trace;
        return out;
      },
      py::arg("start"), py::arg("params") = EnergyParams{}, py::arg("config") = OptimizerConfig{});
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return std::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in-process; returns (exit code, stdout, stderr).");
}
