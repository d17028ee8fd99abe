// Python bindings for the qdho library.
#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qdho/errors.hpp"
#include "qdho/oracle.hpp"
#include "qdho/response.hpp"
#include "qdho/susceptibility.hpp"
#include "qdho/thermo.hpp"

namespace py = pybind11;
using namespace qdho;

namespace {

ThermalState state_of(double theta) {
  return theta == 0.0 ? ThermalState::zero() : ThermalState::finite(theta);
}

}  // namespace

PYBIND11_MODULE(_qdho, m) {
  m.doc() = "Damped quantum oscillator observables from a susceptibility.";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<NotDiagonalizableError>(m, "NotDiagonalizableError", error.ptr());
  py::register_exception<PassivityError>(m, "PassivityError", error.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", error.ptr());
  py::register_exception<TailMismatchError>(m, "TailMismatchError", error.ptr());
  py::register_exception<PoleError>(m, "PoleError", error.ptr());
  py::register_exception<ToleranceError>(m, "ToleranceError", error.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", error.ptr());

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](double omega0, double gamma1, double gamma2) {
             ModelParams p{omega0, gamma1, gamma2};
             p.validate();
             return p;
           }),
           py::arg("omega0") = 1.0, py::arg("gamma1") = 0.25, py::arg("gamma2") = 0.0)
      .def_readwrite("omega0", &ModelParams::omega0)
      .def_readwrite("gamma1", &ModelParams::gamma1)
      .def_readwrite("gamma2", &ModelParams::gamma2)
      .def_property_readonly("stability_margin", &ModelParams::stability_margin)
      .def_property_readonly("diagonalizable", &ModelParams::diagonalizable)
      .def("__repr__", [](const ModelParams& p) {
        return "ModelParams(omega0=" + py::repr(py::float_(p.omega0)).cast<std::string>() +
               ", gamma1=" + py::repr(py::float_(p.gamma1)).cast<std::string>() +
               ", gamma2=" + py::repr(py::float_(p.gamma2)).cast<std::string>() + ")";
      });

  py::class_<TabulatedChi>(m, "TabulatedChi")
      .def(py::init<std::vector<double>, std::vector<double>, double, double>(),
           py::arg("grid"), py::arg("im_chi"), py::arg("tail_exponent") = 2.0,
           py::arg("omega0") = 1.0)
      .def("im_chi", &TabulatedChi::im_chi, py::arg("omega"))
      .def_property_readonly("omega0", &TabulatedChi::omega0)
      .def_property_readonly("tail_exponent", &TabulatedChi::tail_exponent);

  py::class_<Observables>(m, "Observables")
      .def_readonly("q2", &Observables::q2)
      .def_readonly("pi2", &Observables::pi2)
      .def_readonly("energy", &Observables::energy)
      .def_readonly("warnings", &Observables::warnings)
      .def_property_readonly("path",
                             [](const Observables& o) { return std::string(to_string(o.path)); })
      .def_property_readonly("errors",
                             [](const Observables& o) {
                               return py::make_tuple(o.error.q2, o.error.pi2, o.error.energy);
                             })
      .def_property_readonly("delta_q", &Observables::delta_q)
      .def_property_readonly("delta_p", &Observables::delta_p)
      .def_property_readonly("uncertainty_product", &Observables::uncertainty_product);

  py::class_<DiagonalizabilityReport>(m, "DiagonalizabilityReport")
      .def_readonly("diagonalizable", &DiagonalizabilityReport::diagonalizable)
      .def_readonly("integral", &DiagonalizabilityReport::integral)
      .def_readonly("margin", &DiagonalizabilityReport::margin)
      .def_readonly("reduced_margin", &DiagonalizabilityReport::reduced_margin);

  m.def("chi", [](std::complex<double> w, const ModelParams& p) { return chi_model(w, p); },
        py::arg("omega"), py::arg("params"));
  m.def(
      "kk_re_chi",
      [](double w, const SusceptibilitySource& src) {
        const KramersKronig r = kk_reconstruct(w, src);
        return py::make_tuple(r.chi.real(), r.error);
      },
      py::arg("omega"), py::arg("source"),
      "Re chi(omega) by Kramers-Kronig, with its error estimate.");
  m.def(
      "check_diagonalizable",
      [](const SusceptibilitySource& src) { return check_diagonalizable(src); },
      py::arg("source"));
  m.def("poles", [](const ModelParams& p) { return model_poles(p).poles; }, py::arg("params"));

  m.def("zero_point", &zero_point_closed, py::arg("params"));
  m.def(
      "thermal",
      [](const SusceptibilitySource& src, double theta) {
        return thermal_observables(src, state_of(theta));
      },
      py::arg("source"), py::arg("theta") = 0.0,
      "Observables by spectral quadrature; theta = 0 is the ground state.");
  m.def(
      "q2_matsubara", [](const ModelParams& p, double theta) { return q2_matsubara(p, theta).value; },
      py::arg("params"), py::arg("theta"));

  m.def(
      "oracle",
      [](const SusceptibilitySource& src, double theta, std::size_t n_modes, double omega_max) {
        py::gil_scoped_release release;
        return thermal_observables_discrete(build_hamiltonian(src, n_modes, omega_max),
                                            state_of(theta));
      },
      py::arg("source"), py::arg("theta") = 0.0, py::arg("n_modes") = 1000,
      py::arg("omega_max") = 100.0,
      "Observables of an explicit discretised reservoir (exact diagonalisation).");
}
