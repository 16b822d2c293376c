#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lkl/cocycle.hpp"
#include "lkl/errors.hpp"
#include "lkl/kernels.hpp"
#include "lkl/reps.hpp"
#include "lkl/special_fn.hpp"
#include "lkl/spectral.hpp"
#include "lkl/verify.hpp"

namespace py = pybind11;
using namespace lkl;
using cd = std::complex<double>;

namespace {

KernelSpec make_spec(int q, const std::vector<std::pair<int, int>>& alphas, double e2, int n) {
  KernelSpec s;
  s.q = q;
  for (auto [l, m] : alphas) s.alphas.push_back({l, m});
  s.params.e2 = e2;
  s.params.n = n;
  s.validate();
  return s;
}

ProjectionKind parse_kind(const std::string& k) {
  if (k == "u_to_cl") return ProjectionKind::UToCl;
  if (k == "cl_to_u") return ProjectionKind::ClToU;
  if (k == "calpha_to_calpha") return ProjectionKind::CalphaToCalpha;
  throw DomainError("kind must be u_to_cl, cl_to_u or calpha_to_calpha");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Principal-series matrix elements, cocycle, kernels and spectral weights";
  py::register_exception<PoleError>(m, "PoleError", PyExc_ArithmeticError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<UnsupportedCase>(m, "UnsupportedCase", PyExc_NotImplementedError);

  m.def("legendre_p", &legendre_p, py::arg("l"), py::arg("m"), py::arg("y"));
  m.def("clebsch_gordan", &clebsch_gordan, py::arg("l1"), py::arg("m1"), py::arg("l2"), py::arg("m2"), py::arg("l"),
        py::arg("m"));

  m.def(
      "umat",
      [](int l0, double rho, int l, int mm, int lp, double lam) {
        return u_matrix_element_exact(RepLabel::principal(l0, rho), l, mm, lp, lam);
      },
      py::arg("l0"), py::arg("rho"), py::arg("l"), py::arg("m"), py::arg("lp"), py::arg("lam"),
      "Matrix element U^{(l0, i rho)}_{l m; l' m}(lambda) from its exact exponential-polynomial form.");
  m.def(
      "umat_quadrature",
      [](int l0, double rho, int l, int mm, int lp, double lam) {
        return u_matrix_element_quadrature(RepLabel::principal(l0, rho), l, mm, lp, mm, lam);
      },
      py::arg("l0"), py::arg("rho"), py::arg("l"), py::arg("m"), py::arg("lp"), py::arg("lam"));
  m.def("a_element", [](int l, int mm, int lp, double lam) { return rep_a_element(l, mm, lp, mm, lam); },
        py::arg("l"), py::arg("m"), py::arg("lp"), py::arg("lam"));
  m.def("b_component", &b_component_closed, py::arg("l"), py::arg("lam"));
  m.def("b_component_integral", [](int l, double lam) { return b_component_integral(l, lam); }, py::arg("l"),
        py::arg("lam"));
  m.def("norm_b_squared", &norm_b_squared, py::arg("lam"), py::arg("L"));
  m.def("norm_b_squared_closed", &norm_b_squared_closed, py::arg("lam"));

  m.def(
      "kernel_boost",
      [](int q, const std::vector<std::pair<int, int>>& alphas, double z, double lam) {
        KernelSpec s = make_spec(q, alphas, 1.0, 1);
        s.params = ChargeParams::from_z(z);
        return kernel_value(s, GroupElement(), boost(lam));
      },
      py::arg("q"), py::arg("alphas"), py::arg("z"), py::arg("lam"),
      "Kernel <e|boost(lambda)> with e^2 chosen so that the charge parameter equals z (n = 1).");

  m.def(
      "kweight",
      [](int q, const std::vector<std::pair<int, int>>& alphas, int l0, double rho, double z, double e2) {
        KernelSpec s = make_spec(q, alphas, e2, 1);
        return k_matrix(s, l0, rho, z).entries.trace();
      },
      py::arg("q"), py::arg("alphas"), py::arg("l0"), py::arg("rho"), py::arg("z"), py::arg("e2") = 1.0,
      "Trace of the K matrix at (l0, i rho; z).");
  m.def(
      "decomposition_weight",
      [](int q, const std::vector<std::pair<int, int>>& alphas, int l0, double rho, double z, double e2) {
        DecompositionWeight w = decomposition_weight(make_spec(q, alphas, e2, 1), l0, rho, z);
        return py::make_tuple(w.trace, w.has_supplementary ? py::object(py::float_(w.supplementary)) : py::none());
      },
      py::arg("q"), py::arg("alphas"), py::arg("l0"), py::arg("rho"), py::arg("z"), py::arg("e2") = 1.0,
      "(trace weight, supplementary weight or None).");
  m.def(
      "f0_series",
      [](double z) {
        SeriesValue v = FractionSeries(f0_integrand()).sum(0.0, z);
        return py::make_tuple(v.value, v.error, v.terms);
      },
      py::arg("z"), "Series value of int_0^inf e^{-z lambda coth lambda} d lambda: (value, error, terms).");
  m.def(
      "projection",
      [](const std::string& kind, int l, int lp, int l0, double rho, double z, double e2) {
        return projection_function(parse_kind(kind), {l, lp, l0, e2}, rho, z);
      },
      py::arg("kind"), py::arg("l"), py::arg("lp"), py::arg("l0"), py::arg("rho"), py::arg("z"),
      py::arg("e2") = 1.0);
  m.def(
      "laurent_coefficient",
      [](int l, int lp, int l0, int mm, int s, double z, int digits) {
        return laurent_coefficient(projf_integrand(l, lp, l0), mm, s, z, digits);
      },
      py::arg("l"), py::arg("lp"), py::arg("l0"), py::arg("m"), py::arg("s"), py::arg("z"), py::arg("digits") = 0);
  m.def("kappa_closed_l1", &kappa_closed_l1, py::arg("e2"), py::arg("z"));
  m.def("bound_state_bracket_sum", &bound_state_bracket_sum, py::arg("l"));
  m.def("bound_state_bracket_limit", &bound_state_bracket_limit);

  m.def("suite_names", &suite_names);
  m.def(
      "run_suite",
      [](const std::string& name) {
        py::list out;
        for (const auto& c : run_suite(name))
          out.append(py::dict(py::arg("suite") = c.suite, py::arg("check") = c.name, py::arg("anchor") = c.anchor,
                              py::arg("residual") = c.residual, py::arg("tolerance") = c.tolerance,
                              py::arg("status") = c.pass ? "PASS" : "FAIL"));
        return out;
      },
      py::arg("name"));
}
