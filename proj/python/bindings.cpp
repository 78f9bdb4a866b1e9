#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dyadic/alpha.hpp"
#include "dyadic/curve.hpp"
#include "dyadic/errors.hpp"
#include "dyadic/plane.hpp"
#include "dyadic/recursion.hpp"
#include "dyadic/shell_ode.hpp"

namespace py = pybind11;
using namespace dyadic;

namespace {

ModelParams make_params(double lambda, double beta, double forcing, int shells) {
  ModelParams p{lambda, beta, forcing, shells};
  p.validate();
  return p;
}

ShellState make_state(const std::vector<double>& values, double time) {
  return ShellState{time, values};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the dyadic shell model";

  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ContractionViolation>(m, "ContractionViolation", numerical.ptr());
  py::register_exception<NoIntersection>(m, "NoIntersection", numerical.ptr());
  // subclasses without their own Python type surface as NumericalError
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const IntegrationStalled& e) {
      py::set_error(PyExc_RuntimeError,
                    (std::string(e.what()) + " at t=" + std::to_string(e.last_time())).c_str());
    }
  });

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init(&make_params), py::arg("lambda_") = 2.0, py::arg("beta") = 0.0,
           py::arg("forcing") = 0.0, py::arg("shells") = 20)
      .def_readwrite("lambda_", &ModelParams::lambda)
      .def_readwrite("beta", &ModelParams::beta)
      .def_readwrite("forcing", &ModelParams::forcing)
      .def_readwrite("shells", &ModelParams::shells)
      .def("validate", &ModelParams::validate)
      .def("__repr__", [](const ModelParams& p) {
        return "ModelParams(lambda_=" + std::to_string(p.lambda) + ", beta=" +
               std::to_string(p.beta) + ", forcing=" + std::to_string(p.forcing) +
               ", shells=" + std::to_string(p.shells) + ")";
      });

  // shell ODE
  m.def("rhs",
        [](const std::vector<double>& a, const ModelParams& p) { return rhs(make_state(a, 0.0), p); },
        py::arg("values"), py::arg("params"));
  m.def("energy",
        [](const std::vector<double>& a, const ModelParams& p, double delta) {
          return energy(make_state(a, 0.0), p, delta);
        },
        py::arg("values"), py::arg("params"), py::arg("delta") = 0.0);
  m.def("forced_fixed_point", &forced_fixed_point, py::arg("params"));
  m.def(
      "integrate",
      [](const std::vector<double>& a, const ModelParams& p, double t_end, double t0, double tol,
         std::vector<double> output_times, double output_interval) {
        IntegrateOptions o;
        o.tol = tol;
        o.output_times = std::move(output_times);
        o.output_interval = output_interval;
        const auto traj = integrate(make_state(a, t0), p, t_end, o);
        std::vector<double> times;
        std::vector<std::vector<double>> values;
        for (const auto& s : traj.states) {
          times.push_back(s.time);
          values.push_back(s.values);
        }
        return py::make_tuple(times, values);
      },
      py::arg("values"), py::arg("params"), py::arg("t_end"), py::arg("t0") = 0.0,
      py::arg("tol") = 1e-10, py::arg("output_times") = std::vector<double>{},
      py::arg("output_interval") = 0.0,
      "Returns (times, states) sampled at the requested output times.");

  // recursion
  m.def("next_alpha", [](double x, double y, const ModelParams& p) { return next_alpha(x, y, p); },
        py::arg("prev"), py::arg("cur"), py::arg("params"));
  m.def("quadratic_oracle", &quadratic_oracle, py::arg("prev"), py::arg("cur"), py::arg("params"));

  py::class_<Profile>(m, "Profile")
      .def_readonly("alpha0", &Profile::alpha0)
      .def_readonly("alphas", &Profile::alphas)
      .def_readonly("overflowed", &Profile::overflowed)
      .def("a_star", &Profile::a_star);
  m.def("generate_profile", py::overload_cast<double, int, const ModelParams&>(&generate_profile),
        py::arg("alpha0"), py::arg("n_max"), py::arg("params"));
  // the recursion doubles deviations per step, so long profiles need the wide value
  m.def("generate_profile",
        [](const AlphaSolution& s, int n_max, const ModelParams& p) {
          return generate_profile(s.alpha0_wide, n_max, p);
        },
        py::arg("solution"), py::arg("n_max"), py::arg("params"));

  py::class_<KolmogorovFit>(m, "KolmogorovFit")
      .def_readonly("diverged", &KolmogorovFit::diverged)
      .def_readonly("constant", &KolmogorovFit::constant)
      .def_readonly("residual", &KolmogorovFit::residual)
      .def_readonly("n_lo", &KolmogorovFit::n_lo)
      .def_readonly("n_hi", &KolmogorovFit::n_hi);
  m.def("fit_kolmogorov", py::overload_cast<const Profile&>(&fit_kolmogorov), py::arg("profile"));

  // alpha selection
  py::enum_<Verdict>(m, "Verdict")
      .value("PositiveSide", Verdict::PositiveSide)
      .value("NegativeSide", Verdict::NegativeSide)
      .value("Undecided", Verdict::Undecided);
  py::class_<OrbitClass>(m, "OrbitClass")
      .def_readonly("verdict", &OrbitClass::verdict)
      .def_readonly("escape_index", &OrbitClass::escape_index)
      .def_readonly("escape_value", &OrbitClass::escape_value)
      .def_readonly("crossing_signs", &OrbitClass::crossing_signs);
  m.def(
      "classify_orbit",
      [](double a0, const ModelParams& p, double threshold, int n_max) {
        return classify_orbit(a0, p, ClassifyOptions{threshold, n_max});
      },
      py::arg("alpha0"), py::arg("params"), py::arg("threshold") = 1.0, py::arg("n_max") = 200);

  py::class_<AlphaSolution>(m, "AlphaSolution")
      .def_readonly("alpha0", &AlphaSolution::alpha0)
      .def_readonly("lo", &AlphaSolution::lo)
      .def_readonly("hi", &AlphaSolution::hi)
      .def_readonly("iterations", &AlphaSolution::iterations)
      .def_property_readonly("alpha0_decimal", [](const AlphaSolution& s) {
        return s.alpha0_wide.str(34, std::ios_base::scientific);
      });
  m.def("solve_alpha0",
        [](const ModelParams& p, double tol) { return solve_alpha0(p, tol); },
        py::arg("params"), py::arg("tol") = 1e-30);

  // plane and invariant curve
  py::enum_<Chart>(m, "Chart").value("XY", Chart::XY).value("UV", Chart::UV).value("AB", Chart::AB);
  py::enum_<BoundForm>(m, "BoundForm")
      .value("Exact", BoundForm::Exact)
      .value("Legacy", BoundForm::Legacy);
  m.def(
      "map_F",
      [](double first, double second, Chart chart, const ModelParams& p) {
        const auto q = map_F(PlanePoint{first, second, chart}, p);
        return py::make_tuple(q.first, q.second);
      },
      py::arg("first"), py::arg("second"), py::arg("chart"), py::arg("params"));
  m.def("error_term", &error_term, py::arg("a"), py::arg("b"), py::arg("params"));

  py::class_<Rectangle>(m, "Rectangle")
      .def(py::init([](double R0, double R1) {
             Rectangle r{R0, R1};
             r.validate();
             return r;
           }),
           py::arg("R0"), py::arg("R1"))
      .def_readonly("R0", &Rectangle::R0)
      .def_readonly("R1", &Rectangle::R1);
  m.def(
      "certify_rectangle",
      [](const Rectangle& r, const ModelParams& p, BoundForm form) {
        const auto c = certify_rectangle(r, p, form);
        py::dict checks;
        for (const auto& k : c.checks) checks[py::str(k.name)] = k.holds;
        return py::make_tuple(c.admissible, checks);
      },
      py::arg("rect"), py::arg("params"), py::arg("form") = BoundForm::Exact,
      "Returns (admissible, {check name: holds}).");
  m.def("min_R0", &min_R0, py::arg("R1"), py::arg("params"), py::arg("form") = BoundForm::Exact);

  py::class_<InvariantCurve>(m, "InvariantCurve")
      .def_property_readonly("b", [](const InvariantCurve& c) { return c.curve.b; })
      .def_property_readonly("a", [](const InvariantCurve& c) { return c.curve.a; })
      .def_property_readonly("iterations", [](const InvariantCurve& c) { return c.diagnostics.iterations; })
      .def_property_readonly("residual", [](const InvariantCurve& c) { return c.diagnostics.residual; })
      .def_property_readonly("contraction_ratio",
                             [](const InvariantCurve& c) { return c.diagnostics.contraction_ratio; })
      .def_property_readonly("clipped", [](const InvariantCurve& c) { return c.diagnostics.clipped; })
      .def_property_readonly("c_prime", [](const InvariantCurve& c) { return c.diagnostics.c_prime; })
      .def("__call__", [](const InvariantCurve& c, double b) { return c.curve(b); }, py::arg("b"))
      .def("sup_abs", [](const InvariantCurve& c) { return c.curve.sup_abs(); });
  m.def(
      "solve_invariant",
      [](const Rectangle& r, const ModelParams& p, double tol, double spacing) {
        SolveOptions o;
        o.tol = tol;
        o.spacing = spacing;
        return solve_invariant(r, p, o);
      },
      py::arg("rect"), py::arg("params"), py::arg("tol") = 1e-10, py::arg("spacing") = 0.01);
  m.def("decay_rate", [](const InvariantCurve& c) { return decay_rate(c.curve).c_prime; },
        py::arg("curve"));
  m.def(
      "find_intersection",
      [](const InvariantCurve& c, const ModelParams& p) {
        const auto x = find_intersection(c.curve, p);
        py::dict d;
        d["iterate"] = x.iterate;
        d["t_star"] = x.t_star;
        d["alpha0"] = x.alpha0;
        d["transversality_margin"] = x.transversality_margin;
        return d;
      },
      py::arg("curve"), py::arg("params"));
}
