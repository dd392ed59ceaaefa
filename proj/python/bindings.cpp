#include <pybind11/pybind11.h>
#include <pybind11/complex.h>
#include <pybind11/stl.h>

#include <sstream>

#include "abg/bounds.hpp"
#include "abg/errors.hpp"
#include "abg/funcs.hpp"
#include "abg/growth.hpp"
#include "abg/harness.hpp"
#include "abg/ode.hpp"
#include "abg/scale.hpp"
#include "abg/series.hpp"

namespace py = pybind11;
using namespace abg;

namespace {

RadialGrid make_grid(double r0, double q, int n) {
  RadialGrid g{r0, q, n};
  g.validate();
  return g;
}

py::dict order_dict(const OrderEstimate& e) {
  py::dict d;
  d["mode"] = to_string(e.mode);
  d["value"] = e.value;
  d["raw_tail_max"] = e.raw_tail_max;
  d["slope"] = e.slope;
  d["ratios"] = e.ratios;
  std::vector<double> r;
  for (const auto& s : e.samples) r.push_back(s.r);
  d["r"] = r;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "growth of analytic functions in the unit disc";

  py::register_exception<Error>(m, "AbgError", PyExc_ValueError);

  m.def("normalize", [](const std::string& expr) { return to_string(parse_expr(expr)); },
        py::arg("expr"), "Parse an expression and print it back in canonical form.");

  m.def("evaluate",
        [](const std::string& expr, std::complex<double> z) {
          const LogComplex v = eval_log(parse_expr(expr), z);
          return py::make_tuple(v.logmag, v.phase);
        },
        py::arg("expr"), py::arg("z"), "(log|f(z)|, arg f(z))");

  m.def("derivative", [](const std::string& expr) { return to_string(diff(parse_expr(expr))); },
        py::arg("expr"));

  m.def("catalog", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& c : catalog()) out.emplace_back(c.name, to_string(c.expr));
    return out;
  });

  m.def("check_triple",
        [](const std::string& triple) {
          const ClassReport r = check_triple(parse_triple(triple));
          return py::make_tuple(r.pass, describe(r));
        },
        py::arg("triple"));

  m.def("max_modulus", [](const std::string& expr, double r) { return max_modulus(parse_expr(expr), r).logM(); },
        py::arg("expr"), py::arg("r"), "log M(r, f)");

  m.def("characteristic",
        [](const std::string& expr, double r) { return characteristic(parse_expr(expr), r).log_T; },
        py::arg("expr"), py::arg("r"), "log T(r, f)");

  m.def("evaluable_prefix",
        [](const std::string& expr, double r0, double q, int n) {
          return evaluable_prefix(parse_expr(expr), make_grid(r0, q, n));
        },
        py::arg("expr"), py::arg("r0") = 0.5, py::arg("q") = 0.72, py::arg("n") = 24);

  m.def("order",
        [](const std::string& expr, const std::string& triple, const std::string& mode, double r0,
           double q, int n) {
          return order_dict(order_estimate(parse_expr(expr), parse_triple(triple), make_grid(r0, q, n),
                                           parse_mode(mode)));
        },
        py::arg("expr"), py::arg("triple") = "iterlog:1,id,id", py::arg("mode") = "M",
        py::arg("r0") = 0.5, py::arg("q") = 0.72, py::arg("n") = 24);

  m.def("type",
        [](const std::string& expr, double rho, const std::string& triple, const std::string& mode,
           double r0, double q, int n) {
          return type_estimate(parse_expr(expr), parse_triple(triple), make_grid(r0, q, n),
                               parse_mode(mode), rho)
              .value;
        },
        py::arg("expr"), py::arg("rho"), py::arg("triple") = "iterlog:1,id,id",
        py::arg("mode") = "M", py::arg("r0") = 0.5, py::arg("q") = 0.72, py::arg("n") = 24);

  m.def("solve",
        [](const std::string& problem, std::size_t n, std::vector<std::complex<double>> points) {
          const OdeProblem p = parse_problem(problem);
          const LogSeries s = solve_series(p, n);
          std::vector<std::pair<double, double>> vals;
          for (auto z : points) {
            const LogComplex v = eval_series(s, z);
            vals.emplace_back(v.logmag, v.phase);
          }
          py::dict d;
          d["r_reliable"] = s.r_reliable;
          d["values"] = vals;
          std::vector<double> lm;
          for (const auto& c : s.coeffs) lm.push_back(c.logmag);
          d["logmag"] = lm;
          return d;
        },
        py::arg("problem"), py::arg("n") = kDefaultSeriesTerms,
        py::arg("points") = std::vector<std::complex<double>>{},
        "Series solution of a problem given as problem-file text.");

  m.def("bound",
        [](const std::string& problem, double r, double theta) {
          const HeittokangasBound b = heittokangas_bound(parse_problem(problem), r, theta);
          py::dict d;
          d["log_C"] = b.log_C;
          d["log_I"] = b.log_I;
          d["n_c"] = b.n_c;
          d["log_bound"] = b.log_bound.value();
          return d;
        },
        py::arg("problem"), py::arg("r"), py::arg("theta") = 0.0);

  m.def("scenarios", [] { return scenario_names(); });

  m.def("verify",
        [](const std::string& name, const std::string& config) {
          const ScenarioReport r = run_named(name, parse_config(config));
          return py::make_tuple(r.pass(), r.text());
        },
        py::arg("name"), py::arg("config") = "", "Run a scenario; returns (passed, report text).");
}
