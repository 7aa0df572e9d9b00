#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "anderkit/checks.hpp"
#include "anderkit/experiment.hpp"

namespace py = pybind11;
using namespace anderkit;

namespace {

py::dict trace_dict(const ConvergenceTrace& t) {
  const auto column = [&t](auto field) {
    py::list out;
    for (const TraceRow& r : t.rows) {
      const auto v = field(r);
      if constexpr (std::is_same_v<decltype(v), const std::optional<double>>) {
        out.append(v ? py::cast(*v) : py::none());
      } else {
        out.append(v);
      }
    }
    return out;
  };
  py::dict d;
  d["termination"] = std::string(to_string(t.termination));
  d["iters"] = t.iterations();
  d["fevals"] = feval_count(t);
  d["final_res"] = t.final_residual();
  d["iter"] = column([](const TraceRow& r) { return r.k; });
  d["feval"] = column([](const TraceRow& r) { return r.fevals; });
  d["res_norm"] = column([](const TraceRow& r) { return r.res_norm; });
  d["beta"] = column([](const TraceRow& r) { return r.beta; });
  d["theta"] = column([](const TraceRow& r) { return r.theta; });
  d["alpha_abs_sum"] = column([](const TraceRow& r) { return r.alpha_abs_sum; });
  d["wall_ns"] = column([](const TraceRow& r) { return r.wall_ns; });
  return d;
}

}  // namespace

PYBIND11_MODULE(_anderkit, m) {
  m.doc() = "Anderson acceleration with optimized damping and composed accelerators";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SpecParseError>(m, "SpecParseError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("least_squares", &least_squares, py::arg("matrix"), py::arg("rhs"));
  m.def("optimized_beta", &optimized_beta, py::arg("r_p"), py::arg("r_q"));

  m.def("canonical_spec", [](const std::string& text) { return render_spec(parse_spec(text)); },
        py::arg("spec"), "Parse a solver spec and return its canonical text.");
  m.def("memory_footprint", [](const std::string& text) { return memory_footprint(parse_spec(text)); },
        py::arg("spec"));

  py::class_<FixedPointProblem>(m, "Problem")
      .def(py::init([](py::function g, Eigen::Index n, std::optional<Vector> x0) {
             FixedPointProblem p;
             p.label = "python";
             p.n = n;
             p.g = [g](const Vector& x) {
               py::gil_scoped_acquire gil;
               return g(x).cast<Vector>();
             };
             p.default_start = x0 ? *x0 : Vector::Zero(n);
             return p;
           }),
           py::arg("g"), py::arg("n"), py::arg("x0") = py::none())
      .def_readonly("label", &FixedPointProblem::label)
      .def_readonly("n", &FixedPointProblem::n)
      .def_readonly("default_start", &FixedPointProblem::default_start)
      .def_readonly("known_solution", &FixedPointProblem::known_solution)
      .def("__call__", [](const FixedPointProblem& p, const Vector& x) { return p.g(x); })
      .def("residual", &FixedPointProblem::residual_of);

  m.def("bratu", &bratu_problem, py::arg("N") = 64, py::arg("lam") = 6.0);
  m.def(
      "convdiff",
      [](int side, double eps, double k, const std::string& scheme) {
        if (scheme != "centered" && scheme != "upwind") {
          throw ConfigError("scheme must be 'centered' or 'upwind'");
        }
        return convdiff_problem(side, eps, k,
                                scheme == "upwind" ? ConvectionScheme::upwind
                                                   : ConvectionScheme::centered);
      },
      py::arg("N") = 32, py::arg("epsilon") = 1.0, py::arg("k") = 3.0,
      py::arg("scheme") = "centered");
  m.def("tridiag", &tridiag_problem, py::arg("n") = 100);
  m.def("affine", &affine_problem, py::arg("C"), py::arg("d"));

  m.def(
      "solve",
      [](const std::string& spec, const FixedPointProblem& problem, std::optional<Vector> x0,
         double tol, std::int64_t max_iters, std::int64_t max_fevals, bool return_x) {
        RunConfig config;
        config.tol = tol;
        config.max_outer_iters = max_iters;
        config.max_fevals = max_fevals;
        Vector last;
        RunOptions options;
        if (return_x) options.on_iterate = [&last](std::int64_t, const Vector& x) { last = x; };
        const ConvergenceTrace t =
            run(parse_spec(spec), problem, x0 ? *x0 : problem.default_start, config, options);
        py::dict d = trace_dict(t);
        if (return_x) d["x"] = last;
        return d;
      },
      py::arg("spec"), py::arg("problem"), py::arg("x0") = py::none(), py::arg("tol") = 1e-8,
      py::arg("max_iters") = 1000, py::arg("max_fevals") = 10'000'000, py::arg("return_x") = true,
      "Run one solver; returns a dict of per-iteration columns plus the summary fields.");

  m.def(
      "run_config",
      [](const std::string& json_text) {
        const ExperimentConfig config = parse_experiment_config(json_text);
        std::vector<SolverOutcome> outcomes;
        {
          py::gil_scoped_release release;
          outcomes = run_experiment(config);
          write_experiment(config, outcomes);
        }
        py::dict out;
        for (const SolverOutcome& o : outcomes) out[py::str(o.label)] = trace_dict(o.trace);
        return out;
      },
      py::arg("json_text"), "Run a JSON experiment config and write its CSV files.");

  m.def("check", [] {
    std::vector<CheckResult> results;
    {
      py::gil_scoped_release release;
      results = run_checks();
    }
    py::list out;
    for (const CheckResult& r : results) {
      py::dict d;
      d["id"] = r.id;
      d["name"] = r.name;
      d["passed"] = r.passed;
      d["detail"] = r.detail;
      d["seconds"] = r.seconds;
      out.append(d);
    }
    return out;
  });
}
