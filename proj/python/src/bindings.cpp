#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>

#include "broyden_lab/bounds.hpp"
#include "broyden_lab/broyden_update.hpp"
#include "broyden_lab/errors.hpp"
#include "broyden_lab/potentials.hpp"
#include "broyden_lab/problems.hpp"
#include "broyden_lab/runner.hpp"
#include "broyden_lab/solver.hpp"

namespace py = pybind11;
using namespace broyden_lab;

namespace {

TauSchedule schedule_of(const py::object& method) {
  if (py::isinstance<py::str>(method)) {
    const auto s = method.cast<std::string>();
    if (s == "BFGS" || s == "bfgs") return TauSchedule::bfgs();
    if (s == "DFP" || s == "dfp") return TauSchedule::dfp();
    throw DomainError("method must be \"BFGS\", \"DFP\" or a tau in [0, 1]");
  }
  if (py::isinstance<py::float_>(method) || py::isinstance<py::int_>(method)) {
    return TauSchedule::constant(method.cast<double>());
  }
  return TauSchedule::sequence(method.cast<std::vector<double>>());
}

py::dict trace_dict(const IterationTrace& t) {
  const auto n = t.records.size();
  Vector lambda(n), xi(n), r(n), tau(n), g(n);
  Matrix x(n, t.n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& rec = t.records[k];
    const auto i = static_cast<Eigen::Index>(k);
    lambda(i) = rec.lambda;
    g(i) = rec.g;
    xi(i) = rec.xi;
    r(i) = rec.has_step ? rec.r : std::numeric_limits<double>::quiet_NaN();
    tau(i) = rec.has_step ? rec.tau : std::numeric_limits<double>::quiet_NaN();
    x.row(i) = rec.x.coords().transpose();
  }
  py::dict d;
  d["status"] = t.status == TraceStatus::Converged ? "converged" : "max_iterations";
  d["iterations"] = t.iterations();
  d["lambda"] = lambda;
  d["g"] = g;
  d["xi"] = xi;
  d["r"] = r;
  d["tau"] = tau;
  d["x"] = x;
  d["mu"] = t.mu;
  d["L"] = t.ell;
  d["M"] = t.m_sc;
  d["diagnostics"] = t.diagnostics;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Convex Broyden class updates, potentials and convergence envelopes.";

  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NotSpdError>(m, "NotSpdError", PyExc_ValueError);

  m.def(
      "broyd",
      [](const Matrix& a, const Matrix& g, const Vector& u, double tau) {
        const UpdateResult r =
            broyd(SpdOperator(a), SpdOperator(g), PrimalVector(u), TauParam(tau));
        py::dict d;
        d["g_plus"] = r.g_plus.matrix();
        d["h_plus"] = r.g_plus_inv.matrix();
        d["phi"] = r.phi;
        d["det_ratio"] = r.det_ratio;
        return d;
      },
      py::arg("a"), py::arg("g"), py::arg("u"), py::arg("tau"),
      "Broyd_tau(A, G, u) with its inverse, phi and Det(G_+^{-1}, G).");

  m.def(
      "nu",
      [](const Matrix& a, const Matrix& g, const Vector& u) {
        return nu(SpdOperator(a), SpdOperator(g), PrimalVector(u));
      },
      py::arg("a"), py::arg("g"), py::arg("u"));
  m.def(
      "logdet_barrier",
      [](const Matrix& a, const Matrix& g) { return logdet_barrier(SpdOperator(a), SpdOperator(g)); },
      py::arg("a"), py::arg("g"), "V(A, G) = ln Det(A^{-1}, G).");
  m.def(
      "augmented_barrier",
      [](const Matrix& g, const Matrix& a) {
        return augmented_barrier(SpdOperator(g), SpdOperator(a));
      },
      py::arg("g"), py::arg("a"), "psi(G, A).");
  m.def(
      "rel_eigen_range",
      [](const Matrix& g, const Matrix& a) {
        const EigenRange r = rel_eigen_range(SpdOperator(g), SpdOperator(a));
        return py::make_tuple(r.min_rel, r.max_rel);
      },
      py::arg("g"), py::arg("a"));

  m.def("k0", &k0, py::arg("n"), py::arg("mu"), py::arg("L"), py::arg("sup_tau"));
  m.def("region_radius", &region_radius, py::arg("mu"), py::arg("L"), py::arg("n"),
        py::arg("sup_tau"), py::arg("M"));
  m.def("env_quad_linear", &env_quad_linear, py::arg("mu"), py::arg("L"), py::arg("k"),
        py::arg("lambda0"));
  m.def("env_quad_superlinear", &env_quad_superlinear, py::arg("n"), py::arg("mu"), py::arg("L"),
        py::arg("taus"), py::arg("k"), py::arg("lambda0"));

  m.def(
      "solve",
      [](const std::string& instance_json, const Vector& x0, const py::object& method,
         const std::string& path, double grad_tol, int max_iter) {
        const ProblemInstance p = instance_from_json_text(instance_json);
        const TauSchedule sched = schedule_of(method);
        SolverConfig cfg;
        cfg.grad_tol = grad_tol;
        cfg.max_iter = max_iter;
        const bool general =
            path == "general" || (path == "auto" && p.kind() == ProblemKind::LogSumExp);
        if (path != "auto" && path != "general" && path != "quadratic") {
          throw DomainError("path must be \"auto\", \"quadratic\" or \"general\"");
        }
        if (!general && p.kind() != ProblemKind::Quadratic) {
          throw DomainError("the quadratic path needs a quadratic instance");
        }
        IterationTrace t;
        {
          py::gil_scoped_release release;
          t = general ? run_general(p, PrimalVector(x0), sched, cfg)
                      : run_quadratic(*p.quadratic(), PrimalVector(x0), sched, cfg);
        }
        py::dict d = trace_dict(t);
        const EnvelopeReport rep = general ? envelope_report(t, {"general_linear_xi",
                                                                 "general_superlinear_xi"})
                                           : env_quad_report(t);
        d["envelopes_passed"] = rep.passed();
        d["K0"] = rep.k0;
        d["region_radius"] = rep.region_radius;
        return d;
      },
      py::arg("instance"), py::arg("x0"), py::arg("method") = "BFGS", py::arg("path") = "auto",
      py::arg("grad_tol") = 1e-12, py::arg("max_iter") = 1000,
      "Runs the scheme on an instance given as JSON text; returns the trace as arrays.");

  m.def(
      "run_config",
      [](const std::string& config_path, std::optional<std::string> out_dir, int jobs) {
        RunOptions opt;
        opt.jobs = jobs;
        opt.out_dir = std::move(out_dir);
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cmd_run(config_path, opt, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("config_path"), py::arg("out_dir") = py::none(), py::arg("jobs") = 1,
      "Same as `broyden_lab run`; returns (exit_code, stdout, stderr).");

  m.def(
      "verify",
      [](int n_max, int trials, std::uint64_t seed) {
        std::ostringstream out, err;
        const int code = cmd_verify(n_max, trials, seed, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("n_max") = 8, py::arg("trials") = 1000, py::arg("seed") = 0);
}
