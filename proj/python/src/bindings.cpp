#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "saddleflow/builtins.hpp"
#include "saddleflow/certificates.hpp"
#include "saddleflow/control.hpp"
#include "saddleflow/distributed.hpp"
#include "saddleflow/errors.hpp"
#include "saddleflow/flows.hpp"
#include "saddleflow/integrate.hpp"
#include "saddleflow/lp.hpp"
#include "saddleflow/reference.hpp"

namespace py = pybind11;
using namespace saddleflow;

namespace {

// Trajectory states as an (samples x dimension) array.
Mat stack_states(const Trajectory& t) {
  if (t.empty()) return Mat(0, 0);
  Mat out(static_cast<Eigen::Index>(t.size()), t.states.front().size());
  for (std::size_t k = 0; k < t.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = t.states[k];
  return out;
}

// Python callables are held by the oracles; wrap them so the GIL is taken.
SaddleProblem python_problem(std::size_t n, std::size_t m, py::function grad_x,
                             py::function grad_y, std::optional<py::function> value,
                             ConvexityClass convexity, std::string name) {
  SaddleProblem p;
  p.n = n;
  p.m = m;
  p.convexity = convexity;
  p.name = std::move(name);
  p.grad_x = [f = std::move(grad_x)](const Vec& x, const Vec& y) {
    py::gil_scoped_acquire gil;
    return f(x, y).cast<Vec>();
  };
  p.grad_y = [f = std::move(grad_y)](const Vec& x, const Vec& y) {
    py::gil_scoped_acquire gil;
    return f(x, y).cast<Vec>();
  };
  if (value) {
    p.value = [f = std::move(*value)](const Vec& x, const Vec& y) {
      py::gil_scoped_acquire gil;
      return f(x, y).cast<double>();
    };
  }
  return p;
}

}  // namespace

PYBIND11_MODULE(_saddleflow, mod) {
  mod.doc() = "Saddle-point flows, certificates and LP solvers";

  auto error = py::register_exception<Error>(mod, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionMismatch>(mod, "DimensionMismatch", error.ptr());
  py::register_exception<UnsupportedOperation>(mod, "UnsupportedOperation", error.ptr());
  py::register_exception<InvalidArgument>(mod, "InvalidArgument", error.ptr());
  py::register_exception<InvalidInit>(mod, "InvalidInit", error.ptr());
  py::register_exception<Diverged>(mod, "Diverged", error.ptr());
  py::register_exception<ProtocolError>(mod, "ProtocolError", error.ptr());
  py::register_exception<UnsupportedScale>(mod, "UnsupportedScale", error.ptr());
  py::register_exception<ParseError>(mod, "ParseError", error.ptr());
  py::register_exception<NoConvergence>(mod, "NoConvergence", error.ptr());
  py::register_exception<NotConverged>(mod, "NotConverged", error.ptr());
  py::register_exception<ReproductionFailure>(mod, "ReproductionFailure", error.ptr());

  py::enum_<ConvexityClass>(mod, "ConvexityClass")
      .value("CONVEX_CONCAVE", ConvexityClass::ConvexConcave)
      .value("STRICTLY_CONVEX_CONCAVE", ConvexityClass::StrictlyConvexConcave)
      .value("BILINEAR", ConvexityClass::Bilinear);

  py::class_<SaddleProblem>(mod, "SaddleProblem")
      .def_readonly("n", &SaddleProblem::n)
      .def_readonly("m", &SaddleProblem::m)
      .def_readonly("name", &SaddleProblem::name)
      .def_readonly("convexity", &SaddleProblem::convexity)
      .def_property_readonly("has_value", &SaddleProblem::has_value)
      .def("value", [](const SaddleProblem& p, const Vec& x, const Vec& y) {
        return eval_value(p, {x, y});
      })
      .def("grad_x", [](const SaddleProblem& p, const Vec& x, const Vec& y) {
        return eval_gradients(p, {x, y}).gx;
      })
      .def("grad_y", [](const SaddleProblem& p, const Vec& x, const Vec& y) {
        return eval_gradients(p, {x, y}).gy;
      })
      .def("stationarity_residual", [](const SaddleProblem& p, const Vec& x, const Vec& y) {
        return stationarity_residual(p, {x, y});
      })
      .def("__repr__", [](const SaddleProblem& p) {
        return "<SaddleProblem '" + p.name + "' n=" + std::to_string(p.n) +
               " m=" + std::to_string(p.m) + ">";
      });

  mod.def("make_problem", &python_problem, py::arg("n"), py::arg("m"), py::arg("grad_x"),
          py::arg("grad_y"), py::arg("value") = py::none(),
          py::arg("convexity") = ConvexityClass::ConvexConcave, py::arg("name") = "python");
  mod.def("builtin_names", &builtin_names);
  mod.def("builtin_problem", [](const std::string& name) { return builtin(name).problem; });
  mod.def("builtin_saddle", [](const std::string& name) -> py::object {
    const auto& s = builtin(name).saddle;
    if (!s) return py::none();
    return py::make_tuple(s->x, s->y);
  });
  mod.def("bilinear_matrix_problem", &bilinear_matrix_problem, py::arg("b"));

  py::enum_<FlowKind>(mod, "FlowKind")
      .value("PLAIN", FlowKind::Plain)
      .value("REGULARIZED", FlowKind::Regularized)
      .value("PROJECTED", FlowKind::Projected)
      .value("PROJECTED_REGULARIZED", FlowKind::ProjectedRegularized)
      .value("PROXIMAL", FlowKind::Proximal);

  py::class_<VectorField>(mod, "VectorField")
      .def_readonly("dimension", &VectorField::dimension)
      .def_readonly("kind", &VectorField::kind)
      .def_readonly("n", &VectorField::n)
      .def_readonly("m", &VectorField::m)
      .def_readonly("rho", &VectorField::rho)
      .def_readonly("nonneg_mask", &VectorField::nonneg_mask)
      .def("__call__", &VectorField::operator(), py::arg("state"));

  mod.def("plain_field", &plain_field, py::arg("problem"));
  mod.def("regularized_field", [](const SaddleProblem& p, double rho) {
    return regularized_field(p, {rho});
  }, py::arg("problem"), py::arg("rho") = 1.0);
  mod.def("projected_field", &projected_field, py::arg("problem"));
  mod.def("projected_regularized_field", [](const SaddleProblem& p, double rho) {
    return projected_regularized_field(p, {rho});
  }, py::arg("problem"), py::arg("rho") = 1.0);
  mod.def("proximal_field", [](const SaddleProblem& p, double tol, std::size_t max_it) {
    return proximal_field(p, {tol, max_it});
  }, py::arg("problem"), py::arg("tol") = 1e-10, py::arg("max_iterations") = 100000);
  mod.def("augment", [](const SaddleProblem& p, double rho) { return augment(p, {rho}); },
          py::arg("problem"), py::arg("rho") = 1.0);
  mod.def("project_component", &project_component, py::arg("nu"), py::arg("y"));
  mod.def("project", &project, py::arg("nu"), py::arg("y"));
  mod.def("extract_original_saddle", [](const Vec& state, std::size_t n, std::size_t m,
                                        double tol) {
    const PointPair p = extract_original_saddle(AugmentedState::unpack(state, n, m), tol);
    return py::make_tuple(p.x, p.y);
  }, py::arg("state"), py::arg("n"), py::arg("m"), py::arg("tol") = 1e-6);

  py::enum_<Scheme>(mod, "Scheme").value("EULER", Scheme::Euler).value("RK4", Scheme::Rk4);
  py::enum_<StopTag>(mod, "StopTag")
      .value("CONVERGED", StopTag::Converged)
      .value("HORIZON_REACHED", StopTag::HorizonReached)
      .value("DIVERGED", StopTag::Diverged)
      .value("INNER_FAILURE", StopTag::InnerFailure);

  py::class_<IntegratorConfig>(mod, "IntegratorConfig")
      .def(py::init([](Scheme scheme, double dt, double t_max, double conv_tol,
                       std::size_t conv_window, std::size_t record_stride) {
             IntegratorConfig c{scheme, dt, t_max, conv_tol, conv_window, record_stride};
             c.validate();
             return c;
           }),
           py::arg("scheme") = Scheme::Rk4, py::arg("dt") = 1e-3, py::arg("t_max") = 2000.0,
           py::arg("conv_tol") = 1e-8, py::arg("conv_window") = 10,
           py::arg("record_stride") = 100)
      .def_readwrite("scheme", &IntegratorConfig::scheme)
      .def_readwrite("dt", &IntegratorConfig::dt)
      .def_readwrite("t_max", &IntegratorConfig::t_max)
      .def_readwrite("conv_tol", &IntegratorConfig::conv_tol)
      .def_readwrite("conv_window", &IntegratorConfig::conv_window)
      .def_readwrite("record_stride", &IntegratorConfig::record_stride);

  py::class_<StopReason>(mod, "StopReason")
      .def_readonly("tag", &StopReason::tag)
      .def_readonly("detail", &StopReason::detail)
      .def_readonly("final_residual", &StopReason::final_residual)
      .def_readonly("final_time", &StopReason::final_time);

  py::class_<Trajectory>(mod, "Trajectory")
      .def_property_readonly("times", [](const Trajectory& t) { return t.times; })
      .def_property_readonly("states", &stack_states)
      .def_property_readonly("final_state", [](const Trajectory& t) { return t.final_state(); })
      .def("__len__", &Trajectory::size);

  py::class_<IntegrationResult>(mod, "IntegrationResult")
      .def_readonly("trajectory", &IntegrationResult::trajectory)
      .def_readonly("stop", &IntegrationResult::stop);

  mod.def("step", &step, py::arg("field"), py::arg("state"), py::arg("dt"),
          py::arg("scheme") = Scheme::Rk4);
  mod.def("integrate", &integrate, py::arg("field"), py::arg("init"),
          py::arg("config") = IntegratorConfig{});

  py::class_<CertificateValue>(mod, "CertificateValue")
      .def_readonly("h1", &CertificateValue::h1)
      .def_readonly("h2", &CertificateValue::h2)
      .def("__iter__", [](const CertificateValue& h) {
        return py::iter(py::make_tuple(h.h1, h.h2));
      });

  mod.def("lyapunov_value", [](const Vec& xs, const Vec& ys, const Vec& x, const Vec& y) {
    return lyapunov_value({xs, ys}, {x, y});
  }, py::arg("x_star"), py::arg("y_star"), py::arg("x"), py::arg("y"));
  mod.def("saddle_gap", [](const SaddleProblem& p, const Vec& xs, const Vec& ys, const Vec& x,
                           const Vec& y) { return saddle_gap(p, {xs, ys}, {x, y}); },
          py::arg("problem"), py::arg("x_star"), py::arg("y_star"), py::arg("x"), py::arg("y"));
  mod.def("certificate_strict", [](const SaddleProblem& p, const Vec& xs, const Vec& ys,
                                   const Vec& x, const Vec& y) {
    return certificate_strict(p, {xs, ys}, {x, y});
  }, py::arg("problem"), py::arg("x_star"), py::arg("y_star"), py::arg("x"), py::arg("y"));
  mod.def("certificate_separable", [](double rho, const Vec& x, const Vec& z, const Vec& y,
                                      const Vec& w) {
    return certificate_separable({rho}, {x, z, y, w});
  }, py::arg("rho"), py::arg("x"), py::arg("z"), py::arg("y"), py::arg("w"));
  mod.def("certificate_proximal", [](const SaddleProblem& p, const Vec& zs, const Vec& ys,
                                     const Vec& z, const Vec& y) {
    return certificate_proximal(p, {zs, ys}, z, y);
  }, py::arg("problem"), py::arg("z_star"), py::arg("y_star"), py::arg("z"), py::arg("y"));
  mod.def("sandwich_holds", [](const SaddleProblem& p, const Vec& xs, const Vec& ys,
                               const Vec& x, const Vec& y, const CertificateValue& h,
                               double slack) {
    return sandwich_check(p, {xs, ys}, {x, y}, h, slack).passed();
  }, py::arg("problem"), py::arg("x_star"), py::arg("y_star"), py::arg("x"), py::arg("y"),
          py::arg("h"), py::arg("slack") = 1e-9);

  py::class_<LinearProgram>(mod, "LinearProgram")
      .def(py::init([](const Vec& c, const Mat& a, const Vec& b) {
             LinearProgram lp{c, a, b};
             lp.validate();
             return lp;
           }),
           py::arg("c"), py::arg("a"), py::arg("b"))
      .def_readonly("c", &LinearProgram::c)
      .def_readonly("a", &LinearProgram::a)
      .def_readonly("b", &LinearProgram::b)
      .def_property_readonly("n", &LinearProgram::n)
      .def_property_readonly("m", &LinearProgram::m)
      .def("objective", &LinearProgram::objective)
      .def("lagrangian", [](const LinearProgram& lp) { return lagrangian(lp); });

  py::class_<KktResiduals>(mod, "KktResiduals")
      .def_readonly("stationarity", &KktResiduals::stationarity)
      .def_readonly("primal_infeasibility", &KktResiduals::primal_infeasibility)
      .def_readonly("dual_infeasibility", &KktResiduals::dual_infeasibility)
      .def_readonly("complementarity", &KktResiduals::complementarity);
  mod.def("kkt_residuals", [](const LinearProgram& lp, const Vec& x, const Vec& y) {
    return kkt_residuals(lp, {x, y});
  }, py::arg("lp"), py::arg("x"), py::arg("y"));

  py::class_<LpSolveResult>(mod, "LpSolveResult")
      .def_property_readonly("x", [](const LpSolveResult& r) { return r.solution.x; })
      .def_property_readonly("y", [](const LpSolveResult& r) { return r.solution.y; })
      .def_readonly("trajectory", &LpSolveResult::trajectory)
      .def_readonly("stop", &LpSolveResult::stop)
      .def_readonly("objective", &LpSolveResult::objective)
      .def_readonly("diagnostic", &LpSolveResult::diagnostic)
      .def_property_readonly("converged", &LpSolveResult::converged);
  mod.def("solve_lp", [](const LinearProgram& lp, double rho, const IntegratorConfig& icfg) {
    py::gil_scoped_release nogil;
    return solve(lp, {rho}, icfg);
  }, py::arg("lp"), py::arg("rho") = 3.0, py::arg("config") = IntegratorConfig{});

  py::enum_<LpStatus>(mod, "LpStatus")
      .value("OPTIMAL", LpStatus::Optimal)
      .value("INFEASIBLE", LpStatus::Infeasible)
      .value("UNBOUNDED", LpStatus::Unbounded);
  py::class_<ReferenceSolution>(mod, "ReferenceSolution")
      .def_readonly("status", &ReferenceSolution::status)
      .def_readonly("x", &ReferenceSolution::x)
      .def_readonly("y", &ReferenceSolution::y)
      .def_readonly("objective", &ReferenceSolution::objective)
      .def_readonly("bases_examined", &ReferenceSolution::bases_examined);
  mod.def("reference_solve", &reference_solve, py::arg("lp"), py::arg("tol") = 1e-9);

  py::class_<DistributedRun>(mod, "DistributedRun")
      .def_readonly("trajectory", &DistributedRun::trajectory)
      .def_readonly("stop", &DistributedRun::stop)
      .def_readonly("rounds", &DistributedRun::rounds);
  mod.def("run_distributed", [](const LinearProgram& lp, double rho,
                                const IntegratorConfig& icfg) {
    py::gil_scoped_release nogil;
    return run_distributed(lp, {rho}, icfg);
  }, py::arg("lp"), py::arg("rho") = 3.0, py::arg("config") = IntegratorConfig{});

  mod.def("reproduce_paper_case", [](const IntegratorConfig& icfg) {
    ReproductionResult r = [&] {
      py::gil_scoped_release nogil;
      return reproduce_paper_case(icfg);
    }();
    py::dict d;
    d["u"] = r.solution.u;
    d["x"] = r.solution.x;
    d["objective"] = r.solution.objective;
    d["max_deviation"] = r.diagnostics.max_deviation;
    d["min_final_dual"] = r.diagnostics.min_final_dual;
    d["seconds"] = r.diagnostics.seconds;
    d["final_time"] = r.diagnostics.stop.final_time;
    return d;
  }, py::arg("config") = IntegratorConfig{});
}
