#include <optional>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stiefel_qp/bench.hpp"
#include "stiefel_qp/oracle.hpp"
#include "stiefel_qp/problems.hpp"

namespace py = pybind11;
using namespace stiefel_qp;
using namespace py::literals;

namespace {

SolverConfig make_config(double tau, double delta, std::optional<double> alpha,
                         long max_iters, std::optional<double> kkt_tol, std::uint64_t seed,
                         bool record_trajectory, std::optional<double> time_limit) {
  SolverConfig c;
  if (alpha) {
    c.alpha_strategy = ExplicitAlpha{*alpha};
  } else {
    c.alpha_strategy = DeltaTimesLambdaMax{delta};
  }
  c.tau = tau;
  c.max_iters = max_iters;
  c.kkt_tol = kkt_tol;
  c.seed = seed;
  c.record_trajectory = record_trajectory;
  c.time_limit_seconds = time_limit;
  return c;
}

// Keyword arguments shared by every solver entry point.
#define SOLVER_KWARGS                                                                   \
  py::kw_only(), "tau"_a = 1e-3, "delta"_a = 1.01, "alpha"_a = py::none(),              \
      "max_iters"_a = 10000, "kkt_tol"_a = py::none(), "seed"_a = 0,                    \
      "record_trajectory"_a = true, "time_limit"_a = py::none()

oracle::Manifold parse_manifold(const std::string& name) {
  if (name == "V21") return oracle::Manifold::V21;
  if (name == "V31") return oracle::Manifold::V31;
  if (name == "V32") return oracle::Manifold::V32;
  throw InvalidInput("manifold must be 'V21', 'V31' or 'V32'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quadratic problems on the Stiefel manifold";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  py::class_<SolveReport>(m, "SolveReport")
      .def_property_readonly("w", [](const SolveReport& r) { return r.final_w.matrix(); })
      .def_readonly("objective", &SolveReport::final_objective)
      .def_readonly("iterations", &SolveReport::iterations)
      .def_readonly("objective_trajectory", &SolveReport::objective_trajectory)
      .def_readonly("kkt_trajectory", &SolveReport::kkt_trajectory)
      .def_readonly("orthogonality_trajectory", &SolveReport::orthogonality_trajectory)
      .def_readonly("kkt_residual", &SolveReport::kkt_residual)
      .def_readonly("alpha", &SolveReport::alpha_used)
      .def_readonly("elapsed_seconds", &SolveReport::elapsed_seconds)
      .def_readonly("cpu_seconds", &SolveReport::cpu_seconds)
      .def_readonly("converged", &SolveReport::converged)
      .def_readonly("timed_out", &SolveReport::timed_out)
      .def_readonly("non_unique_subproblem_seen", &SolveReport::non_unique_subproblem_seen)
      .def("__repr__", [](const SolveReport& r) {
        return "<SolveReport objective=" + std::to_string(r.final_objective) +
               " iterations=" + std::to_string(r.iterations) +
               (r.converged ? " converged>" : " not converged>");
      });

  py::class_<UoppReport>(m, "UoppReport")
      .def_readonly("report", &UoppReport::report)
      .def_readonly("residual", &UoppReport::residual)
      .def_readonly("residual_trajectory", &UoppReport::residual_trajectory);

  py::class_<OlsrSolution>(m, "OlsrSolution")
      .def_property_readonly("w", [](const OlsrSolution& s) { return s.w.matrix(); })
      .def_readonly("b", &OlsrSolution::b)
      .def_readonly("report", &OlsrSolution::report);

  m.def(
      "objective",
      [](const Matrix& a, const Matrix& b, const Matrix& w) {
        return objective(QpsmProblem(SymmetricMatrix(a), b), StiefelMatrix(w));
      },
      "a"_a, "b"_a, "w"_a, "Tr(W'AW - 2W'B) for orthonormal W.");

  m.def(
      "polar_project",
      [](const Matrix& mat) { return polar_project(mat).w.matrix(); }, "m"_a,
      "Orthonormal U V' from the compact SVD of m, the maximizer of Tr(W'M).");

  m.def(
      "kkt_residual",
      [](const Matrix& a, const Matrix& b, const Matrix& w, double alpha) {
        return kkt_residual(QpsmProblem(SymmetricMatrix(a), b), alpha, StiefelMatrix(w));
      },
      "a"_a, "b"_a, "w"_a, "alpha"_a);

  m.def(
      "gpi_solve",
      [](const Matrix& a, const Matrix& b, double tau, double delta, std::optional<double> alpha,
         long max_iters, std::optional<double> kkt_tol, std::uint64_t seed, bool record,
         std::optional<double> time_limit) {
        const QpsmProblem p(SymmetricMatrix(a), b);
        const SolverConfig c =
            make_config(tau, delta, alpha, max_iters, kkt_tol, seed, record, time_limit);
        py::gil_scoped_release release;
        return gpi_solve(p, c);
      },
      "a"_a, "b"_a, SOLVER_KWARGS,
      "Minimize Tr(W'AW - 2W'B) over orthonormal W by generalized power iteration.");

  m.def(
      "uopp_solve",
      [](const Matrix& e, const Matrix& g, double tau, double delta, std::optional<double> alpha,
         long max_iters, std::optional<double> kkt_tol, std::uint64_t seed, bool record,
         std::optional<double> time_limit) {
        const ProcrustesProblem p(e, g);
        const SolverConfig c =
            make_config(tau, delta, alpha, max_iters, kkt_tol, seed, record, time_limit);
        py::gil_scoped_release release;
        return uopp_solve(p, c);
      },
      "e"_a, "g"_a, SOLVER_KWARGS, "Minimize ||EQ - G||_F^2 over orthonormal Q.");

  m.def(
      "balanced_procrustes",
      [](const Matrix& e, const Matrix& g) {
        return balanced_procrustes(ProcrustesProblem(e, g)).matrix();
      },
      "e"_a, "g"_a);

  m.def(
      "olsr_solve",
      [](const Matrix& x, const Matrix& y, double tau, double delta, std::optional<double> alpha,
         long max_iters, std::optional<double> kkt_tol, std::uint64_t seed, bool record,
         std::optional<double> time_limit) {
        const OlsrProblem p(x, y);
        const SolverConfig c =
            make_config(tau, delta, alpha, max_iters, kkt_tol, seed, record, time_limit);
        py::gil_scoped_release release;
        return olsr_solve(p, c);
      },
      "x"_a, "y"_a, SOLVER_KWARGS,
      "Minimize ||X'W + 1b' - Y||_F^2 over orthonormal W and free b.");

  m.def(
      "grid_minimize",
      [](const Matrix& a, const Matrix& b, const std::string& manifold, long resolution) {
        const oracle::GridResult r = oracle::grid_minimize(
            QpsmProblem(SymmetricMatrix(a), b), {parse_manifold(manifold), resolution});
        return py::make_tuple(r.w.matrix(), r.objective);
      },
      "a"_a, "b"_a, "manifold"_a, "resolution"_a = 1000,
      "Brute-force grid minimum over V21, V31 or V32.");

  m.def(
      "gen_instance",
      [](long n, long mm, long k, std::uint64_t seed) {
        const bench::GeneratedInstance inst = bench::gen_instance(n, mm, k, seed);
        return py::make_tuple(inst.problem.e(), inst.problem.g(), inst.singular_values);
      },
      "n"_a, "m"_a, "k"_a, "seed"_a = 0, "Seeded Procrustes instance (E, G, singular values).");

  m.def(
      "random_qpsm",
      [](long mm, long k, std::uint64_t seed) {
        const QpsmProblem p = bench::random_qpsm(mm, k, seed);
        return py::make_tuple(p.a().matrix(), p.b());
      },
      "m"_a, "k"_a, "seed"_a = 0);
}
