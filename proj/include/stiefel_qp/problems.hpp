#pragma once

#include <cstdint>

#include "stiefel_qp/core.hpp"
#include "stiefel_qp/gpi.hpp"

namespace stiefel_qp {

/// min ||X^T W + 1 b^T - Y||_F^2 over orthonormal W (m x k) and free b.
/// X is features x samples (m x n), Y is samples x targets (n x k).
class OlsrProblem {
 public:
  OlsrProblem(Matrix x, Matrix y);

  const Matrix& x() const noexcept { return x_; }
  const Matrix& y() const noexcept { return y_; }
  Eigen::Index m() const noexcept { return x_.rows(); }
  Eigen::Index n() const noexcept { return x_.cols(); }
  Eigen::Index k() const noexcept { return y_.cols(); }

 private:
  Matrix x_;
  Matrix y_;
};

struct OlsrSolution {
  StiefelMatrix w;
  Vector b;
  SolveReport report;
};

/// H V with H = I - (1/n) 1 1^T, i.e. subtracts the column means of V.
Matrix apply_centering(const Matrix& v);

/// A = X H X^T, B = X H Y. H is never formed.
QpsmProblem olsr_reduce(const OlsrProblem& p);

/// b = (1/n) (Y^T 1 - W^T X 1).
Vector olsr_bias(const OlsrProblem& p, const Matrix& w);

/// ||X^T W + 1 b^T - Y||_F.
double olsr_residual(const OlsrProblem& p, const Matrix& w, const Vector& b);

/// Gradient of ||X^T W + 1 b^T - Y||_F^2 with respect to b.
Vector olsr_bias_gradient(const OlsrProblem& p, const Matrix& w,
                          const Vector& b);

OlsrSolution olsr_solve(const OlsrProblem& p, const SolverConfig& config);

/// min ||E Q - G||_F^2 over orthonormal Q (m x k), E is n x m, G is n x k.
class ProcrustesProblem {
 public:
  ProcrustesProblem(Matrix e, Matrix g);

  const Matrix& e() const noexcept { return e_; }
  const Matrix& g() const noexcept { return g_; }
  Eigen::Index n() const noexcept { return e_.rows(); }
  Eigen::Index m() const noexcept { return e_.cols(); }
  Eigen::Index k() const noexcept { return g_.cols(); }
  bool balanced() const noexcept { return m() == k(); }

 private:
  Matrix e_;
  Matrix g_;
};

/// ||E Q - G||_F^2.
double procrustes_residual(const ProcrustesProblem& p, const Matrix& q);

/// Closed-form solution of the balanced case (m == k): polar factor of E^T G.
StiefelMatrix balanced_procrustes(const ProcrustesProblem& p);

/// A = E^T E, B = E^T G; objective(reduced, Q) = ||EQ - G||^2 - ||G||^2.
QpsmProblem uopp_reduce(const ProcrustesProblem& p);

struct UoppReport {
  SolveReport report;
  /// ||E Q - G||_F^2 at the final iterate.
  double residual = 0.0;
  /// Per-iteration ||E Q - G||_F^2, aligned with report.objective_trajectory.
  std::vector<double> residual_trajectory;
};

/// Generalized power iteration on the reduced problem; the stopping test
/// runs on ||E Q - G||^2 differences. Balanced instances use the closed form
/// and report a single iteration.
UoppReport uopp_solve(const ProcrustesProblem& p, const SolverConfig& config);

/// Instance with G = E Q0 for a random orthonormal Q0, so min residual is 0.
struct PlantedProcrustes {
  ProcrustesProblem problem;
  Matrix q0;
};

PlantedProcrustes planted_procrustes(Eigen::Index n, Eigen::Index m,
                                     Eigen::Index k, std::uint64_t seed);

/// Instance with Y = X^T W0 + 1 b0^T exactly.
struct PlantedOlsr {
  OlsrProblem problem;
  Matrix w0;
  Vector b0;
};

PlantedOlsr planted_olsr(Eigen::Index m, Eigen::Index n, Eigen::Index k,
                         std::uint64_t seed);

/// Standard Gaussian rows x cols matrix from a seeded generator.
Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                       std::uint64_t seed);

}  // namespace stiefel_qp
