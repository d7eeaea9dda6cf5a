#include "stiefel_qp/problems.hpp"

#include <random>

#include "stiefel_qp/random.hpp"

namespace stiefel_qp {

OlsrProblem::OlsrProblem(Matrix x, Matrix y) : x_(std::move(x)), y_(std::move(y)) {
  require_dense(x_, "X");
  require_dense(y_, "Y");
  if (x_.cols() != y_.rows()) {
    throw InvalidInput("X must be features x samples and Y samples x targets");
  }
  if (y_.cols() > x_.rows()) {
    throw InvalidInput("OLSR needs k <= m");
  }
}

Matrix apply_centering(const Matrix& v) {
  return v.rowwise() - v.colwise().mean();
}

QpsmProblem olsr_reduce(const OlsrProblem& p) {
  // X H = X with every row centred across samples; A = (XH)(XH)^T since H
  // is symmetric and idempotent.
  const Matrix xh = p.x().colwise() - p.x().rowwise().mean();
  Matrix a = xh * xh.transpose();
  Matrix b = xh * p.y();
  return QpsmProblem(SymmetricMatrix(a), std::move(b));
}

Vector olsr_bias(const OlsrProblem& p, const Matrix& w) {
  const Vector y_mean = p.y().colwise().mean().transpose();
  const Vector x_mean = p.x().rowwise().mean();
  return y_mean - w.transpose() * x_mean;
}

double olsr_residual(const OlsrProblem& p, const Matrix& w, const Vector& b) {
  Matrix fit = p.x().transpose() * w;
  fit.rowwise() += b.transpose();
  return (fit - p.y()).norm();
}

Vector olsr_bias_gradient(const OlsrProblem& p, const Matrix& w,
                          const Vector& b) {
  Matrix fit = p.x().transpose() * w;
  fit.rowwise() += b.transpose();
  return 2.0 * (fit - p.y()).colwise().sum().transpose();
}

OlsrSolution olsr_solve(const OlsrProblem& p, const SolverConfig& config) {
  SolveReport report = gpi_solve(olsr_reduce(p), config);
  StiefelMatrix w = report.final_w;
  Vector b = olsr_bias(p, w.matrix());
  return OlsrSolution{std::move(w), std::move(b), std::move(report)};
}

ProcrustesProblem::ProcrustesProblem(Matrix e, Matrix g)
    : e_(std::move(e)), g_(std::move(g)) {
  require_dense(e_, "E");
  require_dense(g_, "G");
  if (e_.rows() != g_.rows()) {
    throw InvalidInput("E and G must have the same number of rows");
  }
  if (e_.cols() < g_.cols()) {
    throw InvalidInput("Procrustes problems need m >= k");
  }
}

double procrustes_residual(const ProcrustesProblem& p, const Matrix& q) {
  if (q.rows() != p.m() || q.cols() != p.k()) {
    throw InvalidInput("Q does not match the Procrustes problem dimensions");
  }
  return (p.e() * q - p.g()).squaredNorm();
}

StiefelMatrix balanced_procrustes(const ProcrustesProblem& p) {
  if (!p.balanced()) {
    throw InvalidInput("closed form requires m == k; use uopp_solve");
  }
  return polar_project(p.e().transpose() * p.g()).w;
}

QpsmProblem uopp_reduce(const ProcrustesProblem& p) {
  Matrix a = p.e().transpose() * p.e();
  Matrix b = p.e().transpose() * p.g();
  return QpsmProblem(SymmetricMatrix(a), std::move(b));
}

UoppReport uopp_solve(const ProcrustesProblem& p, const SolverConfig& config) {
  config.validate();
  const QpsmProblem reduced = uopp_reduce(p);
  const double g_norm2 = p.g().squaredNorm();

  if (p.balanced()) {
    const AlphaResolution alpha = resolve_alpha(reduced.a(), config.alpha_strategy);
    StiefelMatrix q = balanced_procrustes(p);
    SolveReport report{q};
    report.alpha_used = alpha.alpha;
    report.final_objective = objective(reduced, q);
    report.kkt_residual = kkt_residual(reduced, alpha.alpha, q);
    report.iterations = 1;
    report.converged = true;
    if (config.record_trajectory) {
      report.objective_trajectory = {report.final_objective};
      report.kkt_trajectory = {report.kkt_residual};
      report.orthogonality_trajectory = {orthogonality_error(q.matrix())};
    }
    const double residual = procrustes_residual(p, q.matrix());
    std::vector<double> residuals;
    if (config.record_trajectory) residuals.push_back(residual);
    return UoppReport{std::move(report), residual, std::move(residuals)};
  }

  SolveReport report = detail::gpi_iterate(
      reduced, config, random_stiefel(p.m(), p.k(), config.seed), g_norm2);
  std::vector<double> residuals;
  residuals.reserve(report.objective_trajectory.size());
  for (double f : report.objective_trajectory) residuals.push_back(f + g_norm2);
  const double residual = procrustes_residual(p, report.final_w.matrix());
  return UoppReport{std::move(report), residual, std::move(residuals)};
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = normal(rng);
  }
  return out;
}

PlantedProcrustes planted_procrustes(Eigen::Index n, Eigen::Index m,
                                     Eigen::Index k, std::uint64_t seed) {
  Matrix e = gaussian_matrix(n, m, derive_seed(seed, 0));
  Matrix q0 = random_stiefel(m, k, derive_seed(seed, 1)).matrix();
  Matrix g = e * q0;
  return PlantedProcrustes{ProcrustesProblem(std::move(e), std::move(g)),
                           std::move(q0)};
}

PlantedOlsr planted_olsr(Eigen::Index m, Eigen::Index n, Eigen::Index k,
                         std::uint64_t seed) {
  Matrix x = gaussian_matrix(m, n, derive_seed(seed, 0));
  Matrix w0 = random_stiefel(m, k, derive_seed(seed, 1)).matrix();
  Vector b0 = gaussian_matrix(k, 1, derive_seed(seed, 2)).col(0);
  Matrix y = x.transpose() * w0;
  y.rowwise() += b0.transpose();
  return PlantedOlsr{OlsrProblem(std::move(x), std::move(y)), std::move(w0),
                     std::move(b0)};
}

}  // namespace stiefel_qp
