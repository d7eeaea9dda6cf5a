#include <cmath>

#include <gtest/gtest.h>

#include "stiefel_qp/problems.hpp"
#include "test_support.hpp"

using namespace stiefel_qp;
using stiefel_qp::testing::gaussian;
using stiefel_qp::testing::random_orthonormal;
using stiefel_qp::testing::rel_diff;

namespace {

Matrix materialized_centering(Eigen::Index n) {
  return Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
}

SolverConfig tight() {
  SolverConfig c;
  c.tau = 1e-12;
  c.kkt_tol = 1e-10;
  c.max_iters = 200000;
  return c;
}

}  // namespace

TEST(OlsrProblem, RejectsBadShapes) {
  EXPECT_THROW(OlsrProblem(Matrix::Ones(3, 5), Matrix::Ones(4, 2)), InvalidInput);
  EXPECT_THROW(OlsrProblem(Matrix::Ones(2, 5), Matrix::Ones(5, 3)), InvalidInput);
  Matrix bad = Matrix::Ones(3, 5);
  bad(0, 0) = NAN;
  EXPECT_THROW(OlsrProblem(bad, Matrix::Ones(5, 2)), InvalidInput);
}

TEST(OlsrReduce, CenteredRowsNeedNoCentering) {
  std::mt19937_64 rng(1);
  Matrix x = gaussian(4, 9, rng);
  x = x.colwise() - x.rowwise().mean();
  const Matrix y = gaussian(9, 2, rng);
  const QpsmProblem q = olsr_reduce(OlsrProblem(x, y));
  EXPECT_LE((q.a().matrix() - x * x.transpose()).norm(), 1e-12);
  EXPECT_LE((q.b() - x * y).norm(), 1e-12);
}

TEST(ApplyCentering, Idempotent) {
  std::mt19937_64 rng(2);
  const Matrix v = gaussian(7, 3, rng);
  const Matrix hv = apply_centering(v);
  EXPECT_LE((apply_centering(hv) - hv).norm(), 1e-12);
  EXPECT_LE((hv - materialized_centering(7) * v).norm(), 1e-12);
}

TEST(OlsrReduce, MatchesMaterializedCentering) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = gaussian(3, 5, rng);
    const Matrix y = gaussian(5, 2, rng);
    const Matrix h = materialized_centering(5);
    const QpsmProblem q = olsr_reduce(OlsrProblem(x, y));
    EXPECT_LE((q.a().matrix() - x * h * x.transpose()).norm(), 1e-12);
    EXPECT_LE((q.b() - x * h * y).norm(), 1e-12);
  }
}

TEST(OlsrReduce, ObjectiveIdentityWithOptimalBias) {
  // ||X^T W + 1 b^T - Y||^2 at the optimal b equals objective + ||HY||^2.
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const OlsrProblem p(gaussian(6, 20, rng), gaussian(20, 3, rng));
    const QpsmProblem q = olsr_reduce(p);
    const Matrix w = random_orthonormal(6, 3, rng);
    const double r = olsr_residual(p, w, olsr_bias(p, w));
    const double expected = objective(q, StiefelMatrix(w)) + apply_centering(p.y()).squaredNorm();
    EXPECT_LE(rel_diff(r * r, expected), 1e-10);
  }
}

TEST(OlsrSolve, PlantedExactFit) {
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    const PlantedOlsr planted = planted_olsr(5, 50, 2, seed);
    EXPECT_LE(olsr_residual(planted.problem, planted.w0, planted.b0), 1e-12);
    const OlsrSolution s = olsr_solve(planted.problem, tight());
    EXPECT_LE(olsr_residual(planted.problem, s.w.matrix(), s.b), 1e-4) << "seed " << seed;
  }
}

TEST(OlsrSolve, BiasIsStationary) {
  std::mt19937_64 rng(5);
  const OlsrProblem p(gaussian(5, 30, rng), gaussian(30, 2, rng));
  const OlsrSolution s = olsr_solve(p, tight());
  const Vector grad = olsr_bias_gradient(p, s.w.matrix(), s.b);
  EXPECT_LE(grad.norm(), 1e-8 * (1.0 + p.y().norm()));
}

TEST(OlsrSolve, TranslationInvariance) {
  std::mt19937_64 rng(6);
  const Matrix x = gaussian(4, 25, rng);
  const Matrix y = gaussian(25, 2, rng);
  const Vector c = gaussian(4, 1, rng).col(0) * 3.0;
  const Matrix shifted = x.colwise() + c;
  const OlsrProblem p(x, y);
  const OlsrProblem ps(shifted, y);
  const OlsrSolution s = olsr_solve(p, tight());
  const OlsrSolution t = olsr_solve(ps, tight());
  EXPECT_LE((s.w.matrix() - t.w.matrix()).norm(), 1e-8);
  EXPECT_LE((t.b - (s.b - s.w.matrix().transpose() * c)).norm(), 1e-8);
}

TEST(OlsrSolve, ScalarCaseMatchesSignEnumeration) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix x = gaussian(1, 12, rng);
    x = x.colwise() - x.rowwise().mean();
    const Matrix y = gaussian(12, 1, rng);
    const OlsrProblem p(x, y);
    double best = 1e300;
    for (double sign : {1.0, -1.0}) {
      const Matrix w = Matrix::Constant(1, 1, sign);
      best = std::min(best, olsr_residual(p, w, olsr_bias(p, w)));
    }
    const OlsrSolution s = olsr_solve(p, SolverConfig{});
    EXPECT_NEAR(olsr_residual(p, s.w.matrix(), s.b), best, 1e-12);
  }
}

TEST(ProcrustesProblem, RejectsBadShapes) {
  EXPECT_THROW(ProcrustesProblem(Matrix::Ones(4, 3), Matrix::Ones(5, 2)), InvalidInput);
  EXPECT_THROW(ProcrustesProblem(Matrix::Ones(4, 2), Matrix::Ones(4, 3)), InvalidInput);
  EXPECT_THROW(balanced_procrustes(ProcrustesProblem(Matrix::Ones(4, 3), Matrix::Ones(4, 2))),
               InvalidInput);
}

TEST(BalancedProcrustes, Examples) {
  std::mt19937_64 rng(8);
  const Matrix g = random_orthonormal(4, 4, rng);
  EXPECT_LE((balanced_procrustes(ProcrustesProblem(Matrix::Identity(4, 4), g)).matrix() - g)
                .norm(),
            1e-12);

  const Matrix e = random_orthonormal(6, 3, rng);
  EXPECT_LE((balanced_procrustes(ProcrustesProblem(e, e)).matrix() - Matrix::Identity(3, 3))
                .norm(),
            1e-12);
}

TEST(BalancedProcrustes, ResidualExpansion) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const ProcrustesProblem p(gaussian(4, 3, rng), gaussian(4, 3, rng));
    const StiefelMatrix q = balanced_procrustes(p);
    const Matrix cross = p.e().transpose() * p.g();
    const double nuclear =
        Eigen::JacobiSVD<Matrix>(cross).singularValues().sum();
    const double expected = p.e().squaredNorm() + p.g().squaredNorm() - 2.0 * nuclear;
    EXPECT_LE(std::abs(procrustes_residual(p, q.matrix()) - expected),
              1e-8 * (1.0 + std::abs(expected)));
  }
}

TEST(BalancedProcrustes, BeatsRandomOrthogonalMatrices) {
  std::mt19937_64 rng(10);
  const ProcrustesProblem p(gaussian(7, 4, rng), gaussian(7, 4, rng));
  const double best = procrustes_residual(p, balanced_procrustes(p).matrix());
  for (int sample = 0; sample < 1000; ++sample) {
    ASSERT_GE(procrustes_residual(p, random_orthonormal(4, 4, rng)), best - 1e-10);
  }
}

TEST(UoppReduce, ObjectiveIdentity) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const ProcrustesProblem p(gaussian(9, 6, rng), gaussian(9, 2, rng));
    const QpsmProblem q = uopp_reduce(p);
    const Matrix w = random_orthonormal(6, 2, rng);
    const double lhs = procrustes_residual(p, w);
    const double rhs = objective(q, StiefelMatrix(w)) + p.g().squaredNorm();
    EXPECT_LE(std::abs(lhs - rhs), 1e-10 * (1.0 + lhs));
  }
}

TEST(UoppReduce, OrthonormalDesignGivesIdentity) {
  std::mt19937_64 rng(12);
  const Matrix e = random_orthonormal(8, 5, rng);
  const Matrix q0 = random_orthonormal(5, 2, rng);
  const QpsmProblem q = uopp_reduce(ProcrustesProblem(e, e * q0));
  EXPECT_LE((q.a().matrix() - Matrix::Identity(5, 5)).norm(), 1e-12);
  EXPECT_LE((q.b() - q0).norm(), 1e-12);
}

TEST(UoppSolve, ZeroTargetFindsBottomEigenvectors) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    const ProcrustesProblem p(gaussian(12, 8, rng), Matrix::Zero(12, 3));
    const QpsmProblem q = uopp_reduce(p);
    EXPECT_EQ(q.b().norm(), 0.0);
    const Vector evals = Eigen::SelfAdjointEigenSolver<Matrix>(q.a().matrix()).eigenvalues();
    const double expected = evals.head(3).sum();
    SolverConfig c = tight();
    c.seed = static_cast<std::uint64_t>(trial);
    const UoppReport r = uopp_solve(p, c);
    EXPECT_NEAR(r.residual, expected, 1e-6);
  }
}

TEST(UoppSolve, PlantedInstanceIsRecovered) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const PlantedProcrustes planted = planted_procrustes(20, 8, 3, seed);
    const UoppReport r = uopp_solve(planted.problem, tight());
    EXPECT_LE(r.residual, 1e-6) << "seed " << seed;
  }
}

TEST(UoppSolve, LsqeMatchesCircleGrid) {
  // Least squares on the unit circle can have a second, non-global local
  // minimum, so a single start is not enough; each start must end at a
  // stationary point no better than the grid, and the best of 20 starts must
  // match the grid.
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 5; ++trial) {
    const ProcrustesProblem p(gaussian(6, 2, rng), gaussian(6, 1, rng));
    double grid = 1e300;
    for (int i = 0; i < 10000; ++i) {
      const double t = 2.0 * M_PI * i / 10000.0;
      Matrix q(2, 1);
      q << std::cos(t), std::sin(t);
      grid = std::min(grid, procrustes_residual(p, q));
    }
    double best = 1e300;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      SolverConfig c = tight();
      c.seed = seed;
      const UoppReport r = uopp_solve(p, c);
      EXPECT_LE(r.report.kkt_residual, 1e-8);
      EXPECT_GE(r.residual, grid - 1e-3);
      best = std::min(best, r.residual);
    }
    EXPECT_LE(std::abs(best - grid), 1e-3) << "trial " << trial;
  }
}

TEST(UoppSolve, BalancedDelegatesToClosedForm) {
  std::mt19937_64 rng(15);
  const ProcrustesProblem p(gaussian(10, 4, rng), gaussian(10, 4, rng));
  const UoppReport r = uopp_solve(p, SolverConfig{});
  const double closed = procrustes_residual(p, balanced_procrustes(p).matrix());
  EXPECT_LE(std::abs(r.residual - closed), 1e-10 * (1.0 + closed));
  EXPECT_EQ(r.report.iterations, 1);
  EXPECT_TRUE(r.report.converged);
}

TEST(UoppSolve, BalancedIterationAgreesWithClosedForm) {
  std::mt19937_64 rng(16);
  const ProcrustesProblem p(gaussian(10, 4, rng), gaussian(10, 4, rng));
  const QpsmProblem q = uopp_reduce(p);
  const SolveReport r = gpi_solve(q, tight());
  const double closed = procrustes_residual(p, balanced_procrustes(p).matrix());
  EXPECT_LE(rel_diff(r.final_objective + p.g().squaredNorm(), closed), 1e-8);
}

TEST(UoppSolve, ResidualTrajectoryIsShiftedObjective) {
  const PlantedProcrustes planted = planted_procrustes(15, 6, 2, 3);
  const UoppReport r = uopp_solve(planted.problem, SolverConfig{});
  const double g2 = planted.problem.g().squaredNorm();
  ASSERT_EQ(r.residual_trajectory.size(), r.report.objective_trajectory.size());
  for (std::size_t t = 0; t < r.residual_trajectory.size(); ++t) {
    EXPECT_NEAR(r.residual_trajectory[t], r.report.objective_trajectory[t] + g2, 1e-9 * g2);
  }
  EXPECT_NEAR(r.residual, procrustes_residual(planted.problem, r.report.final_w.matrix()),
              1e-12 * (1.0 + g2));
}
