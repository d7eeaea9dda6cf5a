#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "stiefel_qp/core.hpp"
#include "test_support.hpp"

using namespace stiefel_qp;
using stiefel_qp::testing::gaussian;
using stiefel_qp::testing::random_orthonormal;
using stiefel_qp::testing::random_symmetric;
using stiefel_qp::testing::rel_diff;

namespace {

Matrix col(std::initializer_list<double> values) {
  Matrix m(static_cast<Eigen::Index>(values.size()), 1);
  Eigen::Index i = 0;
  for (double v : values) m(i++, 0) = v;
  return m;
}

QpsmProblem diag20_problem() {
  return QpsmProblem(SymmetricMatrix(Eigen::Vector2d(2, 0).asDiagonal().toDenseMatrix()),
                     col({0, 1}));
}

}  // namespace

TEST(SymmetricMatrix, SymmetrizesOnConstruction) {
  Matrix a(2, 2);
  a << 1, 2, 4, 3;
  const SymmetricMatrix s(a);
  EXPECT_EQ(s.matrix()(0, 1), 3.0);
  EXPECT_EQ(s.matrix()(1, 0), 3.0);
  EXPECT_EQ(s.matrix(), s.matrix().transpose());
}

TEST(SymmetricMatrix, RejectsNonSquareAndNonFinite) {
  EXPECT_THROW(SymmetricMatrix(Matrix::Zero(2, 3)), InvalidInput);
  Matrix a = Matrix::Identity(2, 2);
  a(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(SymmetricMatrix{a}, InvalidInput);
  EXPECT_THROW(SymmetricMatrix(Matrix(0, 0)), InvalidInput);
}

TEST(SymmetricMatrix, ShiftedView) {
  const SymmetricMatrix a(Eigen::Vector2d(2, 0).asDiagonal().toDenseMatrix());
  const SymmetricMatrix t = SymmetricMatrix::shifted(3.0, a);
  EXPECT_EQ(t.matrix()(0, 0), 1.0);
  EXPECT_EQ(t.matrix()(1, 1), 3.0);
  EXPECT_EQ(t.matrix()(0, 1), 0.0);
}

TEST(StiefelMatrix, ChecksOrthonormalityAndShape) {
  EXPECT_NO_THROW(StiefelMatrix(col({1, 0})));
  EXPECT_THROW(StiefelMatrix(col({1, 1})), InvalidInput);
  EXPECT_THROW(StiefelMatrix(Matrix::Identity(2, 3)), InvalidInput);
  // Within a looser tolerance the same matrix is accepted.
  EXPECT_NO_THROW(StiefelMatrix(col({1.0 + 1e-6, 0}), 1e-5));
  EXPECT_THROW(StiefelMatrix(col({1.0 + 1e-6, 0})), InvalidInput);
}

TEST(QpsmProblem, RejectsDimensionMismatch) {
  EXPECT_THROW(QpsmProblem(SymmetricMatrix(Matrix::Identity(3, 3)), Matrix::Zero(2, 1)),
               InvalidInput);
  EXPECT_THROW(QpsmProblem(SymmetricMatrix(Matrix::Identity(2, 2)), Matrix::Zero(2, 3)),
               InvalidInput);
}

TEST(Objective, IdentityWithZeroLinearTerm) {
  const QpsmProblem p(SymmetricMatrix(Matrix::Identity(2, 2)), Matrix::Zero(2, 1));
  EXPECT_DOUBLE_EQ(objective(p, StiefelMatrix(col({1, 0}))), 1.0);
}

TEST(Objective, PureLinearTerm) {
  const QpsmProblem p(SymmetricMatrix(Matrix::Zero(2, 2)), col({0, 1}));
  EXPECT_DOUBLE_EQ(objective(p, StiefelMatrix(col({0, 1}))), -2.0);
}

TEST(Objective, MatchesScalarFormulaOnCircle) {
  const QpsmProblem p = diag20_problem();
  const double t = std::numbers::pi / 4;
  const double value = objective(p, StiefelMatrix(col({std::cos(t), std::sin(t)})));
  EXPECT_NEAR(value, 1.0 - std::sqrt(2.0), 1e-14);

  // f(theta) = 2 cos^2 - 2 sin, evaluated on a 1e4 grid that includes pi/4.
  for (int i = 0; i < 10000; i += 97) {
    const double th = 2.0 * std::numbers::pi * i / 10000.0;
    const double expected = 2 * std::cos(th) * std::cos(th) - 2 * std::sin(th);
    EXPECT_NEAR(objective(p, StiefelMatrix(col({std::cos(th), std::sin(th)}))),
                expected, 1e-13);
  }
}

TEST(Objective, RejectsWrongShape) {
  const QpsmProblem p = diag20_problem();
  EXPECT_THROW(objective(p, StiefelMatrix(col({1, 0, 0}))), InvalidInput);
  EXPECT_THROW(relaxed_objective(p, 3.0, StiefelMatrix(col({1, 0, 0}))), InvalidInput);
  EXPECT_THROW(kkt_residual(p, 3.0, StiefelMatrix(col({1, 0, 0}))), InvalidInput);
}

TEST(RelaxedObjective, Examples) {
  std::mt19937_64 rng(3);
  const Matrix b = gaussian(4, 2, rng);
  const QpsmProblem zero_a(SymmetricMatrix(Matrix::Zero(4, 4)), b);
  const StiefelMatrix w(random_orthonormal(4, 2, rng));
  EXPECT_NEAR(relaxed_objective(zero_a, 0.0, w), -objective(zero_a, w), 1e-13);

  const QpsmProblem eye(SymmetricMatrix(Matrix::Identity(2, 2)), Matrix::Zero(2, 1));
  EXPECT_DOUBLE_EQ(relaxed_objective(eye, 2.0, StiefelMatrix(col({1, 0}))), 1.0);

  const QpsmProblem p = diag20_problem();
  const StiefelMatrix e2(col({0, 1}));
  EXPECT_DOUBLE_EQ(relaxed_objective(p, 3.0, e2), 5.0);
  EXPECT_DOUBLE_EQ(3.0 * 1 - objective(p, e2), 5.0);
}

TEST(PolarProject, AlreadyOptimalInputs) {
  const Matrix ik = Matrix::Identity(5, 3);
  EXPECT_LE((polar_project(ik).w.matrix() - ik).norm(), 1e-14);

  std::mt19937_64 rng(11);
  const Matrix q = random_orthonormal(6, 4, rng);
  const Projection p = polar_project(q);
  EXPECT_LE((p.w.matrix() - q).norm(), 1e-12);
  EXPECT_FALSE(p.non_unique);
}

TEST(PolarProject, OrthogonalColumnsAreNormalized) {
  Matrix m(3, 2);
  m << 2, 0, 0, -3, 0, 0;
  const Projection p = polar_project(m);
  Matrix expected(3, 2);
  expected << 1, 0, 0, -1, 0, 0;
  EXPECT_LE((p.w.matrix() - expected).norm(), 1e-14);
  EXPECT_NEAR(p.w.matrix().cwiseProduct(m).sum(), 5.0, 1e-14);
  EXPECT_NEAR(p.singular_values.sum(), 5.0, 1e-14);
}

TEST(PolarProject, RejectsBadInput) {
  Matrix m = Matrix::Ones(3, 2);
  m(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(polar_project(m), InvalidInput);
  EXPECT_THROW(polar_project(Matrix::Ones(2, 3)), InvalidInput);
}

TEST(PolarProject, RankDeficientIsFlaggedButOptimal) {
  Matrix m = Matrix::Zero(4, 2);
  m(0, 0) = 1.0;
  m(1, 0) = 2.0;
  const Projection p = polar_project(m);
  EXPECT_TRUE(p.non_unique);
  EXPECT_LE(orthogonality_error(p.w.matrix()), 1e-12);
  EXPECT_NEAR(p.w.matrix().cwiseProduct(m).sum(), std::sqrt(5.0), 1e-12);

  const Projection again = polar_project(m);
  EXPECT_EQ(p.w.matrix(), again.w.matrix());
}

TEST(PolarProject, ZeroMatrixStillReturnsOrthonormal) {
  const Projection p = polar_project(Matrix::Zero(3, 2));
  EXPECT_TRUE(p.non_unique);
  EXPECT_LE(orthogonality_error(p.w.matrix()), 1e-12);
}

TEST(CompactSvd, SignConvention) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = gaussian(7, 3, rng);
    const CompactSvd svd = compact_svd(m);
    for (Eigen::Index j = 0; j < svd.u.cols(); ++j) {
      Eigen::Index idx;
      svd.u.col(j).cwiseAbs().maxCoeff(&idx);
      EXPECT_GT(svd.u(idx, j), 0.0);
    }
    EXPECT_LE((svd.u * svd.singular_values.asDiagonal() * svd.v.transpose() - m).norm(),
              1e-12);
    // Flipping the sign of M flips U only.
    const CompactSvd neg = compact_svd(-m);
    EXPECT_LE((neg.u - svd.u).norm(), 1e-10);
    EXPECT_LE((neg.v + svd.v).norm(), 1e-10);
  }
}

TEST(PolarProject, OptimalityAgainstRandomOrthonormal) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index m = 2 + static_cast<Eigen::Index>(rng() % 9);
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng() % m);
    const Matrix mm = gaussian(m, k, rng);
    const double best = polar_project(mm).w.matrix().cwiseProduct(mm).sum();
    const Matrix other = random_orthonormal(m, k, rng);
    EXPECT_GE(best, other.cwiseProduct(mm).sum() - 1e-10);
  }
}

TEST(PolarProject, TraceEqualsNuclearNorm) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index m = 2 + static_cast<Eigen::Index>(rng() % 12);
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng() % m);
    const Matrix mm = gaussian(m, k, rng);
    // Independent SVD route (one-sided Jacobi) for the singular values.
    const double nuclear = Eigen::JacobiSVD<Matrix>(mm).singularValues().sum();
    const double trace = polar_project(mm).w.matrix().cwiseProduct(mm).sum();
    EXPECT_LE(rel_diff(trace, nuclear), 1e-8);
  }
}

TEST(PolarProject, FullSvdDerivationQuantities) {
  // Z = V^T W^T U (full U) has orthonormal rows and unit leading diagonal at
  // the optimum.
  std::mt19937_64 rng(9);
  const Matrix mm = gaussian(6, 3, rng);
  const Matrix w = polar_project(mm).w.matrix();
  Eigen::JacobiSVD<Matrix> full(mm, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix z = full.matrixV().transpose() * w.transpose() * full.matrixU();
  EXPECT_LE((z * z.transpose() - Matrix::Identity(3, 3)).norm(), 1e-12);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(z(i, i), 1.0, 1e-12);
}

TEST(Identities, RelaxationRotationAndPsdExpansion) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index m = 2 + static_cast<Eigen::Index>(rng() % 10);
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng() % m);
    const QpsmProblem p(SymmetricMatrix(random_symmetric(m, rng)), gaussian(m, k, rng));
    const StiefelMatrix w(random_orthonormal(m, k, rng));
    const double alpha = 0.5 + 10.0 * std::uniform_real_distribution<>(0, 1)(rng);

    const double lhs = relaxed_objective(p, alpha, w) + objective(p, w);
    EXPECT_LE(rel_diff(lhs, alpha * static_cast<double>(k)), 1e-8);

    const Matrix rot = random_orthonormal(k, k, rng);
    const Matrix& a = p.a().matrix();
    const Matrix wk = w.matrix() * rot;
    EXPECT_LE(rel_diff((wk.transpose() * a * wk).trace(),
                       (w.matrix().transpose() * a * w.matrix()).trace()),
              1e-8);

    // Tr(X^T S X) - 2 Tr(X^T S Y) + Tr(Y^T S Y) >= 0 for S = L^T L.
    const Matrix l = gaussian(m, m, rng);
    const Matrix s = l.transpose() * l;
    const Matrix x = gaussian(m, k, rng);
    const Matrix y = gaussian(m, k, rng);
    const double expansion = (x.transpose() * s * x).trace() -
                         2.0 * (x.transpose() * s * y).trace() +
                         (y.transpose() * s * y).trace();
    EXPECT_GE(expansion, -1e-10);
  }
}

TEST(KktResidual, Examples) {
  std::mt19937_64 rng(8);
  const Matrix b = random_orthonormal(5, 2, rng);
  const QpsmProblem p(SymmetricMatrix(Matrix::Zero(5, 5)), b);
  EXPECT_LE(kkt_residual(p, 1.0, StiefelMatrix(b)), 1e-12);

  const QpsmProblem q = diag20_problem();
  for (double alpha : {2.5, 3.0, 10.0}) {
    EXPECT_LE(kkt_residual(q, alpha, StiefelMatrix(col({0, 1}))), 1e-12);
  }

  const QpsmProblem generic(SymmetricMatrix(random_symmetric(6, rng)), gaussian(6, 3, rng));
  EXPECT_GT(kkt_residual(generic, 10.0, StiefelMatrix(random_orthonormal(6, 3, rng))), 1e-3);
}
