#include "stiefel_qp/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace stiefel_qp {

namespace {

std::string shape(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

void require_shape(const QpsmProblem& problem, const Matrix& w) {
  if (w.rows() != problem.m() || w.cols() != problem.k()) {
    throw InvalidInput("W is " + shape(w) + " but the problem expects " +
                       shape(problem.b()));
  }
}

}  // namespace

void require_dense(const Matrix& m, const char* name) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw InvalidInput(std::string(name) + " must be non-empty, got " +
                       shape(m));
  }
  if (!m.allFinite()) {
    throw InvalidInput(std::string(name) + " has non-finite entries");
  }
}

SymmetricMatrix::SymmetricMatrix(const Matrix& a) {
  require_dense(a, "A");
  if (a.rows() != a.cols()) {
    throw InvalidInput("A must be square, got " + shape(a));
  }
  a_ = 0.5 * (a + a.transpose());
}

SymmetricMatrix SymmetricMatrix::shifted(double alpha, const SymmetricMatrix& a) {
  Matrix s = -a.matrix();
  s.diagonal().array() += alpha;
  return SymmetricMatrix(s);
}

double orthogonality_error(const Matrix& w) {
  const Matrix gram = w.transpose() * w;
  return (gram - Matrix::Identity(w.cols(), w.cols())).norm();
}

StiefelMatrix::StiefelMatrix(Matrix w, double ortho_tol) : w_(std::move(w)) {
  require_dense(w_, "W");
  if (w_.rows() < w_.cols()) {
    throw InvalidInput("Stiefel matrix needs rows >= cols, got " + shape(w_));
  }
  const double err = orthogonality_error(w_);
  if (!(err <= ortho_tol)) {
    std::ostringstream os;
    os << "columns are not orthonormal: ||W^T W - I||_F = " << err
       << " > " << ortho_tol;
    throw InvalidInput(os.str());
  }
}

namespace detail {

StiefelMatrix trusted_stiefel(Matrix w) {
  return StiefelMatrix(std::move(w), StiefelMatrix::Unchecked{});
}

double kkt_residual_from(const Matrix& w, const Matrix& r) {
  const Matrix wr = w.transpose() * r;
  const Matrix lambda = 0.5 * (wr + wr.transpose());
  const double scale = std::max(1.0, r.norm());
  return (r - w * lambda).norm() / scale;
}

}  // namespace detail

QpsmProblem::QpsmProblem(SymmetricMatrix a, Matrix b)
    : a_(std::move(a)), b_(std::move(b)) {
  require_dense(b_, "B");
  if (a_.dim() != b_.rows()) {
    throw InvalidInput("A is " + shape(a_.matrix()) + " but B is " + shape(b_));
  }
  if (b_.cols() > b_.rows()) {
    throw InvalidInput("B must have k <= m, got " + shape(b_));
  }
}

double objective(const QpsmProblem& problem, const StiefelMatrix& w) {
  require_shape(problem, w.matrix());
  const Matrix& W = w.matrix();
  const Matrix aw = problem.a().matrix() * W;
  return W.cwiseProduct(aw).sum() - 2.0 * W.cwiseProduct(problem.b()).sum();
}

double relaxed_objective(const QpsmProblem& problem, double alpha,
                         const StiefelMatrix& w) {
  require_shape(problem, w.matrix());
  const Matrix& W = w.matrix();
  const Matrix aw = alpha * W - problem.a().matrix() * W;
  return W.cwiseProduct(aw).sum() + 2.0 * W.cwiseProduct(problem.b()).sum();
}

CompactSvd compact_svd(const Matrix& m) {
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  CompactSvd out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  for (Eigen::Index j = 0; j < out.u.cols(); ++j) {
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < out.u.rows(); ++i) {
      const double mag = std::abs(out.u(i, j));
      if (mag > best) {
        best = mag;
        pivot = i;
      }
    }
    if (out.u(pivot, j) < 0.0) {
      out.u.col(j) *= -1.0;
      out.v.col(j) *= -1.0;
    }
  }
  return out;
}

Projection polar_project(const Matrix& m) {
  require_dense(m, "M");
  if (m.rows() < m.cols()) {
    throw InvalidInput("polar projection needs rows >= cols, got " + shape(m));
  }
  CompactSvd svd = compact_svd(m);
  const Eigen::Index k = m.cols();
  const double top = svd.singular_values(0);
  const double bottom = svd.singular_values(k - 1);
  const bool non_unique = !(bottom > 1e-12 * top);
  return Projection{detail::trusted_stiefel(svd.u * svd.v.transpose()),
                    std::move(svd.singular_values), non_unique};
}

double kkt_residual(const QpsmProblem& problem, double alpha,
                    const StiefelMatrix& w) {
  require_shape(problem, w.matrix());
  const Matrix& W = w.matrix();
  const Matrix r = alpha * W - problem.a().matrix() * W + problem.b();
  return detail::kkt_residual_from(W, r);
}

}  // namespace stiefel_qp
