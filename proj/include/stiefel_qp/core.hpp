#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace stiefel_qp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense real matrix with at least one row and column and finite entries.
/// Used for B, M, E, G, X, Y and SVD factors; validation happens at the
/// API boundary through require_dense().
using DenseMatrix = Matrix;

inline constexpr double kDefaultOrthoTol = 1e-8;

/// Raised for malformed inputs: shape mismatches, non-finite entries,
/// matrices that leave the manifold.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a solver configuration cannot be honoured, e.g. an explicit
/// alpha that does not make alpha*I - A positive definite.
class InvalidConfig : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// Raised when an iteration produces non-finite values.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, long iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  long iteration() const noexcept { return iteration_; }

 private:
  long iteration_;
};

void require_dense(const Matrix& m, const char* name);

/// Square matrix stored symmetrized as (A + A^T) / 2.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(const Matrix& a);

  /// alpha * I - a, i.e. the shifted matrix used by the relaxed problem.
  static SymmetricMatrix shifted(double alpha, const SymmetricMatrix& a);

  Eigen::Index dim() const noexcept { return a_.rows(); }
  const Matrix& matrix() const noexcept { return a_; }

 private:
  Matrix a_;
};

class StiefelMatrix;
namespace detail {
/// Skips the construction checks; callers guarantee orthonormality.
StiefelMatrix trusted_stiefel(Matrix w);
}  // namespace detail

/// m x k matrix with orthonormal columns, checked on construction.
class StiefelMatrix {
 public:
  explicit StiefelMatrix(Matrix w, double ortho_tol = kDefaultOrthoTol);

  Eigen::Index rows() const noexcept { return w_.rows(); }
  Eigen::Index cols() const noexcept { return w_.cols(); }
  const Matrix& matrix() const noexcept { return w_; }

 private:
  struct Unchecked {};
  StiefelMatrix(Matrix w, Unchecked) : w_(std::move(w)) {}
  friend StiefelMatrix detail::trusted_stiefel(Matrix w);

  Matrix w_;
};

/// ||W^T W - I||_F.
double orthogonality_error(const Matrix& w);

/// min Tr(W^T A W - 2 W^T B) over W^T W = I.
class QpsmProblem {
 public:
  QpsmProblem(SymmetricMatrix a, Matrix b);

  const SymmetricMatrix& a() const noexcept { return a_; }
  const Matrix& b() const noexcept { return b_; }
  Eigen::Index m() const noexcept { return b_.rows(); }
  Eigen::Index k() const noexcept { return b_.cols(); }

 private:
  SymmetricMatrix a_;
  Matrix b_;
};

double objective(const QpsmProblem& problem, const StiefelMatrix& w);

/// Tr(W^T (alpha I - A) W) + 2 Tr(W^T B). On the manifold this equals
/// alpha * k - objective(problem, w).
double relaxed_objective(const QpsmProblem& problem, double alpha,
                         const StiefelMatrix& w);

/// Compact SVD M = U diag(s) V^T with the sign convention that every column
/// of U has its largest-magnitude entry positive (first index on ties).
struct CompactSvd {
  Matrix u;
  Vector singular_values;
  Matrix v;
};

CompactSvd compact_svd(const Matrix& m);

struct Projection {
  StiefelMatrix w;
  Vector singular_values;
  /// sigma_k <= 1e-12 * sigma_1: the maximizer of Tr(W^T M) is not unique.
  bool non_unique = false;
};

/// Maximizer of Tr(W^T M) over the Stiefel manifold, W = U V^T.
Projection polar_project(const Matrix& m);

/// Relative residual of the stationarity condition (alpha I - A) W + B = W L
/// with L = sym(W^T ((alpha I - A) W + B)).
double kkt_residual(const QpsmProblem& problem, double alpha,
                    const StiefelMatrix& w);

namespace detail {

/// kkt_residual given R = (alpha I - A) W + B already formed.
double kkt_residual_from(const Matrix& w, const Matrix& r);

}  // namespace detail

}  // namespace stiefel_qp
