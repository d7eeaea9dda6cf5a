#pragma once

#include <array>
#include <cstdint>

#include "stiefel_qp/core.hpp"

namespace stiefel_qp::oracle {

enum class Manifold { V21, V31, V32 };

struct GridSpec {
  Manifold manifold = Manifold::V21;
  /// Points per angular dimension, at least 8.
  long resolution = 1000;
};

struct GridResult {
  StiefelMatrix w;
  double objective = 0.0;
  /// Grid angles of the minimizer; unused trailing entries are zero.
  std::array<double, 3> angles{};
};

/// Exhaustive minimization of the objective over a grid on a small Stiefel
/// manifold.
///
///   V(2,1): theta in [0, 2pi)                  w = (cos, sin)
///   V(3,1): theta in [0, pi], phi in [0, 2pi)  spherical coordinates
///   V(3,2): first two columns of Rz(a) Ry(b) Rz(c), Z-Y-Z Euler angles
///           with a, c in [0, 2pi) and b in [0, pi]
///
/// Half-open ranges use resolution equispaced points; [0, pi] uses the same
/// step pi / resolution and includes both endpoints (resolution + 1 points),
/// so doubling the resolution refines the grid. Over the last Euler angle c the objective is
/// const - 2 rho cos(c - c*), so its grid minimum is one of the two grid
/// points bracketing c*; those two are evaluated instead of the whole circle
/// unless `exhaustive` is set. Results do not depend on `threads`: ties are
/// broken by the lexicographically smallest grid index.
GridResult grid_minimize(const QpsmProblem& problem, const GridSpec& spec,
                         unsigned threads = 0, bool exhaustive = false);

struct PowerResult {
  double lambda = 0.0;
  Vector vector;
  long iterations = 0;
  bool converged = false;
};

/// Classic power iteration w <- A w / ||A w||. Targets the eigenvalue of
/// largest magnitude; stops when ||A w - lambda w|| <= tol (1 + ||A||_F).
PowerResult power_iteration(const SymmetricMatrix& a, std::uint64_t seed,
                            double tol = 1e-10, long max_iters = 100000);

enum class Normalization { Qr, Svd };

struct SubspaceResult {
  StiefelMatrix w;
  long iterations = 0;
  bool converged = false;
};

/// Orthogonal (subspace) iteration M <- A W, W <- orth(M) for PSD A, with
/// either the thin QR factor or the polar factor U V^T as orth(.).
/// Stops when ||A W - W (W^T A W)||_F <= tol (1 + ||A||_F).
SubspaceResult orthogonal_iteration(const SymmetricMatrix& a, Eigen::Index k,
                                    std::uint64_t seed, double tol = 1e-10,
                                    long max_iters = 100000,
                                    Normalization normalization = Normalization::Qr);

/// Orthonormal basis of the eigenvectors for the k largest (top = true) or
/// smallest eigenvalues, from a dense symmetric eigensolver.
Matrix dense_eigenspace(const SymmetricMatrix& a, Eigen::Index k, bool top);

/// Largest principal angle between span(u) and span(v), both orthonormal.
/// Computed through sines so small angles keep full precision.
double max_principal_angle(const Matrix& u, const Matrix& v);

}  // namespace stiefel_qp::oracle
