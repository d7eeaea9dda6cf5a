#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "stiefel_qp/core.hpp"

namespace stiefel_qp {

/// Use the given alpha as-is. It is never inflated.
struct ExplicitAlpha {
  double alpha;
};

/// alpha = delta * lambda_max(A) for lambda_max > 0, otherwise
/// lambda_max plus a small additive margin. delta must exceed 1.
struct DeltaTimesLambdaMax {
  double delta = 1.01;
};

/// alpha = Gershgorin upper bound on the spectrum of A plus a margin.
struct GershgorinBound {};

using AlphaStrategy =
    std::variant<ExplicitAlpha, DeltaTimesLambdaMax, GershgorinBound>;

struct SolverConfig {
  AlphaStrategy alpha_strategy = DeltaTimesLambdaMax{};
  /// Stop once the objective decreases by no more than tau in one step.
  double tau = 1e-3;
  long max_iters = 10000;
  /// Optional second stopping test; both must hold to report convergence.
  std::optional<double> kkt_tol;
  std::uint64_t seed = 0;
  bool record_trajectory = true;
  /// Wall-clock budget for the iteration loop; exceeded -> timed_out.
  std::optional<double> time_limit_seconds;

  void validate() const;
};

struct SolveReport {
  explicit SolveReport(StiefelMatrix w) : final_w(std::move(w)) {}

  StiefelMatrix final_w;
  double final_objective = 0.0;
  long iterations = 0;
  /// Index 0 holds the objective at the initial W.
  std::vector<double> objective_trajectory;
  std::vector<double> kkt_trajectory;
  std::vector<double> orthogonality_trajectory;
  double kkt_residual = 0.0;
  double alpha_used = 0.0;
  double elapsed_seconds = 0.0;
  double cpu_seconds = 0.0;
  bool converged = false;
  bool timed_out = false;
  bool non_unique_subproblem_seen = false;
};

struct LambdaEstimate {
  double value = 0.0;
  long iterations = 0;
  /// Power iteration did not settle; value is the Gershgorin upper bound.
  bool bound_fallback = false;
};

/// Gershgorin interval [lower, upper] containing every eigenvalue of A.
std::pair<double, double> gershgorin_interval(const SymmetricMatrix& a);

/// Estimate of the algebraically largest eigenvalue of A.
///
/// Plain power iteration converges to the eigenvalue of largest magnitude,
/// which for indefinite A may be a large negative one. The iteration is
/// therefore run on A + cI with c the magnitude of the Gershgorin lower
/// bound, which makes every eigenvalue non-negative and the algebraic
/// maximum dominant.
LambdaEstimate estimate_lambda_max(const SymmetricMatrix& a, double tol = 1e-10,
                                   long max_iters = 10000,
                                   std::uint64_t seed = 0);

struct AlphaResolution {
  double alpha = 0.0;
  std::optional<LambdaEstimate> lambda;
  int doublings = 0;
};

/// Chooses alpha so that alpha * I - A is positive definite, verified by a
/// Cholesky factorization. Non-explicit strategies double the gap
/// alpha - lambda until the factorization succeeds (at most 60 times).
AlphaResolution resolve_alpha(const SymmetricMatrix& a,
                              const AlphaStrategy& strategy);

/// True if alpha * I - A admits a Cholesky factorization.
bool shifted_is_positive_definite(const SymmetricMatrix& a, double alpha);

/// CPU time consumed by the calling thread.
double thread_cpu_seconds();

/// Seeded starting point: polar projection of a standard Gaussian m x k draw.
StiefelMatrix random_stiefel(Eigen::Index m, Eigen::Index k,
                             std::uint64_t seed);

/// Generalized power iteration: M <- 2 (alpha I - A) W + 2 B, W <- U V^T.
SolveReport gpi_solve(const QpsmProblem& problem, const SolverConfig& config);

namespace detail {

/// gpi_solve with an explicit starting point. stop_offset is added to the
/// objective before the decrease test, so callers can stop on a shifted
/// quantity such as ||EQ - G||^2.
SolveReport gpi_iterate(const QpsmProblem& problem, const SolverConfig& config,
                        const StiefelMatrix& start, double stop_offset);

}  // namespace detail

}  // namespace stiefel_qp
