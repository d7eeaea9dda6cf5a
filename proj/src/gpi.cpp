#include "stiefel_qp/gpi.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <random>
#include <sstream>

namespace stiefel_qp {

namespace {

constexpr int kMaxAlphaDoublings = 60;

double additive_margin(double lambda) {
  return std::max(1e-8, 1e-8 * std::abs(lambda));
}

struct Timer {
  std::chrono::steady_clock::time_point wall = std::chrono::steady_clock::now();
  double cpu = thread_cpu_seconds();

  double wall_seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         wall)
        .count();
  }
  double cpu_seconds() const {
    return thread_cpu_seconds() - cpu;
  }
};

}  // namespace

double thread_cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

void SolverConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InvalidConfig("tau must be a positive finite number");
  }
  if (max_iters < 1) {
    throw InvalidConfig("max_iters must be at least 1");
  }
  if (kkt_tol && !(*kkt_tol > 0.0)) {
    throw InvalidConfig("kkt_tol must be positive");
  }
  if (time_limit_seconds && !(*time_limit_seconds > 0.0)) {
    throw InvalidConfig("time limit must be positive");
  }
  if (const auto* d = std::get_if<DeltaTimesLambdaMax>(&alpha_strategy)) {
    if (!(d->delta > 1.0) || !std::isfinite(d->delta)) {
      throw InvalidConfig("delta must be a finite number greater than 1");
    }
  }
  if (const auto* e = std::get_if<ExplicitAlpha>(&alpha_strategy)) {
    if (!std::isfinite(e->alpha)) {
      throw InvalidConfig("explicit alpha must be finite");
    }
  }
}

std::pair<double, double> gershgorin_interval(const SymmetricMatrix& a) {
  const Matrix& A = a.matrix();
  double lower = std::numeric_limits<double>::infinity();
  double upper = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const double radius = A.row(i).cwiseAbs().sum() - std::abs(A(i, i));
    lower = std::min(lower, A(i, i) - radius);
    upper = std::max(upper, A(i, i) + radius);
  }
  return {lower, upper};
}

LambdaEstimate estimate_lambda_max(const SymmetricMatrix& a, double tol,
                                   long max_iters, std::uint64_t seed) {
  const auto [lower, upper] = gershgorin_interval(a);
  const double shift = std::max(0.0, -lower);
  Matrix shifted = a.matrix();
  shifted.diagonal().array() += shift;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector w(a.dim());
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = normal(rng);
  w.normalize();

  double rayleigh = 0.0;
  for (long it = 1; it <= max_iters; ++it) {
    const Vector x = shifted * w;
    const double next = w.dot(x);
    const double norm = x.norm();
    if (norm == 0.0) {
      // A + cI vanishes on a random vector only when it is zero.
      return {-shift, it, false};
    }
    w = x / norm;
    if (it > 1 && std::abs(next - rayleigh) <= tol * (1.0 + std::abs(next))) {
      return {next - shift, it, false};
    }
    rayleigh = next;
  }
  return {upper, max_iters, true};
}

bool shifted_is_positive_definite(const SymmetricMatrix& a, double alpha) {
  Matrix shifted = -a.matrix();
  shifted.diagonal().array() += alpha;
  Eigen::LLT<Matrix> llt(shifted);
  return llt.info() == Eigen::Success;
}

AlphaResolution resolve_alpha(const SymmetricMatrix& a,
                              const AlphaStrategy& strategy) {
  if (const auto* e = std::get_if<ExplicitAlpha>(&strategy)) {
    if (!std::isfinite(e->alpha) || !shifted_is_positive_definite(a, e->alpha)) {
      std::ostringstream os;
      os << "alpha = " << e->alpha
         << " does not make alpha*I - A positive definite";
      throw InvalidConfig(os.str());
    }
    return {e->alpha, std::nullopt, 0};
  }

  AlphaResolution out;
  double base = 0.0;
  double gap = 0.0;
  if (const auto* d = std::get_if<DeltaTimesLambdaMax>(&strategy)) {
    if (!(d->delta > 1.0)) {
      throw InvalidConfig("delta must be greater than 1");
    }
    out.lambda = estimate_lambda_max(a);
    base = out.lambda->value;
    gap = (base > 0.0 ? (d->delta - 1.0) * base : 0.0) + additive_margin(base);
  } else {
    base = gershgorin_interval(a).second;
    gap = additive_margin(base);
  }

  for (int doubling = 0; doubling <= kMaxAlphaDoublings; ++doubling) {
    const double alpha = base + gap;
    if (shifted_is_positive_definite(a, alpha)) {
      out.alpha = alpha;
      out.doublings = doubling;
      return out;
    }
    gap *= 2.0;
  }
  throw InvalidConfig("could not find alpha making alpha*I - A positive definite");
}

StiefelMatrix random_stiefel(Eigen::Index m, Eigen::Index k,
                             std::uint64_t seed) {
  if (m < 1 || k < 1 || k > m) {
    throw InvalidInput("random_stiefel needs 1 <= k <= m");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix g(m, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) g(i, j) = normal(rng);
  }
  return polar_project(g).w;
}

namespace detail {

SolveReport gpi_iterate(const QpsmProblem& problem, const SolverConfig& config,
                        const StiefelMatrix& start, double stop_offset) {
  config.validate();
  if (start.rows() != problem.m() || start.cols() != problem.k()) {
    throw InvalidInput("starting point does not match the problem dimensions");
  }
  const AlphaResolution resolved =
      resolve_alpha(problem.a(), config.alpha_strategy);
  const double alpha = resolved.alpha;
  const Matrix& A = problem.a().matrix();
  const Matrix& B = problem.b();

  const Timer timer;
  SolveReport report{start};
  report.alpha_used = alpha;

  Matrix w = start.matrix();
  Matrix aw = A * w;
  Matrix r = alpha * w - aw + B;
  double f = w.cwiseProduct(aw).sum() - 2.0 * w.cwiseProduct(B).sum();
  double kkt = kkt_residual_from(w, r);

  auto record = [&] {
    if (!config.record_trajectory) return;
    report.objective_trajectory.push_back(f);
    report.kkt_trajectory.push_back(kkt);
    report.orthogonality_trajectory.push_back(orthogonality_error(w));
  };
  record();

  for (long it = 1; it <= config.max_iters; ++it) {
    const Matrix m = 2.0 * r;
    if (!m.allFinite()) {
      std::ostringstream os;
      os << "non-finite values in M at iteration " << it;
      throw SolverError(os.str(), it);
    }
    const CompactSvd svd = compact_svd(m);
    const Eigen::Index k = m.cols();
    if (!(svd.singular_values(k - 1) > 1e-12 * svd.singular_values(0))) {
      report.non_unique_subproblem_seen = true;
    }
    w = svd.u * svd.v.transpose();
    aw = A * w;
    r = alpha * w - aw + B;
    const double next = w.cwiseProduct(aw).sum() - 2.0 * w.cwiseProduct(B).sum();
    if (!std::isfinite(next) || !w.allFinite()) {
      std::ostringstream os;
      os << "non-finite iterate at iteration " << it;
      throw SolverError(os.str(), it);
    }
    const double decrease = (f + stop_offset) - (next + stop_offset);
    f = next;
    kkt = kkt_residual_from(w, r);
    report.iterations = it;
    record();

    if (decrease <= config.tau && (!config.kkt_tol || kkt <= *config.kkt_tol)) {
      report.converged = true;
      break;
    }
    if (config.time_limit_seconds &&
        timer.wall_seconds() > *config.time_limit_seconds) {
      report.timed_out = true;
      break;
    }
  }

  report.cpu_seconds = timer.cpu_seconds();
  report.elapsed_seconds = timer.wall_seconds();
  report.final_w = trusted_stiefel(std::move(w));
  report.final_objective = f;
  report.kkt_residual = kkt;
  return report;
}

}  // namespace detail

SolveReport gpi_solve(const QpsmProblem& problem, const SolverConfig& config) {
  config.validate();
  return detail::gpi_iterate(problem, config,
                             random_stiefel(problem.m(), problem.k(), config.seed),
                             0.0);
}

}  // namespace stiefel_qp
