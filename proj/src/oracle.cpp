#include "stiefel_qp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "stiefel_qp/gpi.hpp"

namespace stiefel_qp::oracle {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Candidate {
  double objective = std::numeric_limits<double>::infinity();
  std::array<long, 3> index{};

  bool better_than(const Candidate& other) const {
    if (objective != other.objective) return objective < other.objective;
    return index < other.index;
  }
};

void keep(Candidate& best, double value, std::array<long, 3> index) {
  const Candidate c{value, index};
  if (c.better_than(best)) best = c;
}

struct Grid {
  long r;
  // Half-open circle [0, 2pi) with r points and closed interval [0, pi]
  // with r + 1 points, both with step pi / r multiples so that the grid for
  // 2r contains the grid for r.
  std::vector<double> circle_cos, circle_sin, half_cos, half_sin;

  explicit Grid(long resolution) : r(resolution) {
    circle_cos.resize(r);
    circle_sin.resize(r);
    half_cos.resize(r + 1);
    half_sin.resize(r + 1);
    for (long i = 0; i < r; ++i) {
      const double t = circle_angle(i);
      circle_cos[i] = std::cos(t);
      circle_sin[i] = std::sin(t);
    }
    for (long i = 0; i <= r; ++i) {
      half_cos[i] = std::cos(half_angle(i));
      half_sin[i] = std::sin(half_angle(i));
    }
  }

  long half_points() const { return r + 1; }

  double circle_angle(long i) const {
    return kTwoPi * static_cast<double>(i) / static_cast<double>(r);
  }
  double half_angle(long i) const {
    return std::numbers::pi * static_cast<double>(i) / static_cast<double>(r);
  }
};

Eigen::Matrix3d rot_z(double c, double s) {
  Eigen::Matrix3d m;
  m << c, -s, 0, s, c, 0, 0, 0, 1;
  return m;
}

Eigen::Matrix3d rot_y(double c, double s) {
  Eigen::Matrix3d m;
  m << c, 0, s, 0, 1, 0, -s, 0, c;
  return m;
}

// Best grid point over the outer indices [begin, end).
Candidate search_block(const QpsmProblem& problem, Manifold manifold,
                       const Grid& g, long begin, long end, bool exhaustive) {
  const Matrix& A = problem.a().matrix();
  const Matrix& B = problem.b();
  Candidate best;

  switch (manifold) {
    case Manifold::V21: {
      for (long i = begin; i < end; ++i) {
        const Eigen::Vector2d w(g.circle_cos[i], g.circle_sin[i]);
        const double f = w.dot(A * w) - 2.0 * w.dot(B.col(0));
        keep(best, f, {i, 0, 0});
      }
      break;
    }
    case Manifold::V31: {
      for (long j = begin; j < end; ++j) {
        for (long i = 0; i < g.r; ++i) {
          const Eigen::Vector3d w(g.half_sin[j] * g.circle_cos[i],
                                  g.half_sin[j] * g.circle_sin[i], g.half_cos[j]);
          const double f = w.dot(A * w) - 2.0 * w.dot(B.col(0));
          keep(best, f, {j, i, 0});
        }
      }
      break;
    }
    case Manifold::V32: {
      // W = P2 K(c), P2 the first two columns of Rz(a) Ry(b), K(c) a planar
      // rotation. Then f = Tr(P2^T A P2) - 2 (p cos c + q sin c) with
      // C = P2^T B, p = C00 + C11, q = C10 - C01.
      for (long i = begin; i < end; ++i) {
        const Eigen::Matrix3d rz = rot_z(g.circle_cos[i], g.circle_sin[i]);
        for (long j = 0; j < g.half_points(); ++j) {
          const Eigen::Matrix3d p_full = rz * rot_y(g.half_cos[j], g.half_sin[j]);
          const Eigen::Matrix<double, 3, 2> p2 = p_full.leftCols<2>();
          const double quad = (p2.transpose() * A * p2).trace();
          const Eigen::Matrix2d c = p2.transpose() * B;
          const double p = c(0, 0) + c(1, 1);
          const double q = c(1, 0) - c(0, 1);
          auto eval = [&](long l) {
            keep(best, quad - 2.0 * (p * g.circle_cos[l] + q * g.circle_sin[l]),
                 {i, j, l});
          };
          if (exhaustive) {
            for (long l = 0; l < g.r; ++l) eval(l);
            continue;
          }
          if (p == 0.0 && q == 0.0) {
            eval(0);
            continue;
          }
          double peak = std::atan2(q, p);
          if (peak < 0.0) peak += kTwoPi;
          const long l0 = static_cast<long>(
              std::floor(peak / kTwoPi * static_cast<double>(g.r)));
          for (long d = -1; d <= 2; ++d) {
            eval(((l0 + d) % g.r + g.r) % g.r);
          }
        }
      }
      break;
    }
  }
  return best;
}

}  // namespace

GridResult grid_minimize(const QpsmProblem& problem, const GridSpec& spec,
                         unsigned threads, bool exhaustive) {
  if (spec.resolution < 8) {
    throw InvalidInput("grid resolution must be at least 8");
  }
  const auto [m, k] = [&]() -> std::pair<long, long> {
    switch (spec.manifold) {
      case Manifold::V21: return {2, 1};
      case Manifold::V31: return {3, 1};
      case Manifold::V32: return {3, 2};
    }
    return {0, 0};
  }();
  if (problem.m() != m || problem.k() != k) {
    throw InvalidInput("problem dimensions do not match the grid manifold");
  }

  const Grid grid(spec.resolution);
  const long outer =
      spec.manifold == Manifold::V31 ? grid.half_points() : spec.resolution;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<long>(threads, outer));

  std::vector<Candidate> partial(threads);
  if (threads == 1) {
    partial[0] = search_block(problem, spec.manifold, grid, 0, outer, exhaustive);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      const long begin = outer * t / threads;
      const long end = outer * (t + 1) / threads;
      pool.emplace_back([&, t, begin, end] {
        partial[t] = search_block(problem, spec.manifold, grid, begin, end,
                                  exhaustive);
      });
    }
    for (auto& th : pool) th.join();
  }
  Candidate best = partial[0];
  for (const auto& c : partial) {
    if (c.better_than(best)) best = c;
  }

  Matrix w(m, k);
  std::array<double, 3> angles{};
  switch (spec.manifold) {
    case Manifold::V21:
      angles[0] = grid.circle_angle(best.index[0]);
      w << std::cos(angles[0]), std::sin(angles[0]);
      break;
    case Manifold::V31: {
      angles[0] = grid.half_angle(best.index[0]);
      angles[1] = grid.circle_angle(best.index[1]);
      w << std::sin(angles[0]) * std::cos(angles[1]),
          std::sin(angles[0]) * std::sin(angles[1]), std::cos(angles[0]);
      break;
    }
    case Manifold::V32: {
      angles[0] = grid.circle_angle(best.index[0]);
      angles[1] = grid.half_angle(best.index[1]);
      angles[2] = grid.circle_angle(best.index[2]);
      const Eigen::Matrix3d r =
          rot_z(std::cos(angles[0]), std::sin(angles[0])) *
          rot_y(std::cos(angles[1]), std::sin(angles[1])) *
          rot_z(std::cos(angles[2]), std::sin(angles[2]));
      w = r.leftCols<2>();
      break;
    }
  }
  StiefelMatrix sw(std::move(w));
  const double f = objective(problem, sw);
  return GridResult{std::move(sw), f, angles};
}

PowerResult power_iteration(const SymmetricMatrix& a, std::uint64_t seed,
                            double tol, long max_iters) {
  const Matrix& A = a.matrix();
  const double threshold = tol * (1.0 + A.norm());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector w(a.dim());
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = normal(rng);
  w.normalize();

  PowerResult out;
  for (long it = 1; it <= max_iters; ++it) {
    const Vector x = A * w;
    const double lambda = w.dot(x);
    out.lambda = lambda;
    out.iterations = it;
    if ((x - lambda * w).norm() <= threshold) {
      out.converged = true;
      break;
    }
    w = x / x.norm();
  }
  out.vector = std::move(w);
  return out;
}

SubspaceResult orthogonal_iteration(const SymmetricMatrix& a, Eigen::Index k,
                                    std::uint64_t seed, double tol,
                                    long max_iters, Normalization normalization) {
  const Matrix& A = a.matrix();
  if (k < 1 || k > a.dim()) {
    throw InvalidInput("orthogonal iteration needs 1 <= k <= m");
  }
  const double threshold = tol * (1.0 + A.norm());
  Matrix w = random_stiefel(a.dim(), k, seed).matrix();

  long it = 0;
  bool converged = false;
  while (true) {
    const Matrix aw = A * w;
    const Matrix rayleigh = w.transpose() * aw;
    if ((aw - w * rayleigh).norm() <= threshold) {
      converged = true;
      break;
    }
    if (it >= max_iters) break;
    ++it;
    if (normalization == Normalization::Qr) {
      Eigen::HouseholderQR<Matrix> qr(aw);
      w = qr.householderQ() * Matrix::Identity(a.dim(), k);
    } else {
      w = polar_project(aw).w.matrix();
    }
  }
  return SubspaceResult{detail::trusted_stiefel(std::move(w)), it, converged};
}

Matrix dense_eigenspace(const SymmetricMatrix& a, Eigen::Index k, bool top) {
  if (k < 1 || k > a.dim()) {
    throw InvalidInput("eigenspace size must satisfy 1 <= k <= m");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a.matrix());
  const Matrix& vecs = eig.eigenvectors();
  return top ? Matrix(vecs.rightCols(k)) : Matrix(vecs.leftCols(k));
}

double max_principal_angle(const Matrix& u, const Matrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) {
    throw InvalidInput("subspace bases must have the same shape");
  }
  const Matrix residual = v - u * (u.transpose() * v);
  Eigen::JacobiSVD<Matrix> svd(residual);
  const double sine = std::min(1.0, svd.singularValues()(0));
  return std::asin(sine);
}

}  // namespace stiefel_qp::oracle
