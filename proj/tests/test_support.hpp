#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace stiefel_qp::testing {

inline Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols,
                                std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = normal(rng);
  }
  return out;
}

// Orthonormal columns from Householder QR, independent of the SVD path.
inline Eigen::MatrixXd random_orthonormal(Eigen::Index rows, Eigen::Index cols,
                                          std::mt19937_64& rng) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(rows, cols, rng));
  return qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
}

inline Eigen::MatrixXd random_symmetric(Eigen::Index m, std::mt19937_64& rng) {
  const Eigen::MatrixXd g = gaussian(m, m, rng);
  return 0.5 * (g + g.transpose());
}

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace stiefel_qp::testing
