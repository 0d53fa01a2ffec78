#pragma once

#include "pla/csv.hpp"
#include "pla/linalg.hpp"

#include <Eigen/QR>

#include <random>
#include <string>
#include <vector>

namespace pla::testing {

inline SymmetricMatrix load_cov(const std::string& name) {
  return io::to_covariance(io::read_csv_file(std::string(PLA_DATA_DIR) + "/" + name), name);
}

inline Eigen::MatrixXd gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = z(rng);
  return g;
}

// Haar-ish orthogonal matrix from the QR factor of a Gaussian matrix.
inline Eigen::MatrixXd random_orthogonal(Index n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian_matrix(n, n, rng));
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}

inline SymmetricMatrix random_symmetric(Index n, std::mt19937_64& rng) {
  const Eigen::MatrixXd g = gaussian_matrix(n, n, rng);
  return SymmetricMatrix(g + g.transpose());
}

// Q diag(d) Q^T.
inline SymmetricMatrix from_spectrum(const Eigen::MatrixXd& q, const Eigen::VectorXd& d) {
  return SymmetricMatrix(q * d.asDiagonal() * q.transpose());
}

}  // namespace pla::testing
