#pragma once

#include <Eigen/Dense>

#include <span>

namespace pla {

using Index = Eigen::Index;

// Dense real symmetric matrix. The stored entries are symmetrized on
// construction, (a + a^T) / 2, so entries(i, j) == entries(j, i) exactly.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(const Eigen::MatrixXd& entries);

  static SymmetricMatrix zero(Index dim);
  static SymmetricMatrix identity(Index dim);
  static SymmetricMatrix diagonal(const Eigen::VectorXd& diag);

  Index dim() const { return entries_.rows(); }
  double operator()(Index i, Index j) const { return entries_(i, j); }
  const Eigen::MatrixXd& matrix() const { return entries_; }

  friend SymmetricMatrix operator+(const SymmetricMatrix& a, const SymmetricMatrix& b);
  friend SymmetricMatrix operator-(const SymmetricMatrix& a, const SymmetricMatrix& b);
  friend SymmetricMatrix operator*(double s, const SymmetricMatrix& a);

  bool operator==(const SymmetricMatrix& other) const {
    return entries_.rows() == other.entries_.rows() && entries_ == other.entries_;
  }

 private:
  Eigen::MatrixXd entries_;
};

// Eigenvalues in descending order, column j of `vectors` is the unit
// eigenvector for values[j]. In every column the entry of largest magnitude
// is nonnegative (ties go to the lowest row).
struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;

  Index dim() const { return values.size(); }
  bool operator==(const EigenPairs& other) const {
    return values.size() == other.values.size() && values == other.values &&
           vectors == other.vectors;
  }
};

// Cyclic Jacobi eigendecomposition. Converges when the off-diagonal
// Frobenius mass drops below 1e-12 * ||a||_F; gives up after 100 * M sweeps.
// Throws NumericalFailure when the sweep budget is exhausted.
EigenPairs sym_eigen(const SymmetricMatrix& a);

double frobenius_norm(const SymmetricMatrix& a);

// max_m |v_m|. Throws InvalidInput on an empty vector.
double sup_norm(std::span<const double> v);
double sup_norm(const Eigen::VectorXd& v);

// Flip candidate columns so that <reference_j, candidate_j> >= 0.
EigenPairs align_signs(const EigenPairs& reference, const EigenPairs& candidate);

// Largest real value inside the union of Gershgorin discs:
// max_i (a_ii + sum_{k != i} |a_ik|).
double gershgorin_max(const SymmetricMatrix& a);

// Canonical column sign used by sym_eigen.
void normalize_column_signs(Eigen::MatrixXd& vectors);

}  // namespace pla
