#pragma once

#include "pla/linalg.hpp"

#include <string>
#include <vector>

namespace pla {

// N x M observation matrix, rows are observations.
struct DataMatrix {
  Eigen::MatrixXd rows;
  std::vector<std::string> column_names;  // empty when the source had no header

  Index n_obs() const { return rows.rows(); }
  Index n_vars() const { return rows.cols(); }
};

// Unbiased (N - 1) sample covariance. Throws InvalidInput for N < 2 or
// non-finite data.
SymmetricMatrix sample_covariance(const DataMatrix& data);

// D^{-1/2} S D^{-1/2}. Throws InvalidInput when a variance is not positive.
SymmetricMatrix to_correlation(const SymmetricMatrix& cov);

// Variables grouped into the connected components of the support graph
// |cov_ij| > tol.
struct BlockOrdering {
  // order[new_position] = original index; position is its inverse.
  std::vector<Index> order;
  std::vector<Index> position;
  // Each block lists original indices in ascending order; blocks are sorted
  // by their smallest index.
  std::vector<std::vector<Index>> blocks;

  std::vector<Index> block_sizes() const;
  // P cov P^T with variables laid out block by block.
  SymmetricMatrix apply(const SymmetricMatrix& cov) const;
};

BlockOrdering find_block_ordering(const SymmetricMatrix& cov, double tol);

}  // namespace pla
