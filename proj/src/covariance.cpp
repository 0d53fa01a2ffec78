#include "pla/covariance.hpp"

#include "pla/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace pla {

SymmetricMatrix sample_covariance(const DataMatrix& data) {
  const Index n = data.n_obs();
  if (n < 2) throw InvalidInput("sample covariance needs at least 2 observations, got " +
                                std::to_string(n));
  if (data.n_vars() < 1) throw InvalidInput("sample covariance needs at least 1 variable");
  if (!data.rows.allFinite()) throw InvalidInput("data contains non-finite values");

  const Eigen::RowVectorXd mean = data.rows.colwise().mean();
  const Eigen::MatrixXd centered = data.rows.rowwise() - mean;
  Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  return SymmetricMatrix(cov);
}

SymmetricMatrix to_correlation(const SymmetricMatrix& cov) {
  const Index m = cov.dim();
  Eigen::VectorXd inv_sd(m);
  for (Index i = 0; i < m; ++i) {
    if (!(cov(i, i) > 0.0)) {
      throw InvalidInput("cannot standardize: variable " + std::to_string(i + 1) +
                         " has nonpositive variance");
    }
    inv_sd(i) = 1.0 / std::sqrt(cov(i, i));
  }
  Eigen::MatrixXd corr = inv_sd.asDiagonal() * cov.matrix() * inv_sd.asDiagonal();
  corr.diagonal().setOnes();
  return SymmetricMatrix(corr);
}

std::vector<Index> BlockOrdering::block_sizes() const {
  std::vector<Index> sizes;
  sizes.reserve(blocks.size());
  for (const auto& b : blocks) sizes.push_back(static_cast<Index>(b.size()));
  return sizes;
}

SymmetricMatrix BlockOrdering::apply(const SymmetricMatrix& cov) const {
  const Index m = cov.dim();
  if (static_cast<Index>(order.size()) != m) throw InvalidInput("ordering dimension mismatch");
  Eigen::MatrixXd out(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      out(i, j) = cov(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  return SymmetricMatrix(out);
}

BlockOrdering find_block_ordering(const SymmetricMatrix& cov, double tol) {
  if (!(tol >= 0.0)) throw InvalidInput("block detection tolerance must be nonnegative");
  const Index m = cov.dim();
  const auto um = static_cast<std::size_t>(m);

  std::vector<int> component(um, -1);
  BlockOrdering out;
  for (Index start = 0; start < m; ++start) {
    if (component[static_cast<std::size_t>(start)] >= 0) continue;
    const int id = static_cast<int>(out.blocks.size());
    std::vector<Index> members{start};
    component[static_cast<std::size_t>(start)] = id;
    for (std::size_t head = 0; head < members.size(); ++head) {
      const Index i = members[head];
      for (Index j = 0; j < m; ++j) {
        if (component[static_cast<std::size_t>(j)] < 0 && std::abs(cov(i, j)) > tol) {
          component[static_cast<std::size_t>(j)] = id;
          members.push_back(j);
        }
      }
    }
    std::sort(members.begin(), members.end());
    out.blocks.push_back(std::move(members));
  }

  out.order.reserve(um);
  for (const auto& b : out.blocks) out.order.insert(out.order.end(), b.begin(), b.end());
  out.position.assign(um, 0);
  for (std::size_t p = 0; p < um; ++p) out.position[static_cast<std::size_t>(out.order[p])] =
      static_cast<Index>(p);
  return out;
}

}  // namespace pla
