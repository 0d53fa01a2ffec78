#include "pla/covariance.hpp"
#include "pla/errors.hpp"
#include "support.hpp"

#include <Eigen/Cholesky>
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace pla;

namespace {

DataMatrix data_of(const Eigen::MatrixXd& rows) { return DataMatrix{rows, {}}; }

}  // namespace

TEST_CASE("sample covariance by hand") {
  Eigen::MatrixXd x(2, 2);
  x << 0, 0, 2, 2;
  const SymmetricMatrix s = sample_covariance(data_of(x));
  CHECK(s.matrix() == Eigen::Matrix2d::Constant(2.0));
}

TEST_CASE("constant column has zero variance and covariance") {
  Eigen::MatrixXd x(4, 2);
  x << 1, 5, 2, 5, 3, 5, 7, 5;
  const SymmetricMatrix s = sample_covariance(data_of(x));
  CHECK(s(1, 1) == 0.0);
  CHECK(s(0, 1) == 0.0);
  CHECK(s(0, 0) > 0.0);
}

TEST_CASE("sample covariance rejects bad data") {
  CHECK_THROWS_AS(sample_covariance(data_of(Eigen::MatrixXd::Ones(1, 3))), InvalidInput);
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(3, 2);
  x(1, 1) = std::nan("");
  CHECK_THROWS_AS(sample_covariance(data_of(x)), InvalidInput);
}

TEST_CASE("sample covariance converges on a known covariance") {
  Eigen::Matrix3d sigma;
  sigma << 4, 1.2, -0.6, 1.2, 2, 0.3, -0.6, 0.3, 1;
  const Eigen::Matrix3d l = sigma.llt().matrixL();
  std::mt19937_64 rng(2024);
  const Index n = 100000;
  const Eigen::MatrixXd z = pla::testing::gaussian_matrix(n, 3, rng);
  const SymmetricMatrix s = sample_covariance(data_of(z * l.transpose()));
  const double tol = 5.0 * std::sqrt(2.0 / static_cast<double>(n)) * sigma.cwiseAbs().maxCoeff();
  CHECK((s.matrix() - sigma).cwiseAbs().maxCoeff() <= tol);
}

TEST_CASE("correlation matrix") {
  Eigen::Matrix2d c;
  c << 4, 2, 2, 9;
  const SymmetricMatrix r = to_correlation(SymmetricMatrix(c));
  CHECK(r(0, 0) == 1.0);
  CHECK(r(1, 1) == 1.0);
  CHECK(r(0, 1) == doctest::Approx(2.0 / 6.0).epsilon(1e-15));
  CHECK_THROWS_AS(to_correlation(SymmetricMatrix::diagonal(Eigen::Vector2d(1, 0))), InvalidInput);
}

TEST_CASE("block ordering of a diagonal matrix") {
  const BlockOrdering b = find_block_ordering(SymmetricMatrix::diagonal(Eigen::Vector3d(1, 2, 3)), 0.0);
  REQUIRE(b.blocks.size() == 3);
  for (Index i = 0; i < 3; ++i) CHECK(b.blocks[i] == std::vector<Index>{i});
}

TEST_CASE("block ordering of the block example") {
  const BlockOrdering b = find_block_ordering(pla::testing::load_cov("block_example_cov.csv"), 0.5);
  REQUIRE(b.blocks.size() == 2);
  CHECK(b.blocks[0] == std::vector<Index>{0, 1});
  CHECK(b.blocks[1] == std::vector<Index>{2, 3, 4, 5, 6, 7, 8, 9});
  CHECK(b.block_sizes() == std::vector<Index>{2, 8});
}

TEST_CASE("block ordering recovers a shuffled three-block matrix") {
  std::mt19937_64 rng(99);
  const std::vector<Index> sizes{3, 1, 4};
  const Index m = 8;
  Eigen::MatrixXd built = Eigen::MatrixXd::Zero(m, m);
  Index at = 0;
  for (Index s : sizes) {
    const Eigen::MatrixXd g = pla::testing::gaussian_matrix(s, s, rng);
    built.block(at, at, s, s) = g * g.transpose() + Eigen::MatrixXd::Identity(s, s);
    at += s;
  }
  std::vector<Index> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  // shuffled(perm[i], perm[k]) = built(i, k)
  Eigen::MatrixXd shuffled(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index k = 0; k < m; ++k) shuffled(perm[i], perm[k]) = built(i, k);

  const SymmetricMatrix cov(shuffled);
  const BlockOrdering b = find_block_ordering(cov, 0.0);

  std::vector<std::vector<Index>> expected;
  at = 0;
  for (Index s : sizes) {
    std::vector<Index> blk;
    for (Index i = at; i < at + s; ++i) blk.push_back(perm[i]);
    std::sort(blk.begin(), blk.end());
    expected.push_back(blk);
    at += s;
  }
  std::sort(expected.begin(), expected.end());
  CHECK(b.blocks == expected);

  // The reordered matrix is block diagonal and reordering it again is a no-op.
  const SymmetricMatrix reordered = b.apply(cov);
  Index offset = 0;
  for (Index s : b.block_sizes()) {
    for (Index i = offset; i < offset + s; ++i)
      for (Index k = 0; k < m; ++k)
        if (k < offset || k >= offset + s) CHECK(reordered(i, k) == 0.0);
    offset += s;
  }
  const BlockOrdering again = find_block_ordering(reordered, 0.0);
  std::vector<Index> identity(m);
  std::iota(identity.begin(), identity.end(), 0);
  CHECK(again.order == identity);
  for (Index i = 0; i < m; ++i) CHECK(b.position[b.order[i]] == i);
}
