#include "pla/linalg.hpp"

#include "pla/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace pla {

SymmetricMatrix::SymmetricMatrix(const Eigen::MatrixXd& entries) {
  if (entries.rows() != entries.cols()) {
    throw InvalidInput("symmetric matrix must be square, got " + std::to_string(entries.rows()) +
                       "x" + std::to_string(entries.cols()));
  }
  if (entries.rows() == 0) throw InvalidInput("symmetric matrix must have positive dimension");
  if (!entries.allFinite()) throw InvalidInput("symmetric matrix has non-finite entries");
  entries_ = 0.5 * (entries + entries.transpose());
}

SymmetricMatrix SymmetricMatrix::zero(Index dim) {
  return SymmetricMatrix(Eigen::MatrixXd::Zero(dim, dim));
}

SymmetricMatrix SymmetricMatrix::identity(Index dim) {
  return SymmetricMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

SymmetricMatrix SymmetricMatrix::diagonal(const Eigen::VectorXd& diag) {
  return SymmetricMatrix(Eigen::MatrixXd(diag.asDiagonal()));
}

SymmetricMatrix operator+(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  if (a.dim() != b.dim()) throw InvalidInput("dimension mismatch in matrix sum");
  return SymmetricMatrix(a.entries_ + b.entries_);
}

SymmetricMatrix operator-(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  if (a.dim() != b.dim()) throw InvalidInput("dimension mismatch in matrix difference");
  return SymmetricMatrix(a.entries_ - b.entries_);
}

SymmetricMatrix operator*(double s, const SymmetricMatrix& a) {
  return SymmetricMatrix(s * a.entries_);
}

void normalize_column_signs(Eigen::MatrixXd& vectors) {
  for (Index j = 0; j < vectors.cols(); ++j) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (vectors(best, j) < 0.0) vectors.col(j) *= -1.0;
  }
}

namespace {

double off_diagonal_mass(const Eigen::MatrixXd& a) {
  double s = 0.0;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

EigenPairs sym_eigen(const SymmetricMatrix& input) {
  const Index n = input.dim();
  Eigen::MatrixXd a = input.matrix();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);

  const double scale = a.norm();
  const double tol = 1e-12 * scale;
  const int max_sweeps = 100 * static_cast<int>(n);

  int sweep = 0;
  while (off_diagonal_mass(a) > tol) {
    if (++sweep > max_sweeps) {
      throw NumericalFailure("Jacobi eigensolver did not converge within " +
                             std::to_string(max_sweeps) + " sweeps");
    }
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Symmetric Schur decomposition of the (p, q) 2x2 subproblem.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        for (Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index l, Index r) { return a(l, l) > a(r, r); });

  EigenPairs out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    const Index src = order[static_cast<std::size_t>(j)];
    out.values(j) = a(src, src);
    out.vectors.col(j) = v.col(src);
  }
  normalize_column_signs(out.vectors);
  return out;
}

double frobenius_norm(const SymmetricMatrix& a) {
  double s = 0.0;
  const auto& m = a.matrix();
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) s += m(i, j) * m(i, j);
  return std::sqrt(s);
}

double sup_norm(std::span<const double> v) {
  if (v.empty()) throw InvalidInput("sup_norm of an empty vector");
  double best = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) throw InvalidInput("sup_norm of a non-finite vector");
    best = std::max(best, std::abs(x));
  }
  return best;
}

double sup_norm(const Eigen::VectorXd& v) {
  return sup_norm(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

EigenPairs align_signs(const EigenPairs& reference, const EigenPairs& candidate) {
  if (reference.dim() != candidate.dim() || reference.vectors.rows() != candidate.vectors.rows()) {
    throw InvalidInput("align_signs: dimension mismatch");
  }
  EigenPairs out = candidate;
  for (Index j = 0; j < out.vectors.cols(); ++j) {
    if (reference.vectors.col(j).dot(out.vectors.col(j)) < 0.0) out.vectors.col(j) *= -1.0;
  }
  return out;
}

double gershgorin_max(const SymmetricMatrix& a) {
  const auto& m = a.matrix();
  double best = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < m.rows(); ++i) {
    double radius = 0.0;
    for (Index k = 0; k < m.cols(); ++k)
      if (k != i) radius += std::abs(m(i, k));
    best = std::max(best, m(i, i) + radius);
  }
  return best;
}

}  // namespace pla
