#include "pla/bounds.hpp"

#include "pla/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pla {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidInput("tau must lie in (0, 1)");
}

}  // namespace

GapSpec eigengap(const Eigen::VectorXd& values, Index j) {
  const Index m = values.size();
  if (j < 0 || j >= m) {
    throw InvalidInput("eigengap index " + std::to_string(j) + " outside [0, " +
                       std::to_string(m) + ")");
  }
  for (Index i = 1; i < m; ++i) {
    if (values(i) > values(i - 1)) throw InvalidInput("eigengap expects descending eigenvalues");
  }
  GapSpec g;
  g.index = j;
  g.lower_gap = j == 0 ? kInf : values(j - 1) - values(j);
  g.upper_gap = j == m - 1 ? kInf : values(j) - values(j + 1);
  return g;
}

std::string_view to_string(BoundDiagnostic d) {
  switch (d) {
    case BoundDiagnostic::none:
      return "none";
    case BoundDiagnostic::zero_gap:
      return "zero_gap";
    case BoundDiagnostic::nonpositive_bound:
      return "nonpositive_bound";
  }
  return "none";
}

BoundDiagnostic bound_diagnostic_from_string(std::string_view s) {
  if (s == "none") return BoundDiagnostic::none;
  if (s == "zero_gap") return BoundDiagnostic::zero_gap;
  if (s == "nonpositive_bound") return BoundDiagnostic::nonpositive_bound;
  throw InvalidInput("unknown bound diagnostic '" + std::string(s) + "'");
}

double weyl_eigenvalue_bound(const SymmetricMatrix& perturbation) {
  return frobenius_norm(perturbation);
}

BoundCheck sufficient_discard_bound(const Eigen::VectorXd& population_values,
                                    double perturbation_norm, Index j, double tau) {
  check_tau(tau);
  if (!(perturbation_norm >= 0.0)) throw InvalidInput("perturbation norm must be nonnegative");
  const GapSpec gap = eigengap(population_values, j);

  BoundCheck out;
  out.rhs = tau;
  if (perturbation_norm == 0.0) {
    out.lhs = 0.0;
    out.holds = true;
    return out;
  }
  const double g = gap.min_gap();
  if (!(g > 0.0)) {
    out.lhs = kInf;
    out.holds = false;
    out.diagnostic = BoundDiagnostic::zero_gap;
    return out;
  }
  out.lhs = std::pow(2.0, 1.5) * perturbation_norm / g;
  out.holds = out.lhs < tau;
  return out;
}

SymmetricMatrix pad_with_delta(const SymmetricMatrix& a, Index dim, double delta) {
  if (dim < a.dim()) throw InvalidInput("cannot pad to a smaller dimension");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  out.topLeftCorner(a.dim(), a.dim()) = a.matrix();
  for (Index i = a.dim(); i < dim; ++i) out(i, i) = delta;
  return SymmetricMatrix(out);
}

namespace {

SymmetricMatrix padded_difference(const SymmetricMatrix& a, const SymmetricMatrix& b,
                                  double delta) {
  const Index dim = std::max(a.dim(), b.dim());
  return pad_with_delta(a, dim, delta) - pad_with_delta(b, dim, delta);
}

}  // namespace

double gershgorin_separation(const SymmetricMatrix& above, const SymmetricMatrix& current,
                             const SymmetricMatrix& below, double delta) {
  if (!(delta > 0.0)) throw InvalidInput("padding delta must be positive");
  return std::max(gershgorin_max(padded_difference(above, current, delta)),
                  gershgorin_max(padded_difference(current, below, delta)));
}

BoundCheck gershgorin_condition(const SymmetricMatrix& above, const SymmetricMatrix& current,
                                const SymmetricMatrix& below, double e_norm, double tau,
                                double delta) {
  check_tau(tau);
  if (!(e_norm >= 0.0)) throw InvalidInput("perturbation norm must be nonnegative");
  const double d = gershgorin_separation(above, current, below, delta);

  BoundCheck out;
  out.lhs = e_norm;
  out.rhs = tau * d;
  if (!(d > 0.0)) {
    out.holds = false;
    out.diagnostic = BoundDiagnostic::nonpositive_bound;
    return out;
  }
  out.holds = e_norm < out.rhs;
  return out;
}

}  // namespace pla
