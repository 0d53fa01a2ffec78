#pragma once

#include "pla/linalg.hpp"

#include <string_view>

namespace pla {

// Gaps around eigenvalue j (0-based) of a descending spectrum, with the
// conventions lambda_{-1} = +inf and lambda_M = -inf, so the outermost
// eigenvalues get an infinite gap on their open side.
struct GapSpec {
  Index index = 0;
  double lower_gap = 0.0;  // lambda_{j-1} - lambda_j
  double upper_gap = 0.0;  // lambda_j - lambda_{j+1}

  double min_gap() const { return lower_gap < upper_gap ? lower_gap : upper_gap; }
  bool operator==(const GapSpec&) const = default;
};

GapSpec eigengap(const Eigen::VectorXd& descending_values, Index j);

enum class BoundDiagnostic { none, zero_gap, nonpositive_bound };
std::string_view to_string(BoundDiagnostic d);
BoundDiagnostic bound_diagnostic_from_string(std::string_view s);

// Outcome of a sufficient condition `lhs < rhs`.
struct BoundCheck {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
  BoundDiagnostic diagnostic = BoundDiagnostic::none;
  bool operator==(const BoundCheck&) const = default;
};

// Weyl: max_j |lambda_j(A + P) - lambda_j(A)| <= ||P||_2 <= ||P||_F.
double weyl_eigenvalue_bound(const SymmetricMatrix& perturbation);

// 2^{3/2} * perturbation_norm / min_gap(j) < tau guarantees that the
// sign-aligned eigenvector j moves by less than tau in sup-norm. The gaps
// should come from the unperturbed spectrum; feeding sample eigenvalues is an
// approximation.
BoundCheck sufficient_discard_bound(const Eigen::VectorXd& population_values,
                                    double perturbation_norm, Index j, double tau);

// Embed `a` in the top-left corner of a dim x dim matrix whose remaining
// diagonal is delta.
SymmetricMatrix pad_with_delta(const SymmetricMatrix& a, Index dim, double delta);

// D = max(gershgorin_max(above - current), gershgorin_max(current - below)),
// padding the smaller operand of each difference with diag(delta).
double gershgorin_separation(const SymmetricMatrix& above, const SymmetricMatrix& current,
                             const SymmetricMatrix& below, double delta = 1e-12);

// ||E||_F < tau * D, with D from gershgorin_separation.
BoundCheck gershgorin_condition(const SymmetricMatrix& above, const SymmetricMatrix& current,
                                const SymmetricMatrix& below, double e_norm, double tau,
                                double delta = 1e-12);

}  // namespace pla
