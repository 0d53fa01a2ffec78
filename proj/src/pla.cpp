#include "pla/pla.hpp"

#include "pla/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace pla {

void PlaConfig::validate() const {
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidInput("tau must lie in (0, 1)");
  if (!(retained_variance_min > 0.0 && retained_variance_min <= 1.0)) {
    throw InvalidInput("retained_variance_min must lie in (0, 1]");
  }
}

namespace {

// Union-find over M variables (0..M-1) followed by M eigenvectors (M..2M-1).
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Keep the smaller index as root so traversal order is stable.
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

void check_indices(std::span<const Index> idx, Index m, const char* what) {
  if (idx.empty()) throw InvalidInput(std::string(what) + " index set is empty");
  std::vector<Index> sorted(idx.begin(), idx.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidInput(std::string(what) + " index set has duplicates");
  }
  if (sorted.front() < 0 || sorted.back() >= m) {
    throw InvalidInput(std::string(what) + " index out of range");
  }
}

double total_variance(const EigenPairs& eigen) {
  const double total = eigen.values.sum();
  if (!(total > 0.0)) throw InvalidInput("total variance must be positive");
  return total;
}

}  // namespace

std::vector<LoadingComponent> loading_components(const EigenPairs& eigen, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidInput("tau must lie in (0, 1)");
  const Index m = eigen.dim();
  const auto um = static_cast<std::size_t>(m);
  DisjointSets sets(2 * um);
  for (Index j = 0; j < m; ++j)
    for (Index v = 0; v < m; ++v)
      if (std::abs(eigen.vectors(v, j)) >= tau)
        sets.unite(static_cast<std::size_t>(v), um + static_cast<std::size_t>(j));

  std::vector<LoadingComponent> by_root(2 * um);
  for (std::size_t x = 0; x < 2 * um; ++x) {
    auto& c = by_root[sets.find(x)];
    if (x < um) c.variables.push_back(static_cast<Index>(x));
    else c.eigenvectors.push_back(static_cast<Index>(x - um));
  }
  // Roots are the smallest member, so iterating in root order lists
  // components by smallest variable first.
  std::vector<LoadingComponent> out;
  for (auto& c : by_root)
    if (!c.variables.empty() || !c.eigenvectors.empty()) out.push_back(std::move(c));
  return out;
}

BlockDetection detect_blocks(const EigenPairs& eigen, double tau) {
  const Index m = eigen.dim();
  BlockDetection out;
  for (auto& c : loading_components(eigen, tau)) {
    if (c.variables.empty()) {
      out.degenerate_eigenvectors.insert(out.degenerate_eigenvectors.end(),
                                         c.eigenvectors.begin(), c.eigenvectors.end());
      continue;
    }
    if (c.variables.size() == c.eigenvectors.size()) {
      if (static_cast<Index>(c.variables.size()) < m) {
        BlockCandidate cand;
        cand.variable_indices = std::move(c.variables);
        cand.eigenvector_indices = std::move(c.eigenvectors);
        out.candidates.push_back(std::move(cand));
      }
      continue;
    }
    out.unmatched.push_back(std::move(c));
  }
  std::sort(out.degenerate_eigenvectors.begin(), out.degenerate_eigenvectors.end());
  return out;
}

double explained_variance(const EigenPairs& eigen, std::span<const Index> eigenvector_indices) {
  check_indices(eigenvector_indices, eigen.dim(), "eigenvector");
  const double total = total_variance(eigen);
  double part = 0.0;
  for (Index j : eigenvector_indices) part += eigen.values(j);
  return part / total;
}

double contribution_measure(const EigenPairs& eigen, std::span<const Index> variable_indices,
                            std::span<const Index> eigenvector_indices) {
  const Index m = eigen.dim();
  check_indices(variable_indices, m, "variable");
  check_indices(eigenvector_indices, m, "eigenvector");
  if (variable_indices.size() != eigenvector_indices.size()) {
    throw InvalidInput("a block needs as many eigenvectors as variables");
  }
  const double total = total_variance(eigen);

  std::vector<bool> own(static_cast<std::size_t>(m), false);
  for (Index j : eigenvector_indices) own[static_cast<std::size_t>(j)] = true;

  auto loading_mass = [&](Index j) {
    double s = 0.0;
    for (Index i : variable_indices) s += eigen.vectors(i, j) * eigen.vectors(i, j);
    return s;
  };
  double own_part = 0.0;
  double other_part = 0.0;
  for (Index j = 0; j < m; ++j) {
    const double term = eigen.values(j) * loading_mass(j);
    if (own[static_cast<std::size_t>(j)]) own_part += term;
    else other_part += term;
  }
  return (own_part + other_part) / total;
}

namespace {

double max_cross_correlation(const SymmetricMatrix& cov, const std::vector<bool>& inside) {
  const Index m = cov.dim();
  double best = 0.0;
  for (Index i = 0; i < m; ++i) {
    if (!inside[static_cast<std::size_t>(i)]) continue;
    for (Index k = 0; k < m; ++k) {
      if (inside[static_cast<std::size_t>(k)]) continue;
      const double denom = std::sqrt(cov(i, i) * cov(k, k));
      if (denom > 0.0) best = std::max(best, std::abs(cov(i, k)) / denom);
    }
  }
  return best;
}

double cross_block_norm(const SymmetricMatrix& cov, const std::vector<bool>& inside) {
  const Index m = cov.dim();
  double s = 0.0;
  for (Index i = 0; i < m; ++i)
    for (Index k = 0; k < m; ++k)
      if (inside[static_cast<std::size_t>(i)] != inside[static_cast<std::size_t>(k)])
        s += cov(i, k) * cov(i, k);
  return std::sqrt(s);
}

}  // namespace

PlaReport run_pla(const SymmetricMatrix& cov, const PlaConfig& config) {
  config.validate();
  const Index m = cov.dim();
  if (m < 2) throw InvalidInput("PLA needs at least 2 variables");
  for (Index i = 0; i < m; ++i) {
    if (cov(i, i) < 0.0) throw InvalidInput("covariance has a negative variance");
  }

  PlaReport report;
  report.config = config;
  report.eigen = sym_eigen(cov);
  const double scale = std::max(1.0, std::abs(report.eigen.values(0)));
  if (report.eigen.values(m - 1) < -1e-10 * scale) {
    throw InvalidInput("covariance matrix is not positive semidefinite");
  }

  BlockDetection detection = detect_blocks(report.eigen, config.tau);
  report.degenerate_eigenvectors = std::move(detection.degenerate_eigenvectors);
  report.unmatched_components = std::move(detection.unmatched);
  report.candidates = std::move(detection.candidates);

  for (auto& cand : report.candidates) {
    cand.explained_variance = explained_variance(report.eigen, cand.eigenvector_indices);
    cand.contribution_measure =
        contribution_measure(report.eigen, cand.variable_indices, cand.eigenvector_indices);

    std::vector<bool> inside(static_cast<std::size_t>(m), false);
    for (Index i : cand.variable_indices) inside[static_cast<std::size_t>(i)] = true;
    cand.max_cross_correlation = max_cross_correlation(cov, inside);
    cand.covariance_separated = cand.max_cross_correlation < config.tau;

    CandidateBounds b;
    b.variables = cand.variable_indices;
    b.cross_block_norm = cross_block_norm(cov, inside);
    for (Index j : cand.eigenvector_indices) {
      EigenvectorBound eb;
      eb.gap = eigengap(report.eigen.values, j);
      eb.check = sufficient_discard_bound(report.eigen.values, b.cross_block_norm, j, config.tau);
      b.eigenvectors.push_back(eb);
    }
    report.bounds.push_back(std::move(b));
  }

  auto score = [&](const BlockCandidate& c) {
    return config.use_contribution_measure ? c.contribution_measure : c.explained_variance;
  };
  std::vector<std::size_t> order(report.candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return score(report.candidates[l]) < score(report.candidates[r]);
  });

  double dropped = 0.0;
  std::vector<bool> discarded(static_cast<std::size_t>(m), false);
  for (std::size_t idx : order) {
    auto& cand = report.candidates[idx];
    if (config.require_covariance_separation && !cand.covariance_separated) continue;
    const double s = score(cand);
    if (1.0 - (dropped + s) >= config.retained_variance_min) {
      cand.discardable = true;
      dropped += s;
      for (Index i : cand.variable_indices) discarded[static_cast<std::size_t>(i)] = true;
    }
  }

  for (Index i = 0; i < m; ++i) {
    if (discarded[static_cast<std::size_t>(i)]) report.decision.discarded.push_back(i);
    else report.decision.kept.push_back(i);
  }
  report.decision.retained_variance = 1.0 - dropped;
  return report;
}

}  // namespace pla
