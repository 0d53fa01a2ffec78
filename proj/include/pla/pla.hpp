#pragma once

#include "pla/bounds.hpp"
#include "pla/linalg.hpp"

#include <span>
#include <vector>

namespace pla {

struct PlaConfig {
  // Loadings with |v| < tau count as structural zeros.
  double tau = 0.4;
  // A candidate is discardable only while the variance kept after dropping
  // every selected candidate stays at or above this share.
  double retained_variance_min = 0.9;
  // Rank and budget candidates by contribution_measure instead of
  // explained_variance.
  bool use_contribution_measure = false;
  // Only candidates whose variables are also weakly correlated with the rest
  // (every cross correlation below tau) may be discarded.
  bool require_covariance_separation = true;

  void validate() const;
  bool operator==(const PlaConfig&) const = default;
};

// A bipartite component of the loading graph: variable m and eigenvector j
// are linked iff |v_j(m)| >= tau.
struct LoadingComponent {
  std::vector<Index> variables;
  std::vector<Index> eigenvectors;
  bool operator==(const LoadingComponent&) const = default;
};

struct BlockCandidate {
  std::vector<Index> variable_indices;
  std::vector<Index> eigenvector_indices;
  double explained_variance = 0.0;
  double contribution_measure = 0.0;
  // max |corr(X_i, X_k)| over i in the block and k outside it.
  double max_cross_correlation = 0.0;
  bool covariance_separated = true;
  bool discardable = false;
  bool operator==(const BlockCandidate&) const = default;
};

struct BlockDetection {
  std::vector<BlockCandidate> candidates;
  std::vector<Index> degenerate_eigenvectors;
  // Components whose variable and eigenvector counts differ. Isolated
  // degenerate eigenvectors are listed only in degenerate_eigenvectors.
  std::vector<LoadingComponent> unmatched;
};

// All components of the loading graph, ordered by their smallest variable
// (components without variables come last, by eigenvector index).
std::vector<LoadingComponent> loading_components(const EigenPairs& eigen, double tau);

// Square components covering fewer than M variables become candidates;
// only the index sets are filled in. Throws InvalidInput unless 0 < tau < 1.
BlockDetection detect_blocks(const EigenPairs& eigen, double tau);

// sum_{j in set} lambda_j / sum_m lambda_m.
double explained_variance(const EigenPairs& eigen, std::span<const Index> eigenvector_indices);

// (sum_m lambda_m)^{-1} * sum_j lambda_j * sum_{i in vars} v_j(i)^2, split
// into the block's own eigenvectors and the complementary ones.
double contribution_measure(const EigenPairs& eigen, std::span<const Index> variable_indices,
                            std::span<const Index> eigenvector_indices);

struct EigenvectorBound {
  GapSpec gap;
  BoundCheck check;
  bool operator==(const EigenvectorBound&) const = default;
};

// Perturbation diagnostics for one candidate. The cross-block entries of the
// covariance stand in for E + H_N, and the gaps are taken from the sample
// spectrum.
struct CandidateBounds {
  std::vector<Index> variables;
  double cross_block_norm = 0.0;
  std::vector<EigenvectorBound> eigenvectors;
  bool operator==(const CandidateBounds&) const = default;
};

struct Decision {
  std::vector<Index> kept;
  std::vector<Index> discarded;
  double retained_variance = 1.0;
  bool operator==(const Decision&) const = default;
};

struct PlaReport {
  PlaConfig config;
  EigenPairs eigen;
  std::vector<BlockCandidate> candidates;
  std::vector<Index> degenerate_eigenvectors;
  std::vector<LoadingComponent> unmatched_components;
  Decision decision;
  std::vector<CandidateBounds> bounds;
  bool operator==(const PlaReport&) const = default;
};

PlaReport run_pla(const SymmetricMatrix& cov, const PlaConfig& config);

}  // namespace pla
