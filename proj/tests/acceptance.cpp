// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include "pla/bounds.hpp"
#include "pla/covariance.hpp"
#include "pla/pla.hpp"
#include "pla/simulation.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace pla;
using pla::testing::load_cov;

namespace {

// Pinned tolerances.
constexpr double kEigenvalueTol = 0.01;
constexpr double kExplainedTol = 0.0005;
constexpr double kOrthoTolPerDim = 1e-10;
constexpr double kReconstructionTol = 1e-8;
constexpr double kWeylSlack = 1e-10;
constexpr double kSlopeTarget = -0.5;
constexpr double kSlopeTol = 0.15;
constexpr double kCentralErrorMax = 0.02;
constexpr double kTotalityTol = 1e-10;
constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const BlockCandidate* candidate_with(const std::vector<BlockCandidate>& cands, Index var) {
  for (const auto& c : cands)
    if (std::find(c.variable_indices.begin(), c.variable_indices.end(), var) !=
        c.variable_indices.end())
      return &c;
  return nullptr;
}

Outcome golden_eigenvalues() {
  const std::vector<double> expected{154.97, 26.70, 23.93, 19.74, 9.05,
                                     6.24,   2.48,  1.68,  0.99,  0.22};
  const EigenPairs e = sym_eigen(load_cov("block_example_cov.csv"));
  double worst = 0.0;
  for (Index j = 0; j < 10; ++j) worst = std::max(worst, std::abs(e.values(j) - expected[j]));
  return {worst <= kEigenvalueTol, fmt("max |dev| %.4f", worst)};
}

Outcome golden_explained_variance() {
  const EigenPairs block = sym_eigen(load_cov("block_example_cov.csv"));
  const EigenPairs eps = sym_eigen(load_cov("epsilon_example_sample_cov.csv"));
  const double a = explained_variance(block, std::vector<Index>{2, 8});
  const double b = explained_variance(eps, std::vector<Index>{4});
  const bool ok = std::abs(a - 0.1013) <= kExplainedTol && std::abs(b - 0.0287) <= kExplainedTol;
  return {ok, fmt("{3,9}: %.5f", a) + fmt(", {5}: %.5f", b)};
}

Outcome golden_detection() {
  const auto block = detect_blocks(sym_eigen(load_cov("block_example_cov.csv")), 0.4).candidates;
  const auto eps = detect_blocks(sym_eigen(load_cov("epsilon_example_sample_cov.csv")), 0.3).candidates;
  const BlockCandidate* a = candidate_with(block, 0);
  const BlockCandidate* b = candidate_with(eps, 0);
  const bool ok_a = a && a->variable_indices == std::vector<Index>{0, 1} &&
                    a->eigenvector_indices == std::vector<Index>{2, 8};
  const bool ok_b = b && b->variable_indices == std::vector<Index>{0} &&
                    b->eigenvector_indices == std::vector<Index>{4};
  return {ok_a && ok_b, std::string("block {1,2}<->{3,9} ") + (ok_a ? "found" : "missing") +
                            ", epsilon {1}<->{5} " + (ok_b ? "found" : "missing")};
}

Outcome eigen_invariants() {
  std::mt19937_64 rng(kSeed);
  std::uniform_int_distribution<int> dim(1, 20);
  int failures = 0;
  double worst_ortho = 0.0, worst_rec = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Index m = dim(rng);
    const SymmetricMatrix a = pla::testing::random_symmetric(m, rng);
    const EigenPairs e = sym_eigen(a);
    const double ortho =
        (e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();
    const double rec = (e.vectors * e.values.asDiagonal() * e.vectors.transpose() - a.matrix()).norm() /
                       a.matrix().norm();
    worst_ortho = std::max(worst_ortho, ortho / static_cast<double>(m));
    worst_rec = std::max(worst_rec, rec);
    if (ortho > kOrthoTolPerDim * static_cast<double>(m) || rec > kReconstructionTol) ++failures;
  }
  return {failures == 0, std::to_string(failures) + " failures / 1000, worst ortho/M " +
                             fmt("%.2e", worst_ortho) + ", worst rel. reconstruction " +
                             fmt("%.2e", worst_rec)};
}

Outcome weyl_property() {
  std::mt19937_64 rng(kSeed + 1);
  std::uniform_int_distribution<int> dim(2, 15);
  std::uniform_real_distribution<double> scale(1e-4, 2.0);
  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const Index m = dim(rng);
    const SymmetricMatrix a = pla::testing::random_symmetric(m, rng);
    const SymmetricMatrix p = scale(rng) * pla::testing::random_symmetric(m, rng);
    const double shift = (sym_eigen(a + p).values - sym_eigen(a).values).cwiseAbs().maxCoeff();
    if (shift > weyl_eigenvalue_bound(p) + kWeylSlack) ++violations;
  }
  return {violations == 0, std::to_string(violations) + " violations / 1000"};
}

Outcome eigenvector_bound_implication() {
  std::mt19937_64 rng(kSeed + 2);
  std::uniform_int_distribution<int> dim(2, 12);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int violations = 0, instances = 0;
  double worst_ratio = 0.0;
  while (instances < 1000) {
    const Index m = dim(rng);
    const Eigen::MatrixXd q = pla::testing::random_orthogonal(m, rng);
    Eigen::VectorXd d(m);
    for (Index i = 0; i < m; ++i) d(i) = 20.0 * unit(rng);
    const SymmetricMatrix sigma = pla::testing::from_spectrum(q, d);
    const EigenPairs pop = sym_eigen(sigma);
    const Index j = std::uniform_int_distribution<Index>(0, m - 1)(rng);
    const double gap = eigengap(pop.values, j).min_gap();
    if (!(gap > 1e-6)) continue;
    const double tau = 0.05 + 0.9 * unit(rng);
    const SymmetricMatrix dir = pla::testing::random_symmetric(m, rng);
    // Perturbation scaled so that the left-hand side is 0.9 tau.
    const double norm = 0.9 * tau * gap / std::pow(2.0, 1.5);
    const SymmetricMatrix p = (norm / frobenius_norm(dir)) * dir;
    if (!sufficient_discard_bound(pop.values, frobenius_norm(p), j, tau).holds) continue;
    ++instances;
    const EigenPairs aligned = align_signs(pop, sym_eigen(sigma + p));
    const double dev = sup_norm(Eigen::VectorXd(aligned.vectors.col(j) - pop.vectors.col(j)));
    worst_ratio = std::max(worst_ratio, dev / tau);
    if (!(dev < tau)) ++violations;
  }
  return {violations == 0, std::to_string(violations) + " violations / 1000, worst dev/tau " +
                               fmt("%.3f", worst_ratio)};
}

Outcome convergence_rates() {
  const sim::DgpSpec spec;  // M = 10, one uncorrelated variable
  const auto r = sim::convergence_study(spec, {100, 400, 1600, 6400}, 200, kSeed + 3);
  const auto in_band = [](const std::optional<double>& s) {
    return s && std::abs(*s - kSlopeTarget) <= kSlopeTol;
  };
  const auto show = [](const std::optional<double>& s) {
    return s ? fmt("%.3f", *s) : std::string("undefined");
  };
  return {in_band(r.eigenvector_slope) && in_band(r.covariance_slope),
          "eigenvector slope " + show(r.eigenvector_slope) + ", covariance slope " +
              show(r.covariance_slope) + " (eigenvalue " + show(r.eigenvalue_slope) + ")"};
}

Outcome table_shape() {
  const std::vector<double> grid{0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  sim::DgpSpec singles;
  singles.m = 10;
  singles.size = 1;
  singles.sample_size = 10000;
  sim::DgpSpec block = singles;
  block.kind = sim::DgpKind::block;
  block.size = 2;

  const auto s = sim::run_type1_study(singles, grid, 500, kSeed + 4);
  const auto b = sim::run_type1_study(block, grid, 500, kSeed + 5);
  const auto e = [](const std::vector<sim::SimulationResult>& r, std::size_t i) {
    return r[i].type1_error;
  };
  const bool singles_ok = e(s, 3) <= kCentralErrorMax && e(s, 2) <= e(s, 0) && e(s, 3) <= e(s, 6);
  bool block_ok = e(b, 6) > e(b, 4);
  for (std::size_t i = 1; i <= 4; ++i) block_ok = block_ok && e(b, i) <= e(b, i - 1);

  std::ostringstream detail;
  detail << "k=1:";
  for (std::size_t i = 0; i < grid.size(); ++i) detail << ' ' << fmt("%.3f", e(s, i));
  detail << "; kappa=2:";
  for (std::size_t i = 0; i < grid.size(); ++i) detail << ' ' << fmt("%.3f", e(b, i));
  return {singles_ok && block_ok, detail.str()};
}

// All set partitions of {0..m-1} as restricted growth strings.
void partitions(int m, std::vector<int>& label, int next, int max_label,
                const std::function<void(const std::vector<int>&)>& visit) {
  if (next == m) {
    visit(label);
    return;
  }
  for (int l = 0; l <= max_label + 1; ++l) {
    label[next] = l;
    partitions(m, label, next + 1, std::max(max_label, l), visit);
  }
}

bool loading_graph_connected(const Eigen::MatrixXd& q, double tau) {
  const Index k = q.rows();
  // Rows 0..k-1 are variables, k..2k-1 eigenvectors.
  std::vector<Index> parent(2 * k);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<Index(Index)> find = [&](Index x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) {
      const double a = std::abs(q(i, j));
      if (std::abs(a - tau) < 1e-6) return false;  // keep clear of the threshold
      if (a >= tau) parent[find(i)] = find(k + j);
    }
  for (Index x = 1; x < 2 * k; ++x)
    if (find(x) != find(0)) return false;
  return true;
}

// Block-diagonal covariance for a partition; each block is Q D Q^T with a
// loading graph connected at tau and all eigenvalues distinct overall.
SymmetricMatrix block_diagonal_for(const std::vector<std::vector<Index>>& blocks, Index m,
                                   double tau, std::mt19937_64& rng) {
  std::vector<double> spectrum(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) spectrum[i] = 1.0 + 1.5 * static_cast<double>(i);
  std::shuffle(spectrum.begin(), spectrum.end(), rng);
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(m, m);
  std::size_t used = 0;
  for (const auto& blk : blocks) {
    const Index k = static_cast<Index>(blk.size());
    Eigen::MatrixXd q;
    do {
      q = pla::testing::random_orthogonal(k, rng);
    } while (!loading_graph_connected(q, tau));
    Eigen::VectorXd d(k);
    for (Index i = 0; i < k; ++i) d(i) = spectrum[used++];
    const Eigen::MatrixXd b = q * d.asDiagonal() * q.transpose();
    for (Index r = 0; r < k; ++r)
      for (Index c = 0; c < k; ++c) sigma(blk[r], blk[c]) = b(r, c);
  }
  return SymmetricMatrix(sigma);
}

std::vector<std::vector<Index>> blocks_of(const std::vector<int>& label) {
  const int n = *std::max_element(label.begin(), label.end()) + 1;
  std::vector<std::vector<Index>> blocks(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < label.size(); ++i) blocks[label[i]].push_back(static_cast<Index>(i));
  return blocks;
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(kSeed + 6);
  int cases = 0, failures = 0;
  for (int m = 2; m <= 6; ++m) {
    std::vector<int> label(static_cast<std::size_t>(m), 0);
    partitions(m, label, 1, 0, [&](const std::vector<int>& l) {
      ++cases;
      const auto blocks = blocks_of(l);
      const SymmetricMatrix sigma = block_diagonal_for(blocks, m, 0.2, rng);
      const BlockOrdering ordering = find_block_ordering(sigma, 0.0);
      const BlockDetection det = detect_blocks(sym_eigen(sigma), 0.2);

      std::set<std::vector<Index>> detected;
      for (const auto& c : det.candidates) detected.insert(c.variable_indices);
      std::set<std::vector<Index>> expected;
      if (ordering.blocks.size() > 1)
        expected.insert(ordering.blocks.begin(), ordering.blocks.end());
      const bool ok = detected == expected && det.unmatched.empty() &&
                      det.degenerate_eigenvectors.empty() &&
                      std::set<std::vector<Index>>(blocks.begin(), blocks.end()) ==
                          std::set<std::vector<Index>>(ordering.blocks.begin(), ordering.blocks.end());
      if (!ok) ++failures;
    });
  }
  return {failures == 0, std::to_string(failures) + " failures over " + std::to_string(cases) +
                             " partitions (M = 2..6)"};
}

Outcome partition_totality() {
  std::mt19937_64 rng(kSeed + 7);
  std::uniform_int_distribution<int> dim(2, 12);
  double worst_ev = 0.0, worst_cm = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int m = dim(rng);
    std::vector<int> label(static_cast<std::size_t>(m));
    std::uniform_int_distribution<int> pick(0, m - 1);
    for (auto& l : label) l = pick(rng);
    // Compact labels.
    std::vector<int> remap(static_cast<std::size_t>(m), -1);
    int next = 0;
    for (auto& l : label) {
      if (remap[l] < 0) remap[l] = next++;
      l = remap[l];
    }
    const SymmetricMatrix sigma = block_diagonal_for(blocks_of(label), m, 0.2, rng);
    const EigenPairs e = sym_eigen(sigma);
    double ev = 0.0, cm = 0.0;
    for (const auto& comp : loading_components(e, 0.2)) {
      if (comp.variables.empty() || comp.variables.size() != comp.eigenvectors.size()) {
        return {false, "instance " + std::to_string(t) + " did not split into square components"};
      }
      ev += explained_variance(e, comp.eigenvectors);
      cm += contribution_measure(e, comp.variables, comp.eigenvectors);
    }
    worst_ev = std::max(worst_ev, std::abs(ev - 1.0));
    worst_cm = std::max(worst_cm, std::abs(cm - 1.0));
  }
  return {worst_ev <= kTotalityTol && worst_cm <= kTotalityTol,
          "worst |sum EV - 1| " + fmt("%.2e", worst_ev) + ", worst |sum CM - 1| " + fmt("%.2e", worst_cm)};
}

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;  // <= 0: no limit
  Outcome (*run)();
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "golden eigenvalues (tol 0.01)", 1.0, golden_eigenvalues},
      {2, "golden explained variance (tol 0.0005)", 0.0, golden_explained_variance},
      {3, "golden detection", 0.0, golden_detection},
      {4, "eigen invariants on 1000 random matrices", 30.0, eigen_invariants},
      {5, "Weyl eigenvalue bound on 1000 pairs", 0.0, weyl_property},
      {6, "eigenvector bound implication on 1000 instances", 0.0, eigenvector_bound_implication},
      {7, "convergence slopes -0.5 +/- 0.15", 120.0, convergence_rates},
      {8, "type I error table shape", 300.0, table_shape},
      {9, "loading detection matches block ordering", 0.0, oracle_equivalence},
      {10, "partition totality (tol 1e-10)", 0.0, partition_totality},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = o.pass;
    std::string timing = fmt("%.2fs", secs);
    if (c.time_limit_s > 0.0) {
      timing += fmt(" (limit %.0fs)", c.time_limit_s);
      pass = pass && secs < c.time_limit_s;
    }
    if (!pass) ++failed;
    std::printf("[%s] %2d %s: %s, %s\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
