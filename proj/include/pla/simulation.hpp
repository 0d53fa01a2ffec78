#pragma once

#include "pla/covariance.hpp"
#include "pla/linalg.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

namespace pla::sim {

enum class DgpKind { singles, block, epsilon_block };
enum class SamplingMode { direct_draw, subsample_without_replacement };

std::string_view to_string(DgpKind k);
std::string_view to_string(SamplingMode s);
DgpKind dgp_kind_from_string(std::string_view s);
SamplingMode sampling_mode_from_string(std::string_view s);

// Data-generating process for the threshold study. The designated variables
// (the ones PLA should flag) are always the first `size` columns.
struct DgpSpec {
  int m = 10;
  DgpKind kind = DgpKind::singles;
  int size = 1;  // k for singles, kappa for (epsilon) blocks
  double epsilon_scale = 0.05;
  int population_size = 100000;
  int sample_size = 10000;
  SamplingMode sampling = SamplingMode::direct_draw;
  // Minimum relative separation |a - b| / max(a, b) between the designated
  // population eigenvalues and every other population eigenvalue.
  double min_relative_gap = 0.1;

  void validate() const;
  bool operator==(const DgpSpec&) const = default;
};

using Rng = std::mt19937_64;

// splitmix64 mix of (master_seed, index); the only source of per-replication
// randomness.
std::uint64_t replication_seed(std::uint64_t master_seed, std::uint64_t index);

// Population covariance together with the variable set that is
// (epsilon-)uncorrelated with the rest by construction.
struct PopulationModel {
  SymmetricMatrix covariance;
  std::vector<Index> designated;
  Eigen::MatrixXd cholesky_factor;  // lower triangular, covariance = L L^T
};

PopulationModel draw_population_model(const DgpSpec& spec, Rng& rng);

// Gaussian rows x = L z with z ~ N(0, I).
Eigen::MatrixXd draw_gaussian_rows(const PopulationModel& model, Index n, Rng& rng);

// population_size realisations of a freshly drawn model.
DataMatrix generate_population(const DgpSpec& spec, std::uint64_t seed);

// Sample of spec.sample_size rows for a given model: either drawn directly
// from N(0, Sigma) or subsampled without replacement from a finite
// population of spec.population_size rows.
DataMatrix draw_sample(const DgpSpec& spec, const PopulationModel& model, Rng& rng);

// True iff the detected candidates that lie inside `designated` cover it
// exactly, i.e. PLA would consider dropping every designated variable.
bool designated_set_detected(const EigenPairs& sample_eigen, double tau,
                             const std::vector<Index>& designated);

struct SimulationResult {
  DgpSpec spec;
  double tau = 0.0;
  int replications = 0;
  int failures = 0;
  double type1_error = 0.0;
  double standard_error = 0.0;
  std::uint64_t master_seed = 0;
  bool operator==(const SimulationResult&) const = default;
};

// threads == 0 picks std::thread::hardware_concurrency(). Results do not
// depend on the thread count.
std::vector<SimulationResult> run_type1_study(const DgpSpec& spec,
                                              const std::vector<double>& tau_grid, int S,
                                              std::uint64_t master_seed, unsigned threads = 0);

struct ConvergencePoint {
  int n = 0;
  double eigenvalue_error = 0.0;        // mean |lambda_hat_j - lambda_j|
  double eigenvector_error = 0.0;       // mean sign-aligned ||v_hat_j - v_j||_inf
  double covariance_error = 0.0;        // mean max_ij |sigma_hat_ij - sigma_ij|
  double eigenvalue_error_se = 0.0;
  double eigenvector_error_se = 0.0;
  double covariance_error_se = 0.0;
};

struct ConvergenceResult {
  DgpSpec spec;
  int replications = 0;
  std::uint64_t master_seed = 0;
  std::vector<ConvergencePoint> points;
  // Least-squares slopes of log(mean error) on log(N); empty when some mean
  // error is not strictly positive.
  std::optional<double> eigenvalue_slope;
  std::optional<double> eigenvector_slope;
  std::optional<double> covariance_slope;
};

// Least-squares slope of log(y) on log(x); nullopt unless every y > 0.
std::optional<double> fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Produces the covariance estimate for one (model, N) draw.
using CovarianceSource =
    std::function<SymmetricMatrix(const PopulationModel& model, int n, Rng& rng)>;

// Errors are measured on the designated eigenpairs, the ones that decide
// whether the designated block is dropped.
ConvergenceResult convergence_study(const DgpSpec& spec, const std::vector<int>& n_grid, int S,
                                    std::uint64_t master_seed, unsigned threads = 0);
ConvergenceResult convergence_study(const DgpSpec& spec, const std::vector<int>& n_grid, int S,
                                    std::uint64_t master_seed, const CovarianceSource& source,
                                    unsigned threads = 0);

}  // namespace pla::sim
