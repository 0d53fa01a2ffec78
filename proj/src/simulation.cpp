#include "pla/simulation.hpp"

#include "pla/errors.hpp"
#include "pla/pla.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <set>
#include <string>
#include <thread>

namespace pla::sim {

std::string_view to_string(DgpKind k) {
  switch (k) {
    case DgpKind::singles:
      return "singles";
    case DgpKind::block:
      return "block";
    case DgpKind::epsilon_block:
      return "epsilon_block";
  }
  return "singles";
}

std::string_view to_string(SamplingMode s) {
  return s == SamplingMode::direct_draw ? "direct_draw" : "subsample_without_replacement";
}

DgpKind dgp_kind_from_string(std::string_view s) {
  if (s == "singles") return DgpKind::singles;
  if (s == "block") return DgpKind::block;
  if (s == "epsilon_block") return DgpKind::epsilon_block;
  throw InvalidInput("unknown DGP kind '" + std::string(s) + "'");
}

SamplingMode sampling_mode_from_string(std::string_view s) {
  if (s == "direct_draw" || s == "direct") return SamplingMode::direct_draw;
  if (s == "subsample_without_replacement" || s == "subsample")
    return SamplingMode::subsample_without_replacement;
  throw InvalidInput("unknown sampling mode '" + std::string(s) + "'");
}

void DgpSpec::validate() const {
  if (kind == DgpKind::singles) {
    if (size < 1 || size > 5) throw InvalidInput("singles mode supports 1 <= k <= 5");
  } else if (size < 2 || size > 6) {
    throw InvalidInput("block modes support 2 <= kappa <= 6");
  }
  if (m < size + 2) throw InvalidInput("M must exceed the designated set by at least 2 variables");
  if (sample_size < 2) throw InvalidInput("sample size must be at least 2");
  if (sampling == SamplingMode::subsample_without_replacement && sample_size > population_size) {
    throw InvalidInput("sample size exceeds population size");
  }
  if (!(min_relative_gap >= 0.0 && min_relative_gap < 1.0)) {
    throw InvalidInput("min_relative_gap must lie in [0, 1)");
  }
  if (kind == DgpKind::epsilon_block && !(epsilon_scale > 0.0 && epsilon_scale < 1.0)) {
    throw InvalidInput("epsilon_scale must lie in (0, 1)");
  }
}

std::uint64_t replication_seed(std::uint64_t master_seed, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(master_seed) ^ (index + 0x632be59bd9b4e019ULL));
}

namespace {

constexpr int kBackgroundAttempts = 200;
constexpr int kDesignatedAttempts = 500;

Eigen::MatrixXd standard_normal(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) z(i, j) = normal(rng);
  return z;
}

bool separated(double a, double b, double g) {
  return std::abs(a - b) >= g * std::max(std::abs(a), std::abs(b));
}

bool margin_ok(const Eigen::VectorXd& designated, const Eigen::VectorXd& background, double g) {
  for (Index i = 0; i < designated.size(); ++i) {
    for (Index k = i + 1; k < designated.size(); ++k)
      if (!separated(designated(i), designated(k), g)) return false;
    for (Index k = 0; k < background.size(); ++k)
      if (!separated(designated(i), background(k), g)) return false;
  }
  return true;
}

}  // namespace

PopulationModel draw_population_model(const DgpSpec& spec, Rng& rng) {
  spec.validate();
  const Index nd = spec.size;
  const Index mp = spec.m - spec.size;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int bg_try = 0; bg_try < kBackgroundAttempts; ++bg_try) {
    // Correlated background: X = W Z + jitter, W with scaled normal columns.
    Eigen::MatrixXd w = standard_normal(mp, mp, rng);
    for (Index j = 0; j < mp; ++j) w.col(j) *= std::exp(-1.0 + 2.0 * unit(rng));
    Eigen::MatrixXd background = w * w.transpose();
    const double mean_var = background.trace() / static_cast<double>(mp);
    const double jitter = 0.05 * mean_var;
    background.diagonal().array() += jitter;
    const Eigen::VectorXd bg_values = sym_eigen(SymmetricMatrix(background)).values;

    for (int d_try = 0; d_try < kDesignatedAttempts; ++d_try) {
      Eigen::MatrixXd designated;
      if (spec.kind == DgpKind::singles) {
        Eigen::VectorXd var(nd);
        for (Index i = 0; i < nd; ++i) var(i) = mean_var * std::exp(-2.0 + 3.0 * unit(rng));
        designated = var.asDiagonal();
      } else {
        Eigen::MatrixXd b = standard_normal(nd, nd, rng) *
                            std::sqrt(mean_var / static_cast<double>(nd));
        designated = b * b.transpose();
        designated.diagonal().array() += jitter;
      }
      const Eigen::VectorXd d_values = sym_eigen(SymmetricMatrix(designated)).values;
      if (!margin_ok(d_values, bg_values, spec.min_relative_gap)) continue;

      Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(spec.m, spec.m);
      sigma.topLeftCorner(nd, nd) = designated;
      sigma.bottomRightCorner(mp, mp) = background;
      if (spec.kind == DgpKind::epsilon_block) {
        // Cross covariances eps * U * sd_i * sd_k with U ~ Uniform[-1, 1].
        for (Index i = 0; i < nd; ++i) {
          for (Index k = nd; k < spec.m; ++k) {
            const double u = -1.0 + 2.0 * unit(rng);
            const double c = spec.epsilon_scale * u * std::sqrt(sigma(i, i) * sigma(k, k));
            sigma(i, k) = c;
            sigma(k, i) = c;
          }
        }
      }
      Eigen::LLT<Eigen::MatrixXd> llt(sigma);
      if (llt.info() != Eigen::Success) continue;

      PopulationModel model;
      model.covariance = SymmetricMatrix(sigma);
      model.designated.resize(static_cast<std::size_t>(nd));
      std::iota(model.designated.begin(), model.designated.end(), Index{0});
      model.cholesky_factor = llt.matrixL();
      return model;
    }
  }
  throw NumericalFailure("could not draw a population covariance with relative eigengap " +
                         std::to_string(spec.min_relative_gap));
}

Eigen::MatrixXd draw_gaussian_rows(const PopulationModel& model, Index n, Rng& rng) {
  const Eigen::MatrixXd z = standard_normal(n, model.covariance.dim(), rng);
  return z * model.cholesky_factor.transpose();
}

DataMatrix generate_population(const DgpSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  const PopulationModel model = draw_population_model(spec, rng);
  DataMatrix out;
  out.rows = draw_gaussian_rows(model, spec.population_size, rng);
  return out;
}

DataMatrix draw_sample(const DgpSpec& spec, const PopulationModel& model, Rng& rng) {
  DataMatrix out;
  if (spec.sampling == SamplingMode::direct_draw) {
    out.rows = draw_gaussian_rows(model, spec.sample_size, rng);
    return out;
  }
  const Eigen::MatrixXd population = draw_gaussian_rows(model, spec.population_size, rng);
  std::vector<Index> idx(static_cast<std::size_t>(spec.population_size));
  std::iota(idx.begin(), idx.end(), Index{0});
  // Partial Fisher-Yates: the first sample_size slots are the draw.
  for (std::size_t i = 0; i < static_cast<std::size_t>(spec.sample_size); ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  out.rows.resize(spec.sample_size, population.cols());
  for (Index r = 0; r < spec.sample_size; ++r)
    out.rows.row(r) = population.row(idx[static_cast<std::size_t>(r)]);
  return out;
}

bool designated_set_detected(const EigenPairs& sample_eigen, double tau,
                             const std::vector<Index>& designated) {
  const std::set<Index> target(designated.begin(), designated.end());
  std::set<Index> covered;
  for (const auto& cand : detect_blocks(sample_eigen, tau).candidates) {
    const bool inside = std::all_of(cand.variable_indices.begin(), cand.variable_indices.end(),
                                    [&](Index i) { return target.count(i) > 0; });
    if (inside) covered.insert(cand.variable_indices.begin(), cand.variable_indices.end());
  }
  return covered == target;
}

namespace {

// Runs fn(i) for i in [0, count) on a pool of threads. The first exception
// thrown by any task is rethrown on the calling thread.
template <typename Fn>
void parallel_for(int count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(count, 1)));
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

std::vector<SimulationResult> run_type1_study(const DgpSpec& spec,
                                              const std::vector<double>& tau_grid, int S,
                                              std::uint64_t master_seed, unsigned threads) {
  spec.validate();
  if (S < 1) throw InvalidInput("number of replications must be at least 1");
  if (tau_grid.empty()) throw InvalidInput("tau grid is empty");
  for (double t : tau_grid)
    if (!(t > 0.0 && t < 1.0)) throw InvalidInput("every tau must lie in (0, 1)");

  const std::size_t nt = tau_grid.size();
  std::vector<char> failed(static_cast<std::size_t>(S) * nt, 0);
  parallel_for(S, threads, [&](int r) {
    Rng rng(replication_seed(master_seed, static_cast<std::uint64_t>(r)));
    const PopulationModel model = draw_population_model(spec, rng);
    const DataMatrix sample = draw_sample(spec, model, rng);
    const EigenPairs eigen = sym_eigen(sample_covariance(sample));
    for (std::size_t t = 0; t < nt; ++t) {
      failed[static_cast<std::size_t>(r) * nt + t] =
          designated_set_detected(eigen, tau_grid[t], model.designated) ? 0 : 1;
    }
  });

  std::vector<SimulationResult> out;
  for (std::size_t t = 0; t < nt; ++t) {
    SimulationResult res;
    res.spec = spec;
    res.tau = tau_grid[t];
    res.replications = S;
    res.master_seed = master_seed;
    for (int r = 0; r < S; ++r) res.failures += failed[static_cast<std::size_t>(r) * nt + t];
    res.type1_error = static_cast<double>(res.failures) / static_cast<double>(S);
    res.standard_error =
        std::sqrt(res.type1_error * (1.0 - res.type1_error) / static_cast<double>(S));
    out.push_back(res);
  }
  return out;
}

std::optional<double> fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("slope fit needs >= 2 points");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) throw InvalidInput("slope fit needs positive abscissae");
    if (!(y[i] > 0.0) || !std::isfinite(y[i])) return std::nullopt;
  }
  std::vector<double> lx(x.size()), ly(y.size());
  std::transform(x.begin(), x.end(), lx.begin(), [](double v) { return std::log(v); });
  std::transform(y.begin(), y.end(), ly.begin(), [](double v) { return std::log(v); });
  const double mx = mean(lx);
  const double my = mean(ly);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

ConvergenceResult convergence_study(const DgpSpec& spec, const std::vector<int>& n_grid, int S,
                                    std::uint64_t master_seed, unsigned threads) {
  CovarianceSource source = [&spec](const PopulationModel& model, int n, Rng& rng) {
    DgpSpec at_n = spec;
    at_n.sample_size = n;
    return sample_covariance(draw_sample(at_n, model, rng));
  };
  return convergence_study(spec, n_grid, S, master_seed, source, threads);
}

ConvergenceResult convergence_study(const DgpSpec& spec, const std::vector<int>& n_grid, int S,
                                    std::uint64_t master_seed, const CovarianceSource& source,
                                    unsigned threads) {
  spec.validate();
  if (S < 1) throw InvalidInput("number of replications must be at least 1");
  if (n_grid.size() < 3) throw InvalidInput("N grid needs at least 3 sample sizes");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 2) throw InvalidInput("every N must be at least 2");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw InvalidInput("N grid must be increasing");
    if (spec.sampling == SamplingMode::subsample_without_replacement &&
        n_grid[i] > spec.population_size)
      throw InvalidInput("N exceeds population size");
  }

  const std::size_t nn = n_grid.size();
  const std::size_t us = static_cast<std::size_t>(S);
  std::vector<double> lambda_err(us * nn), vector_err(us * nn), cov_err(us * nn);

  parallel_for(S, threads, [&](int r) {
    const std::uint64_t rep_seed = replication_seed(master_seed, static_cast<std::uint64_t>(r));
    Rng rng(rep_seed);
    const PopulationModel model = draw_population_model(spec, rng);
    const EigenPairs truth = sym_eigen(model.covariance);

    std::vector<Index> tracked;
    for (Index j = 0; j < truth.dim(); ++j) {
      double mass = 0.0;
      for (Index i : model.designated) mass += truth.vectors(i, j) * truth.vectors(i, j);
      if (mass > 0.5) tracked.push_back(j);
    }
    if (tracked.empty()) throw NumericalFailure("no population eigenvector is dominated by the designated set");

    for (std::size_t t = 0; t < nn; ++t) {
      Rng draw_rng(replication_seed(rep_seed, t + 1));
      const SymmetricMatrix cov = source(model, n_grid[t], draw_rng);
      const EigenPairs est = align_signs(truth, sym_eigen(cov));
      double le = 0.0;
      double ve = 0.0;
      for (Index j : tracked) {
        le += std::abs(est.values(j) - truth.values(j));
        ve += sup_norm(Eigen::VectorXd(est.vectors.col(j) - truth.vectors.col(j)));
      }
      const auto k = static_cast<double>(tracked.size());
      const std::size_t slot = static_cast<std::size_t>(r) * nn + t;
      lambda_err[slot] = le / k;
      vector_err[slot] = ve / k;
      cov_err[slot] = (cov.matrix() - model.covariance.matrix()).cwiseAbs().maxCoeff();
    }
  });

  ConvergenceResult out;
  out.spec = spec;
  out.replications = S;
  out.master_seed = master_seed;
  std::vector<double> xs, le_mean, ve_mean, ce_mean;
  for (std::size_t t = 0; t < nn; ++t) {
    std::vector<double> le(us), ve(us), ce(us);
    for (std::size_t r = 0; r < us; ++r) {
      le[r] = lambda_err[r * nn + t];
      ve[r] = vector_err[r * nn + t];
      ce[r] = cov_err[r * nn + t];
    }
    ConvergencePoint p;
    p.n = n_grid[t];
    p.eigenvalue_error = mean(le);
    p.eigenvector_error = mean(ve);
    p.covariance_error = mean(ce);
    p.eigenvalue_error_se = standard_error(le);
    p.eigenvector_error_se = standard_error(ve);
    p.covariance_error_se = standard_error(ce);
    out.points.push_back(p);
    xs.push_back(static_cast<double>(p.n));
    le_mean.push_back(p.eigenvalue_error);
    ve_mean.push_back(p.eigenvector_error);
    ce_mean.push_back(p.covariance_error);
  }
  out.eigenvalue_slope = fit_loglog_slope(xs, le_mean);
  out.eigenvector_slope = fit_loglog_slope(xs, ve_mean);
  out.covariance_slope = fit_loglog_slope(xs, ce_mean);
  return out;
}

}  // namespace pla::sim
