#include "pla/cli.hpp"

#include "pla/covariance.hpp"
#include "pla/csv.hpp"
#include "pla/errors.hpp"
#include "pla/pla.hpp"
#include "pla/report.hpp"
#include "pla/simulation.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>

namespace pla::cli {

namespace {

double parse_real(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw InvalidInput("not a number: '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(sep, start);
    parts.push_back(s.substr(start, p == std::string_view::npos ? p : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return parts;
}

}  // namespace

std::vector<double> parse_real_list(std::string_view text) {
  if (text.empty()) throw InvalidInput("empty list");
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) {
    std::vector<double> out;
    for (auto part : split(text, ',')) out.push_back(parse_real(part));
    return out;
  }
  const double lo = parse_real(text.substr(0, dots));
  std::string_view rest = text.substr(dots + 2);
  double step = 0.1;
  if (const auto colon = rest.find(':'); colon != std::string_view::npos) {
    step = parse_real(rest.substr(colon + 1));
    rest = rest.substr(0, colon);
  }
  const double hi = parse_real(rest);
  if (!(step > 0.0) || hi < lo) throw InvalidInput("invalid range '" + std::string(text) + "'");
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out;
  for (long i = 0; i < count; ++i) {
    out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e10) / 1e10);
  }
  return out;
}

std::vector<int> parse_int_list(std::string_view text) {
  if (text.empty()) throw InvalidInput("empty list");
  std::vector<int> out;
  for (auto part : split(text, ',')) {
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size()) {
      throw InvalidInput("not an integer: '" + std::string(part) + "'");
    }
    out.push_back(v);
  }
  return out;
}

namespace {

struct AnalyzeOptions {
  std::string input;
  std::string input_kind;
  double tau = 0.0;
  double retained_min = 0.9;
  bool standardize = false;
  bool json = false;
  bool contribution = false;
  bool no_separation = false;
};

struct StudyOptions {
  int m = 10;
  std::optional<int> k;
  std::optional<int> kappa;
  std::optional<double> epsilon;
  std::string tau_grid = "0.2..0.8";
  std::string n_grid = "100,400,1600,6400";
  int s = 500;
  int n = 10000;
  int population = 100000;
  std::string sampling = "direct";
  double min_gap = 0.1;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  bool json = false;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  if (const char* env = std::getenv("PLA_SEED"); env && *env) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw InvalidInput("PLA_SEED is not an unsigned integer: '" + std::string(s) + "'");
    }
    return v;
  }
  return 0;
}

sim::DgpSpec build_spec(const StudyOptions& o) {
  sim::DgpSpec spec;
  spec.m = o.m;
  if (o.kappa) {
    spec.kind = o.epsilon ? sim::DgpKind::epsilon_block : sim::DgpKind::block;
    spec.size = *o.kappa;
    if (o.epsilon) spec.epsilon_scale = *o.epsilon;
  } else {
    if (o.epsilon) throw InvalidInput("--epsilon requires --kappa");
    spec.kind = sim::DgpKind::singles;
    spec.size = o.k.value_or(1);
  }
  spec.sample_size = o.n;
  spec.population_size = o.population;
  spec.sampling = sim::sampling_mode_from_string(o.sampling);
  spec.min_relative_gap = o.min_gap;
  spec.validate();
  return spec;
}

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out) {
  const auto kind = io::input_kind_from_string(o.input_kind);
  io::CsvMatrix csv = io::read_csv_file(o.input);
  std::vector<std::string> names = csv.header;

  SymmetricMatrix cov;
  if (kind == io::InputKind::covariance) {
    cov = io::to_covariance(csv, o.input);
  } else {
    DataMatrix data = io::to_data(std::move(csv));
    if (data.n_vars() < 2) throw InvalidInput("PLA needs at least 2 variables (columns)");
    cov = sample_covariance(data);
  }
  if (cov.dim() < 2) throw InvalidInput("PLA needs at least 2 variables");
  if (o.standardize) cov = to_correlation(cov);

  PlaConfig config;
  config.tau = o.tau;
  config.retained_variance_min = o.retained_min;
  config.use_contribution_measure = o.contribution;
  config.require_covariance_separation = !o.no_separation;
  const PlaReport report = run_pla(cov, config);

  if (o.json) out << report_to_json(report).dump(2) << '\n';
  else out << render_report_text(report, names);
  return kExitOk;
}

int cmd_simulate(const StudyOptions& o, std::ostream& out) {
  if (!o.k && !o.kappa) throw InvalidInput("simulate needs --k or --kappa");
  const sim::DgpSpec spec = build_spec(o);
  const auto taus = parse_real_list(o.tau_grid);
  const auto results = sim::run_type1_study(spec, taus, o.s, resolve_seed(o.seed), o.threads);
  if (o.json) out << simulation_to_json(results).dump(2) << '\n';
  else out << render_simulation_table(results);
  return kExitOk;
}

int cmd_converge(const StudyOptions& o, std::ostream& out) {
  const sim::DgpSpec spec = build_spec(o);
  const auto ns = parse_int_list(o.n_grid);
  const auto result = sim::convergence_study(spec, ns, o.s, resolve_seed(o.seed), o.threads);
  if (o.json) out << convergence_to_json(result).dump(2) << '\n';
  else out << render_convergence_text(result);
  return kExitOk;
}

void add_study_options(CLI::App* app, StudyOptions& o) {
  app->add_option("--m", o.m, "Total number of variables");
  auto* k = app->add_option("--k", o.k, "Number of uncorrelated single variables (1-5)");
  auto* kappa = app->add_option("--kappa", o.kappa, "Size of the uncorrelated block (2-6)");
  k->excludes(kappa);
  app->add_option("--epsilon", o.epsilon, "Cross-correlation scale for an epsilon-uncorrelated block");
  app->add_option("--s", o.s, "Replications");
  app->add_option("--n", o.n, "Sample size N");
  app->add_option("--population", o.population, "Population size for subsampling");
  app->add_option("--sampling", o.sampling, "direct or subsample");
  app->add_option("--min-gap", o.min_gap, "Minimum relative eigengap of the designated variables");
  app->add_option("--seed", o.seed, "Master seed (falls back to $PLA_SEED, then 0)");
  app->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  app->add_flag("--json", o.json, "Emit JSON");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Principal loading analysis"};
  app.require_subcommand(1);

  AnalyzeOptions analyze;
  auto* a = app.add_subcommand("analyze", "Run PLA on a data or covariance CSV file");
  a->add_option("file", analyze.input, "CSV input")->required();
  a->add_option("--input-kind", analyze.input_kind, "data or cov")->required();
  a->add_option("--tau", analyze.tau, "Loading cut-off in (0, 1)")->required();
  a->add_option("--retained-min", analyze.retained_min, "Minimum retained variance share");
  a->add_flag("--standardize", analyze.standardize, "Work on the correlation matrix");
  a->add_flag("--contribution", analyze.contribution, "Decide on the contribution measure");
  a->add_flag("--no-separation-check", analyze.no_separation,
              "Allow candidates whose covariance cross-correlations reach tau");
  a->add_flag("--json", analyze.json, "Emit the JSON report");

  StudyOptions simulate;
  auto* s = app.add_subcommand("simulate", "Type-I error study over a tau grid");
  add_study_options(s, simulate);
  s->add_option("--tau-grid", simulate.tau_grid, "Comma list or range a..b[:step]");

  StudyOptions converge;
  converge.s = 200;
  auto* c = app.add_subcommand("converge", "Convergence rates of sample eigenpairs");
  add_study_options(c, converge);
  c->add_option("--n-grid", converge.n_grid, "Increasing comma list of sample sizes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }

  try {
    if (a->parsed()) return cmd_analyze(analyze, out);
    if (s->parsed()) return cmd_simulate(simulate, out);
    return cmd_converge(converge, out);
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumericalFailure;
  }
}

}  // namespace pla::cli
