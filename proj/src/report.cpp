#include "pla/report.hpp"

#include "pla/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace pla {

using nlohmann::json;

namespace {

json one_based(const std::vector<Index>& idx) {
  json a = json::array();
  for (Index i : idx) a.push_back(i + 1);
  return a;
}

std::vector<Index> zero_based(const json& a) {
  std::vector<Index> out;
  for (const auto& v : a) out.push_back(v.get<Index>() - 1);
  return out;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double null_as_inf(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

template <class T>
std::string format(const char* fmt, T v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

json report_to_json(const PlaReport& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = {{"tau", r.config.tau},
                 {"retained_variance_min", r.config.retained_variance_min},
                 {"use_contribution_measure", r.config.use_contribution_measure},
                 {"require_covariance_separation", r.config.require_covariance_separation}};

  const Index m = r.eigen.dim();
  j["eigenvalues"] = json::array();
  for (Index k = 0; k < m; ++k) j["eigenvalues"].push_back(r.eigen.values(k));
  // eigenvectors[k] is the k-th eigenvector (a column of V).
  j["eigenvectors"] = json::array();
  for (Index k = 0; k < m; ++k) {
    json col = json::array();
    for (Index i = 0; i < m; ++i) col.push_back(r.eigen.vectors(i, k));
    j["eigenvectors"].push_back(std::move(col));
  }

  j["candidates"] = json::array();
  for (const auto& c : r.candidates) {
    j["candidates"].push_back({{"variables", one_based(c.variable_indices)},
                               {"eigenvectors", one_based(c.eigenvector_indices)},
                               {"explained_variance", c.explained_variance},
                               {"contribution_measure", c.contribution_measure},
                               {"max_cross_correlation", c.max_cross_correlation},
                               {"covariance_separated", c.covariance_separated},
                               {"discardable", c.discardable}});
  }
  j["degenerate_eigenvectors"] = one_based(r.degenerate_eigenvectors);
  j["unmatched_components"] = json::array();
  for (const auto& c : r.unmatched_components) {
    j["unmatched_components"].push_back(
        {{"variables", one_based(c.variables)}, {"eigenvectors", one_based(c.eigenvectors)}});
  }
  j["decision"] = {{"kept", one_based(r.decision.kept)},
                   {"discarded", one_based(r.decision.discarded)},
                   {"retained_variance", r.decision.retained_variance}};

  json bounds = json::array();
  for (const auto& b : r.bounds) {
    json evs = json::array();
    for (const auto& e : b.eigenvectors) {
      evs.push_back({{"eigenvector", e.gap.index + 1},
                     {"lower_gap", finite_or_null(e.gap.lower_gap)},
                     {"upper_gap", finite_or_null(e.gap.upper_gap)},
                     {"ratio", finite_or_null(e.check.lhs)},
                     {"tau", e.check.rhs},
                     {"sufficient", e.check.holds},
                     {"diagnostic", std::string(to_string(e.check.diagnostic))}});
    }
    bounds.push_back({{"variables", one_based(b.variables)},
                      {"cross_block_norm", b.cross_block_norm},
                      {"eigenvectors", std::move(evs)}});
  }
  j["bounds"] = {{"candidates", std::move(bounds)}};
  return j;
}

PlaReport report_from_json(const json& j) {
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      throw InvalidInput("unsupported report schema_version");
    }
    PlaReport r;
    const auto& cfg = j.at("config");
    r.config.tau = cfg.at("tau").get<double>();
    r.config.retained_variance_min = cfg.at("retained_variance_min").get<double>();
    r.config.use_contribution_measure = cfg.at("use_contribution_measure").get<bool>();
    r.config.require_covariance_separation = cfg.at("require_covariance_separation").get<bool>();

    const auto& ev = j.at("eigenvalues");
    const auto m = static_cast<Index>(ev.size());
    r.eigen.values.resize(m);
    r.eigen.vectors.resize(m, m);
    for (Index k = 0; k < m; ++k) r.eigen.values(k) = ev.at(static_cast<std::size_t>(k)).get<double>();
    const auto& vecs = j.at("eigenvectors");
    if (static_cast<Index>(vecs.size()) != m) throw InvalidInput("eigenvector count mismatch");
    for (Index k = 0; k < m; ++k) {
      const auto& col = vecs.at(static_cast<std::size_t>(k));
      if (static_cast<Index>(col.size()) != m) throw InvalidInput("eigenvector length mismatch");
      for (Index i = 0; i < m; ++i) r.eigen.vectors(i, k) = col.at(static_cast<std::size_t>(i)).get<double>();
    }

    for (const auto& c : j.at("candidates")) {
      BlockCandidate b;
      b.variable_indices = zero_based(c.at("variables"));
      b.eigenvector_indices = zero_based(c.at("eigenvectors"));
      b.explained_variance = c.at("explained_variance").get<double>();
      b.contribution_measure = c.at("contribution_measure").get<double>();
      b.max_cross_correlation = c.at("max_cross_correlation").get<double>();
      b.covariance_separated = c.at("covariance_separated").get<bool>();
      b.discardable = c.at("discardable").get<bool>();
      r.candidates.push_back(std::move(b));
    }
    r.degenerate_eigenvectors = zero_based(j.at("degenerate_eigenvectors"));
    for (const auto& c : j.at("unmatched_components")) {
      r.unmatched_components.push_back(
          {zero_based(c.at("variables")), zero_based(c.at("eigenvectors"))});
    }
    const auto& d = j.at("decision");
    r.decision.kept = zero_based(d.at("kept"));
    r.decision.discarded = zero_based(d.at("discarded"));
    r.decision.retained_variance = d.at("retained_variance").get<double>();

    for (const auto& b : j.at("bounds").at("candidates")) {
      CandidateBounds cb;
      cb.variables = zero_based(b.at("variables"));
      cb.cross_block_norm = b.at("cross_block_norm").get<double>();
      for (const auto& e : b.at("eigenvectors")) {
        EigenvectorBound eb;
        eb.gap.index = e.at("eigenvector").get<Index>() - 1;
        eb.gap.lower_gap = null_as_inf(e.at("lower_gap"));
        eb.gap.upper_gap = null_as_inf(e.at("upper_gap"));
        eb.check.lhs = null_as_inf(e.at("ratio"));
        eb.check.rhs = e.at("tau").get<double>();
        eb.check.holds = e.at("sufficient").get<bool>();
        eb.check.diagnostic = bound_diagnostic_from_string(e.at("diagnostic").get<std::string>());
        cb.eigenvectors.push_back(eb);
      }
      r.bounds.push_back(std::move(cb));
    }
    return r;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed report JSON: ") + e.what());
  }
}

namespace {

std::string variable_name(Index i, const std::vector<std::string>& names) {
  if (static_cast<std::size_t>(i) < names.size() && !names[static_cast<std::size_t>(i)].empty())
    return names[static_cast<std::size_t>(i)];
  return "X" + std::to_string(i + 1);
}

std::string join_variables(const std::vector<Index>& idx, const std::vector<std::string>& names) {
  std::string s;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (k) s += ", ";
    s += variable_name(idx[k], names);
  }
  return s;
}

std::string join_eigenvectors(const std::vector<Index>& idx) {
  std::string s;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (k) s += ", ";
    s += "v" + std::to_string(idx[k] + 1);
  }
  return s;
}

}  // namespace

std::string render_report_text(const PlaReport& r, const std::vector<std::string>& names) {
  std::ostringstream out;
  const bool cm = r.config.use_contribution_measure;
  out << "Principal loading analysis (tau = " << r.config.tau
      << ", retained variance >= " << format("%.2f%%", 100.0 * r.config.retained_variance_min)
      << ")\n\n";

  out << "Eigenvalues:";
  for (Index k = 0; k < r.eigen.dim(); ++k) out << ' ' << format("%.4g", r.eigen.values(k));
  out << "\n\n";

  out << "Step 1: eigenvector structure\n";
  if (r.candidates.empty()) {
    out << "  no block satisfies the loading structure at this threshold\n";
  }
  for (const auto& c : r.candidates) {
    out << "  {" << join_variables(c.variable_indices, names) << "} loads only on {"
        << join_eigenvectors(c.eigenvector_indices) << "}";
    if (!c.covariance_separated) {
      out << "  [cross correlation " << format("%.3f", c.max_cross_correlation)
          << " >= tau, not separated]";
    }
    out << '\n';
  }
  if (!r.degenerate_eigenvectors.empty()) {
    out << "  degenerate eigenvectors (all loadings below tau): "
        << join_eigenvectors(r.degenerate_eigenvectors) << '\n';
  }
  for (const auto& u : r.unmatched_components) {
    out << "  unmatched component: variables {" << join_variables(u.variables, names)
        << "} with eigenvectors {" << join_eigenvectors(u.eigenvectors) << "}\n";
  }

  out << "\nStep 2: explained variance\n";
  for (const auto& c : r.candidates) {
    out << "  {" << join_variables(c.variable_indices, names)
        << "}: explained " << format("%.2f%%", 100.0 * c.explained_variance)
        << ", contribution " << format("%.2f%%", 100.0 * c.contribution_measure)
        << (c.discardable ? "  -> discard" : "  -> keep") << '\n';
  }

  out << "\nStep 3: decision\n";
  if (r.decision.discarded.empty()) {
    out << "  no discardable candidates\n";
  } else {
    out << "  discard " << join_variables(r.decision.discarded, names) << '\n';
  }
  out << "  retained variance" << (cm ? " (contribution measure)" : "") << ": "
      << format("%.2f%%", 100.0 * r.decision.retained_variance) << '\n';
  return out.str();
}

json simulation_to_json(const std::vector<sim::SimulationResult>& results) {
  json a = json::array();
  for (const auto& r : results) {
    a.push_back({{"m", r.spec.m},
                 {"kind", std::string(sim::to_string(r.spec.kind))},
                 {"size", r.spec.size},
                 {"sample_size", r.spec.sample_size},
                 {"population_size", r.spec.population_size},
                 {"sampling", std::string(sim::to_string(r.spec.sampling))},
                 {"min_relative_gap", r.spec.min_relative_gap},
                 {"tau", r.tau},
                 {"replications", r.replications},
                 {"failures", r.failures},
                 {"type1_error", r.type1_error},
                 {"standard_error", r.standard_error},
                 {"master_seed", r.master_seed}});
  }
  return {{"schema_version", kSchemaVersion}, {"results", std::move(a)}};
}

std::string render_simulation_table(const std::vector<sim::SimulationResult>& results) {
  if (results.empty()) return {};
  std::vector<double> taus;
  for (const auto& r : results)
    if (std::find(taus.begin(), taus.end(), r.tau) == taus.end()) taus.push_back(r.tau);

  const bool blocks = results.front().spec.kind != sim::DgpKind::singles;
  std::ostringstream out;
  out << format("%5s", "M") << format("%7s", blocks ? "kappa" : "k");
  for (double t : taus) out << "  " << format("%10s", format("tau=%g", t).c_str());
  out << '\n';

  // Keep first-seen row order.
  std::vector<std::pair<int, int>> rows;
  std::map<std::pair<int, int>, std::map<double, double>> cells;
  for (const auto& r : results) {
    const std::pair<int, int> key{r.spec.m, r.spec.size};
    if (!cells.count(key)) rows.push_back(key);
    cells[key][r.tau] = r.type1_error;
  }
  for (const auto& key : rows) {
    out << format("%5d", key.first) << format("%7d", key.second);
    for (double t : taus) {
      const auto& row = cells[key];
      const auto it = row.find(t);
      out << (it == row.end() ? std::string("  ") + format("%-10s", "-")
                              : format("  %10.4f", it->second));
    }
    out << '\n';
  }
  return out.str();
}

json convergence_to_json(const sim::ConvergenceResult& r) {
  json pts = json::array();
  for (const auto& p : r.points) {
    pts.push_back({{"n", p.n},
                   {"eigenvalue_error", p.eigenvalue_error},
                   {"eigenvector_error", p.eigenvector_error},
                   {"covariance_error", p.covariance_error},
                   {"eigenvalue_error_se", p.eigenvalue_error_se},
                   {"eigenvector_error_se", p.eigenvector_error_se},
                   {"covariance_error_se", p.covariance_error_se}});
  }
  auto slope = [](const std::optional<double>& s) { return s ? json(*s) : json(nullptr); };
  return {{"schema_version", kSchemaVersion},
          {"m", r.spec.m},
          {"kind", std::string(sim::to_string(r.spec.kind))},
          {"size", r.spec.size},
          {"replications", r.replications},
          {"master_seed", r.master_seed},
          {"points", std::move(pts)},
          {"slopes",
           {{"eigenvalue", slope(r.eigenvalue_slope)},
            {"eigenvector", slope(r.eigenvector_slope)},
            {"covariance", slope(r.covariance_slope)}}}};
}

std::string render_convergence_text(const sim::ConvergenceResult& r) {
  std::ostringstream out;
  out << format("%8s", "N") << format("%16s", "|dlambda|") << format("%16s", "||dv||_inf")
      << format("%16s", "max|dsigma|") << '\n';
  for (const auto& p : r.points) {
    out << format("%8d", p.n) << format("%16.6g", p.eigenvalue_error)
        << format("%16.6g", p.eigenvector_error) << format("%16.6g", p.covariance_error) << '\n';
  }
  auto slope = [](const std::optional<double>& s) {
    return s ? format("%.3f", *s) : std::string("undefined (zero error)");
  };
  out << "log-log slope  eigenvalue: " << slope(r.eigenvalue_slope)
      << "  eigenvector: " << slope(r.eigenvector_slope)
      << "  covariance: " << slope(r.covariance_slope) << '\n';
  return out.str();
}

}  // namespace pla
