#pragma once

#include "pla/pla.hpp"
#include "pla/simulation.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace pla {

inline constexpr int kSchemaVersion = 1;

// JSON uses 1-based variable and eigenvector indices; infinite gaps are
// written as null.
nlohmann::json report_to_json(const PlaReport& report);
PlaReport report_from_json(const nlohmann::json& j);

// Step-by-step narrative of the three PLA steps. `names` may be empty, in
// which case variables are printed as X1, X2, ...
std::string render_report_text(const PlaReport& report, const std::vector<std::string>& names);

nlohmann::json simulation_to_json(const std::vector<sim::SimulationResult>& results);
// One row per spec: M, k or kappa, then one column per tau.
std::string render_simulation_table(const std::vector<sim::SimulationResult>& results);

nlohmann::json convergence_to_json(const sim::ConvergenceResult& result);
std::string render_convergence_text(const sim::ConvergenceResult& result);

}  // namespace pla
