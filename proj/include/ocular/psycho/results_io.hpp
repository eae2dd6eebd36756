#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "ocular/psycho/fit.hpp"

namespace ocular::psycho {

/// Columns: trial_index, absolute_d, offset_d, relative_d, correct (0/1),
/// replication. Header row first, '.' decimal separator.
void write_results_csv(std::ostream& out, std::span<const TrialResult> results);

/// Reads by header name; the replication column is optional (default 0).
std::vector<TrialResult> read_results_csv(std::istream& in);

/// Keys: threshold, spread, lapse, weber, intercept, seed. Missing keys keep defaults.
SimulatedObserver observer_from_json(const nlohmann::json& j);
nlohmann::json observer_to_json(const SimulatedObserver& obs);

nlohmann::json fit_to_json(const PsychometricFit& fit);
nlohmann::json analyses_to_json(std::span<const SessionAnalysis> analyses);

}  // namespace ocular::psycho
