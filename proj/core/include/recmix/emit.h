#pragma once

#include <string>
#include <vector>

#include "recmix/scenario.h"

namespace recmix {

// Version string embedded in JSON metadata (git describe at configure time).
std::string version_string();

// Columns grid_value,mean_error,ci_low,ci_high,failed; values printed with
// %.17g. Throws IoError.
std::string format_csv(const SweepResult& result);
void emit_csv(const SweepResult& result, const std::string& path);

// {"metadata": {config, seed, version}, "series": [{label, points: [...]}]}.
// Non-finite numbers are written as null. Throws IoError.
std::string format_json(const ScenarioConfig& cfg, const std::vector<SweepResult>& results);
void emit_json(const ScenarioConfig& cfg, const std::vector<SweepResult>& results,
               const std::string& path);

// Columns t,error,clamped (clamped as 0/1).
void emit_trajectory_csv(const std::vector<double>& errors, const std::vector<bool>& clamped,
                         const std::string& path);

// `base` with the series label inserted before the extension:
// out.csv + "naive" -> out.naive.csv.
std::string series_path(const std::string& base, const std::string& label);

}  // namespace recmix
