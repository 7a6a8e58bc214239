#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "sdfem/experiments.hpp"
#include "sdfem/report.hpp"

namespace sdfem {

inline constexpr int kConfigSchemaVersion = 1;

/// Everything a verify or sweep run needs. The JSON file form is flat:
///
///   {
///     "schema_version": 1,
///     "N": [8, 16, 32], "eps": [1e-4, 1e-6], "modes": ["standard", "acd"],
///     "placements": ["center-s", "mid-x"], "k": 2, "k_max": 8,
///     "b1": 1, "b2": 0.5, "c": 1, "c_star": 0.5, "rho": 2.5,
///     "quad_base_depth": 2, "quad_max_depth": 5, "quad_rtol": 1e-8,
///     "output": "report.csv", "format": "csv",
///     "deterministic": true, "workers": 1
///   }
///
/// Every key except schema_version is optional. Unknown keys are rejected.
struct RunConfig {
  SweepConfig sweep;
  std::string output;  // empty: no report file
  ReportFormat format = ReportFormat::Csv;
  bool deterministic = false;
  int workers = 1;
};

/// Throws InvalidArgument for unknown keys, wrong types, a missing or
/// unsupported schema_version, or values failing validate().
RunConfig parse_run_config(const nlohmann::json& j);

/// Reads and parses a JSON file. Malformed JSON is reported as InvalidArgument.
RunConfig load_run_config(const std::string& path);

/// Range checks, including eps <= 1/N for every (N, eps) pair of the grid.
void validate(const RunConfig& cfg);

nlohmann::json to_json(const RunConfig& cfg);

}  // namespace sdfem
