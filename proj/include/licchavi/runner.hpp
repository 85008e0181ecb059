#pragma once

// Report emission and the run/list entry points used by the command line.
//
// A run writes <output>/<experiment>.json (schema below) and
// <output>/<experiment>.csv (the per-seed table). The CSV depends only on
// the config and is byte-identical across reruns; the JSON additionally
// records the wall-clock runtime.

#include "licchavi/experiments.hpp"

#include <string>

namespace licchavi {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kArtifactVersion = "1.0.0";

std::string report_json(const ExperimentReport& report);
std::string report_csv(const ExperimentReport& report);

/// Verdict recomputed from a report JSON alone.
bool verdict_from_json(const std::string& json_text);
/// Config echoed in a report JSON.
RunConfig config_from_json(const std::string& json_text);

struct RunOutcome {
  ExperimentReport report;
  std::string json_path;
  std::string csv_path;
  int exit_code = 1;
};

/// Runs the experiment and writes both report files into config.output.
RunOutcome run(const RunConfig& config, const RunContext& context = {});

std::string catalog_json();
std::string catalog_text();

}  // namespace licchavi
