#pragma once

// Runnable experiments, one per learning, strategyproofness or resilience
// claim. Each returns an ExperimentReport whose verdict is a pure function
// of its checks, and whose checks each carry the measured value, the
// comparison and the tolerance, so a report can be re-judged from its JSON.

#include "licchavi/config.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace licchavi {

struct Check {
  std::string name;
  double value = 0.0;
  std::string op;  // "<=", ">=", "<", ">", "=="
  double threshold = 0.0;

  /// NaN never passes.
  bool passed() const;
};

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct ExperimentReport {
  std::string name;
  std::string claim;
  RunConfig config;
  std::map<std::string, double> metrics;
  std::vector<Check> checks;
  Table per_seed;
  bool complete = true;
  std::string error;
  double runtime_seconds = 0.0;

  /// Complete, at least one check, and every check passes.
  bool verdict() const;
  void add_check(std::string name, double value, std::string op, double threshold);
};

struct RunContext {
  int jobs = 1;
};

struct GateViolation {
  std::string key;  // offending parameter, empty if none applies
  std::string tag;  // the assumption or hypothesis that fails
  std::string message;
};

struct ExperimentInfo {
  std::string name;
  std::string claim;
  std::string summary;
  std::vector<ParamSpec> params;
  /// Precondition gate on a type-checked config; empty when admissible.
  std::function<std::vector<GateViolation>(const RunConfig&)> gate;
  std::function<ExperimentReport(const RunConfig&, const RunContext&)> run;
};

/// Stable, name-ordered catalog of every experiment.
const std::vector<ExperimentInfo>& catalog();
/// nullptr if unknown.
const ExperimentInfo* find_experiment(const std::string& name);

/// Dispatches by config.experiment. Errors thrown by the experiment are
/// caught and produce a report flagged incomplete.
ExperimentReport run_experiment(const RunConfig& config, const RunContext& context = {});

ExperimentReport exp_gradient_pac(const RunConfig& config, const RunContext& context = {});
ExperimentReport exp_pac_curve(const RunConfig& config, const RunContext& context = {});
ExperimentReport exp_strategyproof(const RunConfig& config, const RunContext& context = {});
ExperimentReport exp_negative_example(const RunConfig& config, const RunContext& context = {});
ExperimentReport exp_manipulability(const RunConfig& config, const RunContext& context = {});
ExperimentReport exp_byzantine_absolute(const RunConfig& config, const RunContext& context = {});
ExperimentReport exp_byzantine_majority(const RunConfig& config, const RunContext& context = {});

/// Runs body(i) for i in [0, count) on up to `jobs` threads. Results must be
/// written by index; exceptions are rethrown (lowest index first).
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

/// Honest aggregation in one dimension evaluated on a grid: minimizes
/// Σ wₕ|ρ − tₕ| + λ₀|ρ|^{q₀} over ρ ∈ [−half_width, half_width] at the
/// given resolution. Used as an oracle by the majority experiment.
double grid_median_aggregate(const std::vector<double>& points, const std::vector<double>& weights,
                             double global_weight, double global_power, double half_width,
                             double resolution);

}  // namespace licchavi
