#pragma once

// Run configuration: an experiment name, a seed list, an output directory
// and a flat map of typed parameters keyed by dotted paths.
//
// Text format is YAML. Nested mappings flatten to dotted keys, so
//
//   experiment: byzantine_majority
//   seeds: [1, 2, 3]
//   global:
//     q0: 2
//
// sets the parameter "global.q0". A dotted key may also be written literally
// ("global.q0: 2"). Every parameter key must appear in the experiment's
// schema; unknown keys and missing required keys are errors.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace licchavi {

enum class ValueType { Real, Integer, String, RealList, IntegerList };

const char* to_string(ValueType type);

using Value = std::variant<double, std::int64_t, std::string, std::vector<double>,
                           std::vector<std::int64_t>>;

struct ParamSpec {
  std::string key;
  ValueType type = ValueType::Real;
  Value default_value;
  bool required = false;
  std::string help;
};

struct RunConfig {
  std::string experiment;
  std::vector<std::uint64_t> seeds;
  std::string output = "runs";
  std::map<std::string, Value> params;

  double real(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<std::int64_t> integers(const std::string& key) const;

  bool operator==(const RunConfig&) const = default;
};

struct ConfigError {
  int line = 0;  // 1-based; 0 when no source line applies
  std::string message;
};

struct ParseResult {
  std::optional<RunConfig> config;
  std::vector<ConfigError> errors;
};

/// Parses and type-checks against the experiment schema; missing optional
/// keys take their defaults.
ParseResult parse_config(const std::string& text);
ParseResult load_config(const std::string& path);

/// Canonical YAML text; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

/// Schema defaults for `experiment`, with the given seeds.
RunConfig default_config(const std::string& experiment, std::vector<std::uint64_t> seeds = {1});

/// Formats a double so that it parses back to the same value.
std::string format_real(double x);

}  // namespace licchavi
