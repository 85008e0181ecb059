#include "licchavi/kernels/kernels.hpp"
#include "licchavi/runner.hpp"

#include <json.hpp>

#include <cmath>
#include <stdexcept>

namespace licchavi {

using nlohmann::json;

namespace {

json real_json(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json value_json(const Value& v) {
  struct Visitor {
    json operator()(double x) const { return real_json(x); }
    json operator()(std::int64_t i) const { return json(i); }
    json operator()(const std::string& s) const { return json(s); }
    json operator()(const std::vector<double>& xs) const {
      json a = json::array();
      for (double x : xs) a.push_back(real_json(x));
      return a;
    }
    json operator()(const std::vector<std::int64_t>& xs) const { return json(xs); }
  };
  return std::visit(Visitor{}, v);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& cell) {
  if (const double* x = std::get_if<double>(&cell)) return format_real(*x);
  if (const std::int64_t* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  return csv_field(std::get<std::string>(cell));
}

}  // namespace

std::string report_json(const ExperimentReport& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["artifact_version"] = kArtifactVersion;
  j["experiment"] = r.name;
  j["claim"] = r.claim;
  json params = json::object();
  for (const auto& [k, v] : r.config.params) params[k] = value_json(v);
  j["parameters"] = params;
  j["seeds"] = r.config.seeds;
  j["output"] = r.config.output;
  j["config_text"] = serialize_config(r.config);
  json metrics = json::object();
  for (const auto& [k, v] : r.metrics) metrics[k] = real_json(v);
  j["metrics"] = metrics;
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"value", real_json(c.value)},
                      {"op", c.op},
                      {"threshold", real_json(c.threshold)},
                      {"passed", c.passed()}});
  }
  j["checks"] = checks;
  j["verdict"] = r.verdict() ? "pass" : "fail";
  j["complete"] = r.complete;
  j["error"] = r.error;
  j["runtime_seconds"] = r.runtime_seconds;
  j["kernels"] = kernels::to_string(kernels::active_isa());
  return j.dump(2) + "\n";
}

std::string report_csv(const ExperimentReport& r) {
  std::string out;
  for (std::size_t i = 0; i < r.per_seed.columns.size(); ++i) {
    out += (i ? "," : "") + csv_field(r.per_seed.columns[i]);
  }
  out += "\n";
  for (const auto& row : r.per_seed.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell_text(row[i]);
    out += "\n";
  }
  return out;
}

bool verdict_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (!j.at("complete").get<bool>()) return false;
  const auto& checks = j.at("checks");
  if (checks.empty()) return false;
  for (const auto& c : checks) {
    if (c.at("value").is_null() || c.at("threshold").is_null()) return false;
    Check k{c.at("name").get<std::string>(), c.at("value").get<double>(), c.at("op").get<std::string>(),
            c.at("threshold").get<double>()};
    if (!k.passed()) return false;
  }
  return true;
}

RunConfig config_from_json(const std::string& text) {
  const json j = json::parse(text);
  ParseResult p = parse_config(j.at("config_text").get<std::string>());
  if (!p.config) {
    throw std::invalid_argument("config_from_json: echoed config does not parse: " +
                                (p.errors.empty() ? std::string("?") : p.errors.front().message));
  }
  return *p.config;
}

}  // namespace licchavi
