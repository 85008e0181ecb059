#include "licchavi/runner.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace licchavi {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string value_text(const Value& v) {
  struct Visitor {
    std::string operator()(double x) const { return format_real(x); }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(const std::string& s) const { return "\"" + s + "\""; }
    std::string operator()(const std::vector<double>& xs) const {
      std::string out = "[";
      for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + format_real(xs[i]);
      return out + "]";
    }
    std::string operator()(const std::vector<std::int64_t>& xs) const {
      std::string out = "[";
      for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + std::to_string(xs[i]);
      return out + "]";
    }
  };
  return std::visit(Visitor{}, v);
}

}  // namespace

RunOutcome run(const RunConfig& config, const RunContext& context) {
  RunOutcome out;
  out.report = run_experiment(config, context);
  const std::filesystem::path dir(config.output);
  std::filesystem::create_directories(dir);
  out.json_path = (dir / (config.experiment + ".json")).string();
  out.csv_path = (dir / (config.experiment + ".csv")).string();
  write_file(out.json_path, report_json(out.report));
  write_file(out.csv_path, report_csv(out.report));
  out.exit_code = out.report.verdict() ? 0 : 1;
  return out;
}

std::string catalog_json() {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& e : catalog()) {
    nlohmann::json params = nlohmann::json::array();
    for (const auto& p : e.params) {
      params.push_back({{"key", p.key},
                        {"type", to_string(p.type)},
                        {"default", value_text(p.default_value)},
                        {"required", p.required},
                        {"help", p.help}});
    }
    a.push_back({{"name", e.name}, {"claim", e.claim}, {"summary", e.summary}, {"parameters", params}});
  }
  return a.dump(2) + "\n";
}

std::string catalog_text() {
  std::string out;
  for (const auto& e : catalog()) {
    out += e.name + "  [" + e.claim + "]\n  " + e.summary + "\n";
    for (const auto& p : e.params) {
      out += "    " + p.key + " (" + to_string(p.type) + (p.required ? ", required" : "") +
             ") default " + value_text(p.default_value) + ": " + p.help + "\n";
    }
  }
  return out;
}

}  // namespace licchavi
