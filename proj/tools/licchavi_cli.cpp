// licchavi: run, validate and list experiments.

#include "licchavi/runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const unsigned long long v = std::stoull(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad seed '" + item + "'");
    seeds.push_back(v);
  }
  if (seeds.empty()) throw std::invalid_argument("empty seed list");
  return seeds;
}

int report_errors(const std::string& path, const licchavi::ParseResult& parsed) {
  for (const auto& e : parsed.errors) {
    std::cerr << path << (e.line > 0 ? ":" + std::to_string(e.line) : "") << ": error: " << e.message << "\n";
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Licchavi personalized collaborative learning experiments"};
  app.require_subcommand(1);

  int jobs = 1;
  std::string output;
  std::string seed_override;
  std::string config_path;
  bool as_json = false;

  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);
  run->add_option("--output", output, "output directory (overrides the config)");
  run->add_option("--seed-override", seed_override, "comma-separated seeds (overrides the config)");

  auto* validate = app.add_subcommand("validate", "parse and gate-check a config file");
  validate->add_option("config", config_path, "config file")->required();

  auto* list = app.add_subcommand("list", "list the experiment catalog");
  list->add_flag("--json", as_json, "machine-readable output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      std::cout << (as_json ? licchavi::catalog_json() : licchavi::catalog_text());
      return 0;
    }
    const licchavi::ParseResult parsed = licchavi::load_config(config_path);
    if (!parsed.config) return report_errors(config_path, parsed);
    if (validate->parsed()) {
      std::cout << config_path << ": ok (" << parsed.config->experiment << ")\n";
      return 0;
    }
    licchavi::RunConfig config = *parsed.config;
    if (!output.empty()) config.output = output;
    if (!seed_override.empty()) config.seeds = parse_seed_list(seed_override);
    const licchavi::RunOutcome out = licchavi::run(config, {jobs});
    const auto& r = out.report;
    if (!r.complete) std::cerr << "error: " << r.error << " (report flagged incomplete)\n";
    for (const auto& c : r.checks) {
      std::cout << (c.passed() ? "PASS " : "FAIL ") << c.name << ": " << licchavi::format_real(c.value) << " "
                << c.op << " " << licchavi::format_real(c.threshold) << "\n";
    }
    std::cout << r.name << ": " << (r.verdict() ? "pass" : "fail") << "  (" << out.json_path << ", "
              << out.csv_path << ")\n";
    return out.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
