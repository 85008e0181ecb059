#include "licchavi/config.hpp"
#include "licchavi/experiments.hpp"
#include "licchavi/runner.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace licchavi {

namespace {

bool has_error(const ParseResult& r, const std::string& fragment, int line = -1) {
  for (const auto& e : r.errors) {
    if (e.message.find(fragment) != std::string::npos && (line < 0 || e.line == line)) return true;
  }
  return false;
}

std::string dump(const ParseResult& r) {
  std::string s;
  for (const auto& e : r.errors) s += std::to_string(e.line) + ": " + e.message + "\n";
  return s;
}

}  // namespace

TEST(Config, MinimalConfigTakesDefaults) {
  const ParseResult r = parse_config("experiment: negative_example\nseeds: [1]\n");
  ASSERT_TRUE(r.config) << dump(r);
  EXPECT_EQ(r.config->experiment, "negative_example");
  EXPECT_EQ(r.config->seeds, std::vector<std::uint64_t>{1});
  EXPECT_EQ(r.config->output, "runs");
  EXPECT_EQ(r.config->real("A"), 10.0);
  EXPECT_EQ(r.config->integer("search_points"), 41);
}

TEST(Config, NestedAndDottedKeysAgree) {
  const ParseResult a = parse_config("experiment: byzantine_absolute\nseeds: [2]\nglobal:\n  q0: 3\n");
  const ParseResult b = parse_config("experiment: byzantine_absolute\nseeds: [2]\nglobal.q0: 3\n");
  ASSERT_TRUE(a.config) << dump(a);
  ASSERT_TRUE(b.config) << dump(b);
  EXPECT_EQ(*a.config, *b.config);
  EXPECT_EQ(a.config->real("global.q0"), 3.0);
}

TEST(Config, NonStrictlyConvexCommonNormIsRejected) {
  const ParseResult r = parse_config("experiment: byzantine_absolute\nseeds: [1]\nglobal:\n  q0: 1\n");
  EXPECT_FALSE(r.config);
  EXPECT_TRUE(has_error(r, "strictly convex common norm", 4)) << dump(r);
}

TEST(Config, MisspelledKeyNamedWithLine) {
  const ParseResult r = parse_config("experiment: byzantine_absolute\nseeds: [1]\nN: 3\nwieght: 2\n");
  EXPECT_FALSE(r.config);
  EXPECT_TRUE(has_error(r, "unknown key 'wieght'", 4)) << dump(r);
}

TEST(Config, MissingRequiredKeys) {
  EXPECT_TRUE(has_error(parse_config("experiment: gradient_pac\nseeds: [1]\n"), "missing required key 'kind'"));
  EXPECT_TRUE(has_error(parse_config("experiment: negative_example\n"), "missing required key 'seeds'"));
  EXPECT_TRUE(has_error(parse_config("seeds: [1]\n"), "missing required key 'experiment'"));
}

TEST(Config, TypeErrors) {
  const ParseResult r = parse_config("experiment: byzantine_absolute\nseeds: [1]\nN: many\n");
  EXPECT_TRUE(has_error(r, "key 'N' must be a integer", 3)) << dump(r);
  EXPECT_TRUE(has_error(parse_config("experiment: byzantine_absolute\nseeds: [1]\nN: 2.5\n"), "'N'"));
  EXPECT_TRUE(has_error(parse_config("experiment: byzantine_absolute\nseeds: []\n"), "'seeds'"));
  EXPECT_TRUE(has_error(parse_config("experiment: byzantine_absolute\nseeds: [-1]\n"), "'seeds'"));
  EXPECT_TRUE(has_error(parse_config("experiment: nope\nseeds: [1]\n"), "unknown experiment 'nope'"));
  EXPECT_TRUE(has_error(parse_config("experiment: [\n"), "syntax error"));
}

TEST(Config, IntegralRealAcceptedAsInteger) {
  const ParseResult r = parse_config("experiment: byzantine_absolute\nseeds: [1]\nn: 1e4\n");
  ASSERT_TRUE(r.config) << dump(r);
  EXPECT_EQ(r.config->integer("n"), 10000);
}

TEST(Config, DuplicateKeyIsError) {
  const ParseResult r =
      parse_config("experiment: byzantine_absolute\nseeds: [1]\nglobal.q0: 2\nglobal:\n  q0: 3\n");
  EXPECT_TRUE(has_error(r, "duplicate key 'global.q0'")) << dump(r);
}

TEST(Config, GateReportsOffendingLine) {
  const ParseResult r = parse_config(
      "experiment: byzantine_majority\nseeds: [1]\nbyzantine:\n  count: 2\n  weight: 2\n");
  EXPECT_FALSE(r.config);
  EXPECT_TRUE(has_error(r, "strict majority voting power", 5)) << dump(r);
}

TEST(Config, DefaultConfigsRoundTrip) {
  for (const auto& info : catalog()) {
    RunConfig c = default_config(info.name, {3, 1, 4});
    c.output = "out dir/\"quoted\"";
    const std::string text = serialize_config(c);
    const ParseResult r = parse_config(text);
    ASSERT_TRUE(r.config) << info.name << "\n" << text << dump(r);
    EXPECT_EQ(*r.config, c) << info.name;
    EXPECT_EQ(serialize_config(*r.config), text);
  }
}

TEST(Config, FormatRealRoundTrips) {
  for (const double x : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5e17, 0.0}) {
    EXPECT_EQ(std::strtod(format_real(x).c_str(), nullptr), x);
  }
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(std::nan("")), ".nan");
  EXPECT_EQ(format_real(-INFINITY), "-.inf");
}

TEST(Config, ReportJsonCarriesConfigAndVerdict) {
  ExperimentReport rep;
  rep.name = "negative_example";
  rep.config = default_config("negative_example", {5});
  rep.add_check("a", 1.0, "<=", 2.0);
  EXPECT_TRUE(verdict_from_json(report_json(rep)));
  EXPECT_EQ(config_from_json(report_json(rep)), rep.config);
  rep.add_check("b", 3.0, "<=", 2.0);
  EXPECT_FALSE(verdict_from_json(report_json(rep)));
  rep.checks.clear();
  EXPECT_FALSE(verdict_from_json(report_json(rep)));
}

}  // namespace licchavi
