#include "licchavi/config.hpp"

#include "licchavi/experiments.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace licchavi {

const char* to_string(ValueType type) {
  switch (type) {
    case ValueType::Real: return "real";
    case ValueType::Integer: return "integer";
    case ValueType::String: return "string";
    case ValueType::RealList: return "list of reals";
    case ValueType::IntegerList: return "list of integers";
  }
  return "?";
}

namespace {

const Value& lookup(const RunConfig& c, const std::string& key) {
  const auto it = c.params.find(key);
  if (it == c.params.end()) throw std::out_of_range("config: no parameter '" + key + "'");
  return it->second;
}

template <class T>
const T& typed(const RunConfig& c, const std::string& key, const char* type) {
  const Value& v = lookup(c, key);
  if (const T* p = std::get_if<T>(&v)) return *p;
  throw std::invalid_argument("config: parameter '" + key + "' is not a " + type);
}

int line_of(const YAML::Node& node) { return node.Mark().line >= 0 ? node.Mark().line + 1 : 0; }

std::optional<double> scalar_real(const YAML::Node& node) {
  if (!node.IsScalar()) return std::nullopt;
  double x = 0.0;
  if (!YAML::convert<double>::decode(node, x)) return std::nullopt;
  return x;
}

std::optional<std::int64_t> scalar_integer(const YAML::Node& node) {
  if (!node.IsScalar()) return std::nullopt;
  long long i = 0;
  if (YAML::convert<long long>::decode(node, i)) return static_cast<std::int64_t>(i);
  // Integral reals such as 1e4 are accepted.
  const auto x = scalar_real(node);
  if (!x || !std::isfinite(*x) || std::floor(*x) != *x || std::abs(*x) > 9.0e15) return std::nullopt;
  return static_cast<std::int64_t>(*x);
}

std::optional<Value> convert(const YAML::Node& node, ValueType type) {
  switch (type) {
    case ValueType::Real:
      if (auto x = scalar_real(node)) return Value(*x);
      return std::nullopt;
    case ValueType::Integer:
      if (auto i = scalar_integer(node)) return Value(*i);
      return std::nullopt;
    case ValueType::String:
      if (node.IsScalar()) return Value(node.Scalar());
      return std::nullopt;
    case ValueType::RealList: {
      if (!node.IsSequence()) return std::nullopt;
      std::vector<double> out;
      for (const auto& item : node) {
        auto x = scalar_real(item);
        if (!x) return std::nullopt;
        out.push_back(*x);
      }
      return Value(std::move(out));
    }
    case ValueType::IntegerList: {
      if (!node.IsSequence()) return std::nullopt;
      std::vector<std::int64_t> out;
      for (const auto& item : node) {
        auto i = scalar_integer(item);
        if (!i) return std::nullopt;
        out.push_back(*i);
      }
      return Value(std::move(out));
    }
  }
  return std::nullopt;
}

struct RawParam {
  YAML::Node node;
  int line = 0;
};

void flatten(const YAML::Node& map, const std::string& prefix, std::map<std::string, RawParam>& out,
             std::vector<ConfigError>& errors) {
  for (const auto& kv : map) {
    const std::string key = prefix + kv.first.as<std::string>();
    if (kv.second.IsMap()) {
      flatten(kv.second, key + ".", out, errors);
      continue;
    }
    if (out.count(key)) {
      errors.push_back({line_of(kv.first), "duplicate key '" + key + "'"});
      continue;
    }
    out[key] = {kv.second, line_of(kv.first)};
  }
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string format_value(const Value& v) {
  struct Visitor {
    std::string operator()(double x) const { return format_real(x); }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(const std::string& s) const { return quote(s); }
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

double RunConfig::real(const std::string& key) const { return typed<double>(*this, key, "real"); }
std::int64_t RunConfig::integer(const std::string& key) const {
  return typed<std::int64_t>(*this, key, "integer");
}
const std::string& RunConfig::text(const std::string& key) const {
  return typed<std::string>(*this, key, "string");
}
std::vector<double> RunConfig::reals(const std::string& key) const {
  return typed<std::vector<double>>(*this, key, "list of reals");
}
std::vector<std::int64_t> RunConfig::integers(const std::string& key) const {
  return typed<std::vector<std::int64_t>>(*this, key, "list of integers");
}

std::string format_real(double x) {
  if (std::isnan(x)) return ".nan";
  if (std::isinf(x)) return x > 0 ? ".inf" : "-.inf";
  // Shortest of %.15g .. %.17g that reads back exactly.
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

ParseResult parse_config(const std::string& text) {
  ParseResult result;
  auto& errors = result.errors;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    errors.push_back({e.mark.line >= 0 ? e.mark.line + 1 : 0, "syntax error: " + e.msg});
    return result;
  }
  if (!root.IsMap()) {
    errors.push_back({1, "config must be a mapping of keys to values"});
    return result;
  }

  RunConfig config;
  std::map<std::string, RawParam> raw;
  const ExperimentInfo* info = nullptr;
  bool have_seeds = false;
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    const int line = line_of(kv.first);
    if (key == "experiment") {
      if (!kv.second.IsScalar()) {
        errors.push_back({line, "'experiment' must be a name"});
        continue;
      }
      config.experiment = kv.second.Scalar();
      info = find_experiment(config.experiment);
      if (!info) errors.push_back({line, "unknown experiment '" + config.experiment + "'"});
    } else if (key == "seeds") {
      have_seeds = true;
      bool ok = kv.second.IsSequence() && kv.second.size() > 0;
      if (ok) {
        for (const auto& item : kv.second) {
          const auto i = scalar_integer(item);
          if (!i || *i < 0) {
            ok = false;
            break;
          }
          config.seeds.push_back(static_cast<std::uint64_t>(*i));
        }
      }
      if (!ok) errors.push_back({line, "'seeds' must be a nonempty list of nonnegative integers"});
    } else if (key == "output") {
      if (!kv.second.IsScalar()) {
        errors.push_back({line, "'output' must be a directory path"});
        continue;
      }
      config.output = kv.second.Scalar();
    } else if (kv.second.IsMap()) {
      flatten(kv.second, key + ".", raw, errors);
    } else {
      if (raw.count(key)) {
        errors.push_back({line, "duplicate key '" + key + "'"});
        continue;
      }
      raw[key] = {kv.second, line};
    }
  }
  if (!root["experiment"]) errors.push_back({0, "missing required key 'experiment'"});
  if (!have_seeds) errors.push_back({0, "missing required key 'seeds'"});
  if (!info) return result;

  std::map<std::string, const ParamSpec*> schema;
  for (const auto& p : info->params) schema[p.key] = &p;
  for (const auto& [key, param] : raw) {
    const auto it = schema.find(key);
    if (it == schema.end()) {
      errors.push_back({param.line, "unknown key '" + key + "' for experiment '" + info->name + "'"});
      continue;
    }
    auto v = convert(param.node, it->second->type);
    if (!v) {
      errors.push_back({param.line, "key '" + key + "' must be a " + to_string(it->second->type)});
      continue;
    }
    config.params[key] = std::move(*v);
  }
  for (const auto& p : info->params) {
    if (config.params.count(p.key) || raw.count(p.key)) continue;
    if (p.required) {
      errors.push_back({0, "missing required key '" + p.key + "'"});
    } else {
      config.params[p.key] = p.default_value;
    }
  }
  if (!errors.empty()) return result;

  if (info->gate) {
    for (const auto& v : info->gate(config)) {
      const auto it = raw.find(v.key);
      errors.push_back({it == raw.end() ? 0 : it->second.line, v.tag + ": " + v.message});
    }
  }
  if (errors.empty()) result.config = std::move(config);
  return result;
}

ParseResult load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ParseResult r;
    r.errors.push_back({0, "cannot read '" + path + "'"});
    return r;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& config) {
  std::string out = "experiment: " + config.experiment + "\n";
  out += "seeds: [";
  for (std::size_t i = 0; i < config.seeds.size(); ++i) {
    out += (i ? ", " : "") + std::to_string(config.seeds[i]);
  }
  out += "]\noutput: " + quote(config.output) + "\n";
  for (const auto& [key, value] : config.params) out += key + ": " + format_value(value) + "\n";
  return out;
}

RunConfig default_config(const std::string& experiment, std::vector<std::uint64_t> seeds) {
  const ExperimentInfo* info = find_experiment(experiment);
  if (!info) throw std::invalid_argument("default_config: unknown experiment '" + experiment + "'");
  RunConfig c;
  c.experiment = experiment;
  c.seeds = std::move(seeds);
  for (const auto& p : info->params) c.params[p.key] = p.default_value;
  return c;
}

}  // namespace licchavi
