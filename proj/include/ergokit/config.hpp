#pragma once

// Experiment configuration: a small TOML subset (flat tables, scalar and
// array values, nested arrays for matrices) with a canonical serializer so
// configs round-trip bit-exactly.

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "ergokit/expansive.hpp"
#include "ergokit/io.hpp"

namespace ergokit {

// --------------------------------------------------------------------------
// TOML subset

struct TomlValue;
using TomlArray = std::vector<TomlValue>;

struct TomlValue {
  std::variant<bool, std::int64_t, double, std::string, TomlArray> v;

  bool is_array() const { return std::holds_alternative<TomlArray>(v); }
  double as_double() const {
    if (std::holds_alternative<double>(v)) return std::get<double>(v);
    if (std::holds_alternative<std::int64_t>(v))
      return static_cast<double>(std::get<std::int64_t>(v));
    throw ConfigError("expected a number");
  }
  std::int64_t as_int() const {
    if (std::holds_alternative<std::int64_t>(v)) return std::get<std::int64_t>(v);
    throw ConfigError("expected an integer");
  }
  bool as_bool() const {
    if (std::holds_alternative<bool>(v)) return std::get<bool>(v);
    throw ConfigError("expected a boolean");
  }
  const std::string& as_string() const {
    if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
    throw ConfigError("expected a string");
  }
  const TomlArray& as_array() const {
    if (!is_array()) throw ConfigError("expected an array");
    return std::get<TomlArray>(v);
  }
  std::vector<double> as_doubles() const {
    std::vector<double> out;
    for (const auto& e : as_array()) out.push_back(e.as_double());
    return out;
  }
};

using TomlTable = std::map<std::string, TomlValue>;
using TomlDoc = std::map<std::string, TomlTable>;  // section -> table ("" = root)

namespace toml_detail {

inline void skip_ws(const std::string& s, std::size_t& i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

inline TomlValue parse_value(const std::string& s, std::size_t& i);

inline TomlValue parse_array(const std::string& s, std::size_t& i) {
  TomlArray arr;
  ++i;  // '['
  for (;;) {
    skip_ws(s, i);
    if (i >= s.size()) throw ConfigError("unterminated array");
    if (s[i] == ']') {
      ++i;
      break;
    }
    arr.push_back(parse_value(s, i));
    skip_ws(s, i);
    if (i < s.size() && s[i] == ',') ++i;
  }
  return TomlValue{std::move(arr)};
}

inline TomlValue parse_value(const std::string& s, std::size_t& i) {
  skip_ws(s, i);
  if (i >= s.size()) throw ConfigError("missing value");
  if (s[i] == '[') return parse_array(s, i);
  if (s[i] == '"') {
    std::string out;
    ++i;
    while (i < s.size() && s[i] != '"') out += s[i++];
    if (i >= s.size()) throw ConfigError("unterminated string");
    ++i;
    return TomlValue{out};
  }
  std::string tok;
  while (i < s.size() && s[i] != ',' && s[i] != ']' && s[i] != ' ' && s[i] != '\t' &&
         s[i] != '#')
    tok += s[i++];
  if (tok == "true") return TomlValue{true};
  if (tok == "false") return TomlValue{false};
  if (tok.find('.') == std::string::npos && tok.find('e') == std::string::npos &&
      tok.find('E') == std::string::npos && tok.find("inf") == std::string::npos &&
      tok.find("nan") == std::string::npos) {
    try {
      return TomlValue{static_cast<std::int64_t>(std::stoll(tok))};
    } catch (...) {
      throw ConfigError("bad integer: " + tok);
    }
  }
  try {
    return TomlValue{std::stod(tok)};
  } catch (...) {
    throw ConfigError("bad number: " + tok);
  }
}

}  // namespace toml_detail

inline TomlDoc toml_parse(const std::string& text) {
  TomlDoc doc;
  std::string section;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::size_t i = 0;
    toml_detail::skip_ws(line, i);
    if (i >= line.size() || line[i] == '#') continue;
    if (line[i] == '[') {
      const auto close = line.find(']', i);
      if (close == std::string::npos) throw ConfigError("bad section header: " + line);
      section = line.substr(i + 1, close - i - 1);
      doc[section];
      continue;
    }
    const auto eq = line.find('=', i);
    if (eq == std::string::npos) throw ConfigError("expected key = value: " + line);
    std::string key = line.substr(i, eq - i);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    std::size_t j = eq + 1;
    doc[section][key] = toml_detail::parse_value(line, j);
  }
  return doc;
}

inline std::string toml_serialize_value(const TomlValue& v) {
  if (std::holds_alternative<bool>(v.v)) return std::get<bool>(v.v) ? "true" : "false";
  if (std::holds_alternative<std::int64_t>(v.v)) return std::to_string(std::get<std::int64_t>(v.v));
  if (std::holds_alternative<double>(v.v)) {
    std::string s = fmt_double(std::get<double>(v.v));
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
      s += ".0";
    return s;
  }
  if (std::holds_alternative<std::string>(v.v)) return "\"" + std::get<std::string>(v.v) + "\"";
  std::string out = "[";
  const auto& arr = std::get<TomlArray>(v.v);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out += toml_serialize_value(arr[i]);
    if (i + 1 < arr.size()) out += ", ";
  }
  return out + "]";
}

inline std::string toml_serialize(const TomlDoc& doc) {
  std::string out;
  if (auto it = doc.find(""); it != doc.end())
    for (const auto& [k, v] : it->second) out += k + " = " + toml_serialize_value(v) + "\n";
  for (const auto& [sec, table] : doc) {
    if (sec.empty()) continue;
    out += "\n[" + sec + "]\n";
    for (const auto& [k, v] : table) out += k + " = " + toml_serialize_value(v) + "\n";
  }
  return out;
}

// --------------------------------------------------------------------------
// Experiment configuration

struct SystemSpec {
  std::string kind = "doubling";  // doubling | tent | rotation | shift
  int alphabet = 2;
  std::string sided = "one";
};

struct MeasureSpec {
  std::string kind = "bernoulli";  // bernoulli | markov | periodic
  std::vector<double> p = {0.5, 0.5};
  std::vector<std::vector<double>> P;
  std::vector<double> pi;
  std::vector<std::int64_t> word;  // periodic word on shifts
};

struct GenericityConfig {
  std::vector<std::int64_t> lengths = {4, 8, 16, 32, 64};
  std::int64_t trials = 50;
  int depth = 8;
};

struct SuiteConfig {
  std::vector<std::string> checks = {"all"};  // explicit [] runs nothing
  std::string sabotage;                       // test fixture hook
};

struct ExperimentConfig {
  std::string experiment = "suite";
  std::uint64_t seed = 0;
  std::string out = "out";
  std::int64_t sample = 64;

  SystemSpec system;
  MeasureSpec measure;
  ScaleGrid grid;
  RecurrenceConfig recurrence;
  RadiusLadder dimension_ladder;
  std::vector<double> deltas = {0.25};
  ExpansivityOptions expansivity;
  GenericityConfig genericity;
  SuiteConfig suite;
};

inline SystemHandle build_system(const SystemSpec& spec) {
  if (spec.kind == "doubling") return make_doubling();
  if (spec.kind == "tent") return make_tent();
  if (spec.kind == "rotation") return make_rotation();
  if (spec.kind == "shift")
    return make_shift(spec.alphabet, spec.sided == "two" ? Sided::Two : Sided::One);
  throw ConfigError("unknown system kind: " + spec.kind);
}

inline AnalyticMeasure build_analytic(const MeasureSpec& spec) {
  if (spec.kind == "bernoulli") return make_bernoulli(spec.p);
  if (spec.kind == "markov") return make_markov(spec.P, spec.pi);
  throw ConfigError("measure kind " + spec.kind + " is not analytic");
}

inline ExperimentConfig config_from_toml(const TomlDoc& doc) {
  ExperimentConfig cfg;
  auto get = [&](const std::string& sec, const std::string& key) -> const TomlValue* {
    auto s = doc.find(sec);
    if (s == doc.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  };
  if (auto* v = get("", "experiment")) cfg.experiment = v->as_string();
  if (auto* v = get("", "seed")) cfg.seed = static_cast<std::uint64_t>(v->as_int());
  if (auto* v = get("", "out")) cfg.out = v->as_string();
  if (auto* v = get("", "sample")) cfg.sample = v->as_int();

  if (auto* v = get("system", "kind")) cfg.system.kind = v->as_string();
  if (auto* v = get("system", "alphabet")) cfg.system.alphabet = static_cast<int>(v->as_int());
  if (auto* v = get("system", "sided")) cfg.system.sided = v->as_string();

  if (auto* v = get("measure", "kind")) cfg.measure.kind = v->as_string();
  if (auto* v = get("measure", "p")) cfg.measure.p = v->as_doubles();
  if (auto* v = get("measure", "P")) {
    cfg.measure.P.clear();
    for (const auto& row : v->as_array()) cfg.measure.P.push_back(row.as_doubles());
  }
  if (auto* v = get("measure", "pi")) cfg.measure.pi = v->as_doubles();
  if (auto* v = get("measure", "word")) {
    cfg.measure.word.clear();
    for (const auto& e : v->as_array()) cfg.measure.word.push_back(e.as_int());
  }

  if (auto* v = get("grid", "epsilons")) cfg.grid.epsilons = v->as_doubles();
  if (auto* v = get("grid", "n_min")) cfg.grid.n_min = v->as_int();
  if (auto* v = get("grid", "n_max")) cfg.grid.n_max = v->as_int();
  if (auto* v = get("grid", "s")) cfg.grid.s = v->as_int();
  if (auto* v = get("grid", "q_values")) cfg.grid.q_values = v->as_doubles();
  if (auto* v = get("grid", "converge_rtol")) cfg.grid.converge_rtol = v->as_double();

  if (auto* v = get("recurrence", "r0")) cfg.recurrence.ladder.r0 = v->as_double();
  if (auto* v = get("recurrence", "rungs"))
    cfg.recurrence.ladder.rungs = static_cast<int>(v->as_int());
  if (auto* v = get("recurrence", "horizon"))
    cfg.recurrence.horizon = static_cast<std::uint64_t>(v->as_int());
  if (auto* v = get("recurrence", "fit_fraction")) cfg.recurrence.fit_fraction = v->as_double();

  if (auto* v = get("dimension", "r0")) cfg.dimension_ladder.r0 = v->as_double();
  if (auto* v = get("dimension", "rungs"))
    cfg.dimension_ladder.rungs = static_cast<int>(v->as_int());

  if (auto* v = get("expansive", "deltas")) cfg.deltas = v->as_doubles();
  if (auto* v = get("expansive", "s")) cfg.expansivity.s = v->as_int();
  if (auto* v = get("expansive", "n_max")) cfg.expansivity.n_max = v->as_int();
  if (auto* v = get("expansive", "threshold")) cfg.expansivity.threshold = v->as_double();
  if (auto* v = get("expansive", "floor")) cfg.expansivity.floor = v->as_double();

  if (auto* v = get("genericity", "lengths")) {
    cfg.genericity.lengths.clear();
    for (const auto& e : v->as_array()) cfg.genericity.lengths.push_back(e.as_int());
  }
  if (auto* v = get("genericity", "trials")) cfg.genericity.trials = v->as_int();
  if (auto* v = get("genericity", "depth")) cfg.genericity.depth = static_cast<int>(v->as_int());

  if (auto* v = get("suite", "checks")) {
    cfg.suite.checks.clear();
    for (const auto& e : v->as_array()) cfg.suite.checks.push_back(e.as_string());
  }
  if (auto* v = get("suite", "sabotage")) cfg.suite.sabotage = v->as_string();
  return cfg;
}

inline ExperimentConfig parse_config(const std::string& text) {
  return config_from_toml(toml_parse(text));
}

inline TomlDoc config_to_toml(const ExperimentConfig& cfg) {
  TomlDoc doc;
  doc[""]["experiment"] = TomlValue{cfg.experiment};
  doc[""]["seed"] = TomlValue{static_cast<std::int64_t>(cfg.seed)};
  doc[""]["out"] = TomlValue{cfg.out};
  doc[""]["sample"] = TomlValue{cfg.sample};

  doc["system"]["kind"] = TomlValue{cfg.system.kind};
  doc["system"]["alphabet"] = TomlValue{static_cast<std::int64_t>(cfg.system.alphabet)};
  doc["system"]["sided"] = TomlValue{cfg.system.sided};

  doc["measure"]["kind"] = TomlValue{cfg.measure.kind};
  auto darr = [](const std::vector<double>& xs) {
    TomlArray a;
    for (double x : xs) a.push_back(TomlValue{x});
    return TomlValue{a};
  };
  doc["measure"]["p"] = darr(cfg.measure.p);
  if (!cfg.measure.P.empty()) {
    TomlArray rows;
    for (const auto& r : cfg.measure.P) rows.push_back(darr(r));
    doc["measure"]["P"] = TomlValue{rows};
    doc["measure"]["pi"] = darr(cfg.measure.pi);
  }
  if (!cfg.measure.word.empty()) {
    TomlArray w;
    for (auto s : cfg.measure.word) w.push_back(TomlValue{s});
    doc["measure"]["word"] = TomlValue{w};
  }

  doc["grid"]["epsilons"] = darr(cfg.grid.epsilons);
  doc["grid"]["n_min"] = TomlValue{cfg.grid.n_min};
  doc["grid"]["n_max"] = TomlValue{cfg.grid.n_max};
  doc["grid"]["s"] = TomlValue{cfg.grid.s};
  doc["grid"]["q_values"] = darr(cfg.grid.q_values);
  doc["grid"]["converge_rtol"] = TomlValue{cfg.grid.converge_rtol};

  doc["recurrence"]["r0"] = TomlValue{cfg.recurrence.ladder.r0};
  doc["recurrence"]["rungs"] = TomlValue{static_cast<std::int64_t>(cfg.recurrence.ladder.rungs)};
  doc["recurrence"]["horizon"] =
      TomlValue{static_cast<std::int64_t>(cfg.recurrence.horizon)};
  doc["recurrence"]["fit_fraction"] = TomlValue{cfg.recurrence.fit_fraction};

  doc["dimension"]["r0"] = TomlValue{cfg.dimension_ladder.r0};
  doc["dimension"]["rungs"] = TomlValue{static_cast<std::int64_t>(cfg.dimension_ladder.rungs)};

  doc["expansive"]["deltas"] = darr(cfg.deltas);
  doc["expansive"]["s"] = TomlValue{cfg.expansivity.s};
  doc["expansive"]["n_max"] = TomlValue{cfg.expansivity.n_max};
  doc["expansive"]["threshold"] = TomlValue{cfg.expansivity.threshold};
  doc["expansive"]["floor"] = TomlValue{cfg.expansivity.floor};

  {
    TomlArray l;
    for (auto v : cfg.genericity.lengths) l.push_back(TomlValue{v});
    doc["genericity"]["lengths"] = TomlValue{l};
  }
  doc["genericity"]["trials"] = TomlValue{cfg.genericity.trials};
  doc["genericity"]["depth"] = TomlValue{static_cast<std::int64_t>(cfg.genericity.depth)};

  {
    TomlArray c;
    for (const auto& s : cfg.suite.checks) c.push_back(TomlValue{s});
    doc["suite"]["checks"] = TomlValue{c};
    doc["suite"]["sabotage"] = TomlValue{cfg.suite.sabotage};
  }
  return doc;
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
  return toml_serialize(config_to_toml(cfg));
}

}  // namespace ergokit
