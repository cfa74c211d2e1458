// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "levypass/boundary.hpp"
#include "levypass/errors.hpp"
#include "levypass/finite_measure.hpp"
#include "levypass/model.hpp"
#include "levypass/oracle.hpp"

namespace levypass {

enum class JobMode { sample_fpe, sample_id, level, interval, validate, oracle_compare };

inline const char* mode_name(JobMode m) {
  switch (m) {
    case JobMode::sample_fpe: return "sample-fpe";
    case JobMode::sample_id: return "sample-id";
    case JobMode::level: return "level";
    case JobMode::interval: return "interval";
    case JobMode::validate: return "validate";
    case JobMode::oracle_compare: return "oracle-compare";
  }
  return "?";
}

enum class OutputFormat { csv, jsonl };

struct JobConfig {
  JobMode mode = JobMode::sample_fpe;
  TiltedTruncatedModel model;        // the subordinator, or the plus side
  TiltedTruncatedModel model_minus;  // level / interval only
  Boundary boundary = Boundary::infinite();
  double K = std::numeric_limits<double>::infinity();
  double t = 1;
  double a = 1;
  double a_minus = 1;
  double a_plus = 1;
  std::uint64_t n = 1000;
  std::uint64_t seed = 0;
  TruncationScheme scheme;
  JobMode subject = JobMode::sample_fpe;  // what oracle-compare compares
  bool assert_divergence = false;
  std::uint64_t guard = 1000000;
  std::string out;  // empty: stdout
  OutputFormat format = OutputFormat::csv;
  std::vector<int> criteria;  // validate; empty means all
  double scale = 1;           // validate: sample-size multiplier
};

namespace detail {

using json = nlohmann::json;

inline void config_fail(const std::string& where, const std::string& what) {
  throw ConfigError("config: " + where + ": " + what);
}

inline void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) config_fail(where, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) config_fail(where, "unknown key '" + k + "'");
}

// Numbers, or "inf" where infinity is allowed.
inline double get_number(const json& j, const std::string& where, bool allow_inf = false) {
  if (allow_inf && j.is_string() && j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  if (!j.is_number()) config_fail(where, allow_inf ? "expected a number or \"inf\"" : "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) config_fail(where, "not finite");
  return v;
}

inline double number_in(const json& parent, const char* key, const std::string& where, double lo, double hi,
                        bool allow_inf = false, bool open_lo = false) {
  if (!parent.contains(key)) config_fail(where, std::string("missing '") + key + "'");
  const double v = get_number(parent.at(key), where + "." + key, allow_inf);
  if (v < lo || (open_lo && v == lo) || (v > hi && !(allow_inf && std::isinf(v))))
    config_fail(where + "." + key, "out of range (" + std::to_string(v) + ")");
  return v;
}

inline std::uint64_t count_in(const json& j, const std::string& where, std::uint64_t lo, std::uint64_t hi) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    config_fail(where, "expected a non-negative integer");
  const auto v = j.get<std::uint64_t>();
  if (v < lo || v > hi) config_fail(where, "out of range (" + std::to_string(v) + ")");
  return v;
}

inline bool get_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) config_fail(where, "expected true or false");
  return j.get<bool>();
}

constexpr double kBig = 1e300;

inline CarrierSpec parse_carrier(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
    config_fail(where, "needs a string 'type'");
  const std::string type = j.at("type").get<std::string>();
  if (type == "none") {
    only_keys(j, where, {"type"});
    return NoCarrier{};
  }
  if (type == "gamma") {
    only_keys(j, where, {"type"});
    return GammaSpec{};
  }
  if (type == "stable") {
    only_keys(j, where, {"type", "alpha", "gamma"});
    return StableSpec{number_in(j, "alpha", where, 0, 1, false, true), number_in(j, "gamma", where, 0, kBig, false, true)};
  }
  if (type == "mixture") {
    only_keys(j, where, {"type", "components"});
    if (!j.contains("components") || !j.at("components").is_array() || j.at("components").empty())
      config_fail(where, "'components' must be a non-empty array");
    MixtureSpec m;
    int i = 0;
    for (const auto& c : j.at("components")) {
      const std::string w = where + ".components[" + std::to_string(i++) + "]";
      only_keys(c, w, {"alpha", "gamma"});
      m.components.push_back({number_in(c, "alpha", w, 0, 1, false, true), number_in(c, "gamma", w, 0, kBig, false, true)});
    }
    return m;
  }
  config_fail(where + ".type", "unknown carrier '" + type + "' (stable, mixture, gamma, none)");
  return NoCarrier{};
}

inline FiniteMeasure parse_chi(const json& j, const std::string& where) {
  only_keys(j, where, {"atoms", "power_law"});
  FiniteMeasure chi;
  if (j.contains("atoms")) {
    if (!j.at("atoms").is_array()) config_fail(where + ".atoms", "expected an array");
    int i = 0;
    for (const auto& a : j.at("atoms")) {
      const std::string w = where + ".atoms[" + std::to_string(i++) + "]";
      only_keys(a, w, {"size", "mass"});
      chi.add_atom(number_in(a, "size", w, 0, kBig, false, true), number_in(a, "mass", w, 0, kBig, false, true));
    }
  }
  if (j.contains("power_law")) {
    if (!j.at("power_law").is_array()) config_fail(where + ".power_law", "expected an array");
    int i = 0;
    for (const auto& p : j.at("power_law")) {
      const std::string w = where + ".power_law[" + std::to_string(i++) + "]";
      only_keys(p, w, {"gamma", "alpha", "q", "lo", "hi"});
      const double lo = number_in(p, "lo", w, 0, kBig, false, true);
      const double hi = number_in(p, "hi", w, lo, kBig, true, true);
      const double alpha = number_in(p, "alpha", w, 0, 1);
      if (alpha >= 1) config_fail(w + ".alpha", "must be below 1");
      if (alpha == 0 && std::isinf(hi)) config_fail(w, "alpha = 0 needs a finite 'hi'");
      chi.add_piece(power_law_piece(number_in(p, "gamma", w, 0, kBig, false, true), alpha,
                                    p.contains("q") ? number_in(p, "q", w, 0, kBig) : 0.0, lo, hi));
    }
  }
  return chi;
}

inline TiltedTruncatedModel parse_model(const json& j, const std::string& where) {
  only_keys(j, where, {"carrier", "q", "r", "drift", "chi"});
  TiltedTruncatedModel m;
  m.carrier = j.contains("carrier") ? parse_carrier(j.at("carrier"), where + ".carrier") : CarrierSpec{NoCarrier{}};
  m.q = j.contains("q") ? number_in(j, "q", where, 0, kBig) : 0.0;
  m.r = j.contains("r") ? number_in(j, "r", where, 0, kBig, true, true) : std::numeric_limits<double>::infinity();
  m.drift = j.contains("drift") ? number_in(j, "drift", where, 0, kBig) : 0.0;
  if (j.contains("chi")) m.chi = parse_chi(j.at("chi"), where + ".chi");
  try {
    m.validate();
  } catch (const ParameterError& e) {
    config_fail(where, e.what());
  }
  return m;
}

inline Boundary parse_boundary(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
    config_fail(where, "needs a string 'type'");
  const std::string type = j.at("type").get<std::string>();
  try {
    if (type == "infinite") {
      only_keys(j, where, {"type"});
      return Boundary::infinite();
    }
    if (type == "constant") {
      only_keys(j, where, {"type", "level"});
      return Boundary::constant(number_in(j, "level", where, 0, kBig, false, true));
    }
    if (type == "linear") {
      only_keys(j, where, {"type", "intercept", "slope"});
      return Boundary::linear(number_in(j, "intercept", where, 0, kBig, false, true),
                              number_in(j, "slope", where, -kBig, 0));
    }
    if (type == "piecewise_linear") {
      only_keys(j, where, {"type", "times", "values"});
      std::vector<double> ts, vs;
      for (const char* key : {"times", "values"}) {
        if (!j.contains(key) || !j.at(key).is_array()) config_fail(where, std::string("'") + key + "' must be an array");
        auto& dst = std::string(key) == "times" ? ts : vs;
        int i = 0;
        for (const auto& x : j.at(key)) dst.push_back(get_number(x, where + "." + key + "[" + std::to_string(i++) + "]"));
      }
      return Boundary::piecewise_linear(ts, vs);
    }
  } catch (const ParameterError& e) {
    config_fail(where, e.what());
  }
  config_fail(where + ".type", "unknown boundary '" + type + "' (infinite, constant, linear, piecewise_linear)");
  return Boundary::infinite();
}

inline JobMode parse_mode(const json& j, const std::string& where) {
  if (!j.is_string()) config_fail(where, "expected a string");
  const std::string s = j.get<std::string>();
  for (JobMode m : {JobMode::sample_fpe, JobMode::sample_id, JobMode::level, JobMode::interval, JobMode::validate,
                    JobMode::oracle_compare})
    if (s == mode_name(m)) return m;
  config_fail(where, "unknown mode '" + s + "'");
  return JobMode::sample_fpe;
}

}  // namespace detail

/// Parses and range-checks a job document. Errors are ConfigError.
inline JobConfig parse_config(const nlohmann::json& j) {
  using detail::config_fail;
  detail::only_keys(j, "config",
                    {"mode", "model", "model_minus", "boundary", "K", "t", "a", "a_minus", "a_plus", "n", "seed",
                     "epsilon", "compensate_drift", "subject", "assert_divergence", "guard", "output", "criteria",
                     "scale"});
  JobConfig c;
  if (!j.contains("mode")) config_fail("config", "missing 'mode'");
  c.mode = detail::parse_mode(j.at("mode"), "mode");
  if (j.contains("subject")) {
    c.subject = detail::parse_mode(j.at("subject"), "subject");
    if (c.subject != JobMode::sample_fpe && c.subject != JobMode::level && c.subject != JobMode::interval)
      config_fail("subject", "must be sample-fpe, level or interval");
  }
  const JobMode kind = c.mode == JobMode::oracle_compare ? c.subject : c.mode;
  const bool sampling = c.mode != JobMode::validate;
  const bool two_sided = kind == JobMode::level || kind == JobMode::interval;

  if (sampling) {
    if (!j.contains("model")) config_fail("config", "missing 'model'");
    c.model = detail::parse_model(j.at("model"), "model");
  }
  if (two_sided) {
    c.model_minus = j.contains("model_minus") ? detail::parse_model(j.at("model_minus"), "model_minus")
                                              : TiltedTruncatedModel{};
  } else if (j.contains("model_minus")) {
    config_fail("model_minus", "only used by level and interval jobs");
  }
  if (j.contains("boundary")) c.boundary = detail::parse_boundary(j.at("boundary"), "boundary");
  if (j.contains("K")) c.K = detail::number_in(j, "K", "config", 0, detail::kBig, true, true);
  if (j.contains("t")) c.t = detail::number_in(j, "t", "config", 0, detail::kBig, false, true);
  if (j.contains("a")) c.a = detail::number_in(j, "a", "config", 0, detail::kBig, false, true);
  if (j.contains("a_minus")) c.a_minus = detail::number_in(j, "a_minus", "config", 0, detail::kBig, false, true);
  if (j.contains("a_plus")) c.a_plus = detail::number_in(j, "a_plus", "config", 0, detail::kBig, false, true);
  if (j.contains("n")) c.n = detail::count_in(j.at("n"), "n", 1, 1000000000ULL);
  if (j.contains("seed")) c.seed = detail::count_in(j.at("seed"), "seed", 0, ~0ULL);
  if (j.contains("epsilon")) c.scheme.epsilon = detail::number_in(j, "epsilon", "config", 0, 1, false, true);
  if (j.contains("compensate_drift")) c.scheme.compensate_drift = detail::get_bool(j.at("compensate_drift"), "compensate_drift");
  if (j.contains("assert_divergence")) c.assert_divergence = detail::get_bool(j.at("assert_divergence"), "assert_divergence");
  if (j.contains("guard")) c.guard = detail::count_in(j.at("guard"), "guard", 1, ~0ULL);
  if (j.contains("scale")) c.scale = detail::number_in(j, "scale", "config", 0, 100, false, true);
  if (j.contains("criteria")) {
    if (!j.at("criteria").is_array()) config_fail("criteria", "expected an array of criterion numbers");
    for (const auto& x : j.at("criteria")) c.criteria.push_back(static_cast<int>(detail::count_in(x, "criteria[]", 1, 12)));
  }
  if (j.contains("output")) {
    const auto& o = j.at("output");
    detail::only_keys(o, "output", {"path", "format"});
    if (o.contains("path")) {
      if (!o.at("path").is_string()) config_fail("output.path", "expected a string");
      c.out = o.at("path").get<std::string>();
    }
    if (o.contains("format")) {
      const std::string f = o.at("format").is_string() ? o.at("format").get<std::string>() : "";
      if (f == "csv") c.format = OutputFormat::csv;
      else if (f == "jsonl") c.format = OutputFormat::jsonl;
      else config_fail("output.format", "must be \"csv\" or \"jsonl\"");
    }
  }

  // Mode-specific requirements.
  if (kind == JobMode::sample_fpe) {
    if (c.boundary.is_infinite() && std::isinf(c.K)) config_fail("config", "an infinite boundary needs a finite K");
    if (!c.model.has_carrier()) config_fail("model.carrier", "sample-fpe needs a carrier");
  }
  if (kind == JobMode::sample_id && !c.model.has_carrier()) config_fail("model.carrier", "sample-id needs a carrier");
  if (kind == JobMode::level) {
    if (c.model.drift != 0) config_fail("model.drift", "the plus side of a level job must be driftless");
    if (std::isinf(c.K) && !c.assert_divergence)
      config_fail("K", "K = inf in a level job needs \"assert_divergence\": true");
  }
  if (kind == JobMode::interval) {
    if (c.model.drift != 0 || c.model_minus.drift != 0) config_fail("config", "interval jobs must be driftless");
    if (!c.model.has_carrier() && !c.model_minus.has_carrier())
      config_fail("config", "interval jobs need a carrier on at least one side");
  }
  if (c.mode == JobMode::oracle_compare) {
    for (const auto* m : {&c.model, &c.model_minus})
      if (m->has_carrier() && !(c.scheme.epsilon < m->r)) config_fail("epsilon", "must lie below r");
  }
  return c;
}

inline JobConfig parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

/// FNV-1a of the canonical (sorted-key) dump; used to tag logs.
inline std::string config_hash(const nlohmann::json& j) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace levypass
