// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "levypass/config.hpp"
#include "levypass/records.hpp"
#include "levypass/stats.hpp"
#include "levypass/validation.hpp"

namespace levypass {

enum ExitCode : int { kExitOk = 0, kExitFailed = 1, kExitConfig = 2, kExitGuard = 3 };

/// Command-line values that replace fields of the config document.
struct JobOverrides {
  std::optional<std::uint64_t> seed, n, guard;
  std::optional<std::string> out, format;
  std::optional<double> epsilon;
};

/// The config document with overrides applied; this is what gets hashed.
inline nlohmann::json resolve_document(nlohmann::json doc, const JobOverrides& ov) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  if (ov.seed) doc["seed"] = *ov.seed;
  if (ov.n) doc["n"] = *ov.n;
  if (ov.guard) doc["guard"] = *ov.guard;
  if (ov.epsilon) doc["epsilon"] = *ov.epsilon;
  if (ov.out || ov.format) {
    auto& o = doc["output"];
    if (o.is_null()) o = nlohmann::json::object();
    if (ov.out) o["path"] = *ov.out;
    if (ov.format) o["format"] = *ov.format;
  }
  return doc;
}

inline nlohmann::json trace_to_json(const IterationTrace& tr) {
  nlohmann::json j;
  j["iterations"] = tr.iterations;
  j["ties_resampled"] = tr.ties_resampled;
  j["rejection"] = {{"proposals", tr.rejection.proposals},
                    {"calls", tr.rejection.calls},
                    {"low_efficiency", tr.rejection.low_efficiency}};
  auto& recs = j["records"] = nlohmann::json::array();
  for (const auto& r : tr.records)
    recs.push_back({{"t", r.t}, {"s", r.s}, {"v", r.v}, {"x", r.x}, {"delta", r.delta}, {"z", r.z},
                    {"boundary", r.boundary}, {"gap", r.gap}, {"creep", r.creep}, {"at_jump", r.at_jump},
                    {"kept", r.kept}});
  return j;
}

namespace detail {

// Opens the configured output, or stdout when no path is set.
class OutputSink {
 public:
  explicit OutputSink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw ConfigError("output: cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

inline std::string trace_path_for(const JobConfig& c) {
  return (c.out.empty() || c.out == "-") ? std::string("levypass-trace.json") : c.out + ".trace.json";
}

struct ReportRow {
  std::string test;
  double statistic;
  double p_value;
  bool pass;
};

inline void write_report(std::ostream& os, OutputFormat f, const std::vector<ReportRow>& rows) {
  if (f == OutputFormat::csv) os << "test,statistic,p_value,pass\n";
  for (const auto& r : rows) {
    if (f == OutputFormat::csv) {
      os << '"' << r.test << "\"," << fmt_double(r.statistic) << ',' << (std::isnan(r.p_value) ? "" : fmt_double(r.p_value))
         << ',' << (r.pass ? "pass" : "fail") << '\n';
    } else {
      nlohmann::json j = {{"test", r.test}, {"statistic", r.statistic}, {"pass", r.pass}};
      j["p_value"] = std::isnan(r.p_value) ? nlohmann::json(nullptr) : nlohmann::json(r.p_value);
      os << j.dump() << '\n';
    }
  }
}

inline int run_validate(const JobConfig& c, std::ostream& os, std::ostream& log) {
  ValidationOptions o;
  o.seed = c.seed;
  o.scale = c.scale;
  std::vector<int> ids = c.criteria;
  if (ids.empty())
    for (int i = 1; i <= kCriteria; ++i) ids.push_back(i);
  std::vector<ReportRow> rows;
  bool all = true;
  for (int id : ids) {
    const CriterionResult r = run_criterion(id, o);
    log << format_result(r) << " (" << fmt("%.1f", r.seconds) << "s)\n";
    rows.push_back({std::to_string(r.id) + " " + r.name, r.statistic, r.p_value, r.pass});
    all = all && r.pass;
  }
  write_report(os, c.format, rows);
  return all ? kExitOk : kExitFailed;
}

inline int run_oracle_compare(const JobConfig& c, std::ostream& os, std::ostream& log) {
  std::vector<double> te, ze, to, zo;
  for (std::uint64_t i = 0; i < c.n; ++i) {
    const SampleRecord e = sample_record(c, c.subject, i);
    const SampleRecord x = sample_record(c, c.subject, i, true);
    const auto z_final = [](const SampleRecord& r) { return r.z_left + r.jump - r.zm_left.value_or(0.0); };
    te.push_back(e.T);
    ze.push_back(z_final(e));
    to.push_back(x.T);
    zo.push_back(z_final(x));
  }
  std::vector<ReportRow> rows;
  bool all = true;
  for (const auto& [name, a, b] : {std::tuple{"ks T", &te, &to}, std::tuple{"ks Z(T)", &ze, &zo}}) {
    TestResult t;
    try {
      t = ks_two_sample(*a, *b);
    } catch (const DegenerateSample&) {
      t = {0.0, 1.0};
    }
    rows.push_back({name, t.statistic, t.p_value, t.p_value > kAlpha});
    all = all && t.p_value > kAlpha;
    log << name << ": D=" << fmt("%.4g", t.statistic) << " p=" << fmt("%.4g", t.p_value) << '\n';
  }
  write_report(os, c.format, rows);
  return all ? kExitOk : kExitFailed;
}

}  // namespace detail

/// Executes a parsed job. Guard trips write the iteration trace next to the
/// output and return kExitGuard.
inline int run_job(const JobConfig& c, std::ostream& log) {
  try {
    detail::OutputSink sink(c.out);
    std::ostream& os = sink.stream();
    switch (c.mode) {
      case JobMode::validate: return detail::run_validate(c, os, log);
      case JobMode::oracle_compare: return detail::run_oracle_compare(c, os, log);
      default: write_samples(c, os); return kExitOk;
    }
  } catch (const GuardTripped& g) {
    const std::string path = detail::trace_path_for(c);
    std::ofstream(path) << trace_to_json(g.trace()).dump(1) << '\n';
    log << "error: " << g.what() << "; trace written to " << path << '\n';
    return kExitGuard;
  }
}

}  // namespace levypass
