// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>

#include "levypass/config.hpp"
#include "levypass/engine.hpp"
#include "levypass/oracle.hpp"
#include "levypass/rng.hpp"

namespace levypass {

/// One output row. Two-sided jobs fill the optional columns; z_left is then
/// Z+(T-) and jump the net jump of Z+ - Z-.
struct SampleRecord {
  std::uint64_t index = 0;
  double T = 0;
  double z_left = 0;
  double jump = 0;
  bool censored = false;
  std::optional<double> zm_left, jp, jm;
};

inline SampleRecord to_record(std::uint64_t i, const FirstPassageEvent& e) {
  return {i, e.T, e.z_left, e.jump, e.censored, {}, {}, {}};
}

inline SampleRecord to_record(std::uint64_t i, const BVExitEvent& e) {
  return {i, e.T, e.zp_left, e.jp - e.jm, e.censored, e.zm_left, e.jp, e.jm};
}

/// Oracle draws use their own stream range so they never reuse an exact
/// sample's stream.
inline constexpr std::uint64_t kOracleStreamBase = 1ULL << 62;

/// Draws sample i of a sampling job from stream (seed, i), or from the
/// oracle when `oracle` is set.
inline SampleRecord sample_record(const JobConfig& c, JobMode kind, std::uint64_t i, bool oracle = false) {
  RngStream rng(c.seed, oracle ? kOracleStreamBase + i : i);
  EngineOptions opt;
  opt.max_iterations = c.guard;
  opt.assert_divergence = c.assert_divergence;
  switch (kind) {
    case JobMode::sample_fpe:
      return to_record(i, oracle ? oracle_fpe(c.model, c.boundary, c.K, c.scheme, rng)
                                 : sample_subordinator_fpe(c.model, c.boundary, c.K, rng, opt));
    case JobMode::sample_id: {
      if (oracle) {
        const FirstPassageEvent e = oracle_fpe(c.model, Boundary::infinite(), c.t, c.scheme, rng);
        return {i, c.t, e.z_final(), 0.0, true, {}, {}, {}};
      }
      return {i, c.t, sample_id(c.model, c.t, rng, opt), 0.0, true, {}, {}, {}};
    }
    case JobMode::level:
      return to_record(i, oracle ? oracle_level(c.model, c.model_minus, c.a, c.K, c.scheme, rng)
                                 : sample_level_crossing(c.model, c.model_minus, c.a, c.K, rng, opt));
    case JobMode::interval:
      return to_record(i, oracle ? oracle_interval(c.model, c.model_minus, c.a_minus, c.a_plus, c.K, c.scheme, rng)
                                 : sample_interval_exit(c.model, c.model_minus, c.a_minus, c.a_plus, c.K, rng, opt));
    default:
      throw ContractViolation("sample_record: not a sampling mode");
  }
}

namespace detail {

inline std::string fmt_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

inline void write_header(std::ostream& os, OutputFormat f) {
  if (f == OutputFormat::csv) os << "sample_index,T,z_left,jump,censored,zm_left,jp,jm\n";
}

inline void write_record(std::ostream& os, OutputFormat f, const SampleRecord& r) {
  using detail::fmt_double;
  const auto opt = [&](const std::optional<double>& v) {
    if (f == OutputFormat::csv) return v ? fmt_double(*v) : std::string();
    return v ? fmt_double(*v) : std::string("null");
  };
  if (f == OutputFormat::csv) {
    os << r.index << ',' << fmt_double(r.T) << ',' << fmt_double(r.z_left) << ',' << fmt_double(r.jump) << ','
       << (r.censored ? 1 : 0) << ',' << opt(r.zm_left) << ',' << opt(r.jp) << ',' << opt(r.jm) << '\n';
  } else {
    os << "{\"sample_index\":" << r.index << ",\"T\":" << fmt_double(r.T) << ",\"z_left\":" << fmt_double(r.z_left)
       << ",\"jump\":" << fmt_double(r.jump) << ",\"censored\":" << (r.censored ? "true" : "false")
       << ",\"zm_left\":" << opt(r.zm_left) << ",\"jp\":" << opt(r.jp) << ",\"jm\":" << opt(r.jm) << "}\n";
  }
}

/// Runs a sampling job and writes its records in index order.
inline void write_samples(const JobConfig& c, std::ostream& os) {
  write_header(os, c.format);
  for (std::uint64_t i = 0; i < c.n; ++i) write_record(os, c.format, sample_record(c, c.mode, i));
}

}  // namespace levypass
