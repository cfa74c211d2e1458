// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "levypass/carrier_gamma.hpp"
#include "levypass/carrier_mix.hpp"
#include "levypass/carrier_stable.hpp"
#include "levypass/engine.hpp"
#include "levypass/oracle.hpp"
#include "levypass/records.hpp"
#include "levypass/stable.hpp"
#include "levypass/stats.hpp"

namespace levypass {

/// Outcome of one acceptance criterion. Criteria that run several tests
/// report the weakest one.
struct CriterionResult {
  int id = 0;
  std::string name;
  double statistic = 0;
  double p_value = std::numeric_limits<double>::quiet_NaN();
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct ValidationOptions {
  std::uint64_t seed = 20240611;
  double scale = 1;  // multiplies every sample size
};

inline constexpr int kCriteria = 12;
inline constexpr double kAlpha = 0.01;

namespace detail {

// gamma for which the alpha = 1/2 Lévy measure gives the standard Lévy law
// scaled so that rho = 1 (rho = gamma Gamma(1/2) / (1/2)).
inline const double kHalfGamma = 0.5 / std::sqrt(std::numbers::pi);

inline std::uint64_t scaled(std::uint64_t n, const ValidationOptions& o) {
  return std::max<std::uint64_t>(200, static_cast<std::uint64_t>(std::llround(n * o.scale)));
}

inline std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Keeps the weaker of two test results.
inline void fold(CriterionResult& r, const TestResult& t) {
  if (std::isnan(r.p_value) || t.p_value < r.p_value) {
    r.p_value = t.p_value;
    r.statistic = t.statistic;
  }
}

inline TiltedTruncatedModel table1_model() {
  FiniteMeasure chi;
  chi.add_atom(0.5, 1.0);
  return stable_model(0.5, kHalfGamma, 1.0, 1.0, chi);
}

inline TiltedTruncatedModel two_sided_minus() { return stable_model(0.5, kHalfGamma, 1.0, 1.0); }

// Plain-envelope sampler for the crossing law of a single stable carrier,
// written independently of the carrier code: creep with weight
// w0 f(z), otherwise u from (z - u)^{-alpha} on (0, z) thinned by
// h(u / sigma, theta) / M, and v = (z - u) U^{-1/alpha}.
inline std::pair<double, double> reference_stable_crossing(double alpha, double gamma, double t, double z,
                                                           double w0, RngStream& rng) {
  const StableIntegrand f(alpha);
  const double rho = gamma * std::tgamma(1.0 - alpha) / alpha;
  const double sigma = std::pow(rho * t, 1.0 / alpha);
  const double w1 = gamma * std::pow(z, 1.0 - alpha) / (alpha * (1.0 - alpha));
  const double m = f.bound();
  for (;;) {
    const bool creep = rng.uniform() * (w0 + w1) < w0;
    const double u = creep ? z : z * (1.0 - std::pow(rng.uniform(), 1.0 / (1.0 - alpha)));
    if (!(u > 0)) continue;
    const double theta = std::numbers::pi * rng.uniform();
    if (rng.uniform() * m >= f.h(u / sigma, theta)) continue;
    if (creep) return {z, 0.0};
    return {u, (z - u) * std::pow(rng.uniform(), -1.0 / alpha)};
  }
}

template <class F>
inline double quad(F f, double lo, double hi) {
  boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate(f, lo, hi);
}

}  // namespace detail

inline CriterionResult criterion_stable_marginal(const ValidationOptions& o) {
  CriterionResult r{1, "stable marginal law (alpha = 1/2) vs erfc(1/(2 sqrt x))"};
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t n = detail::scaled(100000, o);
  RngStream rng(o.seed, 1);
  std::vector<double> xs(n);
  for (auto& x : xs) x = sample_standard_stable(0.5, rng);
  detail::fold(r, ks_one_sample(xs, [](double x) { return std::erfc(0.5 / std::sqrt(x)); }));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.pass = r.p_value > kAlpha && secs < 10.0;
  r.detail = "n=" + std::to_string(n) + detail::fmt(" sampling+test %.2fs (limit 10s)", secs);
  return r;
}

inline CriterionResult criterion_id_moments(const ValidationOptions& o) {
  CriterionResult r{2, "infinitely divisible moments (Gamma r=1, stable alpha=1/2 r=1)"};
  const std::uint64_t n = detail::scaled(1000000, o);
  struct Case {
    const char* name;
    TiltedTruncatedModel model;
    double mean;
    std::function<double(double)> x2_density;  // x^2 times the Lévy density
  };
  const double g = detail::kHalfGamma;
  const std::vector<Case> cases = {
      {"gamma", gamma_model(1.0), 1.0 - std::exp(-1.0), [](double x) { return x * std::exp(-x); }},
      {"stable", stable_model(0.5, g, 0.0, 1.0), 1.0 / std::sqrt(std::numbers::pi),
       [g](double x) { return g * std::sqrt(x); }},
  };
  double worst = 0;
  r.pass = true;
  std::ostringstream det;
  std::uint64_t stream = 0;
  for (const auto& c : cases) {
    const double var = detail::quad(c.x2_density, 0.0, 1.0);
    RngStream rng(o.seed, 200 + stream++);
    std::vector<double> xs(n);
    for (auto& x : xs) x = sample_id(c.model, 1.0, rng);
    const MomentCheck m = moment_check(xs, c.mean, var);
    const double z = std::max(std::abs(m.z_mean), std::abs(m.z_variance));
    worst = std::max(worst, z);
    r.pass = r.pass && std::abs(m.z_mean) <= 3 && std::abs(m.z_variance) <= 3;
    det << c.name << ": mean " << detail::fmt("%.6f", m.mean) << " vs " << detail::fmt("%.6f", c.mean) << " (z "
        << detail::fmt("%+.2f", m.z_mean) << "), var " << detail::fmt("%.6f", m.variance) << " vs "
        << detail::fmt("%.6f", var) << " (z " << detail::fmt("%+.2f", m.z_variance) << "); ";
  }
  r.statistic = worst;
  r.detail = det.str() + "n=" + std::to_string(n) + " each, |z| <= 3";
  return r;
}

inline CriterionResult criterion_gamma_fpt_law(const ValidationOptions& o) {
  CriterionResult r{3, "first-passage time, Gamma identity embedding, a=1 vs Q(t,1)"};
  const std::uint64_t n = detail::scaled(10000, o);
  const auto model = gamma_model(std::numeric_limits<double>::infinity());
  const Boundary c = Boundary::constant(1.0);
  RngStream rng(o.seed, 3);
  std::vector<double> ts(n);
  for (auto& t : ts) t = sample_subordinator_fpe(model, c, std::numeric_limits<double>::infinity(), rng).T;
  detail::fold(r, ks_one_sample(ts, [](double t) { return t > 0 ? boost::math::gamma_q(t, 1.0) : 0.0; }));
  r.pass = r.p_value > kAlpha;
  r.detail = "n=" + std::to_string(n);
  return r;
}

inline CriterionResult criterion_no_creep_constant(const ValidationOptions& o) {
  CriterionResult r{4, "no creeping at constant levels"};
  const double inf = std::numeric_limits<double>::infinity();
  FiniteMeasure atoms;
  atoms.add_atom(0.3, 0.5);
  atoms.add_atom(1.5, 0.2);
  struct Case {
    TiltedTruncatedModel model;
    double level;
    double K;
    std::uint64_t n;
  };
  const std::vector<Case> cases = {
      {stable_model(0.5, detail::kHalfGamma, 0.0, inf), 1.0, inf, 30000},
      {detail::table1_model(), 1.0, inf, 25000},
      {gamma_model(0.5, atoms), 2.0, inf, 30000},
      {mixture_model({{0.3, 0.5}, {0.7, 0.5}}, 0.5, 2.0), 1.0, 5.0, 15000},
  };
  std::uint64_t total = 0, creeps = 0, uncensored = 0, stream = 0;
  for (const auto& c : cases) {
    const std::uint64_t n = detail::scaled(c.n, o);
    const Boundary b = Boundary::constant(c.level);
    for (std::uint64_t i = 0; i < n; ++i) {
      RngStream rng(o.seed, (400 + stream) << 32 | i);
      const FirstPassageEvent e = sample_subordinator_fpe(c.model, b, c.K, rng);
      ++total;
      if (!e.censored) {
        ++uncensored;
        if (e.jump == 0) ++creeps;
      }
    }
    ++stream;
  }
  r.statistic = static_cast<double>(creeps);
  r.pass = creeps == 0;
  r.detail = std::to_string(creeps) + " creeping of " + std::to_string(uncensored) + " uncensored (" +
             std::to_string(total) + " pooled runs)";
  return r;
}

inline CriterionResult criterion_creep_linear(const ValidationOptions& o) {
  CriterionResult r{5, "creeping at the boundary 1 - t/2, K=2"};
  const std::uint64_t n = detail::scaled(50000, o);
  const auto model = stable_model(0.5, detail::kHalfGamma, 0.0, std::numeric_limits<double>::infinity());
  const Boundary c = Boundary::linear(1.0, -0.5);
  double frac[2];
  double nu[2];
  std::uint64_t bad = 0, creeps_total = 0;
  double worst_dev = 0;
  for (int k = 0; k < 2; ++k) {
    std::uint64_t creeps = 0, unc = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      RngStream rng(o.seed + 1000 * (k + 1), i);
      const FirstPassageEvent e = sample_subordinator_fpe(model, c, 2.0, rng);
      if (e.censored) continue;
      ++unc;
      if (e.jump == 0) {
        ++creeps;
        const double dev = std::abs(e.z_left - c.value(e.T));
        worst_dev = std::max(worst_dev, dev);
        if (dev > 1e-12) ++bad;
      }
    }
    frac[k] = unc ? static_cast<double>(creeps) / unc : 0.0;
    nu[k] = static_cast<double>(unc);
    creeps_total += creeps;
  }
  const double se = std::sqrt(frac[0] * (1 - frac[0]) / nu[0] + frac[1] * (1 - frac[1]) / nu[1]);
  const double z = se > 0 ? std::abs(frac[0] - frac[1]) / se : 0.0;
  r.statistic = z;
  r.pass = creeps_total > 0 && frac[0] > 0 && frac[1] > 0 && bad == 0 && z <= 3;
  r.detail = detail::fmt("creep fractions %.5f", frac[0]) + detail::fmt(" / %.5f", frac[1]) +
             detail::fmt(" (|diff|/SE %.2f <= 3)", z) + ", " + std::to_string(bad) +
             " creeps off c(T) by > 1e-12" + detail::fmt(" (max %.1e)", worst_dev);
  return r;
}

inline CriterionResult criterion_oracle_table1(const ValidationOptions& o) {
  CriterionResult r{6, "exact vs truncation oracle, subordinator (stable + atom, c=1, K=inf)"};
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t n = detail::scaled(10000, o);
  const auto model = detail::table1_model();
  const Boundary c = Boundary::constant(1.0);
  const double inf = std::numeric_limits<double>::infinity();
  const TruncationScheme scheme{1e-4, false};
  std::vector<double> te(n), ze(n), to(n), zo(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    RngStream a(o.seed, 600000 + i), b(o.seed, kOracleStreamBase + 600000 + i);
    const FirstPassageEvent e = sample_subordinator_fpe(model, c, inf, a);
    const FirstPassageEvent x = oracle_fpe(model, c, inf, scheme, b);
    te[i] = e.T;
    ze[i] = e.z_final();
    to[i] = x.T;
    zo[i] = x.z_final();
  }
  const TestResult kt = ks_two_sample(te, to), kz = ks_two_sample(ze, zo);
  detail::fold(r, kt);
  detail::fold(r, kz);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.pass = kt.p_value > kAlpha && kz.p_value > kAlpha && secs < 300;
  r.detail = detail::fmt("T: p=%.3f", kt.p_value) + detail::fmt(", Z(T): p=%.3f", kz.p_value) + ", n=" +
             std::to_string(n) + " per side, epsilon=1e-4" + detail::fmt(", %.1fs (limit 300s)", secs);
  return r;
}

inline CriterionResult criterion_oracle_two_sided(const ValidationOptions& o) {
  CriterionResult r{7, "exact vs truncation oracle, level a=0.5 and interval [-0.5, 0.5], K=5"};
  const std::uint64_t n = detail::scaled(10000, o);
  const auto plus = gamma_model(1.0);
  const auto minus = detail::two_sided_minus();
  const TruncationScheme scheme{1e-4, false};
  std::ostringstream det;
  bool ok = true;
  std::uint64_t inside = 0;
  for (int mode = 0; mode < 2; ++mode) {
    std::vector<double> te(n), ze(n), to(n), zo(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      const std::uint64_t id = (700 + mode) * 100000ULL + i;
      RngStream a(o.seed, id), b(o.seed, kOracleStreamBase + id);
      const BVExitEvent e = mode == 0 ? sample_level_crossing(plus, minus, 0.5, 5.0, a)
                                      : sample_interval_exit(plus, minus, 0.5, 0.5, 5.0, a);
      const BVExitEvent x = mode == 0 ? oracle_level(plus, minus, 0.5, 5.0, scheme, b)
                                      : oracle_interval(plus, minus, 0.5, 0.5, 5.0, scheme, b);
      if (mode == 1 && !e.censored && e.z_final() > -0.5 && e.z_final() < 0.5) ++inside;
      te[i] = e.T;
      ze[i] = e.z_final();
      to[i] = x.T;
      zo[i] = x.z_final();
    }
    const TestResult kt = ks_two_sample(te, to), kz = ks_two_sample(ze, zo);
    detail::fold(r, kt);
    detail::fold(r, kz);
    ok = ok && kt.p_value > kAlpha && kz.p_value > kAlpha;
    det << (mode == 0 ? "level" : "interval") << detail::fmt(" T: p=%.3f", kt.p_value)
        << detail::fmt(", Z(T): p=%.3f; ", kz.p_value);
  }
  r.pass = ok && inside == 0;
  r.detail = det.str() + std::to_string(inside) + " uncensored interval exits inside (-0.5, 0.5), n=" +
             std::to_string(n);
  return r;
}

inline CriterionResult criterion_tilt_classification(const ValidationOptions& o) {
  CriterionResult r{8, "keep-rate of crossing jumps v <= r vs exp(-q v), 20 bins"};
  const std::uint64_t n = detail::scaled(100000, o);
  const double q = 2.0, rr = 1.0;
  const auto model = stable_model(0.5, detail::kHalfGamma, q, rr);
  const Boundary c = Boundary::constant(1.0);
  EngineOptions opt;
  opt.record_trace = true;
  constexpr int kBins = 20;
  std::vector<double> kept(kBins, 0), dropped(kBins, 0), e_kept(kBins, 0), e_dropped(kBins, 0);
  std::uint64_t jumps = 0;
  for (std::uint64_t i = 0; jumps < n; ++i) {
    RngStream rng(o.seed, 800000 + i);
    IterationTrace tr;
    sample_subordinator_fpe(model, c, std::numeric_limits<double>::infinity(), rng, opt, &tr);
    for (const auto& rec : tr.records) {
      if (rec.at_jump || rec.creep || !(rec.v > 0) || rec.v > rr || jumps >= n) continue;
      const int b = std::min(kBins - 1, static_cast<int>(rec.v / rr * kBins));
      const double p = std::exp(-q * rec.v);
      (rec.kept ? kept : dropped)[b] += 1;
      e_kept[b] += p;
      e_dropped[b] += 1 - p;
      ++jumps;
    }
  }
  std::vector<double> obs, exp;
  for (int b = 0; b < kBins; ++b) {
    obs.push_back(kept[b]);
    obs.push_back(dropped[b]);
    exp.push_back(e_kept[b]);
    exp.push_back(e_dropped[b]);
  }
  detail::fold(r, chi_square_gof(obs, exp, kBins));
  r.pass = r.p_value > kAlpha;
  r.detail = std::to_string(jumps) + " crossing jumps, q=2, r=1, chi-square with 20 dof";
  return r;
}

inline CriterionResult criterion_renewal(const ValidationOptions& o) {
  CriterionResult r{9, "renewal: remaining passage time resumed vs fresh after boundary_shift"};
  const std::uint64_t n = detail::scaled(10000, o);
  FiniteMeasure chi;
  chi.add_atom(0.5, 1.0);
  const auto model = stable_model(0.5, detail::kHalfGamma, 1.0, 0.5, chi);
  const Boundary c = Boundary::linear(1.0, -0.25);
  const double K = 6.0;
  std::vector<double> resumed, fresh;
  for (std::uint64_t i = 0; resumed.size() < n; ++i) {
    RngStream rng(o.seed, 900000 + i);
    SubordinatorRun run(model, c, K);
    if (run.step(rng)) continue;
    const double t0 = run.elapsed(), z0 = run.level();
    resumed.push_back(run.run(rng).T - t0);
    RngStream other(o.seed, kOracleStreamBase + 900000 + i);
    fresh.push_back(sample_subordinator_fpe(model, boundary_shift(c, t0, z0), K - t0, other).T);
  }
  detail::fold(r, ks_two_sample(resumed, fresh));
  r.pass = r.p_value > kAlpha;
  r.detail = "n=" + std::to_string(n) + " mid-run states, c(t)=1-t/4, r=0.5, K=6";
  return r;
}

inline CriterionResult criterion_mixture_single(const ValidationOptions& o) {
  CriterionResult r{10, "mixture with I=1 vs single-stable crossing law (s, v), w0=0.5"};
  const std::uint64_t n = detail::scaled(10000, o);
  const double alpha = 0.5, gamma = detail::kHalfGamma, t = 0.5, z = 1.0, w0 = 0.5;
  // Mixture weight gamma z^{1-a} Gamma(1-a) / (a Gamma(I+1-a)) at I = 1
  // against the single-stable gamma z^{1-a} / (a (1-a)).
  double weight_dev = 0;
  for (double a : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    const double mix = gamma * std::pow(z, 1 - a) * std::tgamma(1 - a) / (a * std::tgamma(2 - a));
    const double single = gamma * std::pow(z, 1 - a) / (a * (1 - a));
    weight_dev = std::max(weight_dev, std::abs(mix / single - 1));
  }
  const MixtureCarrier mix({{alpha, gamma}});
  std::vector<double> sm(n), vm(n), sr(n), vr(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    RngStream a(o.seed, 1000000 + i), b(o.seed, kOracleStreamBase + 1000000 + i);
    const CrossingDraw d = mix.sample_crossing(t, z, w0, a);
    sm[i] = d.s_left;
    vm[i] = d.jump;
    const auto [s, v] = detail::reference_stable_crossing(alpha, gamma, t, z, w0, b);
    sr[i] = s;
    vr[i] = v;
  }
  const TestResult ks = ks_two_sample(sm, sr), kv = ks_two_sample(vm, vr);
  detail::fold(r, ks);
  detail::fold(r, kv);
  r.pass = ks.p_value > kAlpha && kv.p_value > kAlpha && weight_dev < 1e-13;
  r.detail = detail::fmt("s: p=%.3f", ks.p_value) + detail::fmt(", v: p=%.3f", kv.p_value) +
             detail::fmt(", weight identity rel. dev %.1e", weight_dev) + ", n=" + std::to_string(n);
  return r;
}

inline CriterionResult criterion_gamma_branches(const ValidationOptions&) {
  CriterionResult r{11, "Gamma branch-density identity at (t, z) = (1.3, 0.7)"};
  const GammaBranches g{1.3, 0.7};
  constexpr int kGrid = 200;
  std::vector<double> ratios;
  for (int i = 0; i < kGrid; ++i) {
    const double x = g.z * (i + 0.5) / kGrid;
    for (int j = 0; j < kGrid; ++j) {
      const double v = (g.z - x) + 3.0 * g.z * (j + 0.5) / kGrid;
      const double lhs = g.w1() * g.h1(x, v) * g.rho1(x, v) + g.w2() * g.h2(x, v) * g.rho2(x, v);
      // g_t(x) e^{-v} / v with g_t the Gamma(t) density; the constant absorbs the rest.
      const double rhs = std::exp((g.t - 1) * std::log(x) - x - std::lgamma(g.t)) * std::exp(-v) / v;
      ratios.push_back(lhs / rhs);
    }
  }
  double mean = 0;
  for (double q : ratios) mean += q;
  mean /= ratios.size();
  double dev = 0;
  for (double q : ratios) dev = std::max(dev, std::abs(q / mean - 1));
  r.statistic = dev;
  r.pass = dev < 1e-8;
  r.detail = detail::fmt("max relative deviation %.2e", dev) + detail::fmt(" (constant %.10g)", mean) +
             " on a 200x200 grid";
  return r;
}

inline CriterionResult criterion_determinism(const ValidationOptions& o) {
  CriterionResult r{12, "determinism: identical config and seed give identical output"};
  std::vector<JobConfig> jobs(3);
  jobs[0].mode = JobMode::sample_fpe;
  jobs[0].model = detail::table1_model();
  jobs[0].boundary = Boundary::linear(1.0, -0.5);
  jobs[0].K = 2;
  jobs[1].mode = JobMode::level;
  jobs[1].model = gamma_model(1.0);
  jobs[1].model_minus = detail::two_sided_minus();
  jobs[1].a = 0.5;
  jobs[1].K = 5;
  jobs[1].format = OutputFormat::jsonl;
  jobs[2].mode = JobMode::sample_id;
  jobs[2].model = mixture_model({{0.3, 0.5}, {0.7, 0.5}}, 0.5, 2.0);
  std::uint64_t bytes = 0;
  int mismatches = 0;
  for (auto& j : jobs) {
    j.seed = o.seed;
    j.n = 500;
    std::ostringstream a, b;
    write_samples(j, a);
    write_samples(j, b);
    bytes += a.str().size();
    if (a.str() != b.str()) ++mismatches;
  }
  r.statistic = mismatches;
  r.pass = mismatches == 0;
  r.detail = std::to_string(mismatches) + " of 3 jobs differ between runs (" + std::to_string(bytes) + " bytes)";
  return r;
}

inline CriterionResult run_criterion(int id, const ValidationOptions& o) {
  using Fn = CriterionResult (*)(const ValidationOptions&);
  static constexpr Fn fns[kCriteria] = {
      criterion_stable_marginal, criterion_id_moments,          criterion_gamma_fpt_law,
      criterion_no_creep_constant, criterion_creep_linear,      criterion_oracle_table1,
      criterion_oracle_two_sided, criterion_tilt_classification, criterion_renewal,
      criterion_mixture_single,   criterion_gamma_branches,      criterion_determinism,
  };
  if (id < 1 || id > kCriteria) throw ParameterError("validation: criterion ids run from 1 to 12");
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r = fns[id - 1](o);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

/// One report line, e.g. "[PASS] 3 first-passage time ... stat=0.0081 p=0.52 | n=10000".
inline std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.name << " stat=" << detail::fmt("%.4g", r.statistic);
  if (!std::isnan(r.p_value)) os << " p=" << detail::fmt("%.4g", r.p_value);
  os << " | " << r.detail;
  return os.str();
}

}  // namespace levypass
