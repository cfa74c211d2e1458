// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "levypass/boundary.hpp"
#include "levypass/carriers.hpp"
#include "levypass/errors.hpp"
#include "levypass/events.hpp"
#include "levypass/finite_measure.hpp"
#include "levypass/model.hpp"
#include "levypass/rng.hpp"

namespace levypass {

/// One pass through the sampling loop. `boundary` is b(0+) of the
/// boundary in force when the pass started; `gap` is what is left to the
/// boundary at its end (<= 0 once the boundary is reached).
struct IterationRecord {
  double t = 0;
  double s = 0;
  double v = 0;
  double x = 0;
  double delta = 0;
  double z = 0;
  double boundary = 0;
  double gap = 0;
  bool creep = false;
  bool at_jump = false;
  bool kept = false;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  std::uint64_t iterations = 0;
  RejectionStats rejection;
  std::uint64_t ties_resampled = 0;
};

struct EngineOptions {
  std::uint64_t max_iterations = 1000000;
  bool record_trace = false;
  /// Level crossing with K = inf needs limsup Z = inf, which the caller
  /// has to vouch for.
  bool assert_divergence = false;
};

class GuardTripped : public std::runtime_error {
 public:
  GuardTripped(const std::string& what, IterationTrace trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const IterationTrace& trace() const { return trace_; }

 private:
  IterationTrace trace_;
};

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Carrier-side draws at the end of one step of length t: the crossing pair
// when the carrier passed its capped level first, otherwise the value below
// that level; then X_1 recovery and the tilt/cutoff classification of the
// jump.
struct SideStep {
  CrossingDraw draw;
  Recovered rec;
  double level = 0;   // a(t) = min(b(t), r)
  double kept_v = 0;  // jump after classification
  bool kept = false;
};

inline SideStep side_step(const Carrier& carrier, const TiltedTruncatedModel& m,
                          const CappedBoundary& a, double t, bool crossed, RngStream& rng,
                          RejectionStats* stats) {
  SideStep out;
  out.level = a.value(t);
  if (crossed) {
    out.draw = carrier_crossing(carrier, t, out.level, a.descent_rate(t), rng);
  } else {
    out.draw = carrier_value_below(carrier, t, out.level, rng, stats);
  }
  out.rec = carrier_recover(carrier, t, out.draw, m.q, m.r, rng);
  const double v = out.draw.jump;
  if (v > 0) {
    const double u = rng.uniform();
    out.kept = v <= m.r && u <= std::exp(-m.q * v);
    out.kept_v = out.kept ? v : 0.0;
  }
  return out;
}

// b(t) - (x + delta), assembled from the parts that are known without
// cancellation: b(t) - a(t), a(t) - s, s - x.
inline double remaining_gap(double b_t, const SideStep& st, double delta) {
  if (std::isinf(b_t)) return kInf;
  const double cap_gap = b_t - st.level;
  const double level_gap = st.draw.creep ? 0.0 : st.draw.level_gap;
  return cap_gap + level_gap + st.rec.gap - delta;
}

}  // namespace detail

/// The subordinator loop, one iteration per step() call, so that a run can
/// be inspected or stopped between iterations.
class SubordinatorRun {
 public:
  SubordinatorRun(const TiltedTruncatedModel& model, const Boundary& c, double K,
                  EngineOptions opt = {})
      : model_(model), carrier_(make_carrier(model.carrier)), opt_(opt) {
    model_.validate();
    if (!(K > 0)) throw ParameterError("subordinator fpe: K must be positive");
    if (c.is_infinite() && std::isinf(K))
      throw ParameterError("subordinator fpe: K must be finite when the boundary is infinite");
    if (!c.is_infinite() && !(c.value(0.0) > 0))
      throw ParameterError("subordinator fpe: c(0+) must be positive");
    b_ = c.minus_drift(model_.drift);
    A_ = K;
    K_ = K;
  }

  bool done() const { return done_; }
  double elapsed() const { return T_; }
  double level() const { return H_; }
  double remaining_horizon() const { return A_; }
  const Boundary& boundary() const { return b_; }
  const IterationTrace& trace() const { return trace_; }

  /// Runs one iteration; returns true when the run has finished.
  bool step(RngStream& rng) {
    if (done_) return true;
    if (++trace_.iterations > opt_.max_iterations)
      throw GuardTripped("subordinator fpe: iteration guard tripped after " +
                             std::to_string(opt_.max_iterations) + " iterations",
                         trace_);
    if (D_ == 0) {
      const FirstJump fj = model_.chi.first_jump(A_, rng);
      D_ = fj.time;
      J_ = fj.size;
    }
    const CappedBoundary a(b_, model_.r);
    double t1 = carrier_fpt(carrier_, a, rng).time;
    while (t1 == D_ && std::isfinite(t1)) {
      ++trace_.ties_resampled;
      t1 = carrier_fpt(carrier_, a, rng).time;
    }
    const bool crossed = t1 < D_;
    const double t = crossed ? t1 : D_;
    if (!std::isfinite(t))
      throw ContractViolation("subordinator fpe: no passage and no terminal point");

    const detail::SideStep st =
        detail::side_step(carrier_, model_, a, t, crossed, rng, &trace_.rejection);
    const double delta = st.kept_v + (crossed ? 0.0 : J_);
    const double z = st.rec.x + delta;
    const double gap = detail::remaining_gap(b_.value(t), st, delta);

    if (opt_.record_trace) {
      trace_.records.push_back({t, st.draw.s_left, st.draw.jump, st.rec.x, delta, z, b_.value(0.0),
                                gap, st.draw.creep, !crossed, st.kept});
    }
    last_ = st;

    left_ = H_ + st.rec.x;
    T_ += t;
    H_ += z;
    delta_ = delta;
    if (gap > 0 && t < A_) {
      A_ -= t;
      D_ -= t;
      b_ = b_.rebased(t, gap);
      return false;
    }
    done_ = true;
    censored_ = gap > 0;
    // the step lengths only sum to K up to rounding
    if (censored_) T_ = K_;
    return true;
  }

  FirstPassageEvent run(RngStream& rng) {
    while (!step(rng)) {
    }
    return event();
  }

  FirstPassageEvent event() const {
    if (!done_) throw ContractViolation("subordinator fpe: run not finished");
    return {T_, left_ + model_.drift * T_, delta_, censored_};
  }

  /// Carrier draws of the last iteration (used by diagnostics and tests).
  const detail::SideStep& last_step() const { return last_; }

 private:
  TiltedTruncatedModel model_;
  Carrier carrier_;
  EngineOptions opt_;
  Boundary b_ = Boundary::infinite();
  double A_ = 0;
  double K_ = 0;
  double D_ = 0;
  double J_ = 0;
  double T_ = 0;
  double H_ = 0;
  double left_ = 0;
  double delta_ = 0;
  bool done_ = false;
  bool censored_ = false;
  detail::SideStep last_;
  IterationTrace trace_;
};

/// (tau ^ K, Z(tau ^ K -), Delta Z(tau ^ K)) for the subordinator with the
/// model's Lévy measure (plus drift) across c.
inline FirstPassageEvent sample_subordinator_fpe(const TiltedTruncatedModel& model, const Boundary& c,
                                                 double K, RngStream& rng, const EngineOptions& opt = {},
                                                 IterationTrace* trace = nullptr) {
  SubordinatorRun run(model, c, K, opt);
  const FirstPassageEvent e = run.run(rng);
  if (trace) *trace = run.trace();
  return e;
}

/// Z(t) for the infinitely divisible law of the model at time t.
inline double sample_id(const TiltedTruncatedModel& model, double t, RngStream& rng,
                        const EngineOptions& opt = {}) {
  if (!(t > 0 && std::isfinite(t))) throw ParameterError("sample_id: t must be positive and finite");
  // Without a cutoff S(t) is unbounded and recovery given a large sum is
  // hopeless, so tilted stable parts are drawn directly.
  if (std::isinf(model.r) && model.q > 0) {
    double x = 0;
    bool direct = true;
    if (const auto* k = std::get_if<StableSpec>(&model.carrier)) {
      model.validate();
      x = StableCarrier(k->alpha, k->gamma).sample_tilted_marginal(t, model.q, rng);
    } else if (const auto* mix = std::get_if<MixtureSpec>(&model.carrier)) {
      model.validate();
      for (const auto& c : mix->components)
        x += StableCarrier(c.alpha, c.gamma).sample_tilted_marginal(t, model.q, rng);
    } else {
      direct = false;
    }
    if (direct) {
      TiltedTruncatedModel rest = model;
      rest.carrier = NoCarrier{};
      if (rest.is_zero()) return x;
      return x + sample_subordinator_fpe(rest, Boundary::infinite(), t, rng, opt).z_final();
    }
  }
  return sample_subordinator_fpe(model, Boundary::infinite(), t, rng, opt).z_final();
}

/// First passage of Z = Z+ - Z- above the constant a, stopped at K. The
/// minus side may carry a drift; the plus side must be driftless.
inline BVExitEvent sample_level_crossing(const TiltedTruncatedModel& plus,
                                         const TiltedTruncatedModel& minus, double a, double K,
                                         RngStream& rng, const EngineOptions& opt = {},
                                         IterationTrace* trace = nullptr) {
  plus.validate();
  minus.validate();
  if (!(a > 0)) throw ParameterError("level crossing: a must be positive");
  if (!(K > 0)) throw ParameterError("level crossing: K must be positive");
  if (plus.drift != 0) throw ParameterError("level crossing: the plus side must be driftless");
  if (std::isinf(K) && !opt.assert_divergence)
    throw ConfigError("level crossing: K = inf needs assert_divergence");
  if (plus.is_zero()) throw ParameterError("level crossing: the plus side is zero");

  IterationTrace local;
  double T = 0, hp = 0, hm = 0, A = K, b = a;
  for (;;) {
    if (++local.iterations > opt.max_iterations)
      throw GuardTripped("level crossing: iteration guard tripped", local);
    EngineOptions inner = opt;
    inner.record_trace = false;
    const FirstPassageEvent ev = sample_subordinator_fpe(plus, Boundary::constant(b), A, rng, inner);
    const double t = ev.T;
    const double x = ev.z_final();
    const double zm = sample_id(minus, t, rng, inner);
    const double zp_left = hp + ev.z_left;
    T += t;
    hp += x;
    hm += zm;
    // b - (x - zm), with b - x taken from the plus run's own bookkeeping.
    const double gap = (b - ev.z_left - ev.jump) + zm;
    if (opt.record_trace)
      local.records.push_back({t, ev.z_left, ev.jump, x, ev.jump, x - zm, b, gap, false, false, true});
    if (gap > 0 && !ev.censored) {
      A -= t;
      b = gap;
      continue;
    }
    if (trace) *trace = std::move(local);
    return {ev.censored ? K : T, zp_left, hm, ev.jump, 0.0, ev.censored};
  }
}

/// First exit of Z = Z+ - Z- from [-a_minus, a_plus], stopped at K. Both
/// sides driftless, not both compound Poisson.
inline BVExitEvent sample_interval_exit(const TiltedTruncatedModel& plus,
                                        const TiltedTruncatedModel& minus, double a_minus,
                                        double a_plus, double K, RngStream& rng,
                                        const EngineOptions& opt = {},
                                        IterationTrace* trace = nullptr) {
  plus.validate();
  minus.validate();
  if (!(a_minus > 0 && a_plus > 0)) throw ParameterError("interval exit: a_minus, a_plus must be positive");
  if (!(K > 0)) throw ParameterError("interval exit: K must be positive");
  if (plus.drift != 0 || minus.drift != 0) throw ParameterError("interval exit: both sides must be driftless");
  if (!plus.has_carrier() && !minus.has_carrier())
    throw ConfigError("interval exit: both sides are compound Poisson");

  const Carrier cp = make_carrier(plus.carrier);
  const Carrier cm = make_carrier(minus.carrier);
  IterationTrace local;
  double T = 0, hp = 0, hm = 0, A = K, D = 0, J = 0, bp = a_plus, bm = a_minus;
  for (;;) {
    if (++local.iterations > opt.max_iterations)
      throw GuardTripped("interval exit: iteration guard tripped", local);
    if (D == 0) {
      // The first jump of chi+ + chi- is the earlier of the two sides' first jumps.
      const FirstJump jp = plus.chi.first_jump(A, rng);
      const FirstJump jm = minus.chi.first_jump(A, rng);
      if (jp.time < jm.time) {
        D = jp.time;
        J = jp.size;
      } else if (jm.time < jp.time) {
        D = jm.time;
        J = -jm.size;
      } else {
        D = jp.time;
        J = 0;
      }
    }
    const Boundary bp_b = Boundary::constant(bp);
    const Boundary bm_b = Boundary::constant(bm);
    const CappedBoundary ap(bp_b, plus.r), am(bm_b, minus.r);
    double tp = carrier_fpt(cp, ap, rng).time;
    double tm = carrier_fpt(cm, am, rng).time;
    while (std::isfinite(tp) && (tp == tm || tp == D)) {
      ++local.ties_resampled;
      tp = carrier_fpt(cp, ap, rng).time;
    }
    while (std::isfinite(tm) && tm == D) {
      ++local.ties_resampled;
      tm = carrier_fpt(cm, am, rng).time;
    }
    const double t = std::min({tp, tm, D});
    if (!std::isfinite(t)) throw ContractViolation("interval exit: no exit and no terminal point");
    const bool at_jump = t == D;

    const detail::SideStep sp = detail::side_step(cp, plus, ap, t, t == tp, rng, &local.rejection);
    const detail::SideStep sm = detail::side_step(cm, minus, am, t, t == tm, rng, &local.rejection);
    const double dp = sp.kept_v + (at_jump ? std::max(J, 0.0) : 0.0);
    const double dm = sm.kept_v + (at_jump ? std::max(-J, 0.0) : 0.0);
    const double zp = sp.rec.x + dp;
    const double zm = sm.rec.x + dm;
    const double gp = detail::remaining_gap(bp, sp, dp) + zm;
    const double gm = detail::remaining_gap(bm, sm, dm) + zp;

    if (opt.record_trace)
      local.records.push_back({t, sp.draw.s_left - sm.draw.s_left, sp.draw.jump + sm.draw.jump,
                               sp.rec.x - sm.rec.x, dp - dm, zp - zm, bp, std::min(gp, gm), false,
                               at_jump, sp.kept || sm.kept});
    const double zp_left = hp + sp.rec.x;
    const double zm_left = hm + sm.rec.x;
    T += t;
    hp += zp;
    hm += zm;
    if (gp > 0 && gm > 0 && t < A) {
      A -= t;
      D -= t;
      bp = gp;
      bm = gm;
      continue;
    }
    if (trace) *trace = std::move(local);
    const bool censored = gp > 0 && gm > 0;
    return {censored ? K : T, zp_left, zm_left, dp, dm, censored};
  }
}

}  // namespace levypass
