// SPDX-License-Identifier: Apache-2.0
#pragma once

// Approximate simulation by small-jump truncation, used to cross-check the
// exact samplers. Jumps below epsilon are dropped (or replaced by their
// mean as a drift); everything else is an ordinary compound Poisson path
// simulated event by event.

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <variant>

#include "levypass/boundary.hpp"
#include "levypass/errors.hpp"
#include "levypass/events.hpp"
#include "levypass/finite_measure.hpp"
#include "levypass/model.hpp"
#include "levypass/rng.hpp"
#include "levypass/stable.hpp"

namespace levypass {

struct TruncationScheme {
  double epsilon = 1e-4;
  bool compensate_drift = false;
};

/// Jump-count ceiling past which the oracle refuses to run.
inline constexpr double kOracleMaxJumps = 1e8;

namespace detail {

inline void check_scheme(const TiltedTruncatedModel& m, const TruncationScheme& s) {
  if (!(s.epsilon > 0) || !std::isfinite(s.epsilon)) throw ParameterError("oracle: epsilon must be positive");
  if (m.has_carrier() && !(s.epsilon < m.r)) throw ParameterError("oracle: epsilon must lie below r");
}

// int_0^eps x^{-alpha} e^{-q x} dx
inline double small_jump_mean(double alpha, double q, double eps) {
  if (q == 0) return std::pow(eps, 1.0 - alpha) / (1.0 - alpha);
  return boost::math::tgamma_lower(1.0 - alpha, q * eps) * std::pow(q, alpha - 1.0);
}

}  // namespace detail

/// Jumps of the target above epsilon: the carrier part restricted to
/// (epsilon, r] plus chi.
inline FiniteMeasure truncated_measure(const TiltedTruncatedModel& m, const TruncationScheme& s) {
  detail::check_scheme(m, s);
  FiniteMeasure out;
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, StableSpec>) {
          out.add_piece(power_law_piece(k.gamma, k.alpha, m.q, s.epsilon, m.r));
        } else if constexpr (std::is_same_v<K, MixtureSpec>) {
          for (const auto& c : k.components) out.add_piece(power_law_piece(c.gamma, c.alpha, m.q, s.epsilon, m.r));
        } else if constexpr (std::is_same_v<K, GammaSpec>) {
          const double mid = std::min(m.r, std::max(1.0, s.epsilon));
          if (mid > s.epsilon) out.add_piece(power_law_piece(1.0, 0.0, 1.0, s.epsilon, mid));
          if (m.r > mid) out.add_piece(exponential_tail_piece(mid, m.r));
        }
      },
      m.carrier);
  out.add(m.chi);
  return out;
}

/// Model drift plus, when compensating, the mean of the dropped jumps.
inline double truncated_drift(const TiltedTruncatedModel& m, const TruncationScheme& s) {
  detail::check_scheme(m, s);
  double d = m.drift;
  if (!s.compensate_drift) return d;
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, StableSpec>) {
          d += k.gamma * detail::small_jump_mean(k.alpha, m.q, s.epsilon);
        } else if constexpr (std::is_same_v<K, MixtureSpec>) {
          for (const auto& c : k.components) d += c.gamma * detail::small_jump_mean(c.alpha, m.q, s.epsilon);
        } else if constexpr (std::is_same_v<K, GammaSpec>) {
          d += -std::expm1(-s.epsilon);
        }
      },
      m.carrier);
  return d;
}

namespace detail {

// One side of a truncated path: compound Poisson jumps plus linear drift.
struct OracleSide {
  FiniteMeasure jumps;
  double drift = 0;
  double level = 0;  // jump part plus drift accrued up to the current time
  std::uint64_t count = 0;

  FirstJump next(double horizon, RngStream& rng) {
    const FirstJump j = jumps.first_jump(horizon, rng);
    if (j.time < horizon && ++count > kOracleMaxJumps)
      throw OracleRefused("oracle: more than 1e8 jumps; epsilon is too small");
    return j;
  }
};

inline void refuse_if_heavy(double rate, double horizon) {
  if (std::isfinite(horizon) && rate * horizon > kOracleMaxJumps)
    throw OracleRefused("oracle: expected jump count " + std::to_string(rate * horizon) +
                        " exceeds 1e8; epsilon is too small");
}

// First s in [t0, t1] with g(s) <= 0 for non-increasing g, or +inf.
template <class G>
double first_nonpositive(G g, double t0, double t1) {
  if (g(t1) > 0) return std::numeric_limits<double>::infinity();
  if (g(t0) <= 0) return t0;
  double lo = t0, hi = t1;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > 0) lo = mid;
    else hi = mid;
  }
  return hi;
}

}  // namespace detail

/// Truncated-path first passage of Z across c, censored at K.
inline FirstPassageEvent oracle_fpe(const TiltedTruncatedModel& model, const Boundary& c, double K,
                                    const TruncationScheme& scheme, RngStream& rng) {
  model.validate();
  if (!(K > 0)) throw ParameterError("oracle_fpe: K must be positive");
  if (c.is_infinite() && std::isinf(K)) throw ParameterError("oracle_fpe: K must be finite when c is infinite");
  detail::OracleSide z{truncated_measure(model, scheme), truncated_drift(model, scheme)};
  detail::refuse_if_heavy(z.jumps.envelope_mass(), K);
  double t = 0;
  for (;;) {
    const FirstJump j = z.next(std::isinf(K) ? std::numeric_limits<double>::max() : K - t, rng);
    const double t_end = t + j.time;
    if (z.drift > 0 || !c.is_constant()) {
      const double z0 = z.level, t0 = t, d = z.drift;
      const double s = detail::first_nonpositive([&](double u) { return c.value(u) - z0 - d * (u - t0); }, t0,
                                                 std::min(t_end, K));
      if (std::isfinite(s)) return {s, z0 + d * (s - t0), 0.0, false};
    }
    z.level += z.drift * j.time;
    t = t_end;
    if (j.size == 0 || t >= K) return {K, z.level, 0.0, true};
    if (z.level + j.size >= c.value(t)) return {t, z.level, j.size, false};
    z.level += j.size;
  }
}

namespace detail {

// Shared loop for the two-sided oracles. `exit_below` is the lower exit
// level (-inf in level mode).
inline BVExitEvent oracle_two_sided(const TiltedTruncatedModel& plus, const TiltedTruncatedModel& minus,
                                    double exit_below, double exit_above, double K,
                                    const TruncationScheme& scheme, RngStream& rng) {
  plus.validate();
  minus.validate();
  if (!(K > 0)) throw ParameterError("oracle: K must be positive");
  OracleSide p{truncated_measure(plus, scheme), truncated_drift(plus, scheme)};
  OracleSide m{truncated_measure(minus, scheme), truncated_drift(minus, scheme)};
  refuse_if_heavy(p.jumps.envelope_mass() + m.jumps.envelope_mass(), K);
  const double inf_h = std::numeric_limits<double>::max();
  double t = 0;
  for (;;) {
    const double horizon = std::isinf(K) ? inf_h : K - t;
    const FirstJump jp = p.next(horizon, rng);
    const FirstJump jm = m.next(horizon, rng);
    const bool plus_first = jp.time <= jm.time;
    const FirstJump& j = plus_first ? jp : jm;
    // The losing side's draw is discarded; by memorylessness it is redrawn.
    if (plus_first && jm.time == jp.time && jp.size > 0 && jm.size > 0) continue;
    const double net = p.drift - m.drift;
    const double zp0 = p.level, zm0 = m.level, t0 = t;
    const double t_end = std::min(t + j.time, K);
    if (net != 0) {
      const double z0 = zp0 - zm0;
      double s = std::numeric_limits<double>::infinity();
      if (net > 0) s = first_nonpositive([&](double u) { return exit_above - z0 - net * (u - t0); }, t0, t_end);
      else if (std::isfinite(exit_below))
        s = first_nonpositive([&](double u) { return z0 + net * (u - t0) - exit_below; }, t0, t_end);
      if (std::isfinite(s))
        return {s, zp0 + p.drift * (s - t0), zm0 + m.drift * (s - t0), 0.0, 0.0, false};
    }
    p.level += p.drift * j.time;
    m.level += m.drift * j.time;
    t += j.time;
    if (j.size == 0 || t >= K) return {K, p.level, m.level, 0.0, 0.0, true};
    const double zl = p.level - m.level;
    if (plus_first) {
      if (zl + j.size >= exit_above) return {t, p.level, m.level, j.size, 0.0, false};
      p.level += j.size;
    } else {
      if (zl - j.size <= exit_below) return {t, p.level, m.level, 0.0, j.size, false};
      m.level += j.size;
    }
  }
}

}  // namespace detail

/// Truncated-path first passage of Z+ - Z- above the level a.
inline BVExitEvent oracle_level(const TiltedTruncatedModel& plus, const TiltedTruncatedModel& minus, double a,
                                double K, const TruncationScheme& scheme, RngStream& rng) {
  if (!(a > 0)) throw ParameterError("oracle_level: a must be positive");
  return detail::oracle_two_sided(plus, minus, -std::numeric_limits<double>::infinity(), a, K, scheme, rng);
}

/// Truncated-path exit of Z+ - Z- from (-a_minus, a_plus).
inline BVExitEvent oracle_interval(const TiltedTruncatedModel& plus, const TiltedTruncatedModel& minus,
                                   double a_minus, double a_plus, double K, const TruncationScheme& scheme,
                                   RngStream& rng) {
  if (!(a_minus > 0 && a_plus > 0)) throw ParameterError("oracle_interval: levels must be positive");
  return detail::oracle_two_sided(plus, minus, -a_minus, a_plus, K, scheme, rng);
}

/// P{tau_a <= t} = P{S(t) >= a} for the untilted, untruncated carrier.
/// Gamma: Q(t, a). Stable: with y = a (rho t)^{-1/alpha},
/// P{X >= y} = 1 - (1/pi) int_0^pi exp(-h0(theta) y^{-alpha/(1-alpha)}) dtheta,
/// the x-integral of the h-representation done in closed form.
inline double eval_fpt_cdf(const CarrierSpec& carrier, double a, double t) {
  if (!(a > 0)) throw ParameterError("eval_fpt_cdf: a must be positive");
  if (!(t >= 0)) throw ParameterError("eval_fpt_cdf: t must be non-negative");
  if (t == 0) return 0.0;
  if (std::isinf(t)) return 1.0;
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, GammaSpec>) {
          return boost::math::gamma_q(t, a);
        } else if constexpr (std::is_same_v<K, StableSpec>) {
          const StableIntegrand f(k.alpha);
          const double rho = k.gamma * std::tgamma(1.0 - k.alpha) / k.alpha;
          const double log_y = std::log(a) - std::log(rho * t) / k.alpha;
          const double ratio = k.alpha / (1.0 - k.alpha);
          auto cdf_theta = [&](double theta) {
            const double e = f.log_h0(theta) - ratio * log_y;
            return e > 700 ? 0.0 : std::exp(-std::exp(e));
          };
          boost::math::quadrature::tanh_sinh<double> quad;
          double err = 0;
          const double below = quad.integrate(cdf_theta, 0.0, std::numbers::pi, 1e-10, &err) / std::numbers::pi;
          if (!std::isfinite(below) || err > 1e-6)
            throw NumericalError("eval_fpt_cdf: quadrature did not converge (error estimate " +
                                 std::to_string(err) + ")");
          return std::clamp(1.0 - below, 0.0, 1.0);
        } else {
          throw UnsupportedModel("eval_fpt_cdf: only Gamma and stable carriers");
        }
      },
      carrier);
}

}  // namespace levypass
