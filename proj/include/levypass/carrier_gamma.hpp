// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "levypass/boundary.hpp"
#include "levypass/carrier_common.hpp"
#include "levypass/distributions.hpp"
#include "levypass/errors.hpp"
#include "levypass/events.hpp"
#include "levypass/finite_measure.hpp"
#include "levypass/model.hpp"
#include "levypass/roots.hpp"
#include "levypass/special.hpp"

namespace levypass {

/// Jump-branch pieces of the Gamma crossing law at (t, z). With
/// y = 1 - x/z, branch 1 covers z - x < v <= z and branch 2 covers v > z;
/// w_i h_i rho_i reproduces (x/z)^{t-1} e^{z-x-v} / v on each region.
struct GammaBranches {
  double t;
  double z;

  double w1() const {
    return 2.0 * std::exp(std::lgamma(t) + std::lgamma(0.5) - std::lgamma(t + 0.5)) * z / std::numbers::e;
  }
  double w2() const { return 1.0 / t; }

  double h1(double x, double v) const {
    if (!(z - x >= 0 && z - x < v && v <= z)) return 0.0;
    const double y = 1.0 - x / z;
    return std::exp(z - x - v + 1.0) * std::sqrt(y) * -std::log(y) / 2.0;
  }
  double h2(double x, double v) const {
    if (!(z - x >= 0 && z - x < z && z < v)) return 0.0;
    return z * std::exp(-x) / v;
  }
  double rho1(double x, double v) const {
    if (!(z - x >= 0 && z - x < v && v <= z)) return 0.0;
    const double y = 1.0 - x / z;
    const double log_b = std::lgamma(t) + std::lgamma(0.5) - std::lgamma(t + 0.5);
    return std::exp((t - 1.0) * std::log(x / z) - 0.5 * std::log(y) - log_b) / z /
           (v * -std::log(y));
  }
  double rho2(double x, double v) const {
    if (!(z - x >= 0 && z - x < z && z <= v)) return 0.0;
    return t * std::exp((t - 1.0) * std::log(x / z) + z - v) / z;
  }
  /// (x/z)^{t-1} e^{z-x-v} / v on {0 <= z - x < v}.
  double target(double x, double v) const {
    if (!(z - x >= 0 && z - x < v)) return 0.0;
    return std::exp((t - 1.0) * std::log(x / z) + z - x - v) / v;
  }
};

/// Gamma process carrier, Lambda(dx) = x^{-1} e^{-x} dx, S(t) ~ Gamma(t, 1).
/// The tilt is built in, so the crossing left value is already the target
/// component and recovery is the identity.
class GammaCarrier {
 public:
  /// t solving Q(t, a(t)) = U, Q the regularized upper incomplete gamma.
  FptDraw sample_fpt(const CappedBoundary& a, RngStream& rng) const {
    const double u = rng.uniform();
    return {passage_for_uniform(a, u), {u}};
  }

  double passage_for_uniform(const CappedBoundary& a, double u) const {
    if (a.is_infinite()) return std::numeric_limits<double>::infinity();
    if (!(a.value(0.0) > 0)) throw ContractViolation("gamma fpt: a(0+) must be positive");
    return solve_increasing_in_time([&](double t) {
      const double level = a.value(t);
      if (level <= 0) return 1.0 - u;
      return gamma_q(t, level) - u;
    });
  }

  CrossingDraw sample_crossing(double t, double z, double w0, RngStream& rng) const {
    if (!(t > 0 && z > 0 && std::isfinite(z))) throw ParameterError("gamma crossing: need t, z > 0");
    if (!(w0 >= 0)) throw ParameterError("gamma crossing: w0 must be non-negative");
    const GammaBranches br{t, z};
    const double w1 = br.w1();
    const double w2 = br.w2();
    const double total = w0 + w1 + w2;
    const double log_z = std::log(z);
    for (;;) {
      const double pick = rng.uniform() * total;
      CrossingDraw d;
      double log_eta = 0;
      if (pick < w0) {
        d.s_left = z;
        d.creep = true;
      } else if (pick < w0 + w1) {
        const BetaDraw b = sample_beta_draw(t, 0.5, rng);
        const double xi = rng.uniform();
        d.s_left = z * b.value;
        d.level_gap = std::exp(log_z + b.log1m_value);
        d.jump = std::exp(log_z + xi * b.log1m_value);
        if (!(b.log1m_value < 0)) continue;
        log_eta = d.level_gap - d.jump + 0.5 * b.log1m_value + std::log(-b.log1m_value) + 1.0 -
                  std::log(2.0);
      } else {
        const BetaDraw b = sample_beta_draw(t, 1.0, rng);
        d.s_left = z * b.value;
        d.level_gap = std::exp(log_z + b.log1m_value);
        d.jump = z + sample_std_exponential(rng);
        log_eta = log_z - d.s_left - std::log(d.jump);
      }
      if (std::log(rng.uniform()) <= log_eta) return d;
    }
  }

  /// Gamma(t, 1) conditioned on being <= z, by plain rejection.
  CrossingDraw sample_value_below(double t, double z, RngStream& rng,
                                  RejectionStats* stats = nullptr) const {
    if (!(t > 0 && z > 0)) throw ParameterError("gamma value_below: need t, z > 0");
    std::uint64_t n = 0;
    for (;;) {
      ++n;
      const double s = std::exp(sample_log_gamma(t, rng));
      if (s <= z) {
        if (stats) {
          stats->proposals += n;
          ++stats->calls;
          if (n > RejectionStats::warn_after) stats->low_efficiency = true;
        }
        CrossingDraw d;
        d.s_left = s;
        d.level_gap = std::isinf(z) ? z : z - s;
        return d;
      }
    }
  }

  Recovered recover(double, const CrossingDraw& d, double, double, RngStream&) const {
    return {d.s_left, 0.0};
  }
};

/// Undo record for the Gamma rescaling Z(t) = q Z~(t / gamma).
struct GammaReduction {
  double gamma = 1;
  double q = 1;

  double to_standard_time(double t_orig) const { return gamma * t_orig; }
  FirstPassageEvent to_original(const FirstPassageEvent& e) const {
    return {e.T / gamma, e.z_left / q, e.jump / q, e.censored};
  }
};

struct ReducedGamma {
  TiltedTruncatedModel model;
  Boundary boundary;
  GammaReduction reduction;
};

/// Maps a Lévy measure 1{x <= r~} gamma~ e^{-q~ x} x^{-1} dx + chi~ and
/// boundary c~ to the standard Gamma form: r = q~ r~, chi is the image of
/// chi~ under x -> q~ x with intensity divided by gamma~, and the boundary
/// becomes q~ c~(t / gamma~). Passage events map back through
/// GammaReduction::to_original.
inline ReducedGamma reduce_general(double gamma_tilde, double q_tilde, double r_tilde,
                                   const FiniteMeasure& chi_tilde, const Boundary& c_tilde) {
  if (!(gamma_tilde > 0 && q_tilde > 0)) throw ParameterError("reduce_general: gamma and q must be positive");
  if (!(r_tilde > 0)) throw ParameterError("reduce_general: r must be positive");
  FiniteMeasure chi = chi_tilde.empty() ? FiniteMeasure{} : chi_tilde.scaled(1.0 / gamma_tilde, q_tilde);
  return {gamma_model(q_tilde * r_tilde, std::move(chi)), c_tilde.scaled(gamma_tilde, q_tilde),
          {gamma_tilde, q_tilde}};
}

}  // namespace levypass
