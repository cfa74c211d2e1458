// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "levypass/boundary.hpp"
#include "levypass/carrier_common.hpp"
#include "levypass/distributions.hpp"
#include "levypass/errors.hpp"
#include "levypass/roots.hpp"
#include "levypass/special.hpp"
#include "levypass/stable.hpp"

namespace levypass {

namespace detail {

// Discrete law on 0..n-1 from unnormalized log weights.
class LogWeightTable {
 public:
  explicit LogWeightTable(const std::vector<double>& logs) {
    const double lmax = *std::max_element(logs.begin(), logs.end());
    cumulative_.resize(logs.size());
    double sum = 0;
    for (std::size_t k = 0; k < logs.size(); ++k) {
      sum += std::exp(logs[k] - lmax);
      cumulative_[k] = sum;
    }
    for (double& c : cumulative_) c /= sum;
  }

  int sample(RngStream& rng) const {
    const double u = rng.uniform();
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative_.begin(), cumulative_.size() - 1));
  }

  double probability(int k) const {
    if (k < 0 || k >= static_cast<int>(cumulative_.size())) return 0.0;
    return cumulative_[k] - (k > 0 ? cumulative_[k - 1] : 0.0);
  }
  std::size_t size() const { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
};

}  // namespace detail

/// Stable subordinator carrier with Lévy density gamma x^{-1-alpha}.
///
/// S(t) has the law of (rho t)^{1/alpha} X with X standard stable and
/// rho = gamma Gamma(1-alpha) / alpha, so all h-evaluations happen at the
/// standardized point (rho t)^{-1/alpha} s.
class StableCarrier {
 public:
  StableCarrier(double alpha, double gamma) : integrand_(alpha), gamma_(gamma) {
    if (!(gamma > 0)) throw ParameterError("stable carrier: gamma must be positive");
    time_scale_ = gamma * std::tgamma(1.0 - alpha) / alpha;
    log_time_scale_ = std::log(time_scale_);
    log_tail_constant_ = cached_stable_tail_log_constant(alpha);
  }

  double alpha() const { return integrand_.alpha(); }
  double gamma() const { return gamma_; }
  double time_scale() const { return time_scale_; }
  const StableIntegrand& integrand() const { return integrand_; }
  double log_tail_constant() const { return log_tail_constant_; }

  /// log of the factor (rho t)^{-1/alpha} mapping S(t) values to the standard law.
  double log_standardizer(double t) const { return -(log_time_scale_ + std::log(t)) / alpha(); }

  /// Passage time of S across a(t): the root of (rho t)^{1/alpha} S(1) = a(t)
  /// with S(1) standard stable. Infinite when a is identically infinite.
  FptDraw sample_fpt(const CappedBoundary& a, RngStream& rng) const {
    const double log_x = integrand_.sample_log(rng);
    return {passage_for_draw(a, log_x), {std::exp(log_x)}};
  }

  double passage_for_draw(const CappedBoundary& a, double log_x) const {
    if (a.is_infinite()) return std::numeric_limits<double>::infinity();
    if (!(a.value(0.0) > 0)) throw ContractViolation("stable fpt: a(0+) must be positive");
    if (a.is_constant()) {
      return std::exp(alpha() * (std::log(a.value(0.0)) - log_x)) / time_scale_;
    }
    const double inv_alpha = 1.0 / alpha();
    return solve_increasing_in_time([&](double t) {
      const double level = a.value(t);
      if (level <= 0) return std::numeric_limits<double>::infinity();
      return (log_time_scale_ + std::log(t)) * inv_alpha + log_x - std::log(level);
    });
  }

  /// (S(t-), Delta S(t)) given the passage across a at time t, where
  /// z = a(t) and w0 = -a'(t). See detail::stable_sum_crossing.
  CrossingDraw sample_crossing(double t, double z, double w0, RngStream& rng) const;

  /// S(t) under the tilt e^{-q x} with no cutoff. The tilted law is
  /// infinitely divisible, so t is cut into n pieces with rho (t/n) q^alpha
  /// <= 1 and each piece is drawn by rejection from S(t/n) with acceptance
  /// e^{-q s}.
  double sample_tilted_marginal(double t, double q, RngStream& rng) const {
    if (!(t > 0 && std::isfinite(t))) throw ParameterError("tilted marginal: t must be positive and finite");
    if (!(q >= 0 && std::isfinite(q))) throw ParameterError("tilted marginal: q must be finite and >= 0");
    const double lscale = -log_standardizer(t);
    if (q == 0) return std::exp(lscale + integrand_.sample_log(rng));
    const double pieces = std::ceil(time_scale_ * t * std::pow(q, alpha()));
    if (pieces > 1e9) throw NumericalError("tilted marginal: too many pieces");
    const auto n = static_cast<std::uint64_t>(pieces);
    const double lpiece = -log_standardizer(t / pieces);
    double sum = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      for (;;) {
        const double s = std::exp(lpiece + integrand_.sample_log(rng));
        if (rng.uniform() <= std::exp(-q * s)) {
          sum += s;
          break;
        }
      }
    }
    return sum;
  }

  /// S(t) conditioned on S(t) <= z, by plain rejection from the marginal.
  CrossingDraw sample_value_below(double t, double z, RngStream& rng,
                                  RejectionStats* stats = nullptr) const {
    if (!(t > 0 && z > 0)) throw ParameterError("stable value_below: need t, z > 0");
    const double lscale = -log_standardizer(t);
    std::uint64_t n = 0;
    for (;;) {
      ++n;
      const double s = std::exp(lscale + integrand_.sample_log(rng));
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

  /// X_1(t) given X_1(t) + X_2(t) = s, where X_1 has Lévy density
  /// gamma e^{-q x} x^{-1-alpha} 1{x <= r} and X_2 the complementary
  /// (1 - e^{-q x}) part. kappa counts the X_2 jumps; given kappa = k >= 1
  /// the proposal is x = s Beta(1, k(1-alpha)) with Dirichlet splitting of
  /// s - x, thinned by prod psi(q (s-x) omega_i) e^{-q x} h / M_alpha.
  ///
  /// When s is far above the scale sigma of S(t) that proposal is wasteful,
  /// so each k may instead use a split at x = s/2: below, x is drawn from
  /// the law of S(t) and the X_2 factor is bounded; above, h <= sigma/(e x).
  /// The cheaper of the two envelopes is used per k.
  Recovered sample_tilted_given_sum(double t, double s, double q, double r, RngStream& rng,
                                    bool allow_split = true) const {
    if (!(t > 0)) throw ParameterError("tilted conditional: t must be positive");
    if (!(q >= 0)) throw ParameterError("tilted conditional: q must be non-negative");
    if (!(s >= 0 && s <= r)) throw ContractViolation("tilted conditional: need 0 <= s <= r");
    if (q == 0 || s == 0) return {s, 0.0};
    const double a = alpha();
    const double oma = 1.0 - a;
    const double lstd = log_standardizer(t);
    const double log_s = std::log(s);
    const double log_m = integrand_.log_bound_below(lstd + log_s);
    const double log_half = log_s - std::log(2.0);
    const double log_b0 = std::min(log_m, -1.0 - (lstd + log_s));
    const double log_b_upper = std::min(log_m, -1.0 - (lstd + log_half));
    // mass of S(t) in units of E_theta h: sigma (1 - alpha) / alpha
    const double log_lower_unit = -lstd + std::log(oma / a);
    const double log_c1 = std::log(gamma_ * q * t) + std::lgamma(oma);

    std::vector<double> logs{log_b0}, log_lower{0.0}, log_upper{0.0}, log_bk{0.0};
    std::vector<char> split{0};
    double lmax = log_b0, prev_series = -std::numeric_limits<double>::infinity();
    for (int k = 1;; ++k) {
      if (k > 100000) throw NumericalError("tilted conditional: kappa series did not settle");
      const double ko = k * oma;
      const double log_ck = k * log_c1 - std::lgamma(k + 1.0) - std::lgamma(ko);
      const double series = log_ck + log_m + ko * log_s - std::log(ko);
      const double bk = ko >= 1.0 ? (ko - 1.0) * log_s : (ko - 1.0) * log_half;
      const double lower = log_ck + bk + log_lower_unit;
      const double upper = log_ck + log_b_upper + ko * log_half - std::log(ko);
      const double alt = detail::log_add(lower, upper);
      split.push_back(allow_split && alt < series);
      logs.push_back(split.back() ? alt : series);
      log_lower.push_back(lower);
      log_upper.push_back(upper);
      log_bk.push_back(bk);
      lmax = std::max(lmax, logs.back());
      // past the peak the series weights shrink by at least half per step, so
      // the remainder is below twice the current one
      if (k > 1 && series - prev_series < -std::log(2.0) && series < lmax + std::log(1e-18)) break;
      prev_series = series;
    }
    const detail::LogWeightTable kappa(logs);

    for (;;) {
      const int k = kappa.sample(rng);
      const double theta = std::numbers::pi * rng.uniform();
      const double log_u = std::log(rng.uniform());
      if (k == 0) {
        if (log_u + log_b0 <= -q * s + integrand_.log_h(std::exp(lstd + log_s), theta)) return {s, 0.0};
        continue;
      }
      const double ko = k * oma;
      double x, gap, log_bound, log_target;
      if (!split[k]) {
        const BetaDraw b = sample_beta_draw(1.0, ko, rng);
        x = s * b.value;
        gap = std::exp(log_s + b.log1m_value);
        if (!(x > 0)) continue;
        log_bound = log_m;
        log_target = -q * x + integrand_.log_h(std::exp(lstd + std::log(x)), theta);
      } else if (rng.uniform() < 1.0 / (1.0 + std::exp(log_upper[k] - log_lower[k]))) {
        x = std::exp(integrand_.sample_log(rng) - lstd);
        if (!(x <= 0.5 * s)) continue;
        gap = s - x;
        log_bound = log_bk[k];
        log_target = -q * x + (ko - 1.0) * std::log(gap);
      } else {
        gap = std::exp(log_half + std::log(rng.uniform()) / ko);
        x = s - gap;
        if (!(gap > 0 && x > 0.5 * s)) continue;
        log_bound = log_b_upper;
        log_target = -q * x + integrand_.log_h(std::exp(lstd + std::log(x)), theta);
      }
      const auto omega = sample_dirichlet(static_cast<std::size_t>(k), oma, rng);
      for (double w : omega) log_target += std::log(psi_tilt(q * gap * w));
      if (log_u + log_bound <= log_target) return {x, gap};
    }
  }

  Recovered recover(double t, const CrossingDraw& d, double q, double r, RngStream& rng) const {
    return sample_tilted_given_sum(t, d.s_left, q, r, rng);
  }

 private:
  StableIntegrand integrand_;
  double gamma_;
  double time_scale_;
  double log_time_scale_;
  double log_tail_constant_;
};

namespace detail {

enum class CrossingEnvelope { automatic, basic, split };

// Density in theta proportional to phi(theta) = min(1/e, A (pi - theta)^{-p}),
// p = 1/(1-alpha). With A = C x0^{-alpha/(1-alpha)} it bounds
// E e^{-E} for E = h0(theta) x^{-alpha/(1-alpha)}, x >= x0.
class TailTheta {
 public:
  TailTheta(double log_a, double alpha) : log_a_(log_a), p_(1.0 / (1.0 - alpha)) {
    const double pi = std::numbers::pi;
    log_ustar_ = (1.0 + log_a) / p_;
    if (log_ustar_ >= std::log(pi)) {
      cap_ = pi / std::numbers::e;
      pow_ = 0;
      log_ustar_ = std::log(pi);
    } else {
      cap_ = std::exp(log_ustar_ - 1.0);
      // A (u*^{1-p} - pi^{1-p}) / (p - 1), u*^{1-p} = (e A)^{-alpha}
      const double hi = std::exp(log_a_ + (1.0 - p_) * log_ustar_);
      pow_ = hi * -std::expm1((1.0 - p_) * (std::log(pi) - log_ustar_)) / (p_ - 1.0);
    }
  }

  /// (1/pi) int_0^pi phi.
  double mean() const { return (cap_ + pow_) / std::numbers::pi; }

  double sample(RngStream& rng) const {
    const double pi = std::numbers::pi;
    if (rng.uniform() * (cap_ + pow_) < cap_) return pi - std::exp(log_ustar_) * rng.uniform();
    // u^{1-p} uniform between pi^{1-p} and u*^{1-p}
    const double ratio = std::exp((1.0 - p_) * (std::log(pi) - log_ustar_));
    const double w = 1.0 - rng.uniform() * (1.0 - ratio);
    const double u = std::exp(log_ustar_ + std::log(w) / (1.0 - p_));
    return pi - std::min(u, pi);
  }

  double log_phi(double theta) const {
    const double u = std::numbers::pi - theta;
    if (!(u > 0)) return -1.0;
    return std::min(-1.0, log_a_ - p_ * std::log(u));
  }

 private:
  double log_a_;
  double p_;
  double log_ustar_;
  double cap_;
  double pow_;
};

/// (S(t-), Delta Sigma(t)) for Sigma = S_1 + ... + S_I, independent stable
/// subordinators, given that Sigma passes the level at time t. z is the
/// level at t and w0 its descent rate.
///
/// The basic envelope replaces each h_i by its bound M_i. Its acceptance
/// rate decays like t^{1/alpha} as t -> 0, so for small t the target is
/// split at Sigma(t-) = z/2. Below, S(t) is proposed directly and the jump
/// kernel is bounded at z/2. Above (and for creeping) some component j has
/// s_j >= z/(2I); it is written as (h0(theta)/E)^{(1-alpha)/alpha} in
/// standard units, the other components are drawn from their laws, and
/// the theta marginal is bounded through TailTheta. Dividing by the number
/// of components above z/(2I) removes the double counting over j.
inline CrossingDraw stable_sum_crossing(const std::vector<const StableCarrier*>& parts, double t,
                                        double z, double w0, RngStream& rng, bool fill_components,
                                        CrossingEnvelope envelope = CrossingEnvelope::automatic) {
  if (!(t > 0 && z > 0 && std::isfinite(z))) throw ParameterError("stable crossing: need t, z > 0");
  if (!(w0 >= 0)) throw ParameterError("stable crossing: w0 must be non-negative");
  const std::size_t n = parts.size();
  const double nd = static_cast<double>(n);
  const double log_z = std::log(z);
  const double log_half_z = log_z - std::log(2.0);
  const double log_smin = log_z - std::log(2.0 * nd);

  std::vector<double> w(n + 1), lstd(n), kernel_coef(n), kbar(n);
  w[0] = w0 * std::exp(-std::lgamma(nd));
  double w_total = w[0];
  double log_ct = 0, log_mprod = 0;
  double m1 = 0, kbar_total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const StableCarrier& p = *parts[i];
    const double a = p.alpha();
    w[i + 1] = std::exp(std::log(p.gamma()) + (1.0 - a) * log_z + std::lgamma(1.0 - a) - std::log(a) -
                        std::lgamma(nd + 1.0 - a));
    w_total += w[i + 1];
    lstd[i] = p.log_standardizer(t);
    log_ct += lstd[i] + std::log(a / (1.0 - a));
    log_mprod += p.integrand().log_bound_below(lstd[i] + log_z);
    kernel_coef[i] = p.gamma() / a;
    m1 += kernel_coef[i] * std::exp(-a * log_half_z);
    kbar[i] = kernel_coef[i] * std::exp((1.0 - a) * log_z) / (1.0 - a);
    kbar_total += kbar[i];
  }
  const double m_basic = std::exp(log_ct + log_mprod + (nd - 1.0) * log_z + std::log(w_total));

  std::vector<TailTheta> tails;
  std::vector<double> tail_coef(n);
  double tail_total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const StableCarrier& p = *parts[i];
    const double a = p.alpha();
    const double log_x0 = log_smin + lstd[i];
    tails.emplace_back(p.log_tail_constant() - a / (1.0 - a) * log_x0, a);
    tail_coef[i] = tails[i].mean() * a / (1.0 - a) * std::exp(-log_smin);
    tail_total += tail_coef[i];
  }
  const double m_upper = tail_total * (kbar_total + w0);
  const bool split = envelope == CrossingEnvelope::automatic
                         ? m1 + m_upper < m_basic
                         : envelope == CrossingEnvelope::split;

  std::vector<double> s(n);
  for (;;) {
    CrossingDraw d;
    if (split) {
      const double pick = rng.uniform() * (m1 + m_upper);
      if (pick < m1) {
        double u = 0;
        for (std::size_t i = 0; i < n; ++i) {
          s[i] = std::exp(parts[i]->integrand().sample_log(rng) - lstd[i]);
          u += s[i];
        }
        if (!(u <= 0.5 * z)) continue;
        std::vector<double> kern(n);
        double k_total = 0;
        for (std::size_t i = 0; i < n; ++i) {
          kern[i] = kernel_coef[i] * std::pow(z - u, -parts[i]->alpha());
          k_total += kern[i];
        }
        if (!(rng.uniform() * m1 < k_total)) continue;
        double kp = rng.uniform() * k_total;
        std::size_t iota = 0;
        while (iota + 1 < n && kp >= kern[iota]) kp -= kern[iota++];
        const BetaDraw bp = sample_beta_draw(parts[iota]->alpha(), 1.0, rng);
        d.s_left = u;
        d.level_gap = z - u;
        d.jump = std::exp(std::log(z - u) - bp.log_value);
        if (fill_components) d.components = s;
        return d;
      }
      double jp = rng.uniform() * tail_total;
      std::size_t j = 0;
      while (j + 1 < n && jp >= tail_coef[j]) jp -= tail_coef[j++];
      const double theta = tails[j].sample(rng);
      double others = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == j) continue;
        s[i] = std::exp(parts[i]->integrand().sample_log(rng) - lstd[i]);
        others += s[i];
      }
      const bool creep = rng.uniform() * (kbar_total + w0) < w0;
      double y = 0;
      if (!creep) {
        double kp = rng.uniform() * kbar_total;
        std::size_t i = 0;
        while (i + 1 < n && kp >= kbar[i]) kp -= kbar[i++];
        y = z * std::pow(rng.uniform(), 1.0 / (1.0 - parts[i]->alpha()));
        if (!(y < 0.5 * z && y > 0)) continue;
      }
      s[j] = z - y - others;
      if (!(s[j] > 0) || std::log(s[j]) < log_smin) continue;
      double n_big = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (s[i] > 0 && std::log(s[i]) >= log_smin) n_big += 1;
      const double a = parts[j]->alpha();
      const double log_e = parts[j]->integrand().log_h0(theta) - a / (1.0 - a) * (std::log(s[j]) + lstd[j]);
      const double log_acc = log_smin - std::log(s[j]) + log_e - std::exp(log_e) - tails[j].log_phi(theta) -
                             std::log(n_big);
      if (!(std::log(rng.uniform()) < log_acc)) continue;
      if (creep) {
        d.s_left = z;
        d.creep = true;
      } else {
        std::vector<double> kern(n);
        double k_total = 0;
        for (std::size_t i = 0; i < n; ++i) {
          kern[i] = kernel_coef[i] * std::pow(y, -parts[i]->alpha());
          k_total += kern[i];
        }
        double kp = rng.uniform() * k_total;
        std::size_t iota = 0;
        while (iota + 1 < n && kp >= kern[iota]) kp -= kern[iota++];
        const BetaDraw bp = sample_beta_draw(parts[iota]->alpha(), 1.0, rng);
        d.s_left = z - y;
        d.level_gap = y;
        d.jump = std::exp(std::log(y) - bp.log_value);
      }
      if (fill_components) d.components = s;
      return d;
    }

    if (fill_components) d.components.resize(n);
    double pick = rng.uniform() * w_total;
    std::size_t iota = 0;
    while (iota < n && pick >= w[iota]) pick -= w[iota++];
    const auto omega = sample_dirichlet(n, 1.0, rng);
    double log_u = log_z;
    if (iota == 0) {
      d.creep = true;
    } else {
      const double a = parts[iota - 1]->alpha();
      const BetaDraw b = sample_beta_draw(nd, 1.0 - a, rng);
      const BetaDraw bp = sample_beta_draw(a, 1.0, rng);
      log_u += b.log_value;
      d.level_gap = std::exp(log_z + b.log1m_value);
      d.jump = std::exp(log_z + b.log1m_value - bp.log_value);
    }
    double log_h = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double theta = std::numbers::pi * rng.uniform();
      if (fill_components) d.components[i] = std::exp(log_u) * omega[i];
      log_h += omega[i] > 0 ? parts[i]->integrand().log_h(std::exp(lstd[i] + log_u) * omega[i], theta)
                            : -std::numeric_limits<double>::infinity();
    }
    if (std::log(rng.uniform()) + log_mprod < log_h) {
      d.s_left = d.creep ? z : std::exp(log_u);
      return d;
    }
  }
}

}  // namespace detail

inline CrossingDraw StableCarrier::sample_crossing(double t, double z, double w0, RngStream& rng) const {
  return detail::stable_sum_crossing({this}, t, z, w0, rng, false);
}

}  // namespace levypass
