// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "levypass/distributions.hpp"
#include "levypass/errors.hpp"
#include "levypass/rng.hpp"

namespace levypass {

/// Integral representation of the standard positive stable law with
/// Laplace transform exp(-lambda^alpha), 0 < alpha < 1:
///
///   f(x) = alpha / ((1 - alpha) pi) * int_0^pi h(x, theta) dtheta,
///   h(x, theta) = h0(theta) x^{-1/(1-alpha)} exp(-h0(theta) x^{-alpha/(1-alpha)}),
///   h0(theta) = sin((1-alpha) theta) sin(alpha theta)^{alpha/(1-alpha)}
///               sin(theta)^{-1/(1-alpha)}.
///
/// h is bounded by M_alpha = (1-alpha)^{1-1/alpha} alpha^{-1-1/alpha} e^{-1/alpha},
/// which is what the rejection steps of the stable carriers use.
class StableIntegrand {
 public:
  explicit StableIntegrand(double alpha) : alpha_(alpha) {
    if (!(alpha > 0 && alpha < 1))
      throw ParameterError("stable: alpha must lie in (0, 1)");
    inv_1ma_ = 1.0 / (1.0 - alpha);
    ratio_ = alpha * inv_1ma_;
    log_m_ = (1.0 - 1.0 / alpha) * std::log1p(-alpha) - (1.0 + 1.0 / alpha) * std::log(alpha) -
             1.0 / alpha;
  }

  double alpha() const { return alpha_; }

  /// log h0(theta); +inf at theta = pi, finite limit at theta = 0.
  double log_h0(double theta) const {
    if (theta <= 0) return std::log1p(-alpha_) + ratio_ * std::log(alpha_);
    if (theta >= std::numbers::pi) return std::numeric_limits<double>::infinity();
    return std::log(std::sin((1.0 - alpha_) * theta)) +
           ratio_ * std::log(std::sin(alpha_ * theta)) - inv_1ma_ * std::log(std::sin(theta));
  }

  double h0(double theta) const { return std::exp(log_h0(theta)); }

  /// log h(x, theta). Endpoints of (0, pi) and x -> 0 give -inf (h = 0).
  double log_h(double x, double theta) const {
    if (!(x >= 0)) throw DomainError("stable h: x must be positive");
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    if (x == 0 || theta <= 0 || theta >= std::numbers::pi) return kNegInf;
    const double lh0 = log_h0(theta);
    const double lx = std::log(x);
    const double expo = std::exp(lh0 - ratio_ * lx);
    if (std::isinf(expo)) return kNegInf;
    return lh0 - inv_1ma_ * lx - expo;
  }

  double h(double x, double theta) const {
    if (!(x > 0)) throw DomainError("stable h: x must be positive");
    return std::exp(log_h(x, theta));
  }

  double log_bound() const { return log_m_; }
  double bound() const { return std::exp(log_m_); }

  /// log of a bound on h(x', theta) over all theta and x' <= x. Since h0 is
  /// increasing, h0 >= h0(0); for x up to (alpha h0(0))^{(1-alpha)/alpha}
  /// the value at h0 = h0(0) is the maximum and increases in x.
  double log_bound_below(double log_x) const {
    const double log_h0min = log_h0(0.0);
    if (log_x > (std::log(alpha_) + log_h0min) / ratio_) return log_m_;
    return std::min(log_m_, log_h0min - inv_1ma_ * log_x - std::exp(log_h0min - ratio_ * log_x));
  }

  /// Standard stable draw (Kanter / Chambers-Mallows-Stuck for the totally
  /// skewed case): X = (h0(Theta) / E)^{(1-alpha)/alpha}, Theta ~ Unif(0, pi),
  /// E ~ Exp(1). Returned as log X.
  double sample_log(RngStream& rng) const {
    const double theta = std::numbers::pi * rng.uniform();
    const double e = sample_std_exponential(rng);
    return (log_h0(theta) - std::log(e)) / ratio_;
  }

  double sample(RngStream& rng) const { return std::exp(sample_log(rng)); }

 private:
  double alpha_;
  double inv_1ma_;  // 1/(1-alpha)
  double ratio_;    // alpha/(1-alpha)
  double log_m_;
};

/// log of an upper bound on h0(theta) (pi - theta)^{1/(1-alpha)} over (0, pi).
/// With p = 1/(1-alpha) the product is
///   sin((1-alpha) theta) sin(alpha theta)^{alpha p} ((pi - theta) / sin(theta))^p,
/// and on a cell [a, b] each sine is bounded by its supremum while
/// u / sin(u), u = pi - theta, is increasing. Near theta = 0 that last factor
/// blows up, so the cell also tries h0(b) (pi - a)^p (h0 is increasing) and
/// keeps the smaller bound.
inline double stable_tail_log_constant(const StableIntegrand& f) {
  constexpr int kCells = 4096;
  const double pi = std::numbers::pi;
  const double a = f.alpha();
  const double p = 1.0 / (1.0 - a);
  const double delta = pi / kCells;
  const auto sup_sin = [](double lo, double hi) {
    if (lo <= 0.5 * std::numbers::pi && hi >= 0.5 * std::numbers::pi) return 1.0;
    return std::max(std::sin(lo), std::sin(hi));
  };
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < kCells; ++k) {
    const double lo = k * delta, hi = (k + 1) * delta;
    const double u = pi - lo;
    double cell = std::log(sup_sin((1.0 - a) * lo, (1.0 - a) * hi)) +
                  a * p * std::log(sup_sin(a * lo, a * hi)) + p * std::log(u / std::sin(u));
    if (k + 1 < kCells) cell = std::min(cell, f.log_h0(hi) + p * std::log(u));
    best = std::max(best, cell);
  }
  return best;
}

/// Memoized per thread; carriers are rebuilt for every run.
inline double cached_stable_tail_log_constant(double alpha) {
  thread_local std::unordered_map<double, double> cache;
  const auto it = cache.find(alpha);
  if (it != cache.end()) return it->second;
  const double v = stable_tail_log_constant(StableIntegrand(alpha));
  cache.emplace(alpha, v);
  return v;
}

inline double eval_h(double alpha, double x, double theta) {
  if (!(x > 0)) throw DomainError("eval_h: x must be positive");
  return StableIntegrand(alpha).h(x, theta);
}

inline double eval_M(double alpha) { return StableIntegrand(alpha).bound(); }

/// Positive stable draw with E exp(-lambda X) = exp(-lambda^alpha).
inline double sample_standard_stable(double alpha, RngStream& rng) {
  return StableIntegrand(alpha).sample(rng);
}

}  // namespace levypass
