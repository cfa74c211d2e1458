// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "levypass/errors.hpp"
#include "levypass/rng.hpp"

namespace levypass {

inline double sample_uniform(RngStream& rng) { return rng.uniform(); }

/// Uniform on (lo, hi).
inline double sample_uniform(double lo, double hi, RngStream& rng) {
  detail::require(lo < hi, "sample_uniform: need lo < hi");
  return lo + (hi - lo) * rng.uniform();
}

/// Exponential with the given mean.
inline double sample_exponential(double mean, RngStream& rng) {
  detail::require(mean > 0, "sample_exponential: mean must be positive");
  return -mean * std::log(rng.uniform());
}

inline double sample_std_exponential(RngStream& rng) { return -std::log(rng.uniform()); }

/// Standard normal by the Marsaglia polar method.
inline double sample_std_normal(RngStream& rng) {
  for (;;) {
    const double u = 2.0 * rng.uniform() - 1.0;
    const double v = 2.0 * rng.uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0 && s < 1) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

namespace detail {

// Marsaglia-Tsang for shape >= 1, unit scale.
inline double gamma_mt(double shape, RngStream& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = sample_std_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace detail

/// log of a Gamma(shape, 1) draw. Stays finite for tiny shapes where the
/// draw itself underflows: log G(a) = log G(a+1) + log(U)/a.
inline double sample_log_gamma(double shape, RngStream& rng) {
  detail::require(shape > 0, "sample_gamma: shape must be positive");
  if (shape >= 1) return std::log(detail::gamma_mt(shape, rng));
  const double g = detail::gamma_mt(shape + 1.0, rng);
  return std::log(g) + std::log(rng.uniform()) / shape;
}

/// Gamma(shape, scale): density x^{shape-1} e^{-x/scale} / (scale^shape Gamma(shape)).
inline double sample_gamma(double shape, double scale, RngStream& rng) {
  detail::require(shape > 0 && scale > 0, "sample_gamma: shape and scale must be positive");
  if (shape >= 1) return scale * detail::gamma_mt(shape, rng);
  return scale * std::exp(sample_log_gamma(shape, rng));
}

/// A Beta draw together with log(beta) and log(1 - beta), the latter
/// computed without forming 1 - beta.
struct BetaDraw {
  double value;
  double log_value;
  double log1m_value;

  /// 1 - beta, accurate when beta is close to 1.
  double complement() const { return std::exp(log1m_value); }
};

inline BetaDraw sample_beta_draw(double a, double b, RngStream& rng) {
  detail::require(a > 0 && b > 0, "sample_beta: parameters must be positive");
  if (a == 1.0) {
    const double lc = std::log(rng.uniform()) / b;  // 1 - beta = U^{1/b}
    return {-std::expm1(lc), std::log(-std::expm1(lc)), lc};
  }
  if (b == 1.0) {
    const double lv = std::log(rng.uniform()) / a;  // beta = U^{1/a}
    return {std::exp(lv), lv, std::log(-std::expm1(lv))};
  }
  const double la = sample_log_gamma(a, rng);
  const double lb = sample_log_gamma(b, rng);
  const double lsum = detail::log_add(la, lb);
  return {std::exp(la - lsum), la - lsum, lb - lsum};
}

inline double sample_beta(double a, double b, RngStream& rng) {
  return sample_beta_draw(a, b, rng).value;
}

/// Dirichlet(a_1..a_k) via normalized Gamma draws in log space. The result
/// is renormalized so its components sum to 1 in floating point.
/// Di(a) with k = 1 is the point mass at 1.
inline std::vector<double> sample_dirichlet(std::span<const double> a, RngStream& rng) {
  detail::require(!a.empty(), "sample_dirichlet: need at least one parameter");
  for (double ai : a) detail::require(ai > 0, "sample_dirichlet: parameters must be positive");
  if (a.size() == 1) return {1.0};
  std::vector<double> out(a.size());
  double lmax = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = sample_log_gamma(a[i], rng);
    lmax = std::max(lmax, out[i]);
  }
  double sum = 0;
  for (double& v : out) {
    v = std::exp(v - lmax);
    sum += v;
  }
  for (double& v : out) v /= sum;
  // Fold the remaining rounding error into the largest component.
  double total = 0;
  for (double v : out) total += v;
  auto it = std::max_element(out.begin(), out.end());
  *it += 1.0 - total;
  return out;
}

/// Symmetric Dirichlet Di(a, ..., a) of length k.
inline std::vector<double> sample_dirichlet(std::size_t k, double a, RngStream& rng) {
  detail::require(k >= 1, "sample_dirichlet: need at least one component");
  std::vector<double> params(k, a);
  return sample_dirichlet(params, rng);
}

}  // namespace levypass
