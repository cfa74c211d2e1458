// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "levypass/errors.hpp"

namespace levypass {

/// psi(x) = (1 - e^{-x}) / x with psi(0) = 1. Decreasing on [0, inf),
/// bounded by 1.
inline double psi_tilt(double x) {
  if (x == 0) return 1.0;
  return -std::expm1(-x) / x;
}

namespace detail {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Series for the lower regularized gamma P(a, x), valid for x < a + 1.
template <typename Real>
Real gamma_p_series(Real a, Real x) {
  Real term = 1 / a;
  Real sum = term;
  for (int n = 1; n < 100000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * std::numeric_limits<Real>::epsilon()) break;
  }
  return sum * std::exp(a * std::log(x) - x - std::lgamma(a));
}

// Continued fraction (modified Lentz) for Q(a, x), valid for x > a + 1.
template <typename Real>
Real gamma_q_fraction(Real a, Real x) {
  constexpr Real tiny = std::numeric_limits<Real>::min() / std::numeric_limits<Real>::epsilon();
  Real b = x + 1 - a;
  Real c = 1 / tiny;
  Real d = 1 / b;
  Real h = d;
  for (int i = 1; i < 100000; ++i) {
    const Real an = -i * (i - a);
    b += 2;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    const Real del = d * c;
    h *= del;
    if (std::abs(del - 1) < std::numeric_limits<Real>::epsilon()) break;
  }
  return std::exp(a * std::log(x) - x - std::lgamma(a)) * h;
}

// Q(a, x) for small a and x <= 1.5 without cancellation:
//   Q = 1 - x^a / Gamma(a+1) - x^a / Gamma(a) * sum_{n>=1} (-x)^n / (n! (a+n)).
template <typename Real>
Real gamma_q_small_a(Real a, Real x) {
  const Real lg1p = std::lgamma(1 + a);
  const Real first = -std::expm1(a * std::log(x) - lg1p);
  Real sum = 0;
  Real pw = 1;
  for (int n = 1; n < 1000; ++n) {
    pw *= -x / n;
    const Real term = pw / (a + n);
    sum += term;
    if (std::abs(term) < std::numeric_limits<Real>::epsilon() * std::abs(sum)) break;
  }
  const Real scale = a * std::exp(a * std::log(x) - lg1p);  // x^a / Gamma(a)
  return first - scale * sum;
}

template <typename Real>
Real gamma_q_impl(Real a, Real x) {
  if (x <= 0) return 1;
  if (std::isinf(x)) return 0;
  if (x >= a + 1 && x > Real(1.5)) return gamma_q_fraction(a, x);
  if (a < Real(0.5) && x <= Real(1.5)) return gamma_q_small_a(a, x);
  if (x >= a + 1) return gamma_q_fraction(a, x);
  return 1 - gamma_p_series(a, x);
}

}  // namespace detail

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
///
/// Series below x = a + 1, Lentz continued fraction above it, and a
/// cancellation-free expansion for a < 1/2, x <= 1.5 so that Q keeps its
/// relative accuracy as a -> 0. Falls back to long double when the double
/// evaluation is not finite.
inline double gamma_q(double a, double x) {
  if (!(a > 0)) throw DomainError("gamma_q: shape must be positive");
  if (std::isnan(x)) throw DomainError("gamma_q: x is NaN");
  double q = detail::gamma_q_impl<double>(a, x);
  if (!std::isfinite(q) || q < 0 || q > 1) {
    const long double ql = detail::gamma_q_impl<long double>(a, x);
    q = static_cast<double>(ql);
    if (!std::isfinite(q)) throw NumericalError("gamma_q: evaluation failed");
  }
  return std::clamp(q, 0.0, 1.0);
}

}  // namespace levypass
