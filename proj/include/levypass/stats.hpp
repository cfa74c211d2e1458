// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "levypass/errors.hpp"

namespace levypass {

struct TestResult {
  double statistic = 0;
  double p_value = 1;
};

/// Kolmogorov survival function Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} e^{-2 k^2 lambda^2}.
inline double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0, sign = 1;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-17) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace detail {

inline void require_sample(const std::vector<double>& xs, const char* what) {
  if (xs.size() < 100) throw ParameterError(std::string(what) + ": need at least 100 values");
  for (double x : xs)
    if (std::isnan(x)) throw DomainError(std::string(what) + ": NaN in sample");
}

// Asymptotic p-value with the usual small-sample correction of the argument.
inline double ks_p_value(double d, double n_eff) {
  const double s = std::sqrt(n_eff);
  return kolmogorov_q((s + 0.12 + 0.11 / s) * d);
}

}  // namespace detail

/// Two-sample Kolmogorov-Smirnov test.
inline TestResult ks_two_sample(std::vector<double> xs, std::vector<double> ys) {
  detail::require_sample(xs, "ks_two_sample");
  detail::require_sample(ys, "ks_two_sample");
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  if (xs.front() == xs.back() && ys.front() == ys.back() && xs.front() == ys.front())
    throw DegenerateSample("ks_two_sample: both samples are the same constant");
  const double n = static_cast<double>(xs.size()), m = static_cast<double>(ys.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < xs.size() && j < ys.size()) {
    const double v = std::min(xs[i], ys[j]);
    while (i < xs.size() && xs[i] == v) ++i;
    while (j < ys.size() && ys[j] == v) ++j;
    d = std::max(d, std::abs(i / n - j / m));
  }
  return {d, detail::ks_p_value(d, n * m / (n + m))};
}

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
inline TestResult ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
  detail::require_sample(xs, "ks_one_sample");
  std::sort(xs.begin(), xs.end());
  if (xs.front() == xs.back()) throw DegenerateSample("ks_one_sample: constant sample");
  const double n = static_cast<double>(xs.size());
  double d = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return {d, detail::ks_p_value(d, n)};
}

struct MomentCheck {
  double mean = 0;
  double variance = 0;
  double z_mean = 0;
  double z_variance = 0;
};

/// z-scores of the sample mean and variance against given values. The
/// variance standard error uses the sample fourth central moment.
inline MomentCheck moment_check(const std::vector<double>& xs, double mean, double variance) {
  detail::require_sample(xs, "moment_check");
  const double n = static_cast<double>(xs.size());
  double s = 0;
  for (double x : xs) s += x;
  const double mu = s / n;
  double m2 = 0, m4 = 0;
  for (double x : xs) {
    const double d2 = (x - mu) * (x - mu);
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= n;
  m4 /= n;
  if (m2 == 0) throw DegenerateSample("moment_check: constant sample");
  MomentCheck r;
  r.mean = mu;
  r.variance = m2 * n / (n - 1);
  r.z_mean = (mu - mean) / std::sqrt(r.variance / n);
  r.z_variance = (r.variance - variance) / std::sqrt(std::max(m4 - m2 * m2, 1e-300) / n);
  return r;
}

/// Pearson chi-square goodness of fit with `dof` degrees of freedom.
inline TestResult chi_square_gof(const std::vector<double>& observed, const std::vector<double>& expected,
                                 int dof) {
  if (observed.size() != expected.size() || observed.empty())
    throw ParameterError("chi_square_gof: observed and expected must have the same non-zero length");
  if (dof < 1) throw ParameterError("chi_square_gof: dof must be positive");
  double chi2 = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!(expected[i] > 0)) throw ParameterError("chi_square_gof: expected counts must be positive");
    chi2 += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
  }
  return {chi2, boost::math::gamma_q(0.5 * dof, 0.5 * chi2)};
}

}  // namespace levypass
