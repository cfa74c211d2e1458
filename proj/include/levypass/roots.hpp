// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "levypass/errors.hpp"

namespace levypass {

struct RootOptions {
  double relative_tolerance = 1e-12;
  int max_expansions = 1000;
  int max_iterations = 400;
};

/// Root in t > 0 of a function that is increasing in t, negative near 0
/// and positive for large t. Works in log t: the bracket starts at t = 1
/// and doubles (or halves) until the sign changes, then a regula falsi step
/// with the Illinois modification refines it. Whenever an endpoint value is
/// not finite the step degrades to bisection.
template <typename F>
double solve_increasing_in_time(F&& f, const RootOptions& opt = {}) {
  const double ln2 = std::log(2.0);
  double ylo = 0.0, yhi = 0.0;
  double flo = f(1.0);
  double fhi = flo;
  if (flo == 0) return 1.0;
  if (std::isnan(flo)) throw NumericalError("root: function is NaN at t = 1");
  int n = 0;
  if (flo < 0) {
    while (fhi < 0) {
      if (++n > opt.max_expansions) throw NumericalError("root: failed to bracket from above");
      ylo = yhi;
      flo = fhi;
      yhi += ln2;
      fhi = f(std::exp(yhi));
      if (std::isnan(fhi)) throw NumericalError("root: function is NaN");
    }
  } else {
    while (flo > 0) {
      if (++n > opt.max_expansions) throw NumericalError("root: failed to bracket from below");
      yhi = ylo;
      fhi = flo;
      ylo -= ln2;
      flo = f(std::exp(ylo));
      if (std::isnan(flo)) throw NumericalError("root: function is NaN");
    }
  }
  if (flo == 0) return std::exp(ylo);
  if (fhi == 0) return std::exp(yhi);

  int side = 0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    if (yhi - ylo <= opt.relative_tolerance) break;
    double y;
    if (std::isfinite(flo) && std::isfinite(fhi)) {
      y = (ylo * fhi - yhi * flo) / (fhi - flo);
      // Keep the secant point strictly inside and away from the ends.
      const double w = yhi - ylo;
      if (!(y > ylo + 1e-3 * w && y < yhi - 1e-3 * w)) y = 0.5 * (ylo + yhi);
    } else {
      y = 0.5 * (ylo + yhi);
    }
    const double fy = f(std::exp(y));
    if (std::isnan(fy)) throw NumericalError("root: function is NaN");
    if (fy == 0) return std::exp(y);
    if (fy < 0) {
      ylo = y;
      flo = fy;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      yhi = y;
      fhi = fy;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
  }
  return std::exp(0.5 * (ylo + yhi));
}

}  // namespace levypass
