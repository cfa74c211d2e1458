// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace levypass {

/// Carrier-level draw of (S(t-), Delta S(t)) at a passage time, or of S(t)
/// below a level when the step ends at a compound Poisson jump instead.
///
/// `level_gap` is level - s_left, carried separately because the engine
/// needs the remaining distance to the boundary without cancellation.
struct CrossingDraw {
  double s_left = 0;
  double level_gap = 0;
  double jump = 0;
  bool creep = false;
  /// Per-component left values; filled by the mixture carrier only.
  std::vector<double> components;
};

/// X_1(t-) recovered from the carrier's left value, with s - x.
struct Recovered {
  double x = 0;
  double gap = 0;
};

/// Passage time together with the S(1) draw(s) that produced it.
struct FptDraw {
  double time = std::numeric_limits<double>::infinity();
  std::vector<double> s1;
};

/// Proposal bookkeeping for the plain-rejection conditioned marginals.
/// A single call that needs more than `warn_after` proposals flags
/// `low_efficiency`; the output is still exact.
struct RejectionStats {
  std::uint64_t proposals = 0;
  std::uint64_t calls = 0;
  bool low_efficiency = false;
  static constexpr std::uint64_t warn_after = 1000000;
};

}  // namespace levypass
