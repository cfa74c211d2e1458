// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace levypass {

/// (T, Z(T-), Delta Z(T)) for a subordinator, T = passage time ^ K.
/// `censored` marks T = K with no passage before it.
struct FirstPassageEvent {
  double T = 0;
  double z_left = 0;
  double jump = 0;
  bool censored = false;

  double z_final() const { return z_left + jump; }
};

/// Two-sided record for Z = Z+ - Z-: left values and jumps of both sides
/// at T. At most one of jp, jm is non-zero.
struct BVExitEvent {
  double T = 0;
  double zp_left = 0;
  double zm_left = 0;
  double jp = 0;
  double jm = 0;
  bool censored = false;

  double z_left() const { return zp_left - zm_left; }
  double z_final() const { return zp_left + jp - (zm_left + jm); }
};

}  // namespace levypass
