// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <variant>

#include "levypass/boundary.hpp"
#include "levypass/carrier_common.hpp"
#include "levypass/carrier_gamma.hpp"
#include "levypass/carrier_mix.hpp"
#include "levypass/carrier_stable.hpp"
#include "levypass/model.hpp"

namespace levypass {

/// S = 0. It passes a(t) only when the level itself reaches zero, which
/// happens for boundaries lowered by a drift.
class NullCarrier {
 public:
  FptDraw sample_fpt(const CappedBoundary& a, RngStream&) const { return {passage(a), {}}; }

  static double passage(const CappedBoundary& a) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    if (a.is_constant()) return kInf;
    if (a.value(0.0) <= 0) return 0.0;
    double lo = 0.0, hi = 1.0;
    int n = 0;
    while (a.value(hi) > 0) {
      if (++n > 200) return kInf;
      lo = hi;
      hi *= 2.0;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (a.value(mid) > 0) lo = mid;
      else hi = mid;
    }
    return hi;
  }

  CrossingDraw sample_crossing(double, double, double, RngStream&) const {
    CrossingDraw d;
    d.creep = true;
    return d;
  }

  CrossingDraw sample_value_below(double, double z, RngStream&, RejectionStats* = nullptr) const {
    CrossingDraw d;
    d.level_gap = z;
    return d;
  }

  Recovered recover(double, const CrossingDraw&, double, double, RngStream&) const { return {}; }
};

using Carrier = std::variant<NullCarrier, StableCarrier, MixtureCarrier, GammaCarrier>;

inline Carrier make_carrier(const CarrierSpec& spec) {
  return std::visit(
      [](const auto& k) -> Carrier {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, NoCarrier>) return NullCarrier{};
        else if constexpr (std::is_same_v<K, StableSpec>) return StableCarrier(k.alpha, k.gamma);
        else if constexpr (std::is_same_v<K, MixtureSpec>) return MixtureCarrier(k.components);
        else return GammaCarrier{};
      },
      spec);
}

inline FptDraw carrier_fpt(const Carrier& c, const CappedBoundary& a, RngStream& rng) {
  return std::visit([&](const auto& k) { return k.sample_fpt(a, rng); }, c);
}

inline CrossingDraw carrier_crossing(const Carrier& c, double t, double z, double w0, RngStream& rng) {
  return std::visit([&](const auto& k) { return k.sample_crossing(t, z, w0, rng); }, c);
}

inline CrossingDraw carrier_value_below(const Carrier& c, double t, double z, RngStream& rng,
                                        RejectionStats* stats = nullptr) {
  return std::visit(
      [&](const auto& k) {
        if constexpr (std::is_same_v<std::decay_t<decltype(k)>, MixtureCarrier>)
          return k.sample_values_below(t, z, rng, stats);
        else
          return k.sample_value_below(t, z, rng, stats);
      },
      c);
}

inline Recovered carrier_recover(const Carrier& c, double t, const CrossingDraw& d, double q, double r,
                                 RngStream& rng) {
  return std::visit([&](const auto& k) { return k.recover(t, d, q, r, rng); }, c);
}

}  // namespace levypass
