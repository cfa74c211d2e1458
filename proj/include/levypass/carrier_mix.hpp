// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "levypass/boundary.hpp"
#include "levypass/carrier_common.hpp"
#include "levypass/carrier_stable.hpp"
#include "levypass/distributions.hpp"
#include "levypass/errors.hpp"
#include "levypass/model.hpp"
#include "levypass/roots.hpp"

namespace levypass {

/// Carrier made of independent stable subordinators S_1..S_I with Lévy
/// densities gamma_i x^{-1-alpha_i}; the passage is that of their sum.
/// I = 1 is allowed and behaves like StableCarrier.
class MixtureCarrier {
 public:
  explicit MixtureCarrier(const std::vector<StableComponent>& comps) {
    if (comps.empty()) throw ParameterError("mixture carrier: need at least one component");
    for (const auto& c : comps) parts_.emplace_back(c.alpha, c.gamma);
  }

  std::size_t size() const { return parts_.size(); }
  const StableCarrier& component(std::size_t i) const { return parts_[i]; }

  /// Root of sum_i (rho_i t)^{1/alpha_i} X_i = a(t), X_i standard stable;
  /// the sum is formed in log-sum-exp form.
  FptDraw sample_fpt(const CappedBoundary& a, RngStream& rng) const {
    std::vector<double> log_x(parts_.size());
    for (std::size_t i = 0; i < parts_.size(); ++i) log_x[i] = parts_[i].integrand().sample_log(rng);
    FptDraw out;
    out.time = passage_for_draws(a, log_x);
    for (double l : log_x) out.s1.push_back(std::exp(l));
    return out;
  }

  double passage_for_draws(const CappedBoundary& a, const std::vector<double>& log_x) const {
    if (a.is_infinite()) return std::numeric_limits<double>::infinity();
    if (!(a.value(0.0) > 0)) throw ContractViolation("mixture fpt: a(0+) must be positive");
    return solve_increasing_in_time([&](double t) {
      const double level = a.value(t);
      if (level <= 0) return std::numeric_limits<double>::infinity();
      return log_sum(t, log_x) - std::log(level);
    });
  }

  /// log sum_i (rho_i t)^{1/alpha_i} x_i for log x_i given.
  double log_sum(double t, const std::vector<double>& log_x) const {
    double m = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(parts_.size());
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      terms[i] = log_x[i] - parts_[i].log_standardizer(t);
      m = std::max(m, terms[i]);
    }
    double acc = 0;
    for (double v : terms) acc += std::exp(v - m);
    return m + std::log(acc);
  }

  /// Component left values and the jump of the sum at a passage at time t
  /// across level z with descent rate w0 of the level.
  CrossingDraw sample_crossing(double t, double z, double w0, RngStream& rng) const {
    std::vector<const StableCarrier*> ptrs;
    for (const auto& p : parts_) ptrs.push_back(&p);
    return detail::stable_sum_crossing(ptrs, t, z, w0, rng, true);
  }

  /// Component values at time t conditioned on their sum being <= z.
  CrossingDraw sample_values_below(double t, double z, RngStream& rng,
                                   RejectionStats* stats = nullptr) const {
    if (!(t > 0 && z > 0)) throw ParameterError("mixture values_below: need t, z > 0");
    const std::size_t n = parts_.size();
    std::vector<double> scale(n);
    for (std::size_t i = 0; i < n; ++i) scale[i] = -parts_[i].log_standardizer(t);
    std::uint64_t tries = 0;
    CrossingDraw d;
    d.components.resize(n);
    for (;;) {
      ++tries;
      double sum = 0;
      for (std::size_t i = 0; i < n; ++i) {
        d.components[i] = std::exp(scale[i] + parts_[i].integrand().sample_log(rng));
        sum += d.components[i];
      }
      if (sum <= z) {
        if (stats) {
          stats->proposals += tries;
          ++stats->calls;
          if (tries > RejectionStats::warn_after) stats->low_efficiency = true;
        }
        d.s_left = sum;
        d.level_gap = std::isinf(z) ? z : z - sum;
        return d;
      }
    }
  }

  /// Per-component tilted recovery; x is the sum of the recovered parts.
  Recovered recover(double t, const CrossingDraw& d, double q, double r, RngStream& rng) const {
    if (d.components.size() != parts_.size())
      throw ContractViolation("mixture recover: component count mismatch");
    Recovered out;
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      const double s = std::min(d.components[i], r);
      const Recovered part = parts_[i].sample_tilted_given_sum(t, s, q, r, rng);
      out.x += part.x;
      out.gap += part.gap;
    }
    return out;
  }

  std::vector<double> recover_components(double t, const std::vector<double>& s, double q, double r,
                                         RngStream& rng) const {
    if (s.size() != parts_.size()) throw ContractViolation("recover_components: size mismatch");
    std::vector<double> x(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
      x[i] = parts_[i].sample_tilted_given_sum(t, s[i], q, r, rng).x;
    return x;
  }

 private:
  std::vector<StableCarrier> parts_;
};

}  // namespace levypass
