// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "levypass/errors.hpp"
#include "levypass/finite_measure.hpp"

namespace levypass {

/// Lambda(dx) = gamma x^{-1-alpha} dx on (0, inf).
struct StableSpec {
  double alpha;
  double gamma;
};

struct StableComponent {
  double alpha;
  double gamma;
};

/// Lambda(dx) = sum_i gamma_i x^{-1-alpha_i} dx.
struct MixtureSpec {
  std::vector<StableComponent> components;
};

/// Lambda(dx) = x^{-1} e^{-x} dx. The exponential tilt is part of the
/// carrier, so models using it carry q = 0.
struct GammaSpec {};

/// No infinite-activity part: the process is the compound Poisson chi.
struct NoCarrier {};

using CarrierSpec = std::variant<NoCarrier, StableSpec, MixtureSpec, GammaSpec>;

inline std::string carrier_name(const CarrierSpec& c) {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, NoCarrier>) return "none";
        else if constexpr (std::is_same_v<K, StableSpec>) return "stable";
        else if constexpr (std::is_same_v<K, MixtureSpec>) return "mixture";
        else return "gamma";
      },
      c);
}

/// Target Lévy measure e^{-q x} 1{0 < x <= r} Lambda(dx) + chi(dx), plus a
/// deterministic non-negative drift that only the negative side of a
/// two-sided process may carry.
struct TiltedTruncatedModel {
  CarrierSpec carrier = NoCarrier{};
  double q = 0;
  double r = std::numeric_limits<double>::infinity();
  FiniteMeasure chi;
  double drift = 0;

  bool has_carrier() const { return !std::holds_alternative<NoCarrier>(carrier); }
  bool is_zero() const { return !has_carrier() && chi.empty() && drift == 0; }

  void validate() const {
    if (!(q >= 0) || !std::isfinite(q)) throw ParameterError("model: tilt q must be finite and >= 0");
    if (!(r > 0)) throw ParameterError("model: cutoff r must be positive");
    if (!(drift >= 0) || !std::isfinite(drift)) throw ParameterError("model: drift must be >= 0");
    std::visit(
        [&](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, StableSpec>) {
            if (!(k.alpha > 0 && k.alpha < 1)) throw ParameterError("model: alpha must lie in (0, 1)");
            if (!(k.gamma > 0)) throw ParameterError("model: gamma must be positive");
          } else if constexpr (std::is_same_v<K, MixtureSpec>) {
            if (k.components.empty()) throw ParameterError("model: mixture needs components");
            for (const auto& c : k.components) {
              if (!(c.alpha > 0 && c.alpha < 1)) throw ParameterError("model: alpha must lie in (0, 1)");
              if (!(c.gamma > 0)) throw ParameterError("model: gamma must be positive");
            }
          } else if constexpr (std::is_same_v<K, GammaSpec>) {
            if (q != 0) throw ParameterError("model: the Gamma carrier has its tilt built in; q must be 0");
          }
        },
        carrier);
  }
};

inline TiltedTruncatedModel stable_model(double alpha, double gamma, double q, double r,
                                         FiniteMeasure chi = {}) {
  TiltedTruncatedModel m{StableSpec{alpha, gamma}, q, r, std::move(chi), 0};
  m.validate();
  return m;
}

inline TiltedTruncatedModel gamma_model(double r, FiniteMeasure chi = {}) {
  TiltedTruncatedModel m{GammaSpec{}, 0, r, std::move(chi), 0};
  m.validate();
  return m;
}

inline TiltedTruncatedModel mixture_model(std::vector<StableComponent> comps, double q, double r,
                                          FiniteMeasure chi = {}) {
  TiltedTruncatedModel m{MixtureSpec{std::move(comps)}, q, r, std::move(chi), 0};
  m.validate();
  return m;
}

inline TiltedTruncatedModel compound_poisson_model(FiniteMeasure chi) {
  return TiltedTruncatedModel{NoCarrier{}, 0, std::numeric_limits<double>::infinity(),
                              std::move(chi), 0};
}

/// Mixture component with its own tilt and cutoff.
struct TiltedStableComponent {
  double alpha;
  double gamma;
  double q;
  double r;
};

/// Brings components with different (q_i, r_i) to the common
/// (max q_i, min r_i) and moves the difference into chi: on (0, r~] the
/// tilt gap gamma_i x^{-1-alpha_i} (e^{-q_i x} - e^{-q~ x}), and on
/// (r~, r_i] the component's own tail.
inline TiltedTruncatedModel normalize_mixture(const std::vector<TiltedStableComponent>& comps,
                                              FiniteMeasure chi = {}) {
  detail::require(!comps.empty(), "normalize_mixture: need components");
  double q = 0;
  double r = std::numeric_limits<double>::infinity();
  for (const auto& c : comps) {
    detail::require(c.q >= 0 && c.r > 0, "normalize_mixture: bad tilt or cutoff");
    q = std::max(q, c.q);
    r = std::min(r, c.r);
  }
  std::vector<StableComponent> base;
  for (const auto& c : comps) {
    base.push_back({c.alpha, c.gamma});
    if (c.q < q) {
      detail::require(std::isfinite(r), "normalize_mixture: tilt differences need a finite common cutoff");
      chi.add_piece(tilt_gap_piece(c.gamma, c.alpha, c.q, q, r));
    }
    if (c.r > r) chi.add_piece(power_law_piece(c.gamma, c.alpha, c.q, r, c.r));
  }
  return mixture_model(std::move(base), q, r, std::move(chi));
}

namespace detail {

// int_0^r x^{p} e^{-q x} dx for p > -1.
inline double tilted_power_integral(double p, double q, double r) {
  auto f = [=](double x) { return std::pow(x, p) * std::exp(-q * x); };
  double value;
  if (std::isfinite(r)) {
    boost::math::quadrature::tanh_sinh<double> integrator;
    value = integrator.integrate(f, 0.0, r, 1e-13);
  } else {
    if (!(q > 0)) throw UnsupportedModel("id_moments: r = inf with q = 0 has infinite moments");
    boost::math::quadrature::exp_sinh<double> integrator;
    value = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-13);
  }
  if (!std::isfinite(value)) throw NumericalError("id_moments: quadrature failed");
  return value;
}

// (int x Lambda_target(dx), int x^2 Lambda_target(dx)) for the carrier part.
inline std::pair<double, double> carrier_moments(const TiltedTruncatedModel& m) {
  return std::visit(
      [&](const auto& k) -> std::pair<double, double> {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, NoCarrier>) {
          return {0.0, 0.0};
        } else if constexpr (std::is_same_v<K, StableSpec>) {
          return {k.gamma * tilted_power_integral(-k.alpha, m.q, m.r),
                  k.gamma * tilted_power_integral(1.0 - k.alpha, m.q, m.r)};
        } else if constexpr (std::is_same_v<K, MixtureSpec>) {
          double m1 = 0, m2 = 0;
          for (const auto& c : k.components) {
            m1 += c.gamma * tilted_power_integral(-c.alpha, m.q, m.r);
            m2 += c.gamma * tilted_power_integral(1.0 - c.alpha, m.q, m.r);
          }
          return {m1, m2};
        } else {
          return {tilted_power_integral(0.0, 1.0, m.r), tilted_power_integral(1.0, 1.0, m.r)};
        }
      },
      m.carrier);
}

}  // namespace detail

struct Moments {
  double mean;
  double variance;
};

/// Mean and variance of Z(t): t * int x Lambda_target(dx) (+ drift * t) and
/// t * int x^2 Lambda_target(dx), carrier part by quadrature plus chi.
inline Moments id_moments(const TiltedTruncatedModel& model, double t) {
  if (!(t > 0)) throw ParameterError("id_moments: t must be positive");
  model.validate();
  const auto [c1, c2] = detail::carrier_moments(model);
  const auto [x1, x2] = model.chi.moments();
  return {t * (c1 + x1) + model.drift * t, t * (c2 + x2)};
}

}  // namespace levypass
