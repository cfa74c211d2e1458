// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "levypass/errors.hpp"

namespace levypass {

/// Non-increasing, absolutely continuous boundary c(t) on (0, inf), or the
/// degenerate boundary c = inf.
///
/// Derivatives are right derivatives; at knots of a piecewise-linear
/// boundary the right slope is reported. Callback boundaries are trusted to
/// be non-increasing; only c(0+) > 0 is checked.
class Boundary {
 public:
  struct Infinite {};
  struct Constant {
    double level;
  };
  struct Linear {
    double intercept;
    double slope;
  };
  struct PiecewiseLinear {
    std::vector<double> times;   // strictly increasing, times[0] == 0
    std::vector<double> values;  // non-increasing
  };
  struct Callback {
    std::shared_ptr<const std::function<double(double)>> value;
    std::shared_ptr<const std::function<double(double)>> derivative;
    double time_offset = 0;
    double value_offset = 0;
  };
  using Kind = std::variant<Infinite, Constant, Linear, PiecewiseLinear, Callback>;

  static Boundary infinite() { return Boundary(Infinite{}); }

  static Boundary constant(double a) {
    if (!(a > 0)) throw ParameterError("boundary: constant level must be positive");
    return Boundary(Constant{a});
  }

  /// c(t) = a + slope * t with slope <= 0.
  static Boundary linear(double a, double slope) {
    if (!(a > 0)) throw ParameterError("boundary: intercept must be positive");
    if (!(slope <= 0)) throw ParameterError("boundary: slope must be non-positive");
    if (slope == 0) return constant(a);
    return Boundary(Linear{a, slope});
  }

  /// Linear interpolation through (times[i], values[i]); flat after the last
  /// knot.
  static Boundary piecewise_linear(std::vector<double> times, std::vector<double> values) {
    if (times.empty() || times.size() != values.size())
      throw ParameterError("boundary: knots and values must be non-empty and equal length");
    if (times.front() != 0) throw ParameterError("boundary: first knot must be at t = 0");
    if (!(values.front() > 0)) throw ParameterError("boundary: c(0+) must be positive");
    for (std::size_t i = 1; i < times.size(); ++i) {
      if (!(times[i] > times[i - 1])) throw ParameterError("boundary: knots must increase");
      if (!(values[i] <= values[i - 1]))
        throw ParameterError("boundary: values must be non-increasing");
    }
    if (times.size() == 1) return constant(values.front());
    return Boundary(PiecewiseLinear{std::move(times), std::move(values)});
  }

  static Boundary callback(std::function<double(double)> value,
                           std::function<double(double)> derivative) {
    if (!value || !derivative) throw ParameterError("boundary: callback functions required");
    if (!(value(0.0) > 0)) throw ParameterError("boundary: c(0+) must be positive");
    return Boundary(Callback{
        std::make_shared<const std::function<double(double)>>(std::move(value)),
        std::make_shared<const std::function<double(double)>>(std::move(derivative))});
  }

  const Kind& kind() const { return kind_; }
  bool is_infinite() const { return std::holds_alternative<Infinite>(kind_); }
  bool is_constant() const { return std::holds_alternative<Constant>(kind_); }

  double value(double t) const {
    return std::visit(
        [t](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Infinite>) {
            return std::numeric_limits<double>::infinity();
          } else if constexpr (std::is_same_v<K, Constant>) {
            return k.level;
          } else if constexpr (std::is_same_v<K, Linear>) {
            return k.intercept + k.slope * t;
          } else if constexpr (std::is_same_v<K, PiecewiseLinear>) {
            const auto& ts = k.times;
            if (t >= ts.back()) return k.values.back();
            const auto it = std::upper_bound(ts.begin(), ts.end(), t);
            const std::size_t i = static_cast<std::size_t>(it - ts.begin()) - 1;
            const double w = (t - ts[i]) / (ts[i + 1] - ts[i]);
            return k.values[i] + w * (k.values[i + 1] - k.values[i]);
          } else {
            return (*k.value)(t + k.time_offset) + k.value_offset;
          }
        },
        kind_);
  }

  /// Right derivative c'(t+).
  double slope(double t) const {
    return std::visit(
        [t](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Infinite> || std::is_same_v<K, Constant>) {
            return 0.0;
          } else if constexpr (std::is_same_v<K, Linear>) {
            return k.slope;
          } else if constexpr (std::is_same_v<K, PiecewiseLinear>) {
            const auto& ts = k.times;
            if (t >= ts.back()) return 0.0;
            const auto it = std::upper_bound(ts.begin(), ts.end(), t);
            const std::size_t i = static_cast<std::size_t>(it - ts.begin()) - 1;
            return (k.values[i + 1] - k.values[i]) / (ts[i + 1] - ts[i]);
          } else {
            return (*k.derivative)(t + k.time_offset);
          }
        },
        kind_);
  }

  /// u -> c(u + t0) - z0. Requires z0 < c(t0).
  Boundary shifted(double t0, double z0) const {
    if (!(t0 >= 0)) throw ContractViolation("boundary_shift: t0 must be non-negative");
    const double at = value(t0);
    if (!(z0 < at)) throw ContractViolation("boundary_shift: level already reached");
    return rebased(t0, at - z0);
  }

  /// u -> c(u + t0) - c(t0) + gap, i.e. the shifted boundary whose value at
  /// the new origin is exactly `gap`. The engine uses this form so that the
  /// remaining distance to the boundary is carried without cancellation.
  Boundary rebased(double t0, double gap) const {
    if (!(gap > 0)) throw ContractViolation("boundary_shift: remaining gap must be positive");
    return std::visit(
        [&](const auto& k) -> Boundary {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Infinite>) {
            return Boundary(Infinite{});
          } else if constexpr (std::is_same_v<K, Constant>) {
            return Boundary(Constant{gap});
          } else if constexpr (std::is_same_v<K, Linear>) {
            return Boundary(Linear{gap, k.slope});
          } else if constexpr (std::is_same_v<K, PiecewiseLinear>) {
            const double base = value(t0);
            PiecewiseLinear out;
            out.times.push_back(0.0);
            out.values.push_back(gap);
            for (std::size_t i = 0; i < k.times.size(); ++i) {
              if (k.times[i] > t0) {
                out.times.push_back(k.times[i] - t0);
                out.values.push_back(std::min(k.values[i] - base + gap, out.values.back()));
              }
            }
            if (out.times.size() == 1) return Boundary(Constant{gap});
            return Boundary(std::move(out));
          } else {
            Callback c = k;
            c.time_offset = k.time_offset + t0;
            c.value_offset = gap - (*k.value)(c.time_offset);
            return Boundary(std::move(c));
          }
        },
        kind_);
  }

  /// t -> value_factor * c(t / time_factor).
  Boundary scaled(double time_factor, double value_factor) const {
    if (!(time_factor > 0 && value_factor > 0))
      throw ParameterError("boundary: scale factors must be positive");
    return std::visit(
        [&](const auto& k) -> Boundary {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Infinite>) {
            return Boundary(Infinite{});
          } else if constexpr (std::is_same_v<K, Constant>) {
            return Boundary(Constant{value_factor * k.level});
          } else if constexpr (std::is_same_v<K, Linear>) {
            return Boundary(Linear{value_factor * k.intercept, value_factor * k.slope / time_factor});
          } else if constexpr (std::is_same_v<K, PiecewiseLinear>) {
            PiecewiseLinear out = k;
            for (double& t : out.times) t *= time_factor;
            for (double& v : out.values) v *= value_factor;
            return Boundary(std::move(out));
          } else {
            const Boundary inner = *this;
            return callback(
                [inner, time_factor, value_factor](double t) {
                  return value_factor * inner.value(t / time_factor);
                },
                [inner, time_factor, value_factor](double t) {
                  return value_factor * inner.slope(t / time_factor) / time_factor;
                });
          }
        },
        kind_);
  }

  /// t -> c(t) - drift * t. The result may reach zero in finite time.
  Boundary minus_drift(double drift) const {
    if (!(drift >= 0)) throw ParameterError("boundary: drift must be non-negative");
    if (drift == 0 || is_infinite()) return *this;
    if (const auto* c = std::get_if<Constant>(&kind_)) return Boundary(Linear{c->level, -drift});
    if (const auto* l = std::get_if<Linear>(&kind_)) return Boundary(Linear{l->intercept, l->slope - drift});
    const Boundary inner = *this;
    return callback([inner, drift](double t) { return inner.value(t) - drift * t; },
                    [inner, drift](double t) { return inner.slope(t) - drift; });
  }

  std::string describe() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Infinite>) return "infinite";
          else if constexpr (std::is_same_v<K, Constant>) return "constant(" + std::to_string(k.level) + ")";
          else if constexpr (std::is_same_v<K, Linear>) return "linear";
          else if constexpr (std::is_same_v<K, PiecewiseLinear>) return "piecewise_linear";
          else return "callback";
        },
        kind_);
  }

 private:
  explicit Boundary(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

inline Boundary boundary_shift(const Boundary& b, double t0, double z0) { return b.shifted(t0, z0); }

/// The carrier's target level a(t) = min(c(t), r).
class CappedBoundary {
 public:
  CappedBoundary(const Boundary& b, double cap) : b_(&b), cap_(cap) {}

  double value(double t) const { return std::min(b_->value(t), cap_); }
  /// -d/dt min(c(t), r) from the right; zero where the cap is active.
  double descent_rate(double t) const {
    if (b_->value(t) > cap_) return 0.0;
    return std::max(0.0, -b_->slope(t));
  }
  bool is_infinite() const { return std::isinf(cap_) && b_->is_infinite(); }
  bool is_constant() const { return b_->is_constant() || b_->is_infinite(); }
  const Boundary& boundary() const { return *b_; }
  double cap() const { return cap_; }

 private:
  const Boundary* b_;
  double cap_;
};

}  // namespace levypass
