// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "levypass/distributions.hpp"
#include "levypass/errors.hpp"
#include "levypass/rng.hpp"
#include "levypass/special.hpp"

namespace levypass {

/// Point mass `mass` at jump size `size`.
struct Atom {
  double size;
  double mass;
};

/// Finite measure given as acceptance(x) * envelope(dx): the envelope has
/// total mass `envelope_mass` and normalized draws from `draw`; the
/// acceptance function is bounded by 1. `density`, when set, is the density
/// of the thinned measure on (lower, upper) and is only used for moments.
struct ThinnedPiece {
  double envelope_mass = 0;
  std::function<double(RngStream&)> draw;
  std::function<double(double)> acceptance;
  std::function<double(double)> density;
  double lower = 0;
  double upper = std::numeric_limits<double>::infinity();
  std::string label;
};

/// gamma e^{-q x} x^{-1-alpha} on (lo, hi], 0 <= alpha < 1, 0 < lo < hi <= inf
/// (hi = inf needs alpha > 0). Envelope gamma e^{-q lo} x^{-1-alpha}.
inline ThinnedPiece power_law_piece(double gamma, double alpha, double q, double lo, double hi) {
  detail::require(gamma > 0 && alpha >= 0 && alpha < 1 && q >= 0,
                  "power_law_piece: bad parameters");
  detail::require(lo > 0 && hi > lo, "power_law_piece: need 0 < lo < hi");
  detail::require(alpha > 0 || std::isfinite(hi), "power_law_piece: infinite mass");
  ThinnedPiece p;
  const double scale = gamma * std::exp(-q * lo);
  if (alpha > 0) {
    const double lo_a = std::pow(lo, -alpha);
    const double hi_a = std::isfinite(hi) ? std::pow(hi, -alpha) : 0.0;
    p.envelope_mass = scale * (lo_a - hi_a) / alpha;
    p.draw = [=](RngStream& rng) {
      return std::pow(lo_a - rng.uniform() * (lo_a - hi_a), -1.0 / alpha);
    };
  } else {
    const double span = std::log(hi / lo);
    p.envelope_mass = scale * span;
    p.draw = [=](RngStream& rng) { return lo * std::exp(span * rng.uniform()); };
  }
  p.acceptance = [=](double x) { return std::exp(-q * (x - lo)); };
  p.density = [=](double x) { return gamma * std::exp(-q * x) * std::pow(x, -1.0 - alpha); };
  p.lower = lo;
  p.upper = hi;
  p.label = "power_law";
  return p;
}

/// gamma x^{-1-alpha} (e^{-q_low x} - e^{-q_high x}) on (0, hi], q_low < q_high.
/// Envelope gamma (q_high - q_low) x^{-alpha}; acceptance
/// e^{-q_low x} psi((q_high - q_low) x).
inline ThinnedPiece tilt_gap_piece(double gamma, double alpha, double q_low, double q_high,
                                   double hi) {
  detail::require(gamma > 0 && alpha > 0 && alpha < 1 && q_low >= 0 && q_high > q_low,
                  "tilt_gap_piece: bad parameters");
  detail::require(hi > 0 && std::isfinite(hi), "tilt_gap_piece: need finite hi > 0");
  ThinnedPiece p;
  const double dq = q_high - q_low;
  p.envelope_mass = gamma * dq * std::pow(hi, 1.0 - alpha) / (1.0 - alpha);
  p.draw = [=](RngStream& rng) { return hi * std::pow(rng.uniform(), 1.0 / (1.0 - alpha)); };
  p.acceptance = [=](double x) { return std::exp(-q_low * x) * psi_tilt(dq * x); };
  p.density = [=](double x) {
    return gamma * std::pow(x, -1.0 - alpha) * (std::exp(-q_low * x) - std::exp(-q_high * x));
  };
  p.lower = 0;
  p.upper = hi;
  p.label = "tilt_gap";
  return p;
}

/// e^{-x} / x on (lo, hi], lo > 0. Envelope e^{-x} / lo, acceptance lo / x.
inline ThinnedPiece exponential_tail_piece(double lo, double hi) {
  detail::require(lo > 0 && hi > lo, "exponential_tail_piece: need 0 < lo < hi");
  ThinnedPiece p;
  const double mass_e = std::isfinite(hi) ? -std::expm1(-(hi - lo)) : 1.0;
  p.envelope_mass = std::exp(-lo) * mass_e / lo;
  p.draw = [=](RngStream& rng) { return lo - std::log1p(-rng.uniform() * mass_e); };
  p.acceptance = [=](double x) { return lo / x; };
  p.density = [](double x) { return std::exp(-x) / x; };
  p.lower = lo;
  p.upper = hi;
  p.label = "exponential_tail";
  return p;
}

/// Time and size of the first jump of a compound Poisson process, cut at
/// the horizon: time == horizon and size == 0 when no jump occurs before it.
struct FirstJump {
  double time;
  double size;
};

/// Finite Lévy measure chi = sum of atoms + sum of thinned density pieces.
class FiniteMeasure {
 public:
  FiniteMeasure() = default;

  FiniteMeasure& add_atom(double size, double mass) {
    detail::require(size > 0 && mass > 0, "finite measure: atom size and mass must be positive");
    atoms_.push_back({size, mass});
    total_ += mass;
    return *this;
  }

  FiniteMeasure& add_piece(ThinnedPiece piece) {
    detail::require(piece.envelope_mass >= 0 && std::isfinite(piece.envelope_mass),
                    "finite measure: envelope mass must be finite");
    detail::require(static_cast<bool>(piece.draw) && static_cast<bool>(piece.acceptance),
                    "finite measure: piece needs a sampler and an acceptance function");
    total_ += piece.envelope_mass;
    pieces_.push_back(std::move(piece));
    return *this;
  }

  FiniteMeasure& add(const FiniteMeasure& other) {
    for (const auto& a : other.atoms_) add_atom(a.size, a.mass);
    for (const auto& p : other.pieces_) add_piece(p);
    return *this;
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<ThinnedPiece>& pieces() const { return pieces_; }
  bool empty() const { return total_ == 0; }
  /// Rate of the proposal process (atoms plus envelopes).
  double envelope_mass() const { return total_; }

  /// Image of the measure under x -> size_factor * x, with intensity
  /// multiplied by rate_factor.
  FiniteMeasure scaled(double rate_factor, double size_factor) const {
    detail::require(rate_factor > 0 && size_factor > 0, "finite measure: bad scale factors");
    FiniteMeasure out;
    for (const auto& a : atoms_) out.add_atom(a.size * size_factor, a.mass * rate_factor);
    for (const auto& p : pieces_) {
      ThinnedPiece s;
      s.envelope_mass = p.envelope_mass * rate_factor;
      s.draw = [d = p.draw, size_factor](RngStream& rng) { return size_factor * d(rng); };
      s.acceptance = [a = p.acceptance, size_factor](double x) { return a(x / size_factor); };
      if (p.density)
        s.density = [d = p.density, rate_factor, size_factor](double x) {
          return rate_factor * d(x / size_factor) / size_factor;
        };
      s.lower = p.lower * size_factor;
      s.upper = p.upper * size_factor;
      s.label = p.label;
      out.add_piece(std::move(s));
    }
    return out;
  }

  /// One proposal jump: (size, accepted).
  std::pair<double, bool> propose(RngStream& rng) const {
    double pick = rng.uniform() * total_;
    for (const auto& a : atoms_) {
      if (pick < a.mass) return {a.size, true};
      pick -= a.mass;
    }
    for (const auto& p : pieces_) {
      if (pick < p.envelope_mass || &p == &pieces_.back()) {
        const double x = p.draw(rng);
        return {x, rng.uniform() <= p.acceptance(x)};
      }
      pick -= p.envelope_mass;
    }
    return {atoms_.back().size, true};
  }

  /// Thinning: exponential proposal times at the envelope rate, each
  /// proposal kept with probability acceptance(x).
  FirstJump first_jump(double horizon, RngStream& rng) const {
    detail::require(horizon > 0, "first_jump_cp: horizon must be positive");
    if (total_ == 0) return {horizon, 0.0};
    double t = 0;
    for (;;) {
      t += sample_exponential(1.0 / total_, rng);
      if (t >= horizon) return {horizon, 0.0};
      const auto [x, ok] = propose(rng);
      if (ok) return {t, x};
    }
  }

  /// (int x chi(dx), int x^2 chi(dx)). Throws UnsupportedModel when a
  /// density piece has no density or its moments diverge.
  std::pair<double, double> moments() const {
    double m1 = 0, m2 = 0;
    for (const auto& a : atoms_) {
      m1 += a.mass * a.size;
      m2 += a.mass * a.size * a.size;
    }
    for (const auto& p : pieces_) {
      if (!p.density) throw UnsupportedModel("finite measure: piece '" + p.label + "' has no density");
      m1 += integrate(p, 1);
      m2 += integrate(p, 2);
    }
    return {m1, m2};
  }

 private:
  static double integrate(const ThinnedPiece& p, int power) {
    auto f = [&](double x) { return std::pow(x, power) * p.density(x); };
    double value;
    if (std::isfinite(p.upper)) {
      boost::math::quadrature::tanh_sinh<double> q;
      value = q.integrate(f, p.lower, p.upper, 1e-12);
    } else {
      boost::math::quadrature::exp_sinh<double> q;
      value = q.integrate([&](double u) { return f(p.lower + u); }, 0.0,
                          std::numeric_limits<double>::infinity(), 1e-12);
    }
    if (!std::isfinite(value))
      throw UnsupportedModel("finite measure: moments of piece '" + p.label + "' diverge");
    return value;
  }

  std::vector<Atom> atoms_;
  std::vector<ThinnedPiece> pieces_;
  double total_ = 0;
};

/// first_jump_cp: (D, J) for the compound Poisson process with Lévy
/// measure chi, cut at horizon A.
inline FirstJump first_jump_cp(const FiniteMeasure& chi, double horizon, RngStream& rng) {
  return chi.first_jump(horizon, rng);
}

}  // namespace levypass
