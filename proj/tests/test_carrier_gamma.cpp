// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "levypass/carrier_gamma.hpp"
#include "levypass/engine.hpp"
#include "levypass/special.hpp"
#include "levypass/stats.hpp"

using namespace levypass;

TEST(GammaQ, MatchesBoost) {
  for (double a : {1e-8, 1e-3, 0.1, 0.5, 1.0, 2.5, 10.0, 60.0})
    for (double x : {1e-6, 0.01, 0.3, 1.0, 1.5, 4.0, 30.0, 80.0}) {
      const double want = boost::math::gamma_q(a, x);
      EXPECT_NEAR(gamma_q(a, x), want, 1e-13 + 1e-11 * want) << a << ' ' << x;
    }
}

TEST(GammaBranches, ReproduceTargetOnGrid) {
  for (const auto [t, z] : {std::pair{1.3, 0.7}, std::pair{0.2, 3.0}, std::pair{5.0, 0.1}}) {
    const GammaBranches g{t, z};
    double dev = 0;
    for (int i = 0; i < 60; ++i) {
      const double x = z * (i + 0.5) / 60;
      for (int j = 0; j < 60; ++j) {
        const double v = (z - x) + 2.5 * z * (j + 0.5) / 60;
        const double lhs = g.w1() * g.h1(x, v) * g.rho1(x, v) + g.w2() * g.h2(x, v) * g.rho2(x, v);
        dev = std::max(dev, std::abs(lhs / g.target(x, v) - 1));
      }
    }
    EXPECT_LT(dev, 1e-12) << t << ' ' << z;
  }
}

TEST(GammaBranches, HBoundedByOne) {
  const GammaBranches g{0.7, 1.1};
  for (int i = 1; i < 100; ++i)
    for (int j = 1; j < 100; ++j) {
      const double x = g.z * i / 100, v = 3 * g.z * j / 100;
      ASSERT_LE(g.h1(x, v), 1 + 1e-12);
      ASSERT_LE(g.h2(x, v), 1 + 1e-12);
    }
}

TEST(GammaCarrier, PassageTimeMedian) {
  const GammaCarrier c;
  const Boundary b = Boundary::constant(1.0);
  const CappedBoundary cb(b, std::numeric_limits<double>::infinity());
  RngStream r(1, 0);
  std::vector<double> ts(20001);
  for (auto& t : ts) t = c.sample_fpt(cb, r).time;
  EXPECT_GT(ks_one_sample(ts, [](double t) { return boost::math::gamma_q(t, 1.0); }).p_value, 0.01);
  std::nth_element(ts.begin(), ts.begin() + 10000, ts.end());
  // root of Q(t, 1) = 1/2
  EXPECT_NEAR(ts[10000], 1.3142500103453505, 0.03);
}

TEST(GammaCarrier, CrossingLaw) {
  // Target: creep weight w0 g_t(z); jump part density g_t(s) E1(z - s) in s,
  // and v | s with tail E1(v) / E1(z - s).
  const double t = 1.3, z = 0.7, w0 = 0.4;
  const auto g = [&](double s) { return std::exp((t - 1) * std::log(s) - s - std::lgamma(t)); };
  const int m = 40000;
  std::vector<double> cdf(m + 1, 0);
  for (int i = 0; i < m; ++i) {
    // substitute s = z (1 - u^2) to tame the log singularity at s = z
    const double u = (i + 0.5) / m, s = z * (1 - u * u);
    cdf[i + 1] = cdf[i] + g(s) * boost::math::expint(1, z - s) * 2 * z * u / m;
  }
  const double jump_mass = cdf[m], creep_mass = w0 * g(z);
  const GammaCarrier c;
  RngStream r(2, 0);
  std::vector<double> ss, us;
  int creeps = 0;
  const int n = 30000;
  for (int i = 0; i < n; ++i) {
    const CrossingDraw d = c.sample_crossing(t, z, w0, r);
    if (d.creep) {
      ++creeps;
      ASSERT_EQ(d.s_left, z);
      continue;
    }
    ASSERT_GT(d.s_left + d.jump, z * (1 - 1e-15));
    ss.push_back(d.s_left);
    us.push_back(boost::math::expint(1, d.jump) / boost::math::expint(1, d.level_gap));
  }
  const double p = creep_mass / (creep_mass + jump_mass);
  EXPECT_NEAR(creeps / double(n), p, 3 * std::sqrt(p * (1 - p) / n));
  EXPECT_GT(ks_one_sample(ss,
                          [&](double s) {
                            // F(s) = mass of (0, s] = total - mass of (s, z]
                            const double u = std::sqrt(std::max(0.0, 1 - s / z));
                            const double pos = u * m;
                            const int i = std::clamp(static_cast<int>(pos), 0, m - 1);
                            return 1 - (cdf[i] + (cdf[i + 1] - cdf[i]) * (pos - i)) / jump_mass;
                          })
                .p_value,
            0.01);
  EXPECT_GT(ks_one_sample(us, [](double u) { return u; }).p_value, 0.01);
}

TEST(GammaCarrier, ReductionOfGeneralGamma) {
  // gamma~ = 2, q~ = 3: Z~(t) ~ Gamma(2 t, rate 3), so P{T <= t} = Q(2 t, 3 a).
  const double a = 0.8;
  const auto red = reduce_general(2.0, 3.0, std::numeric_limits<double>::infinity(), FiniteMeasure{},
                                  Boundary::constant(a));
  RngStream r(3, 0);
  std::vector<double> ts(20000);
  for (auto& t : ts)
    t = red.reduction.to_original(sample_subordinator_fpe(red.model, red.boundary,
                                                          std::numeric_limits<double>::infinity(), r))
            .T;
  EXPECT_GT(ks_one_sample(ts, [a](double t) { return boost::math::gamma_q(2 * t, 3 * a); }).p_value, 0.01);
}

TEST(GammaCarrier, TruncatedMoments) {
  FiniteMeasure chi;
  chi.add_atom(0.25, 0.8);
  const auto model = gamma_model(0.4, chi);
  const Moments m = id_moments(model, 2.0);
  // 2 (int_0^0.4 e^{-x} dx + 0.2), 2 (int_0^0.4 x e^{-x} dx + 0.05)
  EXPECT_NEAR(m.mean, 2 * (1 - std::exp(-0.4) + 0.2), 1e-12);
  EXPECT_NEAR(m.variance, 2 * (1 - 1.4 * std::exp(-0.4) + 0.05), 1e-12);
  RngStream r(4, 0);
  std::vector<double> xs(200000);
  for (auto& x : xs) x = sample_id(model, 2.0, r);
  const auto z = moment_check(xs, m.mean, m.variance);
  EXPECT_LT(std::abs(z.z_mean), 3);
  EXPECT_LT(std::abs(z.z_variance), 3);
}
