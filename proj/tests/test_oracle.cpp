// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "levypass/engine.hpp"
#include "levypass/oracle.hpp"
#include "levypass/stats.hpp"

using namespace levypass;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
const double kG = 0.5 / std::sqrt(std::numbers::pi);
}  // namespace

TEST(FptCdf, GammaClosedForm) {
  EXPECT_NEAR(eval_fpt_cdf(GammaSpec{}, 1.0, 1.0), std::exp(-1.0), 1e-14);
  EXPECT_EQ(eval_fpt_cdf(GammaSpec{}, 1.0, 0.0), 0.0);
}

TEST(FptCdf, StableHalfMatchesErf) {
  // rho = 1: P{S(t) >= a} = P{X >= a / t^2} = erf(t / (2 sqrt a)).
  EXPECT_NEAR(eval_fpt_cdf(StableSpec{0.5, kG}, 1.0, 1.0), 0.5204998778130465, 1e-6);
  for (double a : {0.2, 1.0, 3.0})
    for (double t : {0.05, 0.3, 1.0, 2.0, 8.0})
      EXPECT_NEAR(eval_fpt_cdf(StableSpec{0.5, kG}, a, t), std::erf(t / (2 * std::sqrt(a))), 1e-6) << a << ' ' << t;
}

TEST(FptCdf, MonotoneAndLimits) {
  for (const CarrierSpec c : {CarrierSpec{StableSpec{0.3, 1.0}}, CarrierSpec{StableSpec{0.8, 0.2}},
                              CarrierSpec{GammaSpec{}}}) {
    double prev = 0;
    for (int i = 1; i <= 200; ++i) {
      const double p = eval_fpt_cdf(c, 1.0, 0.05 * i);
      ASSERT_GE(p, prev - 1e-9);
      prev = p;
    }
    EXPECT_LT(eval_fpt_cdf(c, 1.0, 1e-6), 1e-3);
    EXPECT_GT(eval_fpt_cdf(c, 1.0, 1e4), 1 - 1e-4);
  }
  EXPECT_THROW(eval_fpt_cdf(MixtureSpec{{{0.5, 1.0}}}, 1.0, 1.0), UnsupportedModel);
}

TEST(FptCdf, AgreesWithSampledPassageTimes) {
  const auto model = stable_model(0.7, 0.4, 0.0, kInf);
  RngStream r(1, 0);
  std::vector<double> ts(10000);
  for (auto& t : ts) t = sample_subordinator_fpe(model, Boundary::constant(1.5), kInf, r).T;
  EXPECT_GT(ks_one_sample(ts, [](double t) { return eval_fpt_cdf(StableSpec{0.7, 0.4}, 1.5, t); }).p_value, 0.01);
}

TEST(Oracle, TruncationBiasIsMonotone) {
  const auto model = stable_model(0.5, kG, 0.0, 1.0);
  const Boundary c = Boundary::constant(1.0);
  std::vector<double> coarse, fine;
  for (int i = 0; i < 4000; ++i) {
    RngStream a(2, i), b(3, i);
    coarse.push_back(oracle_fpe(model, c, kInf, TruncationScheme{1e-2, false}, a).T);
    fine.push_back(oracle_fpe(model, c, kInf, TruncationScheme{1e-4, false}, b).T);
  }
  std::sort(coarse.begin(), coarse.end());
  std::sort(fine.begin(), fine.end());
  EXPECT_GE(coarse[2000], fine[2000]);
}

TEST(Oracle, ConvergesToExact) {
  const auto model = stable_model(0.5, kG, 1.0, 1.0);
  const Boundary c = Boundary::constant(1.0);
  std::vector<double> exact;
  for (int i = 0; i < 10000; ++i) {
    RngStream r(4, i);
    exact.push_back(sample_subordinator_fpe(model, c, kInf, r).T);
  }
  std::vector<double> d;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    std::vector<double> o;
    for (int i = 0; i < 10000; ++i) {
      RngStream r(5, i);
      o.push_back(oracle_fpe(model, c, kInf, TruncationScheme{eps, false}, r).T);
    }
    d.push_back(ks_two_sample(exact, o).statistic);
  }
  EXPECT_GT(d[0], d[1]);
  EXPECT_GT(d[0], d[2]);
}

TEST(Oracle, RefusesTinyEpsilon) {
  RngStream r(6, 0);
  const auto model = stable_model(0.5, 1.0, 0.0, 1.0);
  EXPECT_THROW(oracle_fpe(model, Boundary::constant(1.0), 10.0, TruncationScheme{1e-20, false}, r), OracleRefused);
  EXPECT_THROW(oracle_fpe(model, Boundary::constant(1.0), 10.0, TruncationScheme{2.0, false}, r), ParameterError);
}

TEST(Oracle, CompensatedDriftKeepsMean) {
  const auto model = stable_model(0.5, kG, 1.0, 1.0);
  const TruncationScheme s{1e-2, true};
  const Moments m = id_moments(model, 1.0);
  std::vector<double> xs(50000);
  for (int i = 0; i < 50000; ++i) {
    RngStream r(7, i);
    xs[i] = oracle_fpe(model, Boundary::infinite(), 1.0, s, r).z_final();
  }
  EXPECT_LT(std::abs(moment_check(xs, m.mean, m.variance).z_mean), 3);
}

TEST(Oracle, IntervalExitLeavesInterval) {
  const auto plus = gamma_model(1.0);
  const auto minus = stable_model(0.5, kG, 1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    RngStream r(8, i);
    const auto e = oracle_interval(plus, minus, 0.5, 0.5, 5.0, TruncationScheme{}, r);
    if (!e.censored) ASSERT_TRUE(e.z_final() >= 0.5 || e.z_final() <= -0.5);
  }
}
