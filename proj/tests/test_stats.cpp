// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "levypass/distributions.hpp"
#include "levypass/stats.hpp"

using namespace levypass;

TEST(Kolmogorov, KnownValues) {
  // Survival function of the Kolmogorov distribution at 1 and 0.5.
  EXPECT_NEAR(kolmogorov_q(1.0), 0.26999967167735456, 1e-14);
  EXPECT_NEAR(kolmogorov_q(0.5), 0.9639452436648751, 1e-12);
  EXPECT_EQ(kolmogorov_q(0.0), 1.0);
  EXPECT_LT(kolmogorov_q(3.0), 1e-7);
}

TEST(KsTwoSample, IdenticalSampleHasZeroStatistic) {
  RngStream r(1, 0);
  std::vector<double> xs(500);
  for (auto& x : xs) x = r.uniform();
  const auto t = ks_two_sample(xs, xs);
  EXPECT_EQ(t.statistic, 0.0);
  EXPECT_EQ(t.p_value, 1.0);
}

TEST(KsTwoSample, NullCalibration) {
  int passes = 0;
  for (int rep = 0; rep < 100; ++rep) {
    RngStream r(2, rep);
    std::vector<double> xs(10000), ys(10000);
    for (auto& x : xs) x = r.uniform();
    for (auto& y : ys) y = r.uniform();
    if (ks_two_sample(xs, ys).p_value > 0.01) ++passes;
  }
  EXPECT_GE(passes, 98);
}

TEST(KsTwoSample, DetectsBeta22) {
  RngStream r(3, 0);
  std::vector<double> xs(10000), ys(10000);
  for (auto& x : xs) x = r.uniform();
  for (auto& y : ys) y = sample_beta(2, 2, r);
  EXPECT_LT(ks_two_sample(xs, ys).p_value, 1e-6);
}

TEST(KsTwoSample, ErrorsOnSmallOrDegenerate) {
  EXPECT_THROW(ks_two_sample(std::vector<double>(50, 1.0), std::vector<double>(500, 1.0)), ParameterError);
  EXPECT_THROW(ks_two_sample(std::vector<double>(500, 1.0), std::vector<double>(500, 1.0)), DegenerateSample);
}

TEST(KsOneSample, Calibrated) {
  int passes = 0;
  for (int rep = 0; rep < 100; ++rep) {
    RngStream r(4, rep);
    std::vector<double> xs(2000);
    for (auto& x : xs) x = sample_exponential(1.0, r);
    if (ks_one_sample(xs, [](double x) { return 1 - std::exp(-x); }).p_value > 0.01) ++passes;
  }
  EXPECT_GE(passes, 96);
}

TEST(MomentCheck, ZScores) {
  RngStream r(5, 0);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = sample_exponential(1.0, r);
  const auto ok = moment_check(xs, 1.0, 1.0);
  EXPECT_LT(std::abs(ok.z_mean), 3);
  EXPECT_LT(std::abs(ok.z_variance), 3);
  const auto off = moment_check(xs, 1.05, 1.0);
  EXPECT_LT(off.z_mean, -10);
  EXPECT_THROW(moment_check(std::vector<double>(200, 2.0), 2.0, 0.0), DegenerateSample);
}

TEST(ChiSquare, KnownTailProbabilities) {
  // chi-square survival at 20 with 20 dof and at 3.5 with 4 dof
  std::vector<double> obs{10, 20}, exp{10, 20};
  EXPECT_NEAR(chi_square_gof(obs, exp, 1).p_value, 1.0, 1e-15);
  // Sum (O-E)^2/E = 20 built from two cells
  std::vector<double> o2{20, 0}, e2{10, 10};
  const auto t = chi_square_gof(o2, e2, 20);
  EXPECT_DOUBLE_EQ(t.statistic, 20.0);
  EXPECT_NEAR(t.p_value, 0.4579297144718523, 1e-12);
  std::vector<double> o3{10 + std::sqrt(35.0), 10}, e3{10, 10};
  EXPECT_NEAR(chi_square_gof(o3, e3, 4).p_value, 0.477878344488724, 1e-12);
}
