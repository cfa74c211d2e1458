// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "levypass/distributions.hpp"
#include "levypass/errors.hpp"
#include "levypass/stats.hpp"

using namespace levypass;

TEST(Beta, OneOneIsUniform) {
  RngStream r(1, 0);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = sample_beta(1, 1, r);
  EXPECT_GT(ks_one_sample(xs, [](double x) { return x; }).p_value, 0.01);
}

TEST(Beta, MeanAndSupport) {
  RngStream r(2, 0);
  std::vector<double> xs(100000);
  for (auto& x : xs) {
    x = sample_beta(0.3, 2.5, r);
    ASSERT_GT(x, 0.0);
    ASSERT_LT(x, 1.0);
  }
  const double a = 0.3, b = 2.5;
  const auto m = moment_check(xs, a / (a + b), a * b / ((a + b) * (a + b) * (a + b + 1)));
  EXPECT_LT(std::abs(m.z_mean), 3);
  EXPECT_LT(std::abs(m.z_variance), 3);
}

TEST(Exponential, UnitMean) {
  RngStream r(3, 0);
  const int n = 1000000;
  double s = 0;
  for (int i = 0; i < n; ++i) s += sample_exponential(1.0, r);
  EXPECT_NEAR(s / n, 1.0, 3.0 / std::sqrt(n));
}

TEST(Gamma, VarianceEqualsShape) {
  RngStream r(4, 0);
  std::vector<double> xs(1000000);
  for (auto& x : xs) x = sample_gamma(2.0, 1.0, r);
  const auto m = moment_check(xs, 2.0, 2.0);
  EXPECT_LT(std::abs(m.z_mean), 3);
  EXPECT_LT(std::abs(m.z_variance), 3);
}

TEST(Gamma, SmallShapeStaysPositive) {
  RngStream r(5, 0);
  std::vector<double> xs(100000);
  for (auto& x : xs) {
    x = sample_gamma(0.05, 1.0, r);
    ASSERT_GE(x, 0.0);
  }
  EXPECT_LT(std::abs(moment_check(xs, 0.05, 0.05).z_mean), 3);
}

TEST(Dirichlet, SingleComponentIsDirac) {
  RngStream r(6, 0);
  const std::vector<double> a{3.7};
  EXPECT_EQ(sample_dirichlet(a, r), std::vector<double>{1.0});
}

TEST(Dirichlet, TwoOnesGiveUniformFirstComponent) {
  RngStream r(7, 0);
  const std::vector<double> a{1, 1};
  std::vector<double> xs(50000);
  for (auto& x : xs) x = sample_dirichlet(a, r)[0];
  EXPECT_GT(ks_one_sample(xs, [](double x) { return x; }).p_value, 0.01);
}

TEST(Dirichlet, MeansAndExactSum) {
  RngStream r(8, 0);
  const std::vector<double> a{2, 3, 5};
  const int n = 100000;
  std::vector<std::vector<double>> comp(3, std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    const auto d = sample_dirichlet(a, r);
    double s = 0;
    for (int k = 0; k < 3; ++k) {
      ASSERT_GE(d[k], 0.0);
      comp[k][i] = d[k];
      s += d[k];
    }
    ASSERT_NEAR(s, 1.0, 4e-16);
  }
  for (int k = 0; k < 3; ++k) {
    const double m = a[k] / 10.0;
    EXPECT_LT(std::abs(moment_check(comp[k], m, m * (1 - m) / 11.0).z_mean), 3) << k;
  }
}

TEST(Dirichlet, SymmetricOverload) {
  RngStream r(9, 0);
  const auto d = sample_dirichlet(4, 0.5, r);
  EXPECT_EQ(d.size(), 4u);
}

TEST(Distributions, RejectBadParameters) {
  RngStream r(10, 0);
  EXPECT_THROW(sample_beta(0, 1, r), ParameterError);
  EXPECT_THROW(sample_beta(1, -1, r), ParameterError);
  EXPECT_THROW(sample_gamma(0, 1, r), ParameterError);
  EXPECT_THROW(sample_exponential(-1, r), ParameterError);
  EXPECT_THROW(sample_dirichlet(std::vector<double>{}, r), ParameterError);
  EXPECT_THROW(sample_dirichlet(std::vector<double>{1, 0}, r), ParameterError);
}
