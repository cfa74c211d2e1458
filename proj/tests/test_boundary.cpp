// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "levypass/boundary.hpp"

using namespace levypass;

TEST(Boundary, ValuesAndSlopes) {
  const auto c = Boundary::constant(2.0);
  EXPECT_EQ(c.value(10), 2.0);
  EXPECT_EQ(c.slope(1), 0.0);
  const auto l = Boundary::linear(1.0, -0.5);
  EXPECT_DOUBLE_EQ(l.value(1.0), 0.5);
  EXPECT_EQ(l.slope(3.0), -0.5);
  const auto p = Boundary::piecewise_linear({0, 1, 2}, {3, 1, 0.5});
  EXPECT_DOUBLE_EQ(p.value(0.5), 2.0);
  EXPECT_DOUBLE_EQ(p.value(1.5), 0.75);
  EXPECT_DOUBLE_EQ(p.value(7.0), 0.5);
  EXPECT_DOUBLE_EQ(p.slope(0.2), -2.0);
  EXPECT_DOUBLE_EQ(p.slope(1.0), -0.5);
  EXPECT_EQ(p.slope(2.5), 0.0);
  EXPECT_TRUE(std::isinf(Boundary::infinite().value(1)));
}

TEST(Boundary, ZeroSlopeIsConstant) { EXPECT_TRUE(Boundary::linear(1.0, 0.0).is_constant()); }

TEST(Boundary, RejectsIrregular) {
  EXPECT_THROW(Boundary::constant(0.0), ParameterError);
  EXPECT_THROW(Boundary::linear(1.0, 0.1), ParameterError);
  EXPECT_THROW(Boundary::piecewise_linear({0, 1}, {1, 2}), ParameterError);
  EXPECT_THROW(Boundary::piecewise_linear({0.5, 1}, {2, 1}), ParameterError);
  EXPECT_THROW(Boundary::piecewise_linear({0, 0}, {2, 1}), ParameterError);
}

TEST(Boundary, ShiftMatchesDefinition) {
  const auto c = Boundary::piecewise_linear({0, 1, 3}, {4, 2, 1});
  const auto s = boundary_shift(c, 0.5, 1.0);
  for (double u : {0.0, 0.25, 0.5, 1.0, 2.0, 2.5, 5.0}) EXPECT_NEAR(s.value(u), c.value(u + 0.5) - 1.0, 1e-14) << u;
  const auto l = Boundary::linear(2.0, -0.25);
  const auto ls = boundary_shift(l, 2.0, 0.5);
  EXPECT_DOUBLE_EQ(ls.value(0), 1.0);
  EXPECT_DOUBLE_EQ(ls.value(2), 0.5);
  EXPECT_THROW(boundary_shift(l, 2.0, 1.5), ContractViolation);
}

TEST(Boundary, RebasedKeepsGapExactly) {
  const auto l = Boundary::linear(1.0, -0.5);
  const double gap = 1e-17;
  EXPECT_EQ(l.rebased(0.3, gap).value(0.0), gap);
  const auto cb = Boundary::callback([](double t) { return 2.0 - t * t; }, [](double t) { return -2 * t; });
  const auto r = cb.rebased(0.5, 0.25);
  EXPECT_DOUBLE_EQ(r.value(0.0), 0.25);
  EXPECT_DOUBLE_EQ(r.value(0.5), 0.25 + (2.0 - 1.0) - (2.0 - 0.25));
  EXPECT_DOUBLE_EQ(r.slope(0.5), -2.0);
}

TEST(Boundary, MinusDrift) {
  const auto c = Boundary::constant(1.0).minus_drift(0.5);
  EXPECT_DOUBLE_EQ(c.value(1.0), 0.5);
  const auto p = Boundary::piecewise_linear({0, 1}, {2, 1}).minus_drift(1.0);
  EXPECT_DOUBLE_EQ(p.value(0.5), 1.5 - 0.5);
  EXPECT_DOUBLE_EQ(p.slope(0.5), -2.0);
}

TEST(CappedBoundary, CapsAtR) {
  const auto l = Boundary::linear(3.0, -1.0);
  const CappedBoundary a(l, 1.0);
  EXPECT_EQ(a.value(0.0), 1.0);
  EXPECT_EQ(a.descent_rate(0.5), 0.0);
  EXPECT_DOUBLE_EQ(a.value(2.5), 0.5);
  EXPECT_DOUBLE_EQ(a.descent_rate(2.5), 1.0);
}
