// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "levypass/engine.hpp"
#include "levypass/oracle.hpp"
#include "levypass/stats.hpp"

using namespace levypass;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
const double kG = 0.5 / std::sqrt(std::numbers::pi);

FiniteMeasure one_atom(double size, double mass) {
  FiniteMeasure chi;
  chi.add_atom(size, mass);
  return chi;
}
}  // namespace

TEST(Subordinator, GammaPassageTimeLaw) {
  const auto model = gamma_model(kInf);
  RngStream r(1, 0);
  std::vector<double> ts(10000);
  for (auto& t : ts) t = sample_subordinator_fpe(model, Boundary::constant(2.0), kInf, r).T;
  EXPECT_GT(ks_one_sample(ts, [](double t) { return boost::math::gamma_q(t, 2.0); }).p_value, 0.01);
}

TEST(Subordinator, EventIsConsistent) {
  const auto model = stable_model(0.5, kG, 1.0, 0.4, one_atom(0.3, 2.0));
  const Boundary c = Boundary::linear(1.0, -0.3);
  RngStream r(2, 0);
  for (int i = 0; i < 20000; ++i) {
    const auto e = sample_subordinator_fpe(model, c, 2.0, r);
    ASSERT_GE(e.z_left, 0.0);
    ASSERT_GE(e.jump, 0.0);
    ASSERT_LE(e.T, 2.0);
    if (e.censored) {
      ASSERT_EQ(e.T, 2.0);
      ASSERT_LT(e.z_final(), c.value(2.0));
    } else {
      ASSERT_LE(e.z_left, c.value(e.T) + 1e-12);
      ASSERT_GE(e.z_final(), c.value(e.T) - 1e-12);
      if (e.jump == 0) ASSERT_NEAR(e.z_left, c.value(e.T), 1e-12);
    }
  }
}

TEST(Subordinator, CompoundPoissonMatchesOracle) {
  // Without a carrier the oracle is exact.
  FiniteMeasure chi = one_atom(0.2, 1.5);
  chi.add_piece(power_law_piece(0.5, 0.3, 1.0, 0.05, 2.0));
  const auto model = compound_poisson_model(chi);
  const Boundary c = Boundary::linear(1.2, -0.2);
  std::vector<double> t1, z1, t2, z2;
  for (int i = 0; i < 5000; ++i) {
    RngStream a(3, i), b(4, i);
    const auto e = sample_subordinator_fpe(model, c, 8.0, a);
    const auto o = oracle_fpe(model, c, 8.0, TruncationScheme{}, b);
    t1.push_back(e.T);
    z1.push_back(e.z_final());
    t2.push_back(o.T);
    z2.push_back(o.z_final());
  }
  EXPECT_GT(ks_two_sample(t1, t2).p_value, 0.01);
  EXPECT_GT(ks_two_sample(z1, z2).p_value, 0.01);
}

TEST(Subordinator, DriftCreepsOnConstantLevel) {
  auto model = stable_model(0.5, kG, 0.0, kInf);
  model.drift = 1.0;
  RngStream r(5, 0);
  int creeps = 0;
  for (int i = 0; i < 5000; ++i) {
    const auto e = sample_subordinator_fpe(model, Boundary::constant(0.5), kInf, r);
    if (e.jump == 0) {
      ++creeps;
      ASSERT_NEAR(e.z_left, 0.5, 1e-12);
    }
  }
  EXPECT_GT(creeps, 0);
}

TEST(Subordinator, InfiniteDivisibleMarginal) {
  const auto model = gamma_model(kInf);
  RngStream r(8, 0);
  std::vector<double> xs(20000);
  for (auto& x : xs) x = sample_id(model, 0.7, r);
  EXPECT_GT(ks_one_sample(xs, [](double x) { return boost::math::gamma_p(0.7, x); }).p_value, 0.01);
}

TEST(Subordinator, ResumedRunMatchesFreshShiftedRun) {
  const auto model = stable_model(0.5, kG, 1.0, 0.3, one_atom(0.4, 1.0));
  const Boundary c = Boundary::piecewise_linear({0, 1, 2}, {1.5, 1.0, 0.8});
  std::vector<double> resumed, fresh;
  for (std::uint64_t i = 0; resumed.size() < 4000; ++i) {
    RngStream r(7, i);
    SubordinatorRun run(model, c, 5.0);
    if (run.step(r)) continue;
    const double t0 = run.elapsed(), z0 = run.level();
    resumed.push_back(run.run(r).z_final() - z0);
    RngStream o(8, i);
    fresh.push_back(sample_subordinator_fpe(model, boundary_shift(c, t0, z0), 5.0 - t0, o).z_final());
  }
  EXPECT_GT(ks_two_sample(resumed, fresh).p_value, 0.01);
}

TEST(Subordinator, SameStreamSameEvent) {
  const auto model = mixture_model({{0.3, 0.5}, {0.7, 0.5}}, 0.5, 1.0, one_atom(0.5, 1.0));
  RngStream a(9, 3), b(9, 3);
  const auto e1 = sample_subordinator_fpe(model, Boundary::linear(1, -0.5), 2.0, a);
  const auto e2 = sample_subordinator_fpe(model, Boundary::linear(1, -0.5), 2.0, b);
  EXPECT_EQ(e1.T, e2.T);
  EXPECT_EQ(e1.z_left, e2.z_left);
  EXPECT_EQ(e1.jump, e2.jump);
}

TEST(Subordinator, GuardTripCarriesTrace) {
  const auto model = stable_model(0.5, kG, 0.0, 0.01);
  EngineOptions opt;
  opt.max_iterations = 5;
  opt.record_trace = true;
  RngStream r(10, 0);
  try {
    sample_subordinator_fpe(model, Boundary::constant(5.0), kInf, r, opt);
    FAIL() << "guard did not trip";
  } catch (const GuardTripped& g) {
    EXPECT_EQ(g.trace().records.size(), 5u);
    EXPECT_EQ(g.trace().iterations, 6u);
  }
}

TEST(Subordinator, RejectsBadInput) {
  RngStream r(11, 0);
  const auto model = gamma_model(1.0);
  EXPECT_THROW(sample_subordinator_fpe(model, Boundary::infinite(), kInf, r), ParameterError);
  EXPECT_THROW(sample_subordinator_fpe(model, Boundary::constant(1.0), 0.0, r), ParameterError);
  EXPECT_THROW(sample_id(model, -1.0, r), ParameterError);
}

TEST(LevelCrossing, OutputsCrossTheLevel) {
  const auto plus = gamma_model(1.0);
  const auto minus = stable_model(0.5, kG, 1.0, 1.0);
  RngStream r(12, 0);
  int crossed = 0;
  for (int i = 0; i < 5000; ++i) {
    const auto e = sample_level_crossing(plus, minus, 0.5, 5.0, r);
    ASSERT_EQ(e.jm, 0.0);
    if (e.censored) {
      ASSERT_EQ(e.T, 5.0);
      ASSERT_LT(e.z_final(), 0.5);
      continue;
    }
    ++crossed;
    ASSERT_GE(e.z_final(), 0.5 - 1e-12);
    ASSERT_LT(e.z_left(), 0.5 + 1e-12);
    ASSERT_GT(e.jp, 0.0);
  }
  EXPECT_GT(crossed, 0);
}

TEST(LevelCrossing, InfiniteHorizonNeedsAssertion) {
  RngStream r(13, 0);
  const auto plus = gamma_model(1.0);
  const auto minus = stable_model(0.5, kG, 1.0, 1.0);
  EXPECT_THROW(sample_level_crossing(plus, minus, 0.5, kInf, r), ConfigError);
  EngineOptions opt;
  opt.assert_divergence = true;
  const auto e = sample_level_crossing(plus, minus, 0.5, kInf, r, opt);
  EXPECT_FALSE(e.censored);
}

TEST(LevelCrossing, DriftOnMinusSideMatchesOracle) {
  const auto plus = gamma_model(2.0);
  auto minus = compound_poisson_model(one_atom(0.3, 0.5));
  minus.drift = 0.2;
  std::vector<double> t1, z1, t2, z2;
  for (int i = 0; i < 5000; ++i) {
    RngStream a(14, i), b(15, i);
    const auto e = sample_level_crossing(plus, minus, 1.0, 4.0, a);
    const auto o = oracle_level(plus, minus, 1.0, 4.0, TruncationScheme{1e-5, false}, b);
    t1.push_back(e.T);
    z1.push_back(e.z_final());
    t2.push_back(o.T);
    z2.push_back(o.z_final());
  }
  EXPECT_GT(ks_two_sample(t1, t2).p_value, 0.01);
  EXPECT_GT(ks_two_sample(z1, z2).p_value, 0.01);
}

TEST(IntervalExit, LeavesTheInterval) {
  const auto plus = stable_model(0.4, 0.5, 0.5, 1.0, one_atom(0.2, 1.0));
  const auto minus = gamma_model(0.7);
  RngStream r(16, 0);
  for (int i = 0; i < 5000; ++i) {
    const auto e = sample_interval_exit(plus, minus, 0.4, 0.6, 3.0, r);
    ASSERT_TRUE(e.jp == 0 || e.jm == 0);
    if (e.censored) {
      ASSERT_EQ(e.T, 3.0);
      continue;
    }
    const double z = e.z_final();
    ASSERT_TRUE(z >= 0.6 - 1e-12 || z <= -0.4 + 1e-12) << z;
    ASSERT_GT(e.z_left(), -0.4 - 1e-12);
    ASSERT_LT(e.z_left(), 0.6 + 1e-12);
  }
}

TEST(IntervalExit, ConfigErrors) {
  RngStream r(17, 0);
  const auto cp = compound_poisson_model(one_atom(0.5, 1.0));
  EXPECT_THROW(sample_interval_exit(cp, cp, 1.0, 1.0, 1.0, r), ConfigError);
  auto drifting = gamma_model(1.0);
  drifting.drift = 0.1;
  EXPECT_THROW(sample_interval_exit(drifting, cp, 1.0, 1.0, 1.0, r), ParameterError);
}
