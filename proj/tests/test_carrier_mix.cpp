// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "levypass/carrier_mix.hpp"
#include "levypass/engine.hpp"
#include "levypass/stats.hpp"

using namespace levypass;

TEST(MixtureCarrier, EqualAlphasActLikeOneStable) {
  // gamma_1 x^{-1-a} + gamma_2 x^{-1-a} is a single stable measure.
  const auto mix = mixture_model({{0.6, 0.3}, {0.6, 0.5}}, 0.5, 2.0);
  const auto one = stable_model(0.6, 0.8, 0.5, 2.0);
  const Boundary c = Boundary::linear(1.5, -0.4);
  std::vector<double> t1, z1, t2, z2;
  RngStream a(1, 0), b(2, 0);
  for (int i = 0; i < 5000; ++i) {
    const auto e1 = sample_subordinator_fpe(mix, c, 10.0, a);
    const auto e2 = sample_subordinator_fpe(one, c, 10.0, b);
    t1.push_back(e1.T);
    z1.push_back(e1.z_final());
    t2.push_back(e2.T);
    z2.push_back(e2.z_final());
  }
  EXPECT_GT(ks_two_sample(t1, t2).p_value, 0.01);
  EXPECT_GT(ks_two_sample(z1, z2).p_value, 0.01);
}

TEST(MixtureCarrier, SplitAndBasicEnvelopesAgree) {
  const MixtureCarrier m({{0.3, 1.0}, {0.7, 0.5}});
  const std::vector<const StableCarrier*> parts{&m.component(0), &m.component(1)};
  for (double t : {0.12, 0.3}) {
    RngStream a(3, static_cast<std::uint64_t>(t * 100)), b(4, static_cast<std::uint64_t>(t * 100));
    std::vector<double> s1, v1, s2, v2;
    for (int i = 0; i < 5000; ++i) {
      const auto d1 = detail::stable_sum_crossing(parts, t, 1.0, 0.3, a, true, detail::CrossingEnvelope::split);
      const auto d2 = detail::stable_sum_crossing(parts, t, 1.0, 0.3, b, true, detail::CrossingEnvelope::basic);
      ASSERT_EQ(d1.components.size(), 2u);
      ASSERT_NEAR(d1.components[0] + d1.components[1], d1.s_left, 1e-12);
      s1.push_back(d1.s_left);
      v1.push_back(d1.jump);
      s2.push_back(d2.s_left);
      v2.push_back(d2.jump);
    }
    EXPECT_GT(ks_two_sample(s1, s2).p_value, 0.01) << t;
    EXPECT_GT(ks_two_sample(v1, v2).p_value, 0.01) << t;
  }
}

TEST(MixtureCarrier, ValuesBelowRespectLevel) {
  const MixtureCarrier m({{0.3, 1.0}, {0.7, 0.5}});
  RngStream r(5, 0);
  for (int i = 0; i < 2000; ++i) {
    const auto d = m.sample_values_below(0.5, 0.8, r);
    ASSERT_LE(d.s_left, 0.8);
    ASSERT_NEAR(d.components[0] + d.components[1], d.s_left, 1e-15);
  }
}

TEST(MixtureCarrier, InfinitelyDivisibleMoments) {
  FiniteMeasure chi;
  chi.add_atom(0.5, 0.3);
  const auto model = mixture_model({{0.2, 0.4}, {0.8, 0.3}}, 1.0, 1.5, chi);
  const Moments mo = id_moments(model, 0.7);
  RngStream r(6, 0);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = sample_id(model, 0.7, r);
  const auto z = moment_check(xs, mo.mean, mo.variance);
  EXPECT_LT(std::abs(z.z_mean), 3);
  EXPECT_LT(std::abs(z.z_variance), 3);
}

TEST(MixtureCarrier, RejectsEmpty) { EXPECT_THROW(MixtureCarrier({}), ParameterError); }
