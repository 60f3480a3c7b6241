#include <gtest/gtest.h>

#include <random>

#include "geodamage/constitutive.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace geodamage;
using geodamage::testing::random_tensor;

TEST(SymTensor, VoigtDotMatchesFrobenius) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto a = random_tensor(rng), b = random_tensor(rng);
    EXPECT_NEAR(dot(a, b), frobenius_from_matrices(a, b), 1e-12);
  }
  SymTensor<3> a3 = SymTensor<3>::from_matrix({{{1, 2, 3}, {2, 4, 5}, {3, 5, 6}}});
  EXPECT_NEAR(dot(a3, a3), frobenius_from_matrices(a3, a3), 1e-12);
  EXPECT_DOUBLE_EQ(a3(1, 2), 5.0);
}

TEST(SymTensor, DeviatorIsTraceFree) {
  const auto t = SymTensor2::from_matrix({{{3, 1}, {1, -1}}});
  EXPECT_NEAR(t.dev().trace(), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(t.mean(), 1.0);
}

TEST(ExtReal, ZeroTimesInfinityIsZero) {
  EXPECT_EQ((0.0 * ExtReal::infinity()).value(), 0.0);
  EXPECT_TRUE((2.0 * ExtReal::infinity()).is_infinite());
  EXPECT_TRUE((ExtReal(1.0) + ExtReal::infinity()).is_infinite());
  EXPECT_TRUE(ExtReal(3.0) <= ExtReal::infinity());
  EXPECT_FALSE(ExtReal::infinity() <= ExtReal(3.0));
}

TEST(Hooke, ShearAndVolumetricModuli) {
  HookeLaw h{1.0, 1.0};
  EXPECT_DOUBLE_EQ(h.gamma1(), 2.0);
  EXPECT_DOUBLE_EQ(h.gamma2(2), 4.0);
  const auto s = h.apply(SymTensor2::identity());
  EXPECT_DOUBLE_EQ(s(0, 0), 4.0);
  EXPECT_DOUBLE_EQ(s(1, 1), 4.0);
  const auto shear = SymTensor2::from_matrix({{{0, 1}, {1, 0}}});
  EXPECT_NEAR(h.apply(shear)(0, 1), 2.0, 1e-15);
}

TEST(Hooke, RejectsInvalidModuli) {
  EXPECT_THROW((HookeLaw{1.0, 0.0}.validate()), std::invalid_argument);
  EXPECT_THROW((HookeLaw{-1.0, 1.0}.validate()), std::invalid_argument);
}

TEST(Hardening, Profiles) {
  HardeningProfile q{HardeningKind::quadratic, 1.0, 0.1};
  EXPECT_NEAR(q.modulus(0.5), 0.35, 1e-15);
  HardeningProfile l{HardeningKind::linear, 1.0, 0.1};
  EXPECT_NEAR(l.modulus(0.5), 0.6, 1e-15);
  EXPECT_NEAR(l.modulus_slope(0.3), -1.0, 1e-15);
  HardeningProfile s{HardeningKind::softening, 250.0, 50.0};
  EXPECT_NEAR(s.modulus(1.0), 300.0, 1e-12);
  EXPECT_NEAR(s.modulus(0.0), 50.0, 1e-12);
  EXPECT_THROW(q.apply(1.5, SymTensor2::identity()), std::domain_error);
}

TEST(Damage, Profiles) {
  DamageDissipation lin{DamageKind::linear, 2.0};
  EXPECT_DOUBLE_EQ(lin.value(0.25), 1.5);
  EXPECT_DOUBLE_EQ(lin.slope(0.9), -2.0);
  DamageDissipation quad{DamageKind::quadratic, 2.0};
  EXPECT_DOUBLE_EQ(quad.value(0.5), 0.5);
  EXPECT_DOUBLE_EQ(quad.curvature(), 4.0);
}

TEST(Support, BallAndDruckerPrager) {
  const auto ball = ConstraintSet::ball(1.0);
  EXPECT_DOUBLE_EQ(ball.support(SymTensor2::diag({1.0, 0.0})).value(), 1.0);
  const auto dp = ConstraintSet::drucker_prager(1.0, 1.0);
  EXPECT_NEAR(dp.support(SymTensor2::identity()).value(), 2.0, 1e-15);
  EXPECT_TRUE(dp.support(SymTensor2::diag({1.0, -1.0})).is_infinite());
}

TEST(Support, MatchesSampledSupremum) {
  const auto dp = ConstraintSet::drucker_prager(1.0, 1.0);
  // Inside the cone the sup is attained at a bounded stress.
  const double inside = geodamage::testing::sampled_support(dp, SymTensor2::identity(), 4.0);
  EXPECT_NEAR(inside, 2.0, 0.05);
  // Outside, the sampled sup grows with the sampling radius.
  const auto out = SymTensor2::diag({1.0, -1.0});
  const double r1 = geodamage::testing::sampled_support(dp, out, 10.0, 30);
  const double r2 = geodamage::testing::sampled_support(dp, out, 100.0, 30);
  EXPECT_GT(r2, 5.0 * r1);
  const auto ball = ConstraintSet::ball(2.0);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 5; ++i) {
    const auto xi = random_tensor(rng);
    EXPECT_NEAR(geodamage::testing::sampled_support(ball, xi, 2.0, 40), ball.support(xi).value(),
                0.01 * ball.support(xi).value());
  }
}

TEST(Prox, BallExamples) {
  const auto ball = ConstraintSet::ball(1.0);
  const auto p1 = ball.prox(SymTensor2::diag({2.0, 0.0}), 1.0);
  EXPECT_NEAR(p1(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(p1(1, 1), 0.0, 1e-15);
  EXPECT_EQ(ball.prox(SymTensor2::diag({2.0, 0.0}), 3.0), SymTensor2::zero());
}

TEST(Prox, MatchesGridSearch) {
  std::mt19937_64 rng(17);
  for (const auto& k : {ConstraintSet::ball(0.7), ConstraintSet::drucker_prager(0.8, 0.6)}) {
    for (int i = 0; i < 4; ++i) {
      const auto xi = random_tensor(rng);
      const double lambda = 0.5;
      const auto grid = geodamage::testing::grid_prox(k, xi, lambda);
      EXPECT_LE((grid - k.prox(xi, lambda)).norm(), 1e-3);
    }
  }
}

TEST(Prox, MoreauProjectionLandsInSet) {
  std::mt19937_64 rng(23);
  const auto dp = ConstraintSet::drucker_prager(1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const auto s = random_tensor(rng, 3.0);
    const auto pr = dp.project(s);
    EXPECT_LE(dp.tau() * pr.mean() + pr.dev().norm(), dp.kappa() + 1e-12);
  }
}

TEST(EffectiveRadius, BallInsideSetAndSupportBound) {
  const auto dp = ConstraintSet::drucker_prager(1.0, 500.0);
  const double r = dp.r_eff();
  std::mt19937_64 rng(29);
  double closest = 1e300;
  for (int i = 0; i < 20000; ++i) {
    auto dir = random_tensor(rng);
    dir = dir / dir.norm();
    // Largest radius along dir that stays in K.
    const double denom = dp.tau() * dir.mean() + dir.dev().norm();
    if (denom > 0.0) closest = std::min(closest, dp.kappa() / denom);
    const auto h = dp.support(dir);
    if (h.is_finite()) EXPECT_LE(r * dir.norm(), h.value() + 1e-9);
  }
  EXPECT_NEAR(closest, r, 1e-3 * r);
  EXPECT_GE(closest, r * (1.0 - 1e-12));
}
