#include <gtest/gtest.h>

#include "kmrates/schedule.hpp"

using namespace kmrates;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// ceil(1/q) by exact rational arithmetic for lambda = num/den
Nat lambda_oracle(Nat num, Nat den) {
  const Nat q_num = num * (den - num), q_den = den * den;
  return (q_den + q_num - 1) / q_num;
}

}  // namespace

TEST(LambdaConstant, MatchesRationalOracle) {
  for (Nat den : {2, 3, 4, 5, 7, 10, 16, 100}) {
    for (Nat num = 1; num < den; ++num) {
      const double lambda = static_cast<double>(num) / static_cast<double>(den);
      EXPECT_EQ(lambda_constant(lambda), lambda_oracle(num, den)) << num << "/" << den;
    }
  }
  EXPECT_THROW(lambda_constant(0.0), DomainError);
  EXPECT_THROW(lambda_constant(1.0), DomainError);
}

TEST(Example1, PointValues) {
  const Space sp = Space::euclidean(2);
  const Schedule s = make_example1(sp, 0.25, 2, vec({1.0, 0.0}));
  EXPECT_DOUBLE_EQ(s.alpha(3), 0.75);
  EXPECT_DOUBLE_EQ(s.beta(3), 0.25);
  EXPECT_DOUBLE_EQ(s.r(3)[0], 1.0 / 25.0);
  EXPECT_DOUBLE_EQ(s.r(3)[1], 0.0);
  EXPECT_EQ(s.M_ab, 0u);
  EXPECT_EQ(s.M_r, 2u);
  EXPECT_EQ(s.sigma2(5), lambda_oracle(1, 4) * 5u);
  EXPECT_EQ(s.sigma3(2), 3u);
  EXPECT_TRUE(s.defect_vanishes);
}

TEST(Example1, HypothesesHold) {
  const Space sp = Space::euclidean(2);
  for (double lambda : {0.1, 0.25, 0.5, 0.9}) {
    const Schedule s = make_example1(sp, lambda, 2, vec({3.0, 4.0}));
    const auto rep = verify_hypotheses(s, 2000, 50);
    EXPECT_TRUE(rep.ok()) << lambda;
  }
}

TEST(Example2, PointValuesAndConstants) {
  const Space sp = Space::euclidean(2);
  const Schedule s = make_example2(sp, 0.5, 2, 1, sp.zero());
  EXPECT_DOUBLE_EQ(s.alpha(0), 0.5);
  EXPECT_DOUBLE_EQ(s.beta(0), 0.25);
  EXPECT_DOUBLE_EQ(s.defect(0), 0.25);
  EXPECT_EQ(s.sigma2(0), 7u);
  EXPECT_EQ(s.M_ab, 2u);
  EXPECT_EQ(s.M_r, 0u);
  const auto [m_ab, m_r] = bound_constants_from_moduli(s);
  EXPECT_EQ(m_ab, 2u);
  EXPECT_EQ(m_r, 0u);
}

TEST(Example2, LambdaRange) {
  const Space sp = Space::euclidean(2);
  EXPECT_THROW(make_example2(sp, 0.75, 2, 1, sp.zero()), DomainError);
  EXPECT_THROW(make_example2(sp, 0.5, 1, 1, sp.zero()), DomainError);
  EXPECT_NO_THROW(make_example2(sp, 0.74, 2, 1, sp.zero()));
}

TEST(Example2, HypothesesHold) {
  const Space sp = Space::euclidean(2);
  const Schedule s = make_example2(sp, 0.5, 2, 1, vec({1.0, 0.0}));
  const auto rep = verify_hypotheses(s, 2000);
  EXPECT_TRUE(rep.ok());
  EXPECT_TRUE(rep.range_violations.empty());
  EXPECT_LE(rep.defect_sum, 2.0);
  EXPECT_LE(rep.r_norm_sum, 2.0);
}

TEST(InexactKM, DivergenceSummandIsBetaTimesComplement) {
  const Space sp = Space::euclidean(2);
  const auto beta = [](Nat n) { return 0.2 + 0.6 / static_cast<double>(n + 1); };
  const Schedule s = make_inexact_km(sp, beta, RateFn::linear(7, 0, RateKind::RateOfDivergence),
                                     nullptr, RateFn::constant(0, RateKind::CauchyModulus), 0);
  for (Nat n = 0; n < 50; ++n) {
    EXPECT_NEAR(s.divergence_summand(n), beta(n) * (1.0 - beta(n)), 1e-15);
    EXPECT_NEAR(s.defect(n), 0.0, 1e-15);
  }
  EXPECT_TRUE(s.r_vanishes);
  EXPECT_EQ(s.family, FamilyTag::InexactKM);
}

TEST(Anchor, DerivedModuli) {
  const Space sp = Space::euclidean(2);
  const Schedule base = make_example2(sp, 0.5, 2, 1, sp.zero());
  const Schedule s = make_anchor(sp, base, vec({1.5, 2.0}));
  for (Nat k = 0; k < 20; ++k) EXPECT_EQ(s.sigma3(k), base.sigma1(3 * k + 2));
  EXPECT_EQ(s.M_r, 3 * base.M_ab);
  EXPECT_NEAR(s.r(0)[1], 0.25 * 2.0, 1e-15);
  EXPECT_TRUE(verify_hypotheses(s, 2000).ok());
  EXPECT_THROW(make_anchor(sp, base, sp.zero()), DomainError);
}

TEST(BoundConstants, InverseSquarePerturbation) {
  const Space sp = Space::euclidean(2);
  const Schedule s = make_example1(sp, 0.5, 1, vec({1.0, 0.0}));
  const auto [m_ab, m_r] = bound_constants_from_moduli(s);
  EXPECT_EQ(m_ab, 0u);
  EXPECT_EQ(m_r, 3u);
}

TEST(WithConstants, OnlyEnlarges) {
  const Space sp = Space::euclidean(2);
  const Schedule s = make_example2(sp, 0.5, 2, 1, vec({1.0, 0.0}));
  const Schedule t = with_constants(s, 5, 9);
  EXPECT_EQ(t.M_ab, 5u);
  EXPECT_EQ(t.M_r, 9u);
  EXPECT_THROW(with_constants(s, 1, 9), DomainError);
  EXPECT_THROW(with_constants(s, 5, 1), DomainError);
}

TEST(PointOverrides, BetaOutOfRangeIsReportedAtItsIndex) {
  const Space sp = Space::euclidean(2);
  const Schedule s = with_point_overrides(make_example1(sp, 0.5, 1, sp.zero()),
                                          {{5, PointOverride{std::nullopt, 1.2}}});
  EXPECT_EQ(s.family, FamilyTag::Custom);
  EXPECT_DOUBLE_EQ(s.beta(5), 1.2);
  EXPECT_DOUBLE_EQ(s.beta(4), 0.5);
  const auto rep = verify_hypotheses(s, 100, 10);
  EXPECT_FALSE(rep.ok());
  ASSERT_FALSE(rep.range_violations.empty());
  for (const auto &v : rep.range_violations) EXPECT_EQ(v.n, 5u);
}

TEST(RangeViolations, ZeroStepIsRejected) {
  const Space sp = Space::euclidean(1);
  const Schedule s = make_custom(
      sp, [](Nat n) { return n == 3 ? 0.0 : 0.5; }, [](Nat n) { return n == 3 ? 0.0 : 0.5; },
      nullptr, RateFn::constant(0, RateKind::CauchyModulus),
      RateFn::linear(4, 0, RateKind::RateOfDivergence), RateFn::constant(0, RateKind::CauchyModulus),
      0, 0);
  const auto v = range_violations(s, 10);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].n, 3u);
}

TEST(VerifyHypotheses, DetectsAnUndersizedDivergenceRate) {
  const Space sp = Space::euclidean(2);
  Schedule s = make_example1(sp, 0.5, 1, sp.zero());
  s.sigma2 = RateFn::identity(RateKind::RateOfDivergence);
  EXPECT_FALSE(verify_hypotheses(s, 200, 10).sigma2.ok());
}
