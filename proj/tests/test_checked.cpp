#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "kmrates/checked.hpp"
#include "kmrates/rate.hpp"

using namespace kmrates;

TEST(Checked, AddAndMulRaiseOnOverflow) {
  constexpr Nat top = std::numeric_limits<Nat>::max();
  EXPECT_EQ(checked::add(2, 3), 5u);
  EXPECT_EQ(checked::mul(1u << 20, 1u << 20), Nat{1} << 40);
  EXPECT_THROW(checked::add(top, 1), OverflowError);
  EXPECT_THROW(checked::mul(Nat{1} << 32, Nat{1} << 32), OverflowError);
  EXPECT_EQ(checked::pow(2, 63), Nat{1} << 63);
  EXPECT_THROW(checked::pow(2, 64), OverflowError);
}

TEST(Checked, SubtractionVariants) {
  EXPECT_EQ(checked::monus(3, 5), 0u);
  EXPECT_EQ(checked::monus(5, 3), 2u);
  EXPECT_EQ(checked::sub(5, 3), 2u);
  EXPECT_THROW(checked::sub(3, 5), OverflowError);
}

TEST(Checked, CeilDivisionIsExact) {
  EXPECT_EQ(checked::ceil_div(7, 2), 4u);
  EXPECT_EQ(checked::ceil_div(8, 2), 4u);
  EXPECT_EQ(checked::ceil_div(0, 5), 0u);
  EXPECT_THROW(checked::ceil_div(1, 0), DomainError);
  const unsigned __int128 big = static_cast<unsigned __int128>(1) << 70;
  EXPECT_EQ(checked::ceil_div_wide(big, static_cast<unsigned __int128>(1) << 10), Nat{1} << 60);
  EXPECT_THROW(checked::ceil_div_wide(big, 2), OverflowError);
  EXPECT_THROW(checked::mul_wide(big, big), OverflowError);
}

TEST(CeilGuarded, AddsOneNearTheBoundary) {
  EXPECT_EQ(ceil_guarded(0.0), 0u);
  EXPECT_EQ(ceil_guarded(-3.0), 0u);
  EXPECT_EQ(ceil_guarded(2.5), 3u);
  // exactly on an integer: the true value may sit just above it
  EXPECT_EQ(ceil_guarded(3.0), 4u);
  EXPECT_EQ(ceil_guarded(std::nextafter(3.0, 0.0)), 4u);
  EXPECT_EQ(ceil_guarded(2.9), 3u);
  EXPECT_THROW(ceil_guarded(std::nan("")), OverflowError);
  EXPECT_THROW(ceil_guarded(1e30), OverflowError);
}

TEST(CeilNat, PlainCeiling) {
  EXPECT_EQ(ceil_nat(3.0), 3u);
  EXPECT_EQ(ceil_nat(3.1), 4u);
  EXPECT_EQ(ceil_nat(-1.0), 0u);
  EXPECT_THROW(ceil_nat(1e30), OverflowError);
}

TEST(RateFn, FactoriesAndRelabel) {
  const RateFn c = RateFn::constant(7, RateKind::CauchyModulus);
  EXPECT_EQ(c(0), 7u);
  EXPECT_EQ(c(100), 7u);
  EXPECT_EQ(c.kind(), RateKind::CauchyModulus);
  EXPECT_EQ(RateFn::identity(RateKind::RateOfDivergence)(9), 9u);
  EXPECT_EQ(RateFn::linear(4, 1, RateKind::RateOfDivergence)(3), 13u);
  EXPECT_EQ(RateFn::scaled_successor(3, RateKind::CauchyModulus)(3), 12u);
  const RateFn r = c.as(RateKind::RateOfConvergence, "seven");
  EXPECT_EQ(r.kind(), RateKind::RateOfConvergence);
  EXPECT_EQ(r.description(), "seven");
  EXPECT_EQ(r(1), 7u);
  EXPECT_STREQ(to_string(RateKind::CauchyModulus), "cauchy_modulus");
}

TEST(RateFn, OverflowIsAnErrorNotAWrap) {
  const RateFn f = RateFn::scaled_successor(Nat{1} << 62, RateKind::RateOfConvergence);
  EXPECT_EQ(f(0), Nat{1} << 62);
  EXPECT_THROW(f(4), OverflowError);
}

TEST(LiminfModulus, DefaultIsTheIdentityWindow) {
  const LiminfModulus d;
  EXPECT_EQ(d(5, 3), 3u);
  const LiminfModulus e([](Nat k, Nat l) { return k + l; }, "k+L");
  EXPECT_EQ(e(2, 3), 5u);
  EXPECT_EQ(e.description(), "k+L");
}
