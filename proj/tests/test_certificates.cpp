#include <gtest/gtest.h>

#include <cmath>

#include "kmrates/certificates.hpp"
#include "kmrates/moduli.hpp"

using namespace kmrates;

namespace {

using u128 = unsigned __int128;

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

u128 cdiv(u128 a, u128 b) { return (a + b - 1) / b; }

// Omega for eta(eps) = num/den * eps^e: ceil(A (k+1) den (M0 (k+1))^e / num)
u128 omega_power_oracle(u128 A, u128 M0, u128 num, u128 den, unsigned e, u128 k) {
  u128 top = A * (k + 1) * den;
  for (unsigned i = 0; i < e; ++i) top *= M0 * (k + 1);
  return cdiv(top, num);
}

struct Moduli {
  std::function<u128(u128)> s1, s2, s3;
};

u128 phi_oracle(u128 M, const Moduli &m, const std::function<u128(u128)> &om, u128 k) {
  const u128 inner = std::max(m.s1(8 * M * (k + 1) - 1), m.s3(8 * k + 7));
  return m.s2(om(2 * k + 1) + inner + 1);
}

}  // namespace

TEST(InstanceConstants, SpecExamples) {
  const Space sp = Space::euclidean(2);
  const Schedule km = make_classical_km(sp, 0.5);
  const auto c1 = instance_constants(sp, vec({1.0, 0.0}), sp.zero(), km);
  EXPECT_EQ(c1.b, 1u);
  EXPECT_EQ(c1.M0, 1u);
  EXPECT_EQ(c1.M, 2u);
  const auto c0 = instance_constants(sp, sp.zero(), sp.zero(), km);
  EXPECT_EQ(c0.b, 1u);
  const Schedule ex2 = make_example2(sp, 0.5, 2, 1, vec({1.0, 0.0}));
  const auto c2 = instance_constants(sp, vec({1.0, 0.0}), sp.zero(), ex2);
  EXPECT_EQ(c2.M0, 5u);
  EXPECT_EQ(c2.M, 6u);
  EXPECT_EQ(c2.omega_numerator(), 5u + 2u + 2u + 1u);
}

TEST(InstanceConstants, ReachRoundsUpAndOverrideOnlyEnlarges) {
  const Space sp = Space::euclidean(2);
  const Schedule km = make_classical_km(sp, 0.5);
  const auto c = instance_constants(sp, vec({3.0, 4.5}), vec({0.5, 0.0}), km);
  EXPECT_EQ(c.b, 6u);  // ||x-z|| = sqrt(6.25 + 20.25) ~ 5.15
  EXPECT_EQ(instance_constants(sp, vec({1.0, 0.0}), sp.zero(), km, 4).b, 4u);
  EXPECT_THROW(instance_constants(sp, vec({3.0, 0.0}), sp.zero(), km, 2), DomainError);
  EXPECT_THROW(make_constants(0, 0, 0), DomainError);
}

TEST(Omega, HilbertGeneralPath) {
  const auto c = make_constants(1, 0, 0);
  const RateFn om = omega(c, UcModulus::hilbert());
  EXPECT_EQ(om(0), 16u);
  EXPECT_EQ(om(1), 128u);
  for (Nat k = 0; k < 200; ++k) EXPECT_EQ(om(k), 16 * (k + 1) * (k + 1) * (k + 1));
}

TEST(Omega, MatchesPowerOracle) {
  for (const auto &c : {make_constants(1, 0, 0), make_constants(3, 2, 4), make_constants(7, 1, 0)}) {
    for (auto [num, den, e] : {std::tuple<Nat, Nat, unsigned>{1, 8, 2}, {1, 64, 4}, {3, 7, 1}}) {
      const RateFn om = omega(c, UcModulus::power(num, den, e, "p"));
      for (Nat k = 0; k < 30; ++k)
        EXPECT_EQ(static_cast<u128>(om(k)),
                  omega_power_oracle(c.omega_numerator(), c.M0, num, den, e, k));
    }
  }
}

TEST(Omega, ConstantModuli) {
  const auto c = make_constants(2, 1, 3);
  const Nat A = c.omega_numerator();
  const RateFn one = omega(c, UcModulus::power(1, 1, 0, "1"));
  const RateFn half = omega_factored(c, UcModulus::power(1, 2, 1, "eps/2"));
  for (Nat k = 0; k < 50; ++k) {
    EXPECT_EQ(one(k), A * (k + 1));
    EXPECT_EQ(half(k), A * (k + 1));
  }
  EXPECT_EQ(omega_factored(make_constants(1, 0, 0), UcModulus::hilbert())(0), 8u);
  EXPECT_THROW(omega_factored(c, UcModulus::power(1, 1, 0, "1")), DomainError);
}

TEST(Omega, FactoredHilbertIsTheClosedForm) {
  for (Nat b : {1, 2, 5}) {
    const auto c = make_constants(b, 2, 3);
    const RateFn f = omega_factored(c, UcModulus::hilbert());
    const RateFn h = hilbert_omega(c);
    for (Nat k = 0; k < 100; ++k) {
      EXPECT_EQ(f(k), h(k));
      EXPECT_EQ(static_cast<u128>(h(k)),
                u128{4} * c.M0 * c.omega_numerator() * (k + 1) * (k + 1));
    }
  }
}

TEST(Omega, DoublePathUpperBoundsTheTrueValue) {
  // l_p with p = 1.5: eta(eps) = eps^2/16, the true quotient is 16 A M0^2 (k+1)^3
  const auto c = make_constants(2, 1, 1);
  const RateFn om = omega(c, UcModulus::lp(1.5));
  for (Nat k = 0; k < 40; ++k) {
    const u128 exact = omega_power_oracle(c.omega_numerator(), c.M0, 1, 16, 2, k);
    EXPECT_GE(static_cast<u128>(om(k)), exact);
    EXPECT_LE(static_cast<u128>(om(k)), exact + 1);
  }
}

TEST(InexactOmega, ClosedFormValues) {
  EXPECT_EQ(inexact_hilbert_omega(1, 0)(1), 32u);
  EXPECT_EQ(inexact_hilbert_omega(1, 2)(0), 72u);
  for (Nat b : {1, 3})
    for (Nat mr : {0, 2, 5})
      for (Nat k = 0; k < 20; ++k)
        EXPECT_EQ(inexact_hilbert_omega(b, mr)(k), 4 * (b + mr) * (b + 2 * mr + 1) * (k + 1) * (k + 1));
}

TEST(Phi, ClassicalKMClosedForm) {
  const Space sp = Space::euclidean(2);
  const Schedule km = make_classical_km(sp, 0.5);
  const auto c = make_constants(1, 0, 0);
  const Certificate cert = make_certificate(sp, km, c, FormulaTag::ClassicalKM);
  for (Nat k = 0; k < 100; ++k) {
    EXPECT_EQ(cert.phi(k), 128 * (k + 1) * (k + 1) + 4);
    EXPECT_EQ(cert.psi(k), cert.phi(2 * k + 1));
  }
  EXPECT_EQ(cert.psi(0), 516u);
  EXPECT_TRUE(cross_check_agrees(cert, 100));
}

TEST(Phi, DegenerateModuli) {
  const auto c = make_constants(1, 0, 0);
  const RateFn zero = RateFn::constant(0, RateKind::CauchyModulus);
  const RateFn phi1 = phi_from_moduli(c, zero, RateFn::constant(1, RateKind::RateOfDivergence), zero,
                                      hilbert_omega(c));
  for (Nat k = 0; k < 10; ++k) EXPECT_EQ(phi1(k), 1u);
  const RateFn psi1 = psi(RateFn::constant(9, RateKind::RateOfConvergence));
  for (Nat k = 0; k < 10; ++k) EXPECT_EQ(psi1(k), 9u);
}

TEST(Phi, GeneralAssemblyMatchesOracle) {
  const auto c = make_constants(2, 3, 5);
  const RateFn s1 = RateFn::scaled_successor(2, RateKind::CauchyModulus);
  const RateFn s2 = RateFn::linear(5, 3, RateKind::RateOfDivergence);
  const RateFn s3 = RateFn::scaled_successor(3, RateKind::CauchyModulus);
  const RateFn om = omega(c, UcModulus::power(1, 8, 2, "p"));
  const RateFn f = phi_from_moduli(c, s1, s2, s3, om);
  const Moduli m{[](u128 n) { return 2 * (n + 1); }, [](u128 n) { return 5 * n + 3; },
                 [](u128 n) { return 3 * (n + 1); }};
  const auto om_oracle = [&c](u128 k) {
    return omega_power_oracle(c.omega_numerator(), c.M0, 1, 8, 2, k);
  };
  for (Nat k = 0; k < 40; ++k) EXPECT_EQ(static_cast<u128>(f(k)), phi_oracle(c.M, m, om_oracle, k));
}

TEST(Phi, EqualsTheLiminfComposition) {
  const Space sp = Space::euclidean(2);
  const Schedule s = make_example2(sp, 0.3, 3, 2, vec({1.5, 0.0}));
  const auto c = make_constants(2, s.M_ab, s.M_r);
  const RateFn om = omega(c, UcModulus::hilbert());
  const RateFn f = phi(c, s, om);
  const RateFn composed = rate_from_liminf(liminf_modulus(s, om), inner_modulus(c, s.sigma1, s.sigma3));
  for (Nat k = 0; k < 50; ++k) EXPECT_EQ(f(k), composed(k));
}

TEST(Liminf, WindowValues) {
  const auto c = make_constants(1, 0, 0);
  const LiminfModulus d =
      liminf_modulus(RateFn::linear(4, 0, RateKind::RateOfDivergence), omega(c, UcModulus::hilbert()));
  EXPECT_EQ(d(0, 0), 64u);
  EXPECT_EQ(d(1, 3), 4u * (128 + 3));
  const LiminfModulus degenerate = liminf_modulus(RateFn::identity(RateKind::RateOfDivergence),
                                                  RateFn::constant(0, RateKind::RateOfConvergence));
  for (Nat L = 0; L < 10; ++L) EXPECT_EQ(degenerate(3, L), L);
}

TEST(Example1Certificate, ClosedForms) {
  const Certificate e = example1_certificate(1, 0.5, 1, UcModulus::hilbert());
  EXPECT_EQ(e.phi(0), 1188u);
  const Certificate z = example1_certificate(1, 0.5, 0, UcModulus::hilbert());
  for (Nat k = 0; k < 50; ++k) {
    EXPECT_EQ(z.psi(k), 512 * (k + 1) * (k + 1) + 4);
    // Lambda = 4, b + 2R = 3, b + 4R + 1 = 6
    EXPECT_EQ(e.phi(k), 16 * 4 * 3 * 6 * (k + 1) * (k + 1) + 8 * 4 * (k + 1) + 4);
  }
  EXPECT_TRUE(cross_check_agrees(e, 200));
  EXPECT_TRUE(cross_check_agrees(z, 200));
  EXPECT_TRUE(e.factored_liminf);
}

TEST(Example2Certificate, ClosedForms) {
  const Certificate e = example2_certificate(1, 0.5, 2, 1, 0, UcModulus::hilbert());
  EXPECT_EQ(e.phi(0), 1291u);
  EXPECT_EQ(e.psi(0), 4875u);
  for (Nat b : {1, 2, 4}) {
    for (Nat R : {0, 1, 3}) {
      const Certificate c = example2_certificate(b, 0.25, 2, 1, R, UcModulus::hilbert());
      const Nat Lam = 6;  // ceil(1 / (3/16))
      const Nat M1 = (3 * b + 2 * R) * (5 * b + 4 * R + 1), M2 = 2 * b + R;
      for (Nat k = 0; k < 30; ++k)
        EXPECT_EQ(c.phi(k), 16 * Lam * M1 * (k + 1) * (k + 1) + 16 * Lam * M2 * (k + 1) + 3 * Lam - 1);
      EXPECT_TRUE(cross_check_agrees(c, 100));
    }
  }
}

TEST(Example2Certificate, NonHilbertModulusTakesTheGeneralRoute) {
  const UcModulus eta = UcModulus::power(1, 8, 2, "eps^2/8 (unflagged)");
  ASSERT_FALSE(eta.is_hilbert());
  const Certificate c = example2_certificate(2, 0.5, 2, 1, 1, eta);
  EXPECT_FALSE(c.factored_liminf);
  EXPECT_TRUE(cross_check_agrees(c, 50));
  const Certificate l = example2_certificate(1, 0.4, 3, 2, 0, UcModulus::lp(4.0));
  EXPECT_TRUE(cross_check_agrees(l, 50));
}

TEST(Certificates, PsiIsPhiAtOddIndexOnEveryRoute) {
  const Space sp = Space::lp(3, 3.0);
  const Schedule s = make_example2(sp, 0.5, 2, 1, vec({0.5, 0.0, 0.0}));
  const auto c = make_constants(1, s.M_ab, s.M_r);
  for (const auto tag : {FormulaTag::General, FormulaTag::Factored}) {
    const Certificate cert = make_certificate(sp, s, c, tag);
    for (Nat k = 0; k < 10; ++k) EXPECT_EQ(cert.psi(k), cert.phi(2 * k + 1));
  }
}

TEST(Certificates, MonotoneInTheConstants) {
  const RateFn s1 = RateFn::scaled_successor(1, RateKind::CauchyModulus);
  const RateFn s2 = RateFn::linear(4, 1, RateKind::RateOfDivergence);
  const RateFn s3 = RateFn::scaled_successor(2, RateKind::CauchyModulus);
  const auto phi_at = [&](Nat b, Nat mab, Nat mr, const UcModulus &eta) {
    const auto c = make_constants(b, mab, mr);
    return phi_from_moduli(c, s1, s2, s3, omega(c, eta));
  };
  for (const UcModulus &eta : {UcModulus::hilbert(), UcModulus::lp(3.0), UcModulus::lp(1.5)}) {
    for (Nat k = 0; k < 5; ++k) {
      EXPECT_LE(phi_at(1, 1, 1, eta)(k), phi_at(2, 1, 1, eta)(k));
      EXPECT_LE(phi_at(1, 1, 1, eta)(k), phi_at(1, 2, 1, eta)(k));
      EXPECT_LE(phi_at(1, 1, 1, eta)(k), phi_at(1, 1, 2, eta)(k));
    }
  }
}

TEST(Certificates, OverflowIsReported) {
  const auto c = make_constants(1'000'000, 1'000, 1'000);
  const RateFn om = omega(c, UcModulus::lp(4.0));
  EXPECT_THROW(om(1'000), OverflowError);
  EXPECT_THROW(make_constants(Nat{1} << 40, Nat{1} << 30, 0), OverflowError);
}

TEST(Certificates, AutoFormulaAndRequirements) {
  const Space e2 = Space::euclidean(2);
  const Space l3 = Space::lp(2, 3.0);
  EXPECT_EQ(auto_formula(e2, make_example2(e2, 0.5, 2, 1, e2.zero())), FormulaTag::Example2);
  EXPECT_EQ(auto_formula(e2, make_classical_km(e2, 0.5)), FormulaTag::ClassicalKM);
  EXPECT_EQ(auto_formula(l3, make_classical_km(l3, 0.5)), FormulaTag::General);
  const Schedule ex2 = make_example2(e2, 0.5, 2, 1, e2.zero());
  const auto c = make_constants(1, ex2.M_ab, ex2.M_r);
  EXPECT_THROW(make_certificate(e2, ex2, c, FormulaTag::ClassicalKM), DomainError);
  EXPECT_THROW(make_certificate(e2, ex2, c, FormulaTag::Example1), DomainError);
  EXPECT_THROW(make_certificate(l3, make_classical_km(l3, 0.5), make_constants(1, 0, 0), FormulaTag::Hilbert),
               DomainError);
  for (const auto tag : {FormulaTag::General, FormulaTag::Factored, FormulaTag::Hilbert,
                         FormulaTag::InexactKM, FormulaTag::ClassicalKM, FormulaTag::Anchor,
                         FormulaTag::Example1, FormulaTag::Example2})
    EXPECT_EQ(formula_tag_from_string(to_string(tag)), tag);
  EXPECT_FALSE(formula_tag_from_string("nonsense").has_value());
}

TEST(Certificates, InexactRouteAgreesWithGeneralAssembly) {
  const Space sp = Space::euclidean(2);
  const Schedule s = make_example1(sp, 0.3, 1, vec({0.0, 2.0}));
  const auto c = make_constants(2, s.M_ab, s.M_r);
  const Certificate cert = make_certificate(sp, s, c, FormulaTag::InexactKM);
  EXPECT_TRUE(cross_check_agrees(cert, 100));
  // and the family closed form is the same function
  const Certificate ex1 = make_certificate(sp, s, c, FormulaTag::Example1);
  for (Nat k = 0; k < 100; ++k) EXPECT_EQ(ex1.phi(k), cert.phi(k));
}
