#pragma once

#include <algorithm>
#include <optional>
#include <string>

#include "kmrates/checked.hpp"
#include "kmrates/moduli.hpp"
#include "kmrates/rate.hpp"
#include "kmrates/schedule.hpp"
#include "kmrates/space.hpp"
#include "kmrates/uc_modulus.hpp"

namespace kmrates {

/// Integer constants of an instance: b >= max{||x-z||, ||z||},
/// M0 = b + M_ab b + M_r and M = M0 + b.
struct InstanceConstants {
  Nat b = 1;
  Nat M0 = 1;
  Nat M = 2;
  Nat M_ab = 0;
  Nat M_r = 0;

  /// M0 + M_ab b + M_r + 1, the numerator factor shared by all Omega variants.
  Nat omega_numerator() const {
    return checked::add(checked::add(checked::add(M0, checked::mul(M_ab, b)), M_r), 1);
  }
};

inline InstanceConstants make_constants(Nat b, Nat M_ab, Nat M_r) {
  if (b == 0) throw DomainError("b must be >= 1");
  InstanceConstants c;
  c.b = b;
  c.M_ab = M_ab;
  c.M_r = M_r;
  c.M0 = checked::add(checked::add(b, checked::mul(M_ab, b)), M_r);
  c.M = checked::add(c.M0, b);
  return c;
}

/// b = max(1, ceil(max{||x-z||, ||z||})), then M0 and M from the schedule's
/// constants. A larger b may be forced through b_override.
inline InstanceConstants instance_constants(const Space &space, const Vector &x, const Vector &z,
                                            const Schedule &s,
                                            std::optional<Nat> b_override = std::nullopt) {
  const double reach = std::max(space.distance(x, z), space.norm(z));
  Nat b = std::max<Nat>(1, ceil_nat(reach));
  if (b_override) {
    if (*b_override < b)
      throw DomainError("b override " + std::to_string(*b_override) +
                        " is below max{||x-z||, ||z||}");
    b = *b_override;
  }
  return make_constants(b, s.M_ab, s.M_r);
}

namespace detail {

inline Nat succ(Nat k) { return checked::add(k, 1); }

/// ceil(numer * (M0 (k+1))^e * den / (scale * num)) exactly.
inline Nat power_quotient(Nat numer_k, Nat m0k, unsigned e, Nat den, Nat num, Nat scale) {
  unsigned __int128 top = numer_k;
  for (unsigned i = 0; i < e; ++i) top = checked::mul_wide(top, m0k);
  top = checked::mul_wide(top, den);
  return checked::ceil_div_wide(top, checked::mul_wide(num, scale));
}

}  // namespace detail

/// Omega(k) = ceil(A (k+1) / eta(1/(M0 (k+1)))), A = M0 + M_ab b + M_r + 1.
/// Power-law moduli are evaluated exactly; other moduli in double precision
/// with a guarded ceiling.
inline RateFn omega(const InstanceConstants &c, const UcModulus &eta) {
  const Nat A = c.omega_numerator();
  const Nat M0 = c.M0;
  const auto form = eta.power_form();
  return RateFn(
      [A, M0, eta, form](Nat k) {
        const Nat k1 = detail::succ(k);
        const Nat numer = checked::mul(A, k1);
        const Nat m0k = checked::mul(M0, k1);
        if (form) return detail::power_quotient(numer, m0k, form->exponent, form->den, form->num, 1);
        const double e = eta(1.0 / static_cast<double>(m0k));
        return ceil_guarded(static_cast<double>(numer) / e);
      },
      RateKind::RateOfConvergence, "Omega with eta=" + eta.name());
}

/// Omega~(k) = ceil(A (k+1) / (2 eta~(1/(M0 (k+1))))) for eta(eps) = eps eta~(eps).
inline RateFn omega_factored(const InstanceConstants &c, const UcModulus &eta) {
  if (!eta.has_factorization())
    throw DomainError("omega_factored: modulus " + eta.name() + " carries no factorization");
  if (!eta.tilde_increasing())
    throw DomainError("omega_factored: eta~ of " + eta.name() + " is not declared increasing");
  const Nat A = c.omega_numerator();
  const Nat M0 = c.M0;
  const auto form = eta.power_form();
  return RateFn(
      [A, M0, eta, form](Nat k) {
        const Nat k1 = detail::succ(k);
        const Nat numer = checked::mul(A, k1);
        const Nat m0k = checked::mul(M0, k1);
        if (form && form->exponent >= 1)
          return detail::power_quotient(numer, m0k, form->exponent - 1, form->den, form->num, 2);
        const double t = eta.eta_tilde(1.0 / static_cast<double>(m0k));
        return ceil_guarded(static_cast<double>(numer) / (2.0 * t));
      },
      RateKind::RateOfConvergence, "Omega~ with eta=" + eta.name());
}

/// Hilbert-space closed form 4 M0 (M0 + M_ab b + M_r + 1) (k+1)^2.
inline RateFn hilbert_omega(const InstanceConstants &c) {
  const Nat coef = checked::mul(checked::mul(4, c.M0), c.omega_numerator());
  return RateFn(
      [coef](Nat k) {
        const Nat k1 = detail::succ(k);
        return checked::mul(coef, checked::mul(k1, k1));
      },
      RateKind::RateOfConvergence, std::to_string(coef) + "(k+1)^2");
}

/// Inexact-KM Hilbert closed form 4 (b + M_r)(b + 2 M_r + 1)(k+1)^2.
inline RateFn inexact_hilbert_omega(Nat b, Nat M_r) {
  const Nat coef = checked::mul(
      checked::mul(4, checked::add(b, M_r)),
      checked::add(checked::add(b, checked::mul(2, M_r)), 1));
  return RateFn(
      [coef](Nat k) {
        const Nat k1 = detail::succ(k);
        return checked::mul(coef, checked::mul(k1, k1));
      },
      RateKind::RateOfConvergence, std::to_string(coef) + "(k+1)^2");
}

/// Cauchy modulus of b_n = 2M(1 - alpha_n - beta_n) + 2||r_n||:
/// k -> max{sigma1(4M(k+1)-1), sigma3(4k+3)}.
inline RateFn inner_modulus(const InstanceConstants &c, const RateFn &sigma1,
                            const RateFn &sigma3) {
  const Nat M = c.M;
  return RateFn(
      [M, sigma1, sigma3](Nat k) {
        const Nat k1 = detail::succ(k);
        const Nat i1 = checked::mul(checked::mul(4, M), k1) - 1;
        const Nat i3 = checked::add(checked::mul(4, k), 3);
        return std::max(sigma1(i1), sigma3(i3));
      },
      RateKind::CauchyModulus, "max{sigma1(4M(k+1)-1), sigma3(4k+3)}");
}

/// Phi(k) = sigma2(Omega(2k+1) + max{sigma1(8M(k+1)-1), sigma3(8k+7)} + 1).
inline RateFn phi_from_moduli(const InstanceConstants &c, const RateFn &sigma1,
                              const RateFn &sigma2, const RateFn &sigma3, const RateFn &omega_fn) {
  const Nat M = c.M;
  return RateFn(
      [M, sigma1, sigma2, sigma3, omega_fn](Nat k) {
        const Nat k1 = detail::succ(k);
        const Nat j = checked::add(checked::mul(2, k), 1);
        const Nat i1 = checked::mul(checked::mul(8, M), k1) - 1;
        const Nat i3 = checked::add(checked::mul(8, k), 7);
        const Nat inner = std::max(sigma1(i1), sigma3(i3));
        return sigma2(checked::add(checked::add(omega_fn(j), inner), 1));
      },
      RateKind::RateOfConvergence, "sigma2(Omega(2k+1) + max{sigma1(8M(k+1)-1), sigma3(8k+7)} + 1)");
}

inline RateFn phi(const InstanceConstants &c, const Schedule &s, const RateFn &omega_fn) {
  return phi_from_moduli(c, s.sigma1, s.sigma2, s.sigma3, omega_fn);
}

/// Psi(k) = Phi(2k+1).
inline RateFn psi(const RateFn &phi_fn) {
  return RateFn([phi_fn](Nat k) { return phi_fn(checked::add(checked::mul(2, k), 1)); },
                RateKind::RateOfConvergence, "Phi(2k+1)");
}

/// Delta(k, L) = sigma2(Omega(k) + L).
inline LiminfModulus liminf_modulus(const RateFn &sigma2, const RateFn &omega_fn) {
  return LiminfModulus(
      [sigma2, omega_fn](Nat k, Nat l) { return sigma2(checked::add(omega_fn(k), l)); },
      "sigma2(Omega(k) + L)");
}

inline LiminfModulus liminf_modulus(const Schedule &s, const RateFn &omega_fn) {
  return liminf_modulus(s.sigma2, omega_fn);
}

enum class FormulaTag { General, Factored, Hilbert, InexactKM, ClassicalKM, Anchor, Example1, Example2 };

inline const char *to_string(FormulaTag t) {
  switch (t) {
    case FormulaTag::General: return "general";
    case FormulaTag::Factored: return "factored";
    case FormulaTag::Hilbert: return "hilbert";
    case FormulaTag::InexactKM: return "inexact_km";
    case FormulaTag::ClassicalKM: return "classical_km";
    case FormulaTag::Anchor: return "anchor";
    case FormulaTag::Example1: return "example1";
    case FormulaTag::Example2: return "example2";
  }
  return "?";
}

inline std::optional<FormulaTag> formula_tag_from_string(const std::string &s) {
  for (auto t : {FormulaTag::General, FormulaTag::Factored, FormulaTag::Hilbert,
                 FormulaTag::InexactKM, FormulaTag::ClassicalKM, FormulaTag::Anchor,
                 FormulaTag::Example1, FormulaTag::Example2})
    if (s == to_string(t)) return t;
  return std::nullopt;
}

/// A second, independently assembled (Phi, Psi) pair for the same instance.
struct CrossCheck {
  std::string route;
  RateFn phi;
  RateFn psi;
};

/// Rate certificates for one instance: Phi bounds ||x_n - T x_n||, Psi bounds
/// ||x_{n+1} - x_n||, and liminf is the modulus of liminf they are built on.
struct Certificate {
  FormulaTag tag = FormulaTag::General;
  InstanceConstants constants;
  RateFn omega;
  RateFn phi;
  RateFn psi;
  LiminfModulus liminf;
  std::optional<CrossCheck> cross_check;
  std::string modulus;
  /// Delta built on the factored Omega~ rather than Omega.
  bool factored_liminf = false;
};

enum class OmegaVariant { Plain, Factored, HilbertClosed };

/// The general assembly of Phi, Psi and Delta from moduli and constants.
inline Certificate general_certificate(const InstanceConstants &c, const Schedule &s,
                                       const UcModulus &eta, OmegaVariant variant,
                                       FormulaTag tag = FormulaTag::General) {
  Certificate cert;
  cert.tag = tag;
  cert.constants = c;
  cert.modulus = eta.name();
  switch (variant) {
    case OmegaVariant::Plain: cert.omega = omega(c, eta); break;
    case OmegaVariant::Factored: cert.omega = omega_factored(c, eta); break;
    case OmegaVariant::HilbertClosed:
      if (!eta.is_hilbert()) throw DomainError("Hilbert closed form requires the Hilbert modulus");
      cert.omega = hilbert_omega(c);
      break;
  }
  cert.phi = phi(c, s, cert.omega);
  cert.psi = psi(cert.phi);
  cert.liminf = liminf_modulus(s, cert.omega);
  cert.factored_liminf = variant != OmegaVariant::Plain;
  return cert;
}

/// Inexact KM (alpha_n = 1 - beta_n): Omega* uses b + M_r in place of M0,
/// Phi*(k) = sigma2(Omega*(2k+1) + sigma3(8k+7) + 1) and Psi*(k) = Phi*(2k+1).
/// The Hilbert modulus selects the closed-form Omega*.
inline Certificate inexact_km_certificate(Nat b, Nat M_r, const RateFn &sigma2,
                                          const RateFn &sigma3, const UcModulus &eta,
                                          bool factored = false,
                                          FormulaTag tag = FormulaTag::InexactKM) {
  Certificate cert;
  cert.tag = tag;
  cert.constants = make_constants(b, 0, M_r);
  cert.modulus = eta.name();
  if (eta.is_hilbert())
    cert.omega = inexact_hilbert_omega(b, M_r);
  else
    cert.omega = factored ? omega_factored(cert.constants, eta) : omega(cert.constants, eta);
  const RateFn om = cert.omega;
  cert.phi = RateFn(
      [sigma2, sigma3, om](Nat k) {
        const Nat j = checked::add(checked::mul(2, k), 1);
        const Nat i3 = checked::add(checked::mul(8, k), 7);
        return sigma2(checked::add(checked::add(om(j), sigma3(i3)), 1));
      },
      RateKind::RateOfConvergence, "sigma2(Omega*(2k+1) + sigma3(8k+7) + 1)");
  cert.psi = psi(cert.phi);
  cert.liminf = liminf_modulus(sigma2, cert.omega);
  cert.factored_liminf = eta.is_hilbert() || factored;
  return cert;
}

/// Constant steps alpha = 1 - lambda, beta = lambda with r_n = r*/(n+L)^2.
/// Hilbert modulus: quadratic closed forms; otherwise
/// Phi*(k) = Lambda(Omega*(2k+1) + 8R(k+1) + 1), R = ceil||r*||.
inline Certificate example1_certificate(Nat b, double lambda, Nat r_star_ceil,
                                        const UcModulus &eta) {
  const Nat Lam = lambda_constant(lambda);
  const Nat R = r_star_ceil;
  const Nat M_r = checked::mul(2, R);
  Certificate cert;
  cert.tag = FormulaTag::Example1;
  cert.constants = make_constants(b, 0, M_r);
  cert.modulus = eta.name();
  const RateFn sigma2 = RateFn::linear(Lam, 0, RateKind::RateOfDivergence);
  const RateFn sigma3 = RateFn::scaled_successor(R, RateKind::CauchyModulus);
  const RateFn sigma1 = RateFn::constant(0, RateKind::CauchyModulus);
  if (eta.is_hilbert()) {
    cert.omega = inexact_hilbert_omega(b, M_r);
    const Nat quad = checked::mul(checked::add(b, checked::mul(2, R)),
                                  checked::add(checked::add(b, checked::mul(4, R)), 1));
    const Nat q16 = checked::mul(checked::mul(16, Lam), quad);
    const Nat q64 = checked::mul(checked::mul(64, Lam), quad);
    const Nat l8 = checked::mul(checked::mul(8, Lam), R);
    const Nat l16 = checked::mul(checked::mul(16, Lam), R);
    cert.phi = RateFn(
        [q16, l8, Lam](Nat k) {
          const Nat k1 = detail::succ(k);
          return checked::add(checked::add(checked::mul(q16, checked::mul(k1, k1)), checked::mul(l8, k1)), Lam);
        },
        RateKind::RateOfConvergence, "16 Lambda (b+2R)(b+4R+1)(k+1)^2 + 8 Lambda R (k+1) + Lambda");
    cert.psi = RateFn(
        [q64, l16, Lam](Nat k) {
          const Nat k1 = detail::succ(k);
          return checked::add(checked::add(checked::mul(q64, checked::mul(k1, k1)), checked::mul(l16, k1)), Lam);
        },
        RateKind::RateOfConvergence, "64 Lambda (b+2R)(b+4R+1)(k+1)^2 + 16 Lambda R (k+1) + Lambda");
  } else {
    cert.omega = omega(cert.constants, eta);
    const RateFn om = cert.omega;
    cert.phi = RateFn(
        [om, Lam, R](Nat k) {
          const Nat k1 = detail::succ(k);
          const Nat j = checked::add(checked::mul(2, k), 1);
          return checked::mul(Lam, checked::add(checked::add(om(j), checked::mul(checked::mul(8, R), k1)), 1));
        },
        RateKind::RateOfConvergence, "Lambda(Omega*(2k+1) + 8R(k+1) + 1)");
    cert.psi = RateFn(
        [om, Lam, R](Nat k) {
          const Nat k1 = detail::succ(k);
          const Nat j = checked::add(checked::mul(4, k), 3);
          return checked::mul(Lam, checked::add(checked::add(om(j), checked::mul(checked::mul(16, R), k1)), 1));
        },
        RateKind::RateOfConvergence, "Lambda(Omega*(4k+3) + 16R(k+1) + 1)");
  }
  cert.liminf = liminf_modulus(sigma2, cert.omega);
  cert.factored_liminf = eta.is_hilbert();

  const RateFn general_omega =
      eta.is_hilbert() ? omega_factored(cert.constants, eta) : omega(cert.constants, eta);
  CrossCheck cc;
  cc.route = eta.is_hilbert() ? "general assembly, factored Omega" : "general assembly";
  cc.phi = phi_from_moduli(cert.constants, sigma1, sigma2, sigma3, general_omega);
  cc.psi = psi(cc.phi);
  cert.cross_check = cc;
  return cert;
}

/// Vanishing defect alpha = lambda, beta_n = 1 - lambda - 1/(n+J)^2 with
/// r_n = r*/(n+L)^2; M_ab = 2, M_r = 2R, so M0 = 3b + 2R and M = 4b + 2R.
inline Certificate example2_certificate(Nat b, double lambda, Nat J, Nat L, Nat r_star_ceil,
                                        const UcModulus &eta) {
  if (J < 2) throw DomainError("J must be >= 2");
  if (L == 0) throw DomainError("L must be >= 1");
  const double J2 = static_cast<double>(J) * static_cast<double>(J);
  if (!(lambda > 0.0 && lambda < (J2 - 1.0) / J2))
    throw DomainError("lambda outside (0, (J^2-1)/J^2)");
  const Nat Lam = lambda_constant(lambda);
  const Nat R = r_star_ceil;
  Certificate cert;
  cert.tag = FormulaTag::Example2;
  cert.constants = make_constants(b, 2, checked::mul(2, R));
  cert.modulus = eta.name();
  const RateFn sigma1 = RateFn::scaled_successor(1, RateKind::CauchyModulus);
  const RateFn sigma2(
      [Lam](Nat n) { return checked::mul(Lam, checked::add(n, 2)) - 1; },
      RateKind::RateOfDivergence, "Lambda(n+2) - 1");
  const RateFn sigma3 = RateFn::scaled_successor(R, RateKind::CauchyModulus);
  const Nat M2 = checked::add(checked::mul(2, b), R);
  const Nat tail = checked::mul(3, Lam) - 1;
  if (eta.is_hilbert()) {
    cert.omega = hilbert_omega(cert.constants);
    const Nat M1 = checked::mul(checked::add(checked::mul(3, b), checked::mul(2, R)),
                                checked::add(checked::add(checked::mul(5, b), checked::mul(4, R)), 1));
    const Nat a16 = checked::mul(checked::mul(16, Lam), M1);
    const Nat a64 = checked::mul(checked::mul(64, Lam), M1);
    const Nat b16 = checked::mul(checked::mul(16, Lam), M2);
    const Nat b32 = checked::mul(checked::mul(32, Lam), M2);
    cert.phi = RateFn(
        [a16, b16, tail](Nat k) {
          const Nat k1 = detail::succ(k);
          return checked::add(checked::add(checked::mul(a16, checked::mul(k1, k1)), checked::mul(b16, k1)), tail);
        },
        RateKind::RateOfConvergence, "16 Lambda M1 (k+1)^2 + 16 Lambda M2 (k+1) + 3 Lambda - 1");
    cert.psi = RateFn(
        [a64, b32, tail](Nat k) {
          const Nat k1 = detail::succ(k);
          return checked::add(checked::add(checked::mul(a64, checked::mul(k1, k1)), checked::mul(b32, k1)), tail);
        },
        RateKind::RateOfConvergence, "64 Lambda M1 (k+1)^2 + 32 Lambda M2 (k+1) + 3 Lambda - 1");
  } else {
    cert.omega = omega(cert.constants, eta);
    const RateFn om = cert.omega;
    cert.phi = RateFn(
        [om, Lam, M2, tail](Nat k) {
          const Nat k1 = detail::succ(k);
          const Nat j = checked::add(checked::mul(2, k), 1);
          return checked::add(checked::add(checked::mul(Lam, om(j)),
                                           checked::mul(checked::mul(checked::mul(16, Lam), M2), k1)),
                              tail);
        },
        RateKind::RateOfConvergence, "Lambda Omega(2k+1) + 16 Lambda (2b+R)(k+1) + 3 Lambda - 1");
    cert.psi = RateFn(
        [om, Lam, M2, tail](Nat k) {
          const Nat k1 = detail::succ(k);
          const Nat j = checked::add(checked::mul(4, k), 3);
          return checked::add(checked::add(checked::mul(Lam, om(j)),
                                           checked::mul(checked::mul(checked::mul(32, Lam), M2), k1)),
                              tail);
        },
        RateKind::RateOfConvergence, "Lambda Omega(4k+3) + 32 Lambda (2b+R)(k+1) + 3 Lambda - 1");
  }
  cert.liminf = liminf_modulus(sigma2, cert.omega);
  cert.factored_liminf = eta.is_hilbert();

  const RateFn general_omega =
      eta.is_hilbert() ? omega_factored(cert.constants, eta) : omega(cert.constants, eta);
  CrossCheck cc;
  cc.route = eta.is_hilbert() ? "general assembly, factored Omega" : "general assembly";
  cc.phi = phi_from_moduli(cert.constants, sigma1, sigma2, sigma3, general_omega);
  cc.psi = psi(cc.phi);
  cert.cross_check = cc;
  return cert;
}

/// True when the cross-check route (if any) reproduces Phi and Psi exactly
/// for every k <= k_max.
inline bool cross_check_agrees(const Certificate &cert, Nat k_max) {
  if (!cert.cross_check) return true;
  for (Nat k = 0; k <= k_max; ++k)
    if (cert.phi(k) != cert.cross_check->phi(k) || cert.psi(k) != cert.cross_check->psi(k))
      return false;
  return true;
}

/// Picks the formula for an instance. With no explicit choice, Euclidean
/// spaces use the family's Hilbert closed form and other spaces the general
/// Omega path.
inline FormulaTag auto_formula(const Space &space, const Schedule &s) {
  if (!space.is_euclidean()) return FormulaTag::General;
  switch (s.family) {
    case FamilyTag::ClassicalKM: return FormulaTag::ClassicalKM;
    case FamilyTag::Example1: return FormulaTag::Example1;
    case FamilyTag::InexactKM: return FormulaTag::InexactKM;
    case FamilyTag::Example2: return FormulaTag::Example2;
    case FamilyTag::Anchor: return FormulaTag::Anchor;
    case FamilyTag::GeneralKM:
    case FamilyTag::Custom: return FormulaTag::Hilbert;
  }
  return FormulaTag::General;
}

inline Certificate make_certificate(const Space &space, const Schedule &s,
                                    const InstanceConstants &c,
                                    std::optional<FormulaTag> choice = std::nullopt) {
  const UcModulus eta = UcModulus::of(space);
  const FormulaTag tag = choice ? *choice : auto_formula(space, s);
  const auto need = [&](bool ok, const char *what) {
    if (!ok)
      throw DomainError(std::string("formula ") + to_string(tag) + " requires " + what +
                        " (schedule family " + to_string(s.family) + ")");
  };
  switch (tag) {
    case FormulaTag::General: return general_certificate(c, s, eta, OmegaVariant::Plain, tag);
    case FormulaTag::Factored: return general_certificate(c, s, eta, OmegaVariant::Factored, tag);
    case FormulaTag::Hilbert:
      need(space.is_euclidean(), "a Euclidean space");
      return general_certificate(c, s, eta, OmegaVariant::HilbertClosed, tag);
    case FormulaTag::Anchor:
      need(s.family == FamilyTag::Anchor, "an anchored schedule");
      return general_certificate(c, s, eta,
                                 space.is_euclidean() ? OmegaVariant::HilbertClosed : OmegaVariant::Plain,
                                 tag);
    case FormulaTag::InexactKM:
    case FormulaTag::ClassicalKM: {
      need(s.defect_vanishes, "alpha_n + beta_n == 1");
      if (tag == FormulaTag::ClassicalKM) need(s.r_vanishes, "r_n == 0");
      const Nat M_r = tag == FormulaTag::ClassicalKM ? 0 : c.M_r;
      const RateFn sigma3 =
          tag == FormulaTag::ClassicalKM ? RateFn::constant(0, RateKind::CauchyModulus) : s.sigma3;
      Certificate cert = inexact_km_certificate(c.b, M_r, s.sigma2, sigma3, eta, false, tag);
      CrossCheck cc;
      cc.route = "general assembly";
      cc.phi = phi(cert.constants, s, space.is_euclidean() ? omega_factored(cert.constants, eta)
                                                          : omega(cert.constants, eta));
      cc.psi = psi(cc.phi);
      cert.cross_check = cc;
      return cert;
    }
    case FormulaTag::Example1:
      need(s.example.has_value() &&
               (s.family == FamilyTag::Example1 || s.family == FamilyTag::ClassicalKM),
           "a constant-step schedule");
      return example1_certificate(c.b, s.example->lambda, s.example->r_star_ceil, eta);
    case FormulaTag::Example2:
      need(s.example.has_value() && s.family == FamilyTag::Example2, "a vanishing-defect schedule");
      return example2_certificate(c.b, s.example->lambda, s.example->J, s.example->L,
                                  s.example->r_star_ceil, eta);
  }
  throw DomainError("unknown formula tag");
}

}  // namespace kmrates
