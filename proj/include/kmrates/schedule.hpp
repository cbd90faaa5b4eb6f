#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kmrates/checked.hpp"
#include "kmrates/moduli.hpp"
#include "kmrates/rate.hpp"
#include "kmrates/space.hpp"

namespace kmrates {

enum class FamilyTag { GeneralKM, InexactKM, ClassicalKM, Anchor, Example1, Example2, Custom };

inline const char *to_string(FamilyTag f) {
  switch (f) {
    case FamilyTag::GeneralKM: return "general_km";
    case FamilyTag::InexactKM: return "inexact_km";
    case FamilyTag::ClassicalKM: return "classical_km";
    case FamilyTag::Anchor: return "anchor";
    case FamilyTag::Example1: return "example1";
    case FamilyTag::Example2: return "example2";
    case FamilyTag::Custom: return "custom";
  }
  return "?";
}

/// ceil(1 / (lambda (1 - lambda))), confirmed in extended precision.
inline Nat lambda_constant(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw DomainError("lambda must lie in (0,1), got " + std::to_string(lambda));
  const long double q = static_cast<long double>(lambda) * (1.0L - static_cast<long double>(lambda));
  Nat big = ceil_nat(static_cast<double>(1.0L / q));
  while (static_cast<long double>(big) * q < 1.0L) ++big;
  while (big > 1 && static_cast<long double>(big - 1) * q >= 1.0L) --big;
  return big;
}

/// Parameters of the constant-step and vanishing-defect families.
struct ExampleParams {
  double lambda = 0.5;
  Nat Lambda = 4;
  Nat J = 2;  // vanishing-defect family only
  Nat L = 1;
  Vector r_star;
  double r_star_norm = 0.0;
  Nat r_star_ceil = 0;  // ceil(||r*||)
};

/// The parameter sequences (alpha_n, beta_n, r_n) of the iteration together
/// with the moduli and bounds that certificates consume. Evaluated lazily by
/// index.
struct Schedule {
  FamilyTag family = FamilyTag::Custom;
  std::size_t dim = 0;
  std::function<double(Nat)> alpha;
  std::function<double(Nat)> beta;
  std::function<Vector(Nat)> r;
  std::function<double(Nat)> r_norm;
  RateFn sigma1 = RateFn::constant(0, RateKind::CauchyModulus);
  RateFn sigma2 = RateFn::identity(RateKind::RateOfDivergence);
  RateFn sigma3 = RateFn::constant(0, RateKind::CauchyModulus);
  Nat M_ab = 0;
  Nat M_r = 0;
  bool defect_vanishes = false;  // alpha_n + beta_n == 1 for all n
  bool r_vanishes = false;       // r_n == 0 for all n
  /// Analytic bounds on sum_{i > n} (1 - alpha_i - beta_i) and sum_{i > n} ||r_i||.
  std::optional<RealSeq> defect_tail;
  std::optional<RealSeq> r_tail;
  std::optional<ExampleParams> example;

  double defect(Nat n) const { return 1.0 - alpha(n) - beta(n); }

  /// alpha beta / (alpha + beta), taken as 0 where alpha + beta == 0.
  double divergence_summand(Nat n) const {
    const double a = alpha(n), b = beta(n), s = a + b;
    return s > 0.0 ? a * b / s : 0.0;
  }
};

namespace detail {

inline std::function<Vector(Nat)> zero_perturbation(std::size_t dim) {
  return [dim](Nat) { return Vector(Vector::Zero(static_cast<Eigen::Index>(dim))); };
}

inline ExampleParams example_params(const Space &space, double lambda, Nat L,
                                    const Vector &r_star) {
  if (L == 0) throw DomainError("L must be >= 1");
  space.require_dim(r_star, "r*");
  ExampleParams p;
  p.lambda = lambda;
  p.Lambda = lambda_constant(lambda);
  p.L = L;
  p.r_star = r_star;
  p.r_star_norm = space.norm(r_star);
  p.r_star_ceil = ceil_nat(p.r_star_norm);
  return p;
}

/// r_n = r* / (n+L)^2 with its norm, moduli and tail.
inline void attach_inverse_square_perturbation(Schedule &s, const ExampleParams &p) {
  const Vector r_star = p.r_star;
  const double rn = p.r_star_norm;
  const double L = static_cast<double>(p.L);
  s.r_vanishes = rn == 0.0;
  if (s.r_vanishes) {
    s.r = zero_perturbation(s.dim);
    s.r_norm = [](Nat) { return 0.0; };
  } else {
    s.r = [r_star, L](Nat n) {
      const double d = static_cast<double>(n) + L;
      return Vector(r_star / (d * d));
    };
    s.r_norm = [rn, L](Nat n) {
      const double d = static_cast<double>(n) + L;
      return rn / (d * d);
    };
  }
  s.sigma3 = RateFn::scaled_successor(p.r_star_ceil, RateKind::CauchyModulus);
  s.M_r = checked::mul(2, p.r_star_ceil);
  s.r_tail = [rn, L](Nat n) { return rn / (static_cast<double>(n) + L); };
}

}  // namespace detail

/// alpha_n = 1 - lambda, beta_n = lambda, r_n = r* / (n+L)^2.
inline Schedule make_example1(const Space &space, double lambda, Nat L, const Vector &r_star) {
  const ExampleParams p = detail::example_params(space, lambda, L, r_star);
  Schedule s;
  s.family = FamilyTag::Example1;
  s.dim = space.dim();
  s.alpha = [lambda](Nat) { return 1.0 - lambda; };
  s.beta = [lambda](Nat) { return lambda; };
  s.sigma1 = RateFn::constant(0, RateKind::CauchyModulus);
  s.sigma2 = RateFn::linear(p.Lambda, 0, RateKind::RateOfDivergence);
  s.M_ab = 0;
  s.defect_vanishes = true;
  s.defect_tail = [](Nat) { return 0.0; };
  detail::attach_inverse_square_perturbation(s, p);
  s.example = p;
  return s;
}

/// Classical Krasnoselskii-Mann steps with constant beta: the r* = 0 member
/// of make_example1, tagged as its own family.
inline Schedule make_classical_km(const Space &space, double beta) {
  Schedule s = make_example1(space, beta, 1, space.zero());
  s.family = FamilyTag::ClassicalKM;
  return s;
}

/// alpha_n = lambda, beta_n = 1 - lambda - 1/(n+J)^2, r_n = r* / (n+L)^2.
inline Schedule make_example2(const Space &space, double lambda, Nat J, Nat L,
                              const Vector &r_star) {
  if (J < 2) throw DomainError("J must be >= 2");
  const double J2 = static_cast<double>(J) * static_cast<double>(J);
  const double upper = (J2 - 1.0) / J2;
  if (!(lambda > 0.0 && lambda < upper))
    throw DomainError("lambda must lie in (0, (J^2-1)/J^2) = (0, " + std::to_string(upper) +
                      "), got " + std::to_string(lambda));
  ExampleParams p = detail::example_params(space, lambda, L, r_star);
  p.J = J;
  const double Jd = static_cast<double>(J);
  Schedule s;
  s.family = FamilyTag::Example2;
  s.dim = space.dim();
  s.alpha = [lambda](Nat) { return lambda; };
  s.beta = [lambda, Jd](Nat n) {
    const double d = static_cast<double>(n) + Jd;
    return 1.0 - lambda - 1.0 / (d * d);
  };
  s.sigma1 = RateFn::scaled_successor(1, RateKind::CauchyModulus);
  const Nat Lambda = p.Lambda;
  s.sigma2 = RateFn(
      [Lambda](Nat n) { return checked::mul(Lambda, checked::add(n, 2)) - 1; },
      RateKind::RateOfDivergence, std::to_string(Lambda) + "(n+2) - 1");
  s.M_ab = 2;
  s.defect_vanishes = false;
  s.defect_tail = [Jd](Nat n) { return 1.0 / (static_cast<double>(n) + Jd); };
  detail::attach_inverse_square_perturbation(s, p);
  s.example = p;
  return s;
}

/// x_{n+1} = (1 - beta_n) x_n + beta_n T x_n + r_n. sigma2 must be a rate of
/// divergence of sum beta_n (1 - beta_n); moduli are passed through unchanged.
inline Schedule make_inexact_km(const Space &space, std::function<double(Nat)> beta,
                                RateFn sigma2, std::function<Vector(Nat)> r, RateFn sigma3,
                                Nat M_r) {
  Schedule s;
  s.family = FamilyTag::InexactKM;
  s.dim = space.dim();
  s.beta = beta;
  s.alpha = [beta](Nat n) { return 1.0 - beta(n); };
  s.sigma1 = RateFn::constant(0, RateKind::CauchyModulus);
  s.sigma2 = sigma2.as(RateKind::RateOfDivergence);
  s.sigma3 = sigma3.as(RateKind::CauchyModulus);
  s.M_ab = 0;
  s.M_r = M_r;
  s.defect_vanishes = true;
  s.defect_tail = [](Nat) { return 0.0; };
  if (!r) {
    s.r = detail::zero_perturbation(s.dim);
    s.r_norm = [](Nat) { return 0.0; };
    s.r_vanishes = true;
  } else {
    s.r = r;
    s.r_norm = [space, r](Nat n) { return space.norm(r(n)); };
  }
  return s;
}

/// Fully caller-specified schedule; the library never infers moduli.
inline Schedule make_custom(const Space &space, std::function<double(Nat)> alpha,
                            std::function<double(Nat)> beta, std::function<Vector(Nat)> r,
                            RateFn sigma1, RateFn sigma2, RateFn sigma3, Nat M_ab, Nat M_r) {
  Schedule s;
  s.family = FamilyTag::Custom;
  s.dim = space.dim();
  s.alpha = std::move(alpha);
  s.beta = std::move(beta);
  if (!r) {
    s.r = detail::zero_perturbation(s.dim);
    s.r_norm = [](Nat) { return 0.0; };
    s.r_vanishes = true;
  } else {
    s.r = r;
    s.r_norm = [space, r](Nat n) { return space.norm(r(n)); };
  }
  s.sigma1 = sigma1.as(RateKind::CauchyModulus);
  s.sigma2 = sigma2.as(RateKind::RateOfDivergence);
  s.sigma3 = sigma3.as(RateKind::CauchyModulus);
  s.M_ab = M_ab;
  s.M_r = M_r;
  return s;
}

/// Anchored variant: r_n = (1 - alpha_n - beta_n) u, with
/// sigma3(k) = sigma1(ceil||u|| (k+1) - 1) and M_r = M_ab ceil||u||.
inline Schedule make_anchor(const Space &space, const Schedule &base, const Vector &u) {
  space.require_dim(u, "anchor u");
  const double un = space.norm(u);
  if (!(un > 0.0)) throw DomainError("anchor requires u != 0");
  if (!base.r_vanishes) throw DomainError("anchor base schedule must have r_n = 0");
  const Nat cu = ceil_nat(un);
  Schedule s = base;
  s.family = FamilyTag::Anchor;
  const auto alpha = base.alpha, beta = base.beta;
  s.r = [alpha, beta, u](Nat n) { return Vector((1.0 - alpha(n) - beta(n)) * u); };
  s.r_norm = [alpha, beta, un](Nat n) { return (1.0 - alpha(n) - beta(n)) * un; };
  s.r_vanishes = base.defect_vanishes;
  const RateFn sigma1 = base.sigma1;
  s.sigma3 = RateFn(
      [sigma1, cu](Nat k) { return sigma1(checked::mul(cu, checked::add(k, 1)) - 1); },
      RateKind::CauchyModulus, "sigma1(" + std::to_string(cu) + "(k+1) - 1)");
  s.M_r = checked::mul(base.M_ab, cu);
  if (base.defect_tail) {
    const RealSeq tail = *base.defect_tail;
    s.r_tail = [tail, un](Nat n) { return un * tail(n); };
  } else {
    s.r_tail.reset();
  }
  return s;
}

/// Smallest integers satisfying M >= ceil(S_{sigma(0)}) + 1 for the defect
/// and perturbation series, or 0 when the series vanishes identically.
inline std::pair<Nat, Nat> bound_constants_from_moduli(const Schedule &s) {
  Nat m_ab = 0, m_r = 0;
  if (!s.defect_vanishes)
    m_ab = series_upper_bound(partial_sums([s](Nat n) { return s.defect(n); }), s.sigma1);
  if (!s.r_vanishes) m_r = series_upper_bound(partial_sums(s.r_norm), s.sigma3);
  return {m_ab, m_r};
}

/// Replaces M_ab and M_r with larger (still valid) constants.
inline Schedule with_constants(Schedule s, Nat M_ab, Nat M_r) {
  if (M_ab < s.M_ab || M_r < s.M_r)
    throw DomainError("M_ab/M_r overrides may only enlarge the schedule's constants");
  s.M_ab = M_ab;
  s.M_r = M_r;
  return s;
}

struct PointOverride {
  std::optional<double> alpha;
  std::optional<double> beta;
};

/// Edits individual alpha_n / beta_n values. The result is tagged Custom;
/// moduli are kept as they are, so only verify_hypotheses can vouch for it.
inline Schedule with_point_overrides(Schedule s, std::map<Nat, PointOverride> edits) {
  if (edits.empty()) return s;
  const auto alpha = s.alpha, beta = s.beta;
  auto shared = std::make_shared<const std::map<Nat, PointOverride>>(std::move(edits));
  s.alpha = [alpha, shared](Nat n) {
    auto it = shared->find(n);
    return it != shared->end() && it->second.alpha ? *it->second.alpha : alpha(n);
  };
  s.beta = [beta, shared](Nat n) {
    auto it = shared->find(n);
    return it != shared->end() && it->second.beta ? *it->second.beta : beta(n);
  };
  s.family = FamilyTag::Custom;
  s.example.reset();
  s.defect_tail.reset();
  bool touches_defect = false;
  for (const auto &kv : *shared) touches_defect |= kv.second.alpha.has_value() || kv.second.beta.has_value();
  if (touches_defect) s.defect_vanishes = false;
  return s;
}

struct RangeViolation {
  Nat n = 0;
  std::string what;
};

struct HypothesisReport {
  Nat window = 0;  // all checks cover n in [0, window]
  std::vector<RangeViolation> range_violations;
  CauchyReport sigma1;
  CauchyReport sigma3;
  DivergenceReport sigma2;
  Nat sigma2_window = 0;
  double defect_sum = 0.0;     // on the window, plus analytic tail when known
  double r_norm_sum = 0.0;
  bool defect_bound_ok = true; // defect_sum <= M_ab
  bool r_bound_ok = true;      // r_norm_sum <= M_r

  bool ok() const {
    return range_violations.empty() && sigma1.all_pass && sigma3.all_pass && sigma2.ok() &&
           defect_bound_ok && r_bound_ok;
  }
};

/// Indices n <= n_max where alpha_n, beta_n or alpha_n + beta_n leave their
/// admissible ranges.
inline std::vector<RangeViolation> range_violations(const Schedule &s, Nat n_max) {
  std::vector<RangeViolation> out;
  for (Nat n = 0; n <= n_max; ++n) {
    const double a = s.alpha(n), b = s.beta(n);
    if (!(a >= 0.0 && a <= 1.0)) out.push_back({n, "alpha outside [0,1]"});
    if (!(b >= 0.0 && b <= 1.0)) out.push_back({n, "beta outside [0,1]"});
    if (!(a + b <= 1.0 + 1e-12)) out.push_back({n, "alpha + beta > 1"});
    if (!(a + b > 0.0)) out.push_back({n, "alpha + beta == 0"});
  }
  return out;
}

/// Checks the schedule's hypotheses on [0, n_max]: ranges of alpha, beta and
/// alpha+beta, the Cauchy contracts of sigma1 and sigma3 (k <= k_max, with
/// analytic tails where the family has them), the divergence contract of
/// sigma2, and the series bounds M_ab, M_r.
inline HypothesisReport verify_hypotheses(const Schedule &s, Nat n_max, Nat k_max = 100) {
  constexpr double tol = 1e-10;
  HypothesisReport rep;
  rep.window = n_max;
  rep.range_violations = range_violations(s, n_max);

  const auto defect = [s](Nat n) { return s.defect(n); };
  rep.sigma1 = check_cauchy_modulus_window(partial_sums(defect), s.sigma1, k_max, n_max,
                                           s.defect_tail, tol);
  rep.sigma3 = check_cauchy_modulus_window(partial_sums(s.r_norm), s.sigma3, k_max, n_max,
                                           s.r_tail, tol);

  // shrink the divergence window until the scan stays bounded
  constexpr Nat scan_cap = 50'000'000;
  Nat div_max = n_max;
  while (div_max > 0 && s.sigma2(div_max) > scan_cap) div_max /= 2;
  rep.sigma2_window = div_max;
  rep.sigma2 = check_divergence_rate([s](Nat n) { return s.divergence_summand(n); }, s.sigma2,
                                     div_max, tol);

  double ds = 0.0, rs = 0.0;
  for (Nat n = 0; n <= n_max; ++n) {
    ds += s.defect(n);
    rs += s.r_norm(n);
  }
  if (s.defect_tail) ds += (*s.defect_tail)(n_max);
  if (s.r_tail) rs += (*s.r_tail)(n_max);
  rep.defect_sum = ds;
  rep.r_norm_sum = rs;
  rep.defect_bound_ok = ds <= static_cast<double>(s.M_ab) + tol;
  rep.r_bound_ok = rs <= static_cast<double>(s.M_r) + tol;
  return rep;
}

}  // namespace kmrates
