#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "kmrates/checked.hpp"
#include "kmrates/space.hpp"

namespace kmrates {

/// Modulus of uniform convexity for l_p (and L_p) spaces, 1 < p < inf.
inline double eta_lp(double p, double eps) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw DomainError("eta_lp requires p > 1, got " + std::to_string(p));
  if (!(eps > 0.0) || eps > 2.0)
    throw DomainError("eta_lp requires eps in (0,2], got " + std::to_string(eps));
  if (p < 2.0) return (p - 1.0) * eps * eps / 8.0;
  return std::pow(eps, p) / (p * std::pow(2.0, p));
}

/// eta(eps) = (num/den) * eps^exponent, allowing exact integer evaluation of
/// the certificate quotients.
struct PowerForm {
  Nat num = 1;
  Nat den = 1;
  unsigned exponent = 0;
};

enum class ModulusKind { Hilbert, Lp, Custom };

/// A modulus of uniform convexity eta: (0,2] -> (0,1], optionally factored
/// as eta(eps) = eps * eta_tilde(eps).
class UcModulus {
 public:
  using Fn = std::function<double(double)>;

  UcModulus(Fn eta, std::string name, ModulusKind kind = ModulusKind::Custom)
      : eta_(std::move(eta)), name_(std::move(name)), kind_(kind) {}

  UcModulus &with_factorization(Fn eta_tilde, bool tilde_increasing) {
    eta_tilde_ = std::move(eta_tilde);
    tilde_increasing_ = tilde_increasing;
    return *this;
  }
  UcModulus &with_power_form(PowerForm f) {
    power_ = f;
    return *this;
  }

  double eta(double eps) const { return eta_(eps); }
  double operator()(double eps) const { return eta_(eps); }

  bool has_factorization() const noexcept { return static_cast<bool>(eta_tilde_); }
  double eta_tilde(double eps) const {
    if (!eta_tilde_) throw DomainError("modulus " + name_ + " carries no factorization");
    return eta_tilde_(eps);
  }
  bool tilde_increasing() const noexcept { return tilde_increasing_; }

  const std::optional<PowerForm> &power_form() const noexcept { return power_; }
  const std::string &name() const noexcept { return name_; }
  ModulusKind kind() const noexcept { return kind_; }
  bool is_hilbert() const noexcept { return kind_ == ModulusKind::Hilbert; }

  /// eps^2/8, the Hilbert-space modulus, with eta_tilde(eps) = eps/8.
  static UcModulus hilbert() {
    UcModulus m([](double e) { return e * e / 8.0; }, "hilbert", ModulusKind::Hilbert);
    m.with_factorization([](double e) { return e / 8.0; }, true);
    m.with_power_form({1, 8, 2});
    return m;
  }

  /// eta_p for l_p. Integer p >= 2 also gets an exact power form.
  static UcModulus lp(double p) {
    if (p == 2.0) return hilbert();
    (void)eta_lp(p, 1.0);  // domain check
    UcModulus m([p](double e) { return eta_lp(p, e); }, "eta_p(p=" + std::to_string(p) + ")",
                ModulusKind::Lp);
    if (p < 2.0) {
      m.with_factorization([p](double e) { return (p - 1.0) * e / 8.0; }, true);
    } else {
      m.with_factorization([p](double e) { return std::pow(e, p - 1.0) / (p * std::pow(2.0, p)); },
                           true);
      if (p == std::floor(p) && p <= 16.0) {
        const auto ip = static_cast<unsigned>(p);
        m.with_power_form({1, checked::mul(ip, checked::pow(2, ip)), ip});
      }
    }
    return m;
  }

  static UcModulus of(const Space &space) {
    return space.is_euclidean() ? hilbert() : lp(space.p());
  }

  /// eta(eps) = (num/den) eps^exponent. Test moduli, e.g. constant 1 or eps/2.
  static UcModulus power(Nat num, Nat den, unsigned exponent, std::string name) {
    if (num == 0 || den == 0) throw DomainError("power modulus needs a positive coefficient");
    const double c = static_cast<double>(num) / static_cast<double>(den);
    UcModulus m([c, exponent](double e) { return c * std::pow(e, exponent); }, std::move(name));
    if (exponent >= 1)
      m.with_factorization([c, exponent](double e) { return c * std::pow(e, exponent - 1); },
                           true);
    m.with_power_form({num, den, exponent});
    return m;
  }

 private:
  Fn eta_;
  Fn eta_tilde_;
  bool tilde_increasing_ = false;
  std::optional<PowerForm> power_;
  std::string name_;
  ModulusKind kind_;
};

/// Outcome of sampling the invariants of a UcModulus on a grid.
struct UcModulusReport {
  bool in_range = true;         // 0 < eta <= 1
  bool factorization_ok = true; // |eta - eps*eta_tilde| <= 1e-12
  bool tilde_monotone = true;   // eta_tilde nondecreasing on the grid
  double worst_eps = 0.0;
  bool ok() const { return in_range && factorization_ok && tilde_monotone; }
};

inline UcModulusReport check_uc_modulus(const UcModulus &m, std::size_t grid = 2000) {
  UcModulusReport rep;
  double prev_tilde = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i <= grid; ++i) {
    const double eps = 2.0 * static_cast<double>(i) / static_cast<double>(grid);
    const double v = m.eta(eps);
    if (!(v > 0.0 && v <= 1.0)) {
      rep.in_range = false;
      rep.worst_eps = eps;
    }
    if (m.has_factorization()) {
      const double t = m.eta_tilde(eps);
      if (std::abs(v - eps * t) > 1e-12) {
        rep.factorization_ok = false;
        rep.worst_eps = eps;
      }
      if (t < prev_tilde) {
        rep.tilde_monotone = false;
        rep.worst_eps = eps;
      }
      prev_tilde = t;
    }
  }
  return rep;
}

enum class TransferOutcome { Holds, Fails, PreconditionViolated };

inline const char *to_string(TransferOutcome o) {
  switch (o) {
    case TransferOutcome::Holds: return "holds";
    case TransferOutcome::Fails: return "fails";
    case TransferOutcome::PreconditionViolated: return "precondition_violated";
  }
  return "?";
}

/// Checks ||(1-l)x + l y - a|| <= (1 - 2 l (1-l) eta(eps)) r + 1e-10 given
/// ||x-a|| <= r, ||y-a|| <= r, ||x-y|| >= eps r (re-verified here).
inline TransferOutcome check_uc_transfer(const UcModulus &eta, const Space &space,
                                         const Vector &a, const Vector &x, const Vector &y,
                                         double r, double eps, double lambda) {
  constexpr double tol = 1e-10;
  constexpr double pre_tol = 1e-12;
  if (!(r > 0.0) || !(eps > 0.0) || eps > 2.0 || !(lambda >= 0.0) || lambda > 1.0)
    return TransferOutcome::PreconditionViolated;
  if (space.distance(x, a) > r + pre_tol || space.distance(y, a) > r + pre_tol ||
      space.distance(x, y) < eps * r - pre_tol)
    return TransferOutcome::PreconditionViolated;
  const Vector c = (1.0 - lambda) * x + lambda * y;
  const double lhs = space.distance(c, a);
  const double rhs = (1.0 - 2.0 * lambda * (1.0 - lambda) * eta(eps)) * r;
  return lhs <= rhs + tol ? TransferOutcome::Holds : TransferOutcome::Fails;
}

/// Monte-Carlo falsification of a candidate modulus. Draws admissible
/// (a, x, y, r, eps, lambda) with a fixed seed; half of the points are placed
/// on the sphere of radius r, where the inequality is tightest.
struct TransferSampleReport {
  std::size_t samples = 0;
  std::size_t holds = 0;
  std::size_t fails = 0;
  std::size_t precondition_violations = 0;
};

inline TransferSampleReport sample_uc_transfer(const UcModulus &eta, const Space &space,
                                               std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto d = static_cast<Eigen::Index>(space.dim());

  auto point_in_ball = [&](const Vector &center, double radius, bool on_sphere) {
    Vector dir(d);
    for (Eigen::Index i = 0; i < d; ++i) dir[i] = gauss(rng);
    const double n = space.norm(dir);
    if (n == 0.0) return Vector(center);
    const double rho =
        on_sphere ? radius : radius * std::pow(unif(rng), 1.0 / static_cast<double>(d));
    return Vector(center + dir * (rho / n));
  };

  TransferSampleReport rep;
  while (rep.samples < samples) {
    Vector a(d);
    for (Eigen::Index i = 0; i < d; ++i) a[i] = 2.0 * gauss(rng);
    const double r = 0.1 + 3.0 * unif(rng);
    const bool sphere = unif(rng) < 0.5;
    const Vector x = point_in_ball(a, r, sphere);
    const Vector y = point_in_ball(a, r, sphere);
    const double ratio = space.distance(x, y) / r;
    if (!(ratio > 1e-9)) continue;
    // shave a hair off so roundoff in the ratio never trips the precondition
    const double eps = std::min(2.0, ratio * (1.0 - 1e-12));
    const double lambda = unif(rng);
    ++rep.samples;
    switch (check_uc_transfer(eta, space, a, x, y, r, eps, lambda)) {
      case TransferOutcome::Holds: ++rep.holds; break;
      case TransferOutcome::Fails: ++rep.fails; break;
      case TransferOutcome::PreconditionViolated: ++rep.precondition_violations; break;
    }
  }
  return rep;
}

}  // namespace kmrates
