#pragma once

#include <functional>
#include <string>
#include <utility>

#include "kmrates/checked.hpp"

namespace kmrates {

enum class RateKind { RateOfConvergence, CauchyModulus, RateOfDivergence };

inline const char *to_string(RateKind k) {
  switch (k) {
    case RateKind::RateOfConvergence: return "rate_of_convergence";
    case RateKind::CauchyModulus: return "cauchy_modulus";
    case RateKind::RateOfDivergence: return "rate_of_divergence";
  }
  return "?";
}

/// A function N -> N together with the contract it is claimed to satisfy.
///
/// Evaluation uses checked arithmetic; an overflowing evaluation throws
/// OverflowError rather than returning a wrapped value.
class RateFn {
 public:
  using Eval = std::function<Nat(Nat)>;

  RateFn() : RateFn(constant(0, RateKind::RateOfConvergence)) {}
  RateFn(Eval eval, RateKind kind, std::string description)
      : eval_(std::move(eval)), kind_(kind), description_(std::move(description)) {}

  Nat operator()(Nat k) const { return eval_(k); }

  RateKind kind() const noexcept { return kind_; }
  const std::string &description() const noexcept { return description_; }

  /// Same function, relabelled with another contract.
  RateFn as(RateKind kind, std::string description = {}) const {
    return RateFn(eval_, kind, description.empty() ? description_ : std::move(description));
  }

  static RateFn constant(Nat c, RateKind kind) {
    return RateFn([c](Nat) { return c; }, kind, "k -> " + std::to_string(c));
  }
  static RateFn identity(RateKind kind) {
    return RateFn([](Nat k) { return k; }, kind, "k -> k");
  }
  /// k -> a*k + b
  static RateFn linear(Nat a, Nat b, RateKind kind) {
    return RateFn([a, b](Nat k) { return checked::add(checked::mul(a, k), b); }, kind,
                  "k -> " + std::to_string(a) + "k + " + std::to_string(b));
  }
  /// k -> a*(k+1)
  static RateFn scaled_successor(Nat a, RateKind kind) {
    return RateFn([a](Nat k) { return checked::mul(a, checked::add(k, 1)); }, kind,
                  "k -> " + std::to_string(a) + "(k+1)");
  }

 private:
  Eval eval_;
  RateKind kind_;
  std::string description_;
};

/// A function N x N -> N claimed to be a modulus of liminf: for all k, L some
/// N in [L, eval(k, L)] has a_N < 1/(k+1). The type carries no sequence; the
/// contract is checked against realized trajectories by the verify module.
class LiminfModulus {
 public:
  using Eval = std::function<Nat(Nat, Nat)>;

  LiminfModulus() : eval_([](Nat, Nat l) { return l; }), description_("(k,L) -> L") {}
  LiminfModulus(Eval eval, std::string description)
      : eval_(std::move(eval)), description_(std::move(description)) {}

  Nat operator()(Nat k, Nat l) const { return eval_(k, l); }
  const std::string &description() const noexcept { return description_; }

 private:
  Eval eval_;
  std::string description_;
};

}  // namespace kmrates
