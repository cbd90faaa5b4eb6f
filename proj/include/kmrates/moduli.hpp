#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kmrates/checked.hpp"
#include "kmrates/rate.hpp"
#include "kmrates/uc_modulus.hpp"

namespace kmrates {

/// A real sequence given lazily by index.
using RealSeq = std::function<double(Nat)>;

/// Rate of convergence of a_n -> 0 from a Cauchy modulus phi of sum a_n:
/// psi(k) = phi(k) + 1.
inline RateFn cauchy_to_rate(const RateFn &phi) {
  return RateFn([phi](Nat k) { return checked::add(phi(k), 1); }, RateKind::RateOfConvergence,
                "phi(k)+1 where phi = " + phi.description());
}

/// Integer bound M >= S_{phi(0)} + 1 on a convergent nonnegative series,
/// where partial_sum_at(n) = a_0 + ... + a_n.
inline Nat series_upper_bound(const RealSeq &partial_sum_at, const RateFn &phi) {
  const double s = partial_sum_at(phi(0));
  if (s < 0.0 || std::isnan(s))
    throw DomainError("series_upper_bound: negative partial sum " + std::to_string(s));
  return checked::add(ceil_guarded(s), 1);
}

/// Cauchy modulus of c_n = s a_n + t b_n from moduli of (a_n) and (b_n):
/// k -> max{phi1(2s(k+1)-1), phi2(2t(k+1)-1)}.
inline RateFn combine_cauchy_moduli(const RateFn &phi1, const RateFn &phi2, Nat s, Nat t) {
  if (s == 0 || t == 0) throw DomainError("combine_cauchy_moduli requires s, t >= 1");
  return RateFn(
      [phi1, phi2, s, t](Nat k) {
        const Nat k1 = checked::add(k, 1);
        const Nat i1 = checked::mul(checked::mul(2, s), k1) - 1;
        const Nat i2 = checked::mul(checked::mul(2, t), k1) - 1;
        return std::max(phi1(i1), phi2(i2));
      },
      RateKind::CauchyModulus,
      "max{phi1(2s(k+1)-1), phi2(2t(k+1)-1)}, s=" + std::to_string(s) +
          ", t=" + std::to_string(t));
}

/// Rate of convergence of (a_n) from a modulus of liminf delta of (a_n) and a
/// Cauchy modulus psi of sum b_n, given a_{n+1} <= a_n + b_n:
/// k -> delta(2k+1, psi(2k+1)+1).
inline RateFn rate_from_liminf(const LiminfModulus &delta, const RateFn &psi) {
  return RateFn(
      [delta, psi](Nat k) {
        const Nat j = checked::add(checked::mul(2, k), 1);
        return delta(j, checked::add(psi(j), 1));
      },
      RateKind::RateOfConvergence, "delta(2k+1, psi(2k+1)+1)");
}

/// Moduli for the series sum_n t/(n+L)^2.
struct InverseSquareModuli {
  RateFn phi;       // ceil(t)(k+1)
  RateFn phi_star;  // max{ceil(t)(k+1) - L, 0}
  Nat bound = 0;    // M_t, with sum <= M_t <= 2 ceil(t)
};

inline InverseSquareModuli inverse_square_modulus(double t, Nat L) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw DomainError("inverse_square_modulus requires t >= 0");
  if (L == 0) throw DomainError("inverse_square_modulus requires L >= 1");
  const Nat ct = ceil_nat(t);
  InverseSquareModuli out;
  out.phi = RateFn::scaled_successor(ct, RateKind::CauchyModulus);
  out.phi_star = RateFn(
      [ct, L](Nat k) { return checked::monus(checked::mul(ct, checked::add(k, 1)), L); },
      RateKind::CauchyModulus,
      "max{" + std::to_string(ct) + "(k+1) - " + std::to_string(L) + ", 0}");
  if (t == 0.0) {
    out.bound = 0;
  } else {
    // ceil(t (L+1) / L^2), confirmed in extended precision
    const long double num = static_cast<long double>(t) * static_cast<long double>(L + 1);
    const long double den = static_cast<long double>(L) * static_cast<long double>(L);
    Nat m = ceil_nat(static_cast<double>(num / den));
    while (static_cast<long double>(m) * den < num) ++m;
    while (m > 0 && static_cast<long double>(m - 1) * den >= num) --m;
    out.bound = m;
  }
  return out;
}

struct DivergenceRow {
  Nat n = 0;
  Nat theta = 0;
  double partial_sum = 0.0;
  bool reaches = false;     // sum_{i <= theta(n)} a_i >= n
  bool theta_ge_n = false;  // theta(n) >= n
};

struct DivergenceReport {
  std::vector<DivergenceRow> rows;
  bool summands_in_unit_interval = true;  // a_i in [0,1) on the scanned range
  bool all_reach = true;
  bool all_theta_ge_n = true;  // meaningful only if summands_in_unit_interval
  std::optional<Nat> first_failure;
  bool ok() const { return all_reach && (!summands_in_unit_interval || all_theta_ge_n); }
};

/// Checks theta as a rate of divergence of sum summand(i) for n <= n_max,
/// together with theta(n) >= n whenever the summands lie in [0,1).
inline DivergenceReport check_divergence_rate(const RealSeq &summand, const RateFn &theta,
                                              Nat n_max, double tol = 1e-10) {
  DivergenceReport rep;
  std::vector<Nat> thetas(n_max + 1);
  Nat reach = 0;
  for (Nat n = 0; n <= n_max; ++n) {
    thetas[n] = theta(n);
    reach = std::max(reach, std::max(thetas[n], n));
  }
  std::vector<double> prefix(reach + 1);
  double acc = 0.0;
  for (Nat i = 0; i <= reach; ++i) {
    const double a = summand(i);
    if (!(a >= 0.0 && a < 1.0)) rep.summands_in_unit_interval = false;
    acc += a;
    prefix[i] = acc;
  }
  rep.rows.reserve(n_max + 1);
  for (Nat n = 0; n <= n_max; ++n) {
    DivergenceRow row;
    row.n = n;
    row.theta = thetas[n];
    row.partial_sum = prefix[thetas[n]];
    row.reaches = row.partial_sum >= static_cast<double>(n) - tol;
    row.theta_ge_n = thetas[n] >= n;
    if (!row.reaches) rep.all_reach = false;
    if (!row.theta_ge_n) rep.all_theta_ge_n = false;
    const bool bad = !row.reaches || (rep.summands_in_unit_interval && !row.theta_ge_n);
    if (bad && !rep.first_failure) rep.first_failure = n;
    rep.rows.push_back(row);
  }
  // a summand outside [0,1) anywhere disables the theta(n) >= n sub-check
  if (!rep.summands_in_unit_interval) {
    rep.first_failure.reset();
    for (const auto &row : rep.rows)
      if (!row.reaches) {
        rep.first_failure = row.n;
        break;
      }
  }
  return rep;
}

struct CauchyRow {
  Nat k = 0;
  Nat modulus = 0;           // phi(k)
  double oscillation = 0.0;  // sup |a_m - a_n| over phi(k) <= n <= m <= horizon, plus tail
  bool truncated = false;    // phi(k) beyond the horizon: no verdict
  bool pass = false;
};

struct CauchyReport {
  std::vector<CauchyRow> rows;
  Nat horizon = 0;  // verified window is [phi(k), horizon] plus the tail bound
  bool tail_used = false;
  bool all_pass = true;  // over non-truncated rows
  std::size_t verified_rows() const {
    std::size_t c = 0;
    for (const auto &r : rows) c += r.truncated ? 0 : 1;
    return c;
  }
};

/// Verifies phi as a Cauchy modulus of (a_n) on the window [0, horizon].
/// If tail_bound is given, tail_bound(horizon) must bound
/// sup_{m >= horizon} |a_m - a_horizon|; it is added to every oscillation.
/// Rows with phi(k) > horizon are marked truncated.
inline CauchyReport check_cauchy_modulus_window(
    const RealSeq &a, const RateFn &phi, Nat k_max, Nat horizon,
    const std::optional<RealSeq> &tail_bound = std::nullopt, double tol = 1e-10) {
  CauchyReport rep;
  rep.horizon = horizon;
  std::vector<double> vals(horizon + 1);
  for (Nat n = 0; n <= horizon; ++n) vals[n] = a(n);
  // osc[n] = sup over n <= i <= m <= horizon of |a_m - a_i|
  std::vector<double> osc(horizon + 1);
  double hi = vals[horizon], lo = vals[horizon], run = 0.0;
  for (Nat i = horizon + 1; i-- > 0;) {
    hi = std::max(hi, vals[i]);
    lo = std::min(lo, vals[i]);
    run = std::max(run, std::max(hi - vals[i], vals[i] - lo));
    osc[i] = run;
  }
  double tail = 0.0;
  if (tail_bound) {
    tail = (*tail_bound)(horizon);
    rep.tail_used = true;
  }
  for (Nat k = 0; k <= k_max; ++k) {
    CauchyRow row;
    row.k = k;
    row.modulus = phi(k);
    if (row.modulus > horizon) {
      row.truncated = true;
    } else {
      row.oscillation = osc[row.modulus] + tail;
      row.pass = row.oscillation <= 1.0 / static_cast<double>(k + 1) + tol;
      if (!row.pass) rep.all_pass = false;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

/// Verifies phi as a Cauchy modulus of (a_n) for k <= k_max and all p <= p_max
/// (the window extends to max_k phi(k) + p_max).
inline CauchyReport check_cauchy_modulus(const RealSeq &a, const RateFn &phi, Nat k_max,
                                         Nat p_max,
                                         const std::optional<RealSeq> &tail_bound = std::nullopt,
                                         double tol = 1e-10) {
  Nat top = 0;
  for (Nat k = 0; k <= k_max; ++k) top = std::max(top, phi(k));
  return check_cauchy_modulus_window(a, phi, k_max, checked::add(top, p_max), tail_bound, tol);
}

/// Partial sums S_n = a_0 + ... + a_n, memoized so sequential access is O(1).
/// The cache is not synchronized; do not share one instance across threads.
class PartialSums {
 public:
  explicit PartialSums(RealSeq summand) : summand_(std::move(summand)) {}
  double operator()(Nat n) const {
    while (sums_.size() <= n) {
      const double prev = sums_.empty() ? 0.0 : sums_.back();
      sums_.push_back(prev + summand_(sums_.size()));
    }
    return sums_[n];
  }

 private:
  RealSeq summand_;
  mutable std::vector<double> sums_;
};

inline RealSeq partial_sums(RealSeq summand) {
  auto ps = std::make_shared<PartialSums>(std::move(summand));
  return [ps](Nat n) { return (*ps)(n); };
}

}  // namespace kmrates
