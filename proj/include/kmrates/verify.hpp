#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "kmrates/certificates.hpp"
#include "kmrates/checked.hpp"
#include "kmrates/engine.hpp"
#include "kmrates/rate.hpp"

namespace kmrates {

/// Tolerance of the rate-soundness comparison quantity[n] <= 1/(k+1).
inline constexpr double kSoundnessTol = 1e-9;

enum class Quantity { ResT, ResStep };

inline const char *to_string(Quantity q) { return q == Quantity::ResT ? "res_T" : "res_step"; }

inline const std::vector<double> &series_of(const Trajectory &tr, Quantity q) {
  return q == Quantity::ResT ? tr.res_T : tr.res_step;
}

struct SoundnessRow {
  Nat k = 0;
  Nat bound = 0;
  Nat window_end = 0;  // checked window is [bound, window_end]
  double max_excess = 0.0;
  bool pass = false;
  bool truncated = false;
  std::optional<Nat> empirical_first_index;

  /// bound / max(1, empirical first index); a conservativeness measure only.
  std::optional<double> slack() const {
    if (!empirical_first_index) return std::nullopt;
    return static_cast<double>(bound) /
           static_cast<double>(std::max<Nat>(1, *empirical_first_index));
  }
};

struct SoundnessReport {
  Quantity quantity = Quantity::ResT;
  std::string rate;
  std::vector<SoundnessRow> rows;

  bool ok() const {
    return std::all_of(rows.begin(), rows.end(),
                       [](const SoundnessRow &r) { return r.truncated || r.pass; });
  }
  std::size_t verified_rows() const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](const SoundnessRow &r) { return !r.truncated; }));
  }
  const SoundnessRow *row(Nat k) const {
    for (const auto &r : rows)
      if (r.k == k) return &r;
    return nullptr;
  }
};

namespace detail {

/// first[k-th threshold]: least n with q[m] <= thr for all m in [n, end].
inline std::optional<Nat> first_index_below(const std::vector<double> &q, double thr) {
  if (q.empty()) return std::nullopt;
  std::size_t n = q.size();
  while (n > 0 && q[n - 1] <= thr) --n;
  if (n == q.size()) return std::nullopt;
  return static_cast<Nat>(n);
}

}  // namespace detail

/// Least n such that quantity[m] <= 1/(k+1) + tol for every m in [n, horizon];
/// none when even the last recorded value is above the threshold.
inline std::optional<Nat> empirical_first_index(const Trajectory &tr, Quantity q, Nat k) {
  const double thr = 1.0 / static_cast<double>(k + 1) + kSoundnessTol;
  return detail::first_index_below(series_of(tr, q), thr);
}

/// For each k <= k_max with rate(k) inside the recorded window, checks
/// quantity[n] <= 1/(k+1) + tol on [rate(k), end of window].
inline SoundnessReport check_rate_soundness(const Trajectory &tr, const RateFn &rate, Quantity q,
                                            Nat k_max) {
  SoundnessReport rep;
  rep.quantity = q;
  rep.rate = rate.description();
  const auto &s = series_of(tr, q);
  const Nat last = s.empty() ? 0 : static_cast<Nat>(s.size() - 1);
  // suffix maxima make every row O(1)
  std::vector<double> suffix_max(s.size());
  double run = -std::numeric_limits<double>::infinity();
  for (std::size_t i = s.size(); i-- > 0;) {
    run = std::max(run, s[i]);
    suffix_max[i] = run;
  }
  for (Nat k = 0; k <= k_max; ++k) {
    SoundnessRow row;
    row.k = k;
    try {
      row.bound = rate(k);
    } catch (const OverflowError &) {
      row.bound = std::numeric_limits<Nat>::max();  // beyond any horizon
    }
    row.window_end = last;
    row.empirical_first_index = empirical_first_index(tr, q, k);
    if (s.empty() || row.bound > last) {
      row.truncated = true;
    } else {
      row.max_excess = suffix_max[row.bound] - 1.0 / static_cast<double>(k + 1);
      row.pass = row.max_excess <= kSoundnessTol;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

struct LiminfCell {
  Nat k = 0;
  Nat L = 0;
  Nat bound = 0;
  std::optional<Nat> witness;  // some N in [L, bound] with res_T[N] < 1/(k+1)
  bool truncated = false;
  bool pass = false;
};

struct LiminfReport {
  std::string modulus;
  Nat horizon = 0;
  std::vector<LiminfCell> cells;

  bool ok() const {
    return std::all_of(cells.begin(), cells.end(),
                       [](const LiminfCell &c) { return c.truncated || c.pass; });
  }
  std::size_t verified_cells() const {
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [](const LiminfCell &c) { return !c.truncated; }));
  }
};

/// Grid check of the modulus-of-liminf contract on res_T for k <= k_max,
/// L <= L_max. Cells whose window ends beyond the horizon are truncated unless
/// a witness already lies inside the recorded range.
inline LiminfReport check_liminf_contract(const Trajectory &tr, const LiminfModulus &lim, Nat k_max,
                                          Nat L_max) {
  LiminfReport rep;
  rep.modulus = lim.description();
  rep.horizon = tr.horizon;
  const auto &a = tr.res_T;
  for (Nat k = 0; k <= k_max; ++k) {
    const double thr = 1.0 / static_cast<double>(k + 1);
    // next[n]: least N >= n with a_N < thr, or size if none
    std::vector<std::size_t> next(a.size() + 1, a.size());
    for (std::size_t i = a.size(); i-- > 0;) next[i] = a[i] < thr ? i : next[i + 1];
    for (Nat L = 0; L <= L_max; ++L) {
      LiminfCell cell;
      cell.k = k;
      cell.L = L;
      try {
        cell.bound = lim(k, L);
      } catch (const OverflowError &) {
        cell.bound = std::numeric_limits<Nat>::max();
      }
      const std::size_t N = L < a.size() ? next[L] : a.size();
      if (N < a.size() && N <= cell.bound) {
        cell.witness = N;
        cell.pass = true;
      } else if (cell.bound > tr.horizon) {
        cell.truncated = true;
      }
      rep.cells.push_back(cell);
    }
  }
  return rep;
}

struct ImplicationReport {
  std::vector<Nat> checked_k;
  std::vector<Nat> failures;  // k where Phi passed at 2k+1 but Psi failed at k
  bool ok() const { return failures.empty(); }
};

/// For every k with a res_T verdict at 2k+1 and a res_step verdict at k,
/// asserts that soundness of Phi at 2k+1 is accompanied by soundness of Psi at k.
inline ImplicationReport check_psi_implication(const SoundnessReport &phi_rep,
                                               const SoundnessReport &psi_rep) {
  ImplicationReport rep;
  for (const auto &pr : psi_rep.rows) {
    const SoundnessRow *fr = phi_rep.row(2 * pr.k + 1);
    if (!fr || fr->truncated || pr.truncated) continue;
    rep.checked_k.push_back(pr.k);
    if (fr->pass && !pr.pass) rep.failures.push_back(pr.k);
  }
  return rep;
}

/// Cap on automatically chosen horizons, before the margin.
inline constexpr Nat kAutoHorizonCap = 100'000;

/// min(cap, max_{k <= k_max} max{Phi(k), Psi(k)}) + 100. Values that overflow
/// count as exceeding the cap.
inline Nat auto_horizon(const Certificate &cert, Nat k_max) {
  Nat top = 0;
  for (Nat k = 0; k <= k_max && top < kAutoHorizonCap; ++k) {
    for (const RateFn *f : {&cert.phi, &cert.psi}) {
      try {
        top = std::max(top, (*f)(k));
      } catch (const OverflowError &) {
        top = kAutoHorizonCap;
      }
    }
  }
  return std::min(top, kAutoHorizonCap) + 100;
}

struct VerifyReport {
  SoundnessReport phi;
  SoundnessReport psi;
  SoundnessReport phi_extended;  // Phi up to 2 k_max + 1, feeding the implication
  ImplicationReport implication;
  LiminfReport liminf;
  std::optional<SoundnessReport> cross_phi;
  std::optional<SoundnessReport> cross_psi;

  bool ok() const {
    return phi.ok() && psi.ok() && phi_extended.ok() && implication.ok() && liminf.ok() &&
           (!cross_phi || cross_phi->ok()) && (!cross_psi || cross_psi->ok());
  }
};

/// Soundness of Phi on res_T and Psi on res_step, the Psi implication, the
/// liminf contract, and, when present, the certificate's cross-check pair.
inline VerifyReport verify_certificate(const Trajectory &tr, const Certificate &cert, Nat k_max,
                                       Nat liminf_max) {
  VerifyReport rep;
  rep.phi = check_rate_soundness(tr, cert.phi, Quantity::ResT, k_max);
  rep.psi = check_rate_soundness(tr, cert.psi, Quantity::ResStep, k_max);
  rep.phi_extended = check_rate_soundness(tr, cert.phi, Quantity::ResT, 2 * k_max + 1);
  rep.implication = check_psi_implication(rep.phi_extended, rep.psi);
  rep.liminf = check_liminf_contract(tr, cert.liminf, liminf_max, liminf_max);
  if (cert.cross_check) {
    rep.cross_phi = check_rate_soundness(tr, cert.cross_check->phi, Quantity::ResT, k_max);
    rep.cross_psi = check_rate_soundness(tr, cert.cross_check->psi, Quantity::ResStep, k_max);
  }
  return rep;
}

}  // namespace kmrates
