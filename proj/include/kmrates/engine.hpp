#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "kmrates/certificates.hpp"
#include "kmrates/checked.hpp"
#include "kmrates/operators.hpp"
#include "kmrates/schedule.hpp"
#include "kmrates/space.hpp"

namespace kmrates {

/// Points are kept in memory up to this horizon; longer runs stream scalars only.
inline constexpr Nat kMaxStoredPoints = 100'000;

/// Absolute tolerance of every inequality audit.
inline constexpr double kAuditTol = 1e-9;

/// Everything needed to run and certify one iteration: the space, T, the
/// schedule, the start x and a fixed point z of T with its constants.
struct Instance {
  Space space = Space::euclidean(1);
  Operator op;
  Schedule schedule;
  Vector x0;
  Vector z;
  double fixed_point_gap = 0.0;  // ||Tz - z||, clamped to 0 below 1e-12
  InstanceConstants constants;
};

/// Picks z among the operator's stored fixed point and the fixed point it
/// associates with x0, preferring the smaller max{||x0 - z||, ||z||}.
inline Instance make_instance(const Space &space, Operator op, Schedule schedule, Vector x0,
                              std::optional<Nat> b_override = std::nullopt) {
  space.require_dim(x0, "start vector");
  if (schedule.dim != space.dim())
    throw DomainError("schedule dimension " + std::to_string(schedule.dim) +
                      " does not match the space");
  std::vector<Vector> candidates{op.known_fixed_point};
  if (op.fixed_point_near) candidates.push_back(op.fixed_point_near(x0));
  const auto reach = [&](const Vector &z) {
    return std::max(space.distance(x0, z), space.norm(z));
  };
  Instance inst;
  inst.space = space;
  bool found = false;
  for (const Vector &z : candidates) {
    const double gap = space.distance(op.apply(z), z);
    if (!(gap <= 1e-12)) continue;
    if (!found || reach(z) < reach(inst.z)) {
      inst.z = z;
      inst.fixed_point_gap = 0.0;
      found = true;
    }
  }
  if (!found) throw DomainError(op.tag + ": no certified fixed point available");
  inst.constants = instance_constants(space, x0, inst.z, schedule, b_override);
  inst.op = std::move(op);
  inst.schedule = std::move(schedule);
  inst.x0 = std::move(x0);
  return inst;
}

/// A realized trajectory. Scalar streams are indexed by n; res_step and the
/// schedule streams cover n < horizon, the others n <= horizon.
struct Trajectory {
  Nat horizon = 0;
  std::string space;
  std::string op;
  std::string family;
  Vector start;
  Vector z;
  double fixed_point_gap = 0.0;
  double z_norm = 0.0;

  std::vector<Vector> points;  // empty in streaming mode
  std::vector<double> res_T;
  std::vector<double> res_step;
  std::vector<double> K_z;
  std::vector<double> norm_x;
  std::vector<double> dist_xz;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> r_norm;

  bool streamed() const { return points.empty(); }
};

namespace detail {

inline void append_number(std::string &out, double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  out.append(buf.data(), res.ptr);
}

inline void append_number(std::string &out, Nat v) {
  std::array<char, 24> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), res.ptr);
}

inline void require_finite(const Vector &v, Nat n, const char *what) {
  if (!v.allFinite()) throw NumericAbort(n, what);
}

}  // namespace detail

inline constexpr const char *kTrajectoryCsvHeader = "n,res_T,res_step,K_zn,norm_xn,dist_xz";

/// One CSV row; res_step is left empty for the final index.
inline std::string trajectory_csv_row(Nat n, double res_T, std::optional<double> res_step,
                                      double K, double norm_x, double dist_xz) {
  std::string row;
  detail::append_number(row, n);
  row += ',';
  detail::append_number(row, res_T);
  row += ',';
  if (res_step) detail::append_number(row, *res_step);
  row += ',';
  detail::append_number(row, K);
  row += ',';
  detail::append_number(row, norm_x);
  row += ',';
  detail::append_number(row, dist_xz);
  return row;
}

struct IterateOptions {
  /// Store x_n when the horizon is at most this value.
  Nat store_points_up_to = kMaxStoredPoints;
  /// When set, CSV rows are written as soon as they are complete.
  std::ostream *csv = nullptr;
};

/// Runs x_{n+1} = alpha_n x_n + beta_n T x_n + r_n for n < horizon and records
/// residuals, norms and K_{z,n}. Throws NumericAbort on a non-finite iterate.
inline Trajectory iterate(const Space &space, const Operator &T, const Vector &x0,
                          const Schedule &s, const Vector &z, Nat horizon,
                          const IterateOptions &opts = {}) {
  if (horizon == 0) throw DomainError("horizon must be >= 1");
  space.require_dim(x0, "start vector");
  space.require_dim(z, "fixed point");
  Trajectory tr;
  tr.horizon = horizon;
  tr.space = space.describe();
  tr.op = T.tag;
  tr.family = to_string(s.family);
  tr.start = x0;
  tr.z = z;
  const double gap = space.distance(T(z), z);
  tr.fixed_point_gap = gap < 1e-12 ? 0.0 : gap;
  tr.z_norm = space.norm(z);

  const std::size_t len = static_cast<std::size_t>(horizon) + 1;
  const bool store = horizon <= opts.store_points_up_to;
  if (store) tr.points.reserve(len);
  for (auto *v : {&tr.res_T, &tr.K_z, &tr.norm_x, &tr.dist_xz}) v->reserve(len);
  for (auto *v : {&tr.res_step, &tr.alpha, &tr.beta, &tr.r_norm}) v->reserve(len - 1);
  if (opts.csv) *opts.csv << kTrajectoryCsvHeader << '\n';

  detail::require_finite(x0, 0, "start vector");
  Vector x = x0;
  double K = space.distance(x0, z);
  for (Nat n = 0;; ++n) {
    const Vector Tx = T(x);
    detail::require_finite(Tx, n, "T x_n");
    if (store) tr.points.push_back(x);
    tr.res_T.push_back(space.distance(x, Tx));
    tr.K_z.push_back(K);
    tr.norm_x.push_back(space.norm(x));
    tr.dist_xz.push_back(space.distance(x, z));
    if (n == horizon) {
      if (opts.csv)
        *opts.csv << trajectory_csv_row(n, tr.res_T[n], std::nullopt, K, tr.norm_x[n],
                                        tr.dist_xz[n])
                  << '\n';
      break;
    }
    const double a = s.alpha(n), b = s.beta(n), rn = s.r_norm(n);
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(rn))
      throw NumericAbort(n, "schedule value");
    Vector next = a * x + b * Tx + s.r(n);
    detail::require_finite(next, n + 1, "x_{n+1}");
    tr.alpha.push_back(a);
    tr.beta.push_back(b);
    tr.r_norm.push_back(rn);
    tr.res_step.push_back(space.distance(next, x));
    if (opts.csv)
      *opts.csv << trajectory_csv_row(n, tr.res_T[n], tr.res_step[n], K, tr.norm_x[n],
                                      tr.dist_xz[n])
                << '\n';
    K += b * tr.fixed_point_gap + (1.0 - a - b) * tr.z_norm + rn;
    if (!std::isfinite(K)) throw NumericAbort(n + 1, "K_{z,n}");
    x = std::move(next);
  }
  return tr;
}

inline Trajectory iterate(const Instance &inst, Nat horizon, const IterateOptions &opts = {}) {
  return iterate(inst.space, inst.op, inst.x0, inst.schedule, inst.z, horizon, opts);
}

inline void write_trajectory_csv(std::ostream &os, const Trajectory &tr) {
  os << kTrajectoryCsvHeader << '\n';
  for (Nat n = 0; n <= tr.horizon; ++n) {
    const std::optional<double> step =
        n < tr.horizon ? std::optional<double>(tr.res_step[n]) : std::nullopt;
    os << trajectory_csv_row(n, tr.res_T[n], step, tr.K_z[n], tr.norm_x[n], tr.dist_xz[n])
       << '\n';
  }
}

enum class Inequality {
  OneStepDistance,     // ||x_{n+1}-z|| <= (a+b)||x_n-z|| + b||Tz-z|| + (1-a-b)||z|| + ||r_n||
  DistanceByK,         // ||x_n-z|| <= K_{z,n}
  StepByK,             // ||x_{n+1}-x_n|| <= 2 K_{z,n+1}
  ResidualByDistance,  // ||x_n-Tx_n|| <= 2||x_n-z|| + ||z-Tz||
  ResidualByK,         // ||x_n-Tx_n|| <= 2||x_n-z|| <= 2 K_{z,n}
  StepByResidual,      // ||x_{n+1}-x_n|| <= b||x_n-Tx_n|| + (1-a-b)||x_n|| + ||r_n||
  ResidualGrowth,      // ||x_{n+1}-Tx_{n+1}|| <= ||x_n-Tx_n|| + 2(1-a-b)||x_n|| + 2||r_n||
  DistanceByM0,        // ||x_n-z|| <= M0
  NormByM,             // ||x_n|| <= M
  DistanceByConstants, // ||x_n-z|| <= ||x-z|| + M_ab||z|| + M_r
};

inline constexpr std::array<Inequality, 10> kAllInequalities = {
    Inequality::OneStepDistance, Inequality::DistanceByK,        Inequality::StepByK,
    Inequality::ResidualByDistance, Inequality::ResidualByK,     Inequality::StepByResidual,
    Inequality::ResidualGrowth,  Inequality::DistanceByM0,       Inequality::NormByM,
    Inequality::DistanceByConstants};

inline const char *to_string(Inequality i) {
  switch (i) {
    case Inequality::OneStepDistance: return "one_step_distance";
    case Inequality::DistanceByK: return "distance_by_K";
    case Inequality::StepByK: return "step_by_K";
    case Inequality::ResidualByDistance: return "residual_by_distance";
    case Inequality::ResidualByK: return "residual_by_K";
    case Inequality::StepByResidual: return "step_by_residual";
    case Inequality::ResidualGrowth: return "residual_growth";
    case Inequality::DistanceByM0: return "distance_by_M0";
    case Inequality::NormByM: return "norm_by_M";
    case Inequality::DistanceByConstants: return "distance_by_constants";
  }
  return "?";
}

struct Violation {
  Inequality which;
  Nat n = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack() const { return rhs - lhs; }  // negative for a violation
};

struct AuditReport {
  Nat horizon = 0;
  std::array<Nat, kAllInequalities.size()> checked{};  // instances tested per inequality
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::size_t count(Inequality i) const {
    return static_cast<std::size_t>(std::count_if(
        violations.begin(), violations.end(), [i](const Violation &v) { return v.which == i; }));
  }
};

/// Checks every pointwise inequality of the iteration along the trajectory,
/// to absolute tolerance kAuditTol. Uses the scalar streams only, so streamed
/// trajectories are audited in full.
inline AuditReport audit_inequalities(const Trajectory &tr, const InstanceConstants &c) {
  AuditReport rep;
  rep.horizon = tr.horizon;
  const auto check = [&](Inequality which, Nat n, double lhs, double rhs) {
    ++rep.checked[static_cast<std::size_t>(which)];
    if (!(lhs <= rhs + kAuditTol)) rep.violations.push_back({which, n, lhs, rhs});
  };
  const double gap = tr.fixed_point_gap, zn = tr.z_norm;
  const double d0 = tr.dist_xz.front();
  const double M0 = static_cast<double>(c.M0), M = static_cast<double>(c.M);
  const double by_constants =
      d0 + static_cast<double>(c.M_ab) * zn + static_cast<double>(c.M_r);
  for (Nat n = 0; n <= tr.horizon; ++n) {
    const double dist = tr.dist_xz[n], res = tr.res_T[n];
    check(Inequality::DistanceByK, n, dist, tr.K_z[n]);
    check(Inequality::ResidualByDistance, n, res, 2.0 * dist + gap);
    check(Inequality::ResidualByK, n, res, 2.0 * dist);
    check(Inequality::ResidualByK, n, 2.0 * dist, 2.0 * tr.K_z[n]);
    check(Inequality::DistanceByM0, n, dist, M0);
    check(Inequality::NormByM, n, tr.norm_x[n], M);
    check(Inequality::DistanceByConstants, n, dist, by_constants);
    if (n == tr.horizon) break;
    const double a = tr.alpha[n], b = tr.beta[n], r = tr.r_norm[n];
    const double defect = 1.0 - a - b;
    const double step = tr.res_step[n];
    check(Inequality::OneStepDistance, n, tr.dist_xz[n + 1],
          (a + b) * dist + b * gap + defect * zn + r);
    check(Inequality::StepByK, n, step, 2.0 * tr.K_z[n + 1]);
    check(Inequality::StepByResidual, n, step, b * res + defect * tr.norm_x[n] + r);
    check(Inequality::ResidualGrowth, n, tr.res_T[n + 1],
          res + 2.0 * defect * tr.norm_x[n] + 2.0 * r);
  }
  return rep;
}

/// Negative control: moves x_n by `amount` away from z and recomputes the
/// scalars that depend on x_n. Requires stored points.
inline Trajectory corrupt_point(Trajectory tr, const Space &space, const Operator &T, Nat n,
                                double amount = 1.0) {
  if (tr.streamed()) throw DomainError("corrupt_point needs a trajectory with stored points");
  if (n > tr.horizon) throw DomainError("corrupt_point index beyond the horizon");
  Vector &x = tr.points[n];
  Vector dir = x - tr.z;
  const double len = space.norm(dir);
  if (len > 0.0) {
    dir /= len;
  } else {
    dir = space.zero();
    dir[0] = 1.0;
    dir /= space.norm(dir);
  }
  x += amount * dir;
  tr.res_T[n] = space.distance(x, T(x));
  tr.norm_x[n] = space.norm(x);
  tr.dist_xz[n] = space.distance(x, tr.z);
  if (n > 0) tr.res_step[n - 1] = space.distance(x, tr.points[n - 1]);
  if (n < tr.horizon) tr.res_step[n] = space.distance(tr.points[n + 1], x);
  return tr;
}

}  // namespace kmrates
