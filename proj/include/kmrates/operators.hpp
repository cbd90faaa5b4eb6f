#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "kmrates/checked.hpp"
#include "kmrates/space.hpp"

namespace kmrates {

/// A nonexpansive self-map with a certified fixed point.
struct Operator {
  std::function<Vector(const Vector &)> apply;
  Vector known_fixed_point;
  std::string tag;
  /// For maps whose fixed-point set is larger than one point (projections,
  /// identity): returns a fixed point associated with x, e.g. its projection.
  std::function<Vector(const Vector &)> fixed_point_near;

  Vector operator()(const Vector &x) const { return apply(x); }
};

namespace detail {

inline void require_euclidean(const Space &space, const std::string &name) {
  if (!space.is_euclidean())
    throw DomainError(name + " is only available in Euclidean spaces");
}

inline void certify_fixed_point(const Operator &op, const Space &space) {
  const double gap = space.distance(op.apply(op.known_fixed_point), op.known_fixed_point);
  if (!(gap <= 1e-12))
    throw DomainError(op.tag + ": stored fixed point is off by " + std::to_string(gap));
}

}  // namespace detail

inline Operator make_identity(const Space &space) {
  Operator op;
  op.apply = [](const Vector &x) { return x; };
  op.known_fixed_point = space.zero();
  op.tag = "identity";
  op.fixed_point_near = [](const Vector &x) { return x; };
  return op;
}

/// Rotation by theta in the (i, j) coordinate plane, about the origin.
inline Operator make_rotation(const Space &space, double theta, std::size_t i = 0,
                              std::size_t j = 1) {
  detail::require_euclidean(space, "rotation");
  if (i == j || i >= space.dim() || j >= space.dim())
    throw DomainError("rotation needs two distinct plane axes below the dimension");
  double c = std::cos(theta), s = std::sin(theta);
  // exact quarter turns keep the closed-form decay clean
  if (std::abs(c) < 1e-15) c = 0.0;
  if (std::abs(s) < 1e-15) s = 0.0;
  Operator op;
  op.apply = [c, s, i, j](const Vector &x) {
    Vector y = x;
    const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
    y[ii] = c * x[ii] - s * x[jj];
    y[jj] = s * x[ii] + c * x[jj];
    return y;
  };
  op.known_fixed_point = space.zero();
  op.tag = "rotation";
  detail::certify_fixed_point(op, space);
  return op;
}

inline Operator make_ball_projection(const Space &space, const Vector &center, double radius) {
  detail::require_euclidean(space, "ball_projection");
  space.require_dim(center, "ball center");
  if (!(radius > 0.0)) throw DomainError("ball_projection requires radius > 0");
  Operator op;
  op.apply = [center, radius](const Vector &x) {
    const Vector d = x - center;
    const double n = d.norm();
    if (n <= radius) return Vector(x);
    return Vector(center + d * (radius / n));
  };
  op.known_fixed_point = center;
  op.tag = "ball_projection";
  op.fixed_point_near = op.apply;
  detail::certify_fixed_point(op, space);
  return op;
}

/// Projection onto {x : <a, x> <= b}.
inline Operator make_halfspace_projection(const Space &space, const Vector &a, double b) {
  detail::require_euclidean(space, "halfspace_projection");
  space.require_dim(a, "halfspace normal");
  const double aa = a.squaredNorm();
  if (!(aa > 0.0)) throw DomainError("halfspace_projection requires a nonzero normal");
  Operator op;
  op.apply = [a, b, aa](const Vector &x) {
    const double viol = a.dot(x) - b;
    if (viol <= 0.0) return Vector(x);
    return Vector(x - (viol / aa) * a);
  };
  // projection of the origin, re-projected so roundoff lands inside the set
  op.known_fixed_point = op.apply(op.apply(space.zero()));
  op.tag = "halfspace_projection";
  op.fixed_point_near = [apply = op.apply](const Vector &x) { return apply(apply(x)); };
  detail::certify_fixed_point(op, space);
  return op;
}

inline Operator make_box_projection(const Space &space, const Vector &lo, const Vector &hi) {
  detail::require_euclidean(space, "box_projection");
  space.require_dim(lo, "box lower corner");
  space.require_dim(hi, "box upper corner");
  if ((lo.array() > hi.array()).any()) throw DomainError("box_projection requires lo <= hi");
  Operator op;
  op.apply = [lo, hi](const Vector &x) { return Vector(x.cwiseMax(lo).cwiseMin(hi)); };
  op.known_fixed_point = op.apply(space.zero());
  op.tag = "box_projection";
  op.fixed_point_near = op.apply;
  detail::certify_fixed_point(op, space);
  return op;
}

/// x -> Qx + c with ||Q||_2 <= 1. Accepted only when a fixed point can be
/// computed: always for ||Q|| < 1, otherwise if (I - Q) z = c is consistent.
inline Operator make_affine_avg(const Space &space, const Eigen::MatrixXd &Q, const Vector &c) {
  detail::require_euclidean(space, "affine_avg");
  const auto d = static_cast<Eigen::Index>(space.dim());
  if (Q.rows() != d || Q.cols() != d) throw DomainError("affine_avg: Q has the wrong shape");
  space.require_dim(c, "affine_avg offset");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Q);
  const double op_norm = svd.singularValues()(0);
  if (op_norm > 1.0 + 1e-12)
    throw DomainError("affine_avg requires ||Q||_op <= 1, got " + std::to_string(op_norm));
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(d, d) - Q;
  Vector z = A.completeOrthogonalDecomposition().solve(c);
  Operator op;
  op.apply = [Q, c](const Vector &x) { return Vector(Q * x + c); };
  op.tag = "affine_avg";
  op.known_fixed_point = z;
  const double gap = (op.apply(z) - z).norm();
  if (!(gap <= 1e-12))
    throw DomainError("affine_avg has no computable fixed point (residual " +
                      std::to_string(gap) + ")");
  return op;
}

/// Coordinatewise contraction toward a center: x -> center + D (x - center)
/// with |D_ii| <= 1. Nonexpansive in every l_p norm.
inline Operator make_shrink(const Space &space, const Vector &factors, const Vector &center) {
  space.require_dim(factors, "shrink factors");
  space.require_dim(center, "shrink center");
  if ((factors.array().abs() > 1.0).any())
    throw DomainError("shrink factors must satisfy |f_i| <= 1");
  Operator op;
  op.apply = [factors, center](const Vector &x) {
    return Vector(center + factors.cwiseProduct(x - center));
  };
  op.known_fixed_point = center;
  op.tag = "shrink";
  detail::certify_fixed_point(op, space);
  return op;
}

namespace detail {

inline Vector vector_from_json(const nlohmann::json &j, const char *what) {
  if (!j.is_array()) throw DomainError(std::string(what) + " must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

}  // namespace detail

inline const std::vector<std::string> &catalog_names() {
  static const std::vector<std::string> names = {
      "identity",      "rotation",   "ball_projection", "halfspace_projection",
      "box_projection", "affine_avg", "shrink"};
  return names;
}

/// Builds a catalog operator from its name and JSON parameters.
inline Operator catalog_make(const std::string &name, const Space &space,
                             const nlohmann::json &params = nlohmann::json::object()) {
  using detail::vector_from_json;
  const auto d = static_cast<Eigen::Index>(space.dim());
  try {
    if (name == "identity") return make_identity(space);
    if (name == "rotation") {
      std::size_t i = 0, j = 1;
      if (params.contains("axes")) {
        i = params.at("axes").at(0).get<std::size_t>();
        j = params.at("axes").at(1).get<std::size_t>();
      }
      return make_rotation(space, params.value("theta", std::numbers::pi / 2.0), i, j);
    }
    if (name == "ball_projection") {
      const Vector center =
          params.contains("center") ? vector_from_json(params.at("center"), "center") : space.zero();
      return make_ball_projection(space, center, params.value("radius", 1.0));
    }
    if (name == "halfspace_projection")
      return make_halfspace_projection(space, vector_from_json(params.at("a"), "a"),
                                       params.at("b").get<double>());
    if (name == "box_projection")
      return make_box_projection(space, vector_from_json(params.at("lo"), "lo"),
                                 vector_from_json(params.at("hi"), "hi"));
    if (name == "affine_avg") {
      const auto &rows = params.at("Q");
      Eigen::MatrixXd Q(d, d);
      if (static_cast<Eigen::Index>(rows.size()) != d) throw DomainError("affine_avg: Q has the wrong shape");
      for (Eigen::Index r = 0; r < d; ++r) Q.row(r) = vector_from_json(rows.at(r), "Q row").transpose();
      const Vector c = params.contains("c") ? vector_from_json(params.at("c"), "c") : space.zero();
      return make_affine_avg(space, Q, c);
    }
    if (name == "shrink") {
      const Vector f = params.contains("factors") ? vector_from_json(params.at("factors"), "factors")
                                                  : Vector(Vector::Constant(d, 0.5));
      const Vector c = params.contains("center") ? vector_from_json(params.at("center"), "center")
                                                 : space.zero();
      return make_shrink(space, f, c);
    }
  } catch (const nlohmann::json::exception &e) {
    throw DomainError("operator '" + name + "': bad parameters: " + e.what());
  }
  throw DomainError("unknown catalog operator '" + name + "'");
}

struct NonexpansiveReport {
  std::size_t samples = 0;
  double max_excess = -std::numeric_limits<double>::infinity();  // max ||Tx-Ty|| - ||x-y||
  std::size_t violations = 0;                                     // excess > 1e-12
  std::optional<std::size_t> first_violation;
  bool ok() const { return violations == 0; }
};

/// Samples pairs uniformly from [-half_width, half_width]^d and records the
/// largest excess of ||Tx - Ty|| over ||x - y||.
inline NonexpansiveReport check_nonexpansive(const Operator &T, const Space &space,
                                             std::size_t samples, std::uint64_t seed,
                                             double half_width = 10.0) {
  if (samples == 0) throw DomainError("check_nonexpansive requires samples >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-half_width, half_width);
  const auto d = static_cast<Eigen::Index>(space.dim());
  NonexpansiveReport rep;
  for (std::size_t s = 0; s < samples; ++s) {
    Vector x(d), y(d);
    for (Eigen::Index i = 0; i < d; ++i) x[i] = unif(rng);
    for (Eigen::Index i = 0; i < d; ++i) y[i] = unif(rng);
    const double excess = space.distance(T(x), T(y)) - space.distance(x, y);
    rep.max_excess = std::max(rep.max_excess, excess);
    if (excess > 1e-12) {
      ++rep.violations;
      if (!rep.first_violation) rep.first_violation = s;
    }
    ++rep.samples;
  }
  return rep;
}

}  // namespace kmrates
