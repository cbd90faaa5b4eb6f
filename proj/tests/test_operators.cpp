#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <numbers>

#include "kmrates/operators.hpp"

using namespace kmrates;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

nlohmann::json params_for(const std::string &name) {
  if (name == "rotation") return {{"theta", 0.7}};
  if (name == "ball_projection") return {{"center", {1.0, 0.0, -1.0}}, {"radius", 2.0}};
  if (name == "halfspace_projection") return {{"a", {1.0, 2.0, -1.0}}, {"b", 0.5}};
  if (name == "box_projection") return {{"lo", {-1.0, -2.0, 0.0}}, {"hi", {1.0, 0.0, 3.0}}};
  if (name == "affine_avg")
    return {{"Q", {{0.5, 0.0, 0.0}, {0.0, 0.0, -1.0}, {0.0, 1.0, 0.0}}}, {"c", {1.0, 0.0, 0.0}}};
  if (name == "shrink") return {{"factors", {0.5, -1.0, 0.0}}, {"center", {0.2, 0.3, 0.4}}};
  return nlohmann::json::object();
}

}  // namespace

TEST(Operators, RotationQuarterTurn) {
  const Space sp = Space::euclidean(2);
  const Operator T = make_rotation(sp, std::numbers::pi / 2.0);
  const Vector y = T(vec({1.0, 0.0}));
  EXPECT_NEAR(y[0], 0.0, 1e-15);
  EXPECT_NEAR(y[1], 1.0, 1e-15);
  EXPECT_EQ(T.known_fixed_point.norm(), 0.0);
}

TEST(Operators, RotationActsOnChosenAxes) {
  const Space sp = Space::euclidean(3);
  const Operator T = make_rotation(sp, std::numbers::pi, 0, 2);
  const Vector y = T(vec({1.0, 5.0, 0.0}));
  EXPECT_NEAR(y[0], -1.0, 1e-15);
  EXPECT_NEAR(y[1], 5.0, 1e-15);
  EXPECT_NEAR(y[2], 0.0, 1e-15);
}

TEST(Operators, BallProjection) {
  const Space sp = Space::euclidean(2);
  const Operator T = make_ball_projection(sp, sp.zero(), 1.0);
  EXPECT_TRUE(T(vec({2.0, 0.0})).isApprox(vec({1.0, 0.0})));
  EXPECT_TRUE(T(vec({0.3, -0.4})).isApprox(vec({0.3, -0.4})));
  EXPECT_THROW(make_ball_projection(sp, sp.zero(), 0.0), DomainError);
}

TEST(Operators, HalfspaceAndBox) {
  const Space sp = Space::euclidean(2);
  const Operator H = make_halfspace_projection(sp, vec({1.0, 0.0}), 1.0);
  EXPECT_TRUE(H(vec({3.0, 2.0})).isApprox(vec({1.0, 2.0})));
  EXPECT_TRUE(H(vec({-3.0, 2.0})).isApprox(vec({-3.0, 2.0})));
  EXPECT_THROW(make_halfspace_projection(sp, sp.zero(), 1.0), DomainError);
  const Operator B = make_box_projection(sp, vec({0.0, 0.0}), vec({1.0, 1.0}));
  EXPECT_TRUE(B(vec({2.0, -1.0})).isApprox(vec({1.0, 0.0})));
  EXPECT_THROW(make_box_projection(sp, vec({1.0, 0.0}), vec({0.0, 1.0})), DomainError);
}

TEST(Operators, AffineRejectsExpansiveOrFixedPointFree) {
  const Space sp = Space::euclidean(2);
  Eigen::MatrixXd big = 2.0 * Eigen::MatrixXd::Identity(2, 2);
  EXPECT_THROW(make_affine_avg(sp, big, sp.zero()), DomainError);
  // translation by c != 0 has no fixed point
  EXPECT_THROW(make_affine_avg(sp, Eigen::MatrixXd::Identity(2, 2), vec({1.0, 0.0})), DomainError);
  const Operator T = make_affine_avg(sp, 0.5 * Eigen::MatrixXd::Identity(2, 2), vec({1.0, 1.0}));
  EXPECT_TRUE(T.known_fixed_point.isApprox(vec({2.0, 2.0})));
}

TEST(Operators, ShrinkWorksInLp) {
  const Space sp = Space::lp(2, 3.0);
  const Operator T = make_shrink(sp, vec({0.5, 0.5}), sp.zero());
  EXPECT_TRUE(T(vec({2.0, -2.0})).isApprox(vec({1.0, -1.0})));
  EXPECT_THROW(make_shrink(sp, vec({1.5, 0.0}), sp.zero()), DomainError);
  EXPECT_TRUE(check_nonexpansive(T, sp, 5'000, 3).ok());
}

TEST(Operators, EuclideanOnlyOperatorsRejectLp) {
  const Space sp = Space::lp(2, 3.0);
  EXPECT_THROW(make_rotation(sp, 1.0), DomainError);
  EXPECT_THROW(make_ball_projection(sp, sp.zero(), 1.0), DomainError);
}

TEST(Operators, DoublingIsFlagged) {
  const Space sp = Space::euclidean(2);
  Operator twice;
  twice.apply = [](const Vector &x) { return Vector(2.0 * x); };
  twice.known_fixed_point = sp.zero();
  twice.tag = "double";
  const auto rep = check_nonexpansive(twice, sp, 100, 1);
  EXPECT_FALSE(rep.ok());
  ASSERT_TRUE(rep.first_violation.has_value());
  EXPECT_EQ(*rep.first_violation, 0u);
  EXPECT_GT(rep.max_excess, 0.0);
}

TEST(Operators, CatalogIsNonexpansiveWithCertifiedFixedPoints) {
  const Space sp = Space::euclidean(3);
  for (const auto &name : catalog_names()) {
    const Operator T = catalog_make(name, sp, params_for(name));
    const auto rep = check_nonexpansive(T, sp, 10'000, 42);
    EXPECT_TRUE(rep.ok()) << name << " excess " << rep.max_excess;
    EXPECT_LE(sp.distance(T(T.known_fixed_point), T.known_fixed_point), 1e-12) << name;
  }
}

TEST(Operators, CatalogRejectsUnknownAndMalformed) {
  const Space sp = Space::euclidean(2);
  EXPECT_THROW(catalog_make("teleport", sp), DomainError);
  EXPECT_THROW(catalog_make("halfspace_projection", sp, {{"a", {1.0, 0.0}}}), DomainError);
  EXPECT_THROW(catalog_make("ball_projection", sp, {{"center", {1.0, 0.0, 0.0}}}), DomainError);
}

TEST(Operators, FixedPointNearIsFixed) {
  const Space sp = Space::euclidean(2);
  for (const Operator &T : {make_ball_projection(sp, sp.zero(), 1.0),
                            make_halfspace_projection(sp, vec({1.0, 1.0}), 0.0), make_identity(sp)}) {
    ASSERT_TRUE(static_cast<bool>(T.fixed_point_near)) << T.tag;
    const Vector z = T.fixed_point_near(vec({3.0, 4.0}));
    EXPECT_LE(sp.distance(T(z), z), 1e-12) << T.tag;
  }
}
