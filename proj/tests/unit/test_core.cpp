#include "licchavi/core.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

namespace licchavi {

namespace {

bool has_tag(const std::vector<Violation>& v, const std::string& tag) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.assumption == tag; });
}

std::vector<UserSpec> unit_users(std::size_t n, Eigen::Index d) {
  std::vector<UserSpec> users(n);
  for (auto& u : users) u.norm = NormSpec::lq(2.0, d);
  return users;
}

GlobalSpec unit_global(Eigen::Index d) {
  GlobalSpec g;
  g.norm = NormSpec::lq(2.0, d);
  return g;
}

}  // namespace

TEST(Exponent, FiniteAndInfinite) {
  EXPECT_EQ(Exponent::finite(1.5).value(), 1.5);
  EXPECT_FALSE(Exponent::finite(1.5).is_infinite());
  EXPECT_TRUE(Exponent::infinity().is_infinite());
  EXPECT_THROW(Exponent::infinity().value(), std::logic_error);
  EXPECT_EQ(Exponent::infinity(), Exponent::infinity());
  EXPECT_NE(Exponent::finite(2), Exponent::infinity());
}

TEST(NormSpec, IdentityDetection) {
  EXPECT_TRUE(NormSpec::lq(2, 3).is_identity());
  EXPECT_TRUE(NormSpec::linf(3).is_identity());
  EXPECT_FALSE(NormSpec::scaled(Exponent::finite(1), Vector::Constant(3, 2.0)).is_identity());
}

TEST(ModelState, Zeros) {
  const auto s = ModelState::zeros(3, 2);
  EXPECT_EQ(s.num_users(), 3u);
  EXPECT_EQ(s.dimension(), 2);
  EXPECT_TRUE(s.common.isZero());
}

TEST(Require, DimensionAndFinite) {
  EXPECT_THROW(require_dimension(Vector::Zero(2), 3, "x"), DimensionError);
  EXPECT_NO_THROW(require_dimension(Vector::Zero(3), 3, "x"));
  Vector v = Vector::Zero(2);
  v[1] = std::nan("");
  EXPECT_THROW(require_finite(v, "v"), std::invalid_argument);
}

TEST(ValidateConfig, CanonicalConfigIsValid) {
  EXPECT_TRUE(validate_config(unit_users(3, 2), unit_global(2), 2).empty());
}

TEST(ValidateConfig, CommonPowerOneRejected) {
  GlobalSpec g = unit_global(2);
  g.power = 1.0;
  EXPECT_TRUE(has_tag(validate_config(unit_users(2, 2), g, 2), "strictly convex common norm"));
}

TEST(ValidateConfig, NonStrictlyConvexCommonNormRejected) {
  GlobalSpec g = unit_global(2);
  g.norm = NormSpec::lq(1.0, 2);
  EXPECT_TRUE(has_tag(validate_config(unit_users(2, 2), g, 2), "strictly convex common norm"));
  g.norm = NormSpec::linf(2);
  EXPECT_TRUE(has_tag(validate_config(unit_users(2, 2), g, 2), "strictly convex common norm"));
}

TEST(ValidateConfig, UserParameterChecks) {
  auto users = unit_users(2, 2);
  users[0].weight = 0.0;
  users[1].power = 0.5;
  const auto v = validate_config(users, unit_global(2), 2);
  EXPECT_TRUE(has_tag(v, "lambda_n > 0"));
  EXPECT_TRUE(has_tag(v, "q_n >= 1"));
}

TEST(ValidateConfig, ConvexLossChecks) {
  auto users = unit_users(1, 2);
  users[0].param_reg.ridge = -1.0;
  EXPECT_TRUE(has_tag(validate_config(users, unit_global(2), 2), "convex losses"));
  users[0].param_reg.ridge = 0.0;
  users[0].loss_kind = LossKind::Synthetic;
  EXPECT_TRUE(has_tag(validate_config(users, unit_global(2), 2), "convex losses"));
}

TEST(ValidateConfig, DimensionAndNormChecks) {
  auto users = unit_users(1, 3);
  EXPECT_TRUE(has_tag(validate_config(users, unit_global(2), 2), "dimension"));
  users = unit_users(1, 2);
  users[0].norm.diag[0] = -1.0;
  EXPECT_TRUE(has_tag(validate_config(users, unit_global(2), 2), "NormSpec"));
}

TEST(ValidateDataset, LogisticLabels) {
  UserSpec u;
  u.norm = NormSpec::lq(2, 1);
  u.loss_kind = LossKind::Logistic;
  Dataset data;
  data.items.push_back({Vector::Ones(1), 0.5});
  EXPECT_TRUE(has_tag(validate_dataset(u, data, 1), "dataset"));
  data.items[0].answer = -1.0;
  EXPECT_TRUE(validate_dataset(u, data, 1).empty());
  EXPECT_TRUE(has_tag(validate_dataset(u, data, 2), "dimension"));
}

}  // namespace licchavi
