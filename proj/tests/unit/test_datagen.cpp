#include "licchavi/datagen.hpp"
#include "licchavi/losses.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace licchavi {

namespace {

bool same(const Dataset& a, const Dataset& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.items[i].query != b.items[i].query || a.items[i].answer != b.items[i].answer) return false;
  }
  return true;
}

}  // namespace

TEST(SampleQueries, Distributions) {
  const auto u = sample_queries(BoundedUniform{2.0}, 3, 1000, 1);
  for (const auto& x : u) EXPECT_LE(x.cwiseAbs().maxCoeff(), 2.0);
  const auto ax = sample_queries(CanonicalAxes{(Vector(2) << 1.5, 3.0).finished()}, 2, 6, 1);
  for (std::size_t i = 0; i < ax.size(); ++i) {
    const auto j = static_cast<Eigen::Index>(i % 2);
    EXPECT_EQ(ax[i][j], j == 0 ? 1.5 : 3.0);
    EXPECT_EQ(ax[i][1 - j], 0.0);
  }
  const auto g = sample_queries(GaussianIid{(Vector(2) << 1.0, 4.0).finished()}, 2, 40000, 2);
  double v0 = 0, v1 = 0;
  for (const auto& x : g) {
    v0 += x[0] * x[0];
    v1 += x[1] * x[1];
  }
  EXPECT_NEAR(v0 / 40000, 1.0, 0.05);
  EXPECT_NEAR(v1 / 40000, 4.0, 0.2);
  EXPECT_TRUE(is_bounded(BoundedUniform{}));
  EXPECT_FALSE(is_bounded(GaussianIid{Vector::Ones(2)}));
}

TEST(GenLinear, NoiselessAnswersAreExact) {
  const Vector theta = (Vector(2) << 0.5, -2.0).finished();
  const Dataset d = gen_linear(theta, 100, BoundedUniform{1.0}, 0.0, 3);
  for (const auto& qa : d.items) EXPECT_EQ(qa.answer, qa.query.dot(theta));
}

TEST(GenLinear, DeterministicPerSeed) {
  const Vector theta = Vector::Ones(3);
  EXPECT_TRUE(same(gen_linear(theta, 50, BoundedUniform{1.0}, 0.3, 9), gen_linear(theta, 50, BoundedUniform{1.0}, 0.3, 9)));
  EXPECT_FALSE(same(gen_linear(theta, 50, BoundedUniform{1.0}, 0.3, 9), gen_linear(theta, 50, BoundedUniform{1.0}, 0.3, 10)));
}

TEST(GenLinear, NoiseLevel) {
  const Vector theta = Vector::Zero(2);
  const Dataset d = gen_linear(theta, 20000, BoundedUniform{1.0}, 0.5, 4);
  double s = 0;
  for (const auto& qa : d.items) s += qa.answer * qa.answer;
  EXPECT_NEAR(std::sqrt(s / 20000), 0.5, 0.01);
}

TEST(GenLogistic, LabelFrequencyFollowsSigmoid) {
  Vector theta(1);
  theta << 2.0;
  const Dataset d = gen_logistic(theta, 40000, CanonicalAxes{Vector::Ones(1)}, 5);
  double pos = 0;
  for (const auto& qa : d.items) {
    ASSERT_TRUE(qa.answer == 1.0 || qa.answer == -1.0);
    pos += qa.answer > 0;
  }
  EXPECT_NEAR(pos / 40000, sigmoid(2.0), 0.01);
}

TEST(GenLogistic, UnboundedDistributionRejected) {
  EXPECT_THROW(gen_logistic(Vector::Ones(2), 10, GaussianIid{Vector::Ones(2)}, 1), PreconditionError);
}

TEST(GenStrategic, HonestPreferenceIsBitIdentical) {
  const Vector theta = (Vector(2) << 1.0, 2.0).finished();
  EXPECT_TRUE(same(gen_strategic(theta, 80, LossKind::Linear, BoundedUniform{1.0}, 0.2, 7),
                   gen_linear(theta, 80, BoundedUniform{1.0}, 0.2, 7)));
  EXPECT_TRUE(same(gen_strategic(theta, 80, LossKind::Logistic, BoundedUniform{1.0}, 0.2, 7),
                   gen_logistic(theta, 80, BoundedUniform{1.0}, 7)));
}

TEST(GenByzantine, Modes) {
  const Dataset huge = gen_byzantine(HugeLabels{1e9}, 100, 2, 1);
  for (const auto& qa : huge.items) EXPECT_EQ(std::abs(qa.answer), 1e9);
  const Dataset huge_log = gen_byzantine(HugeLabels{1e6}, 100, 2, 1, LossKind::Logistic);
  for (const auto& qa : huge_log.items) EXPECT_EQ(std::abs(qa.answer), 1.0);
  const Dataset noise = gen_byzantine(RandomNoise{10.0}, 2000, 2, 1);
  double s = 0;
  for (const auto& qa : noise.items) s += qa.answer * qa.answer;
  EXPECT_NEAR(std::sqrt(s / 2000), 10.0, 1.0);
  const Vector w = Vector::Constant(2, 1e6);
  EXPECT_TRUE(same(gen_byzantine(FixedTarget{w}, 50, 2, 3), gen_strategic(w, 50, LossKind::Linear, BoundedUniform{1.0}, 0.0, 3)));
  EXPECT_STREQ(mode_name(HugeLabels{}), "huge_labels");
  EXPECT_STREQ(mode_name(RandomNoise{}), "random_noise");
  EXPECT_STREQ(mode_name(FixedTarget{}), "fixed_target");
}

}  // namespace licchavi
