#include "licchavi/datagen.hpp"
#include "licchavi/losses.hpp"
#include "licchavi/prng.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace licchavi {

namespace {

Vector random_vector(Rng& rng, Eigen::Index d, double scale = 1.0) {
  Vector v(d);
  for (Eigen::Index j = 0; j < d; ++j) v[j] = scale * rng.normal();
  return v;
}

UserSpec spec_of(LossKind kind, Eigen::Index d, double ridge = 0.0) {
  UserSpec u;
  u.norm = NormSpec::lq(2, d);
  u.loss_kind = kind;
  u.param_reg.ridge = ridge;
  return u;
}

// Raw sum of per-pair losses, written out independently.
double raw_loss(LossKind kind, const Dataset& data, const Vector& theta, double ridge) {
  double v = ridge * theta.squaredNorm();
  for (const auto& qa : data.items) {
    const double z = qa.query.dot(theta);
    v += kind == LossKind::Linear ? 0.5 * (z - qa.answer) * (z - qa.answer)
                                  : std::log1p(std::exp(-qa.answer * z));
  }
  return v;
}

}  // namespace

TEST(Sigmoid, StableAtExtremes) {
  EXPECT_EQ(sigmoid(-1000), 0.0);
  EXPECT_EQ(sigmoid(1000), 1.0);
  EXPECT_NEAR(softplus(1000), 1000, 1e-12);
  EXPECT_NEAR(softplus(-1000), 0.0, 1e-300);
  EXPECT_NEAR(softplus(0.0), std::log(2.0), 1e-15);
}

TEST(PairLosses, GradientsMatchFiniteDifferences) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    QueryAnswer qa{random_vector(rng, 3), rng.normal()};
    const Vector theta = random_vector(rng, 3);
    const double h = 1e-6;
    QueryAnswer ql{qa.query, rng.uniform() < 0.5 ? -1.0 : 1.0};
    const auto lin = linear_loss(theta, qa);
    const auto lg = logistic_loss(theta, ql);
    for (Eigen::Index j = 0; j < 3; ++j) {
      Vector a = theta, b = theta;
      a[j] += h;
      b[j] -= h;
      const double fl = (linear_loss(a, qa).value - linear_loss(b, qa).value) / (2 * h);
      const double fg = (logistic_loss(a, ql).value - logistic_loss(b, ql).value) / (2 * h);
      EXPECT_NEAR(lin.gradient[j], fl, 1e-5 * (1 + std::abs(fl)));
      EXPECT_NEAR(lg.gradient[j], fg, 1e-5 * (1 + std::abs(fg)));
    }
  }
}

TEST(PairLosses, LogisticRejectsNonBinaryAnswers) {
  EXPECT_THROW(logistic_loss(Vector::Zero(2), {Vector::Ones(2), 0.0}), std::invalid_argument);
}

TEST(IndependentLoss, MatchesRawSumsAndFiniteDifferences) {
  Rng rng(2);
  for (LossKind kind : {LossKind::Linear, LossKind::Logistic}) {
    const Vector truth = random_vector(rng, 3);
    const Dataset data = kind == LossKind::Linear ? gen_linear(truth, 257, BoundedUniform{2.0}, 0.5, 3)
                                                  : gen_logistic(truth, 257, BoundedUniform{2.0}, 3);
    const UserSpec spec = spec_of(kind, 3, 0.1);
    const IndependentLoss loss(spec, data, 3);
    for (int i = 0; i < 20; ++i) {
      const Vector theta = random_vector(rng, 3, 2.0);
      const double raw = raw_loss(kind, data, theta, 0.1);
      double v = 0;
      Vector g;
      Matrix H;
      loss.evaluate(theta, &v, &g, &H);
      EXPECT_NEAR(v, raw, 1e-9 * (1 + raw));
      EXPECT_NEAR(independent_loss(spec, theta, data).value, raw, 1e-9 * (1 + raw));
      const double h = 1e-5;
      for (Eigen::Index j = 0; j < 3; ++j) {
        Vector a = theta, b = theta;
        a[j] += h;
        b[j] -= h;
        const double fd = (raw_loss(kind, data, a, 0.1) - raw_loss(kind, data, b, 0.1)) / (2 * h);
        EXPECT_NEAR(g[j], fd, 1e-5 * (1 + std::abs(fd)));
        const Vector hc = (loss.gradient(a) - loss.gradient(b)) / (2 * h);
        for (Eigen::Index k = 0; k < 3; ++k) EXPECT_NEAR(H(k, j), hc[k], 1e-5 * (1 + std::abs(hc[k])));
      }
    }
  }
}

TEST(IndependentLoss, EmptyDatasetIsZero) {
  const IndependentLoss loss(spec_of(LossKind::Linear, 2), Dataset{}, 2);
  EXPECT_TRUE(loss.is_zero());
  EXPECT_EQ(loss.value(Vector::Ones(2)), 0.0);
}

TEST(IndependentLoss, KindMismatchIsPreconditionError) {
  Dataset data;
  data.items.push_back({Vector::Ones(2), 0.3});
  EXPECT_THROW(independent_loss(spec_of(LossKind::Logistic, 2), Vector::Zero(2), data), PreconditionError);
}

TEST(IndependentLoss, CoordinatewiseRestriction) {
  const Vector truth = (Vector(2) << 1.0, -3.0).finished();
  const Dataset data = gen_linear(truth, 40, CanonicalAxes{Vector::Constant(2, 1.5)}, 0.1, 4);
  const IndependentLoss loss(spec_of(LossKind::Linear, 2), data, 2);
  ASSERT_TRUE(loss.is_coordinatewise());
  Vector theta(2);
  theta << 0.4, 0.9;
  double sum = 0;
  for (Eigen::Index j = 0; j < 2; ++j) sum += loss.coordinate_value(j, theta[j]);
  EXPECT_NEAR(sum, loss.value(theta), 1e-9);
  const Vector g = loss.gradient(theta);
  for (Eigen::Index j = 0; j < 2; ++j) EXPECT_NEAR(loss.coordinate_derivative(j, theta[j]), g[j], 1e-9);
  const Dataset dense = gen_linear(truth, 40, BoundedUniform{1.0}, 0.1, 4);
  EXPECT_FALSE(IndependentLoss(spec_of(LossKind::Linear, 2), dense, 2).is_coordinatewise());
}

TEST(GradientPacMargin, MatchesDefinition) {
  Rng rng(5);
  const Vector truth = random_vector(rng, 2);
  const Dataset data = gen_linear(truth, 300, BoundedUniform{1.0}, 0.2, 6);
  const UserSpec spec = spec_of(LossKind::Linear, 2);
  const GradientPacConstants k{0.1, 1.0, 0.75};
  for (int i = 0; i < 20; ++i) {
    const Vector theta = truth + random_vector(rng, 2, 2.0);
    const double r = (theta - truth).norm();
    const Vector g = independent_loss(spec, theta, data).gradient;
    const double n = 300.0;
    const double expect = (theta - truth).dot(g) - (k.A * n * std::min(r, r * r) - k.B * std::pow(n, 0.75) * r);
    EXPECT_NEAR(gradient_pac_margin(data, spec, truth, theta, k), expect, 1e-8 * (1 + std::abs(expect)));
  }
  EXPECT_THROW(gradient_pac_margin(Dataset{}, spec, truth, truth, k), std::invalid_argument);
}

}  // namespace licchavi
