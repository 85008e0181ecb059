#include "licchavi/datagen.hpp"
#include "licchavi/prng.hpp"
#include "licchavi/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace licchavi {

namespace {

Vector random_vector(Rng& rng, Eigen::Index d, double scale = 1.0) {
  Vector v(d);
  for (Eigen::Index j = 0; j < d; ++j) v[j] = scale * rng.normal();
  return v;
}

struct Instance {
  std::vector<UserSpec> users;
  GlobalSpec global;
  std::vector<Dataset> data;
};

// Random admissible instance mixing norms, powers and loss kinds.
Instance random_instance(std::uint64_t seed, Eigen::Index d, std::size_t N) {
  Rng rng(seed);
  Instance inst;
  const double global_q[] = {1.5, 2.0, 3.0};
  inst.global.power = rng.uniform(1.5, 3.0);
  inst.global.weight = rng.uniform(0.1, 2.0);
  inst.global.norm = NormSpec::lq(global_q[rng.below(3)], d);
  for (std::size_t n = 0; n < N; ++n) {
    UserSpec u;
    const double qs[] = {1.0, 1.5, 2.0, 3.0};
    u.norm = rng.uniform() < 0.2 ? NormSpec::linf(d) : NormSpec::lq(qs[rng.below(4)], d);
    u.power = rng.uniform() < 0.5 ? 1.0 : 2.0;
    u.weight = rng.uniform(0.3, 3.0);
    u.loss_kind = rng.uniform() < 0.3 ? LossKind::Logistic : LossKind::Linear;
    const Vector truth = random_vector(rng, d, 2.0);
    const auto n_items = static_cast<std::size_t>(rng.below(40));
    inst.data.push_back(u.loss_kind == LossKind::Linear
                            ? gen_linear(truth, n_items, BoundedUniform{1.0}, 0.3, seed * 100 + n)
                            : gen_logistic(truth, n_items, BoundedUniform{1.0}, seed * 100 + n));
    inst.users.push_back(u);
  }
  return inst;
}

double max_diff(const ModelState& a, const ModelState& b) {
  double m = (a.common - b.common).cwiseAbs().maxCoeff();
  for (std::size_t n = 0; n < a.users.size(); ++n) {
    m = std::max(m, (a.users[n] - b.users[n]).cwiseAbs().maxCoeff());
  }
  return m;
}

}  // namespace

TEST(LicchaviLoss, MatchesDefinition) {
  UserSpec u;
  u.norm = NormSpec::lq(1, 2);
  GlobalSpec g;
  g.norm = NormSpec::lq(2, 2);
  Dataset d;
  d.items.push_back({(Vector(2) << 1.0, 0.0).finished(), 2.0});
  ModelState s = ModelState::zeros(1, 2);
  s.common << 1.0, 1.0;
  s.users[0] << 0.0, 3.0;
  // ½(0 − 2)² + |0 − 1| + |3 − 1| + ‖(1,1)‖²
  EXPECT_DOUBLE_EQ(licchavi_loss(s, {u}, g, {d}), 2.0 + 3.0 + 2.0);
}

TEST(Solve, QuadraticCaseMatchesLinearSystem) {
  // Powers 2 with ℓ2 norms and linear losses: the optimum solves a linear
  // system assembled here directly.
  Rng rng(1);
  const Eigen::Index d = 2;
  const std::size_t N = 3;
  std::vector<UserSpec> users(N);
  std::vector<Dataset> data;
  GlobalSpec g;
  g.norm = NormSpec::lq(2, d);
  g.weight = 0.7;
  for (std::size_t n = 0; n < N; ++n) {
    users[n].norm = NormSpec::lq(2, d);
    users[n].power = 2.0;
    users[n].weight = 0.5 + n;
    data.push_back(gen_linear(random_vector(rng, d), 30, BoundedUniform{1.0}, 0.2, n + 1));
  }
  const Eigen::Index m = static_cast<Eigen::Index>(N + 1) * d;
  Matrix K = Matrix::Zero(m, m);
  Vector rhs = Vector::Zero(m);
  K.topLeftCorner(d, d) += 2 * g.weight * Matrix::Identity(d, d);
  for (std::size_t n = 0; n < N; ++n) {
    const Eigen::Index o = static_cast<Eigen::Index>(n + 1) * d;
    Matrix xtx = Matrix::Zero(d, d);
    Vector xty = Vector::Zero(d);
    for (const auto& qa : data[n].items) {
      xtx += qa.query * qa.query.transpose();
      xty += qa.query * qa.answer;
    }
    const double l = 2 * users[n].weight;
    K.block(o, o, d, d) += xtx + l * Matrix::Identity(d, d);
    K.block(o, 0, d, d) -= l * Matrix::Identity(d, d);
    K.block(0, o, d, d) -= l * Matrix::Identity(d, d);
    K.topLeftCorner(d, d) += l * Matrix::Identity(d, d);
    rhs.segment(o, d) = xty;
  }
  const Vector z = K.ldlt().solve(rhs);
  const SolveReport r = solve(users, g, data);
  EXPECT_TRUE(r.converged);
  EXPECT_LE((r.state.common - z.head(d)).cwiseAbs().maxCoeff(), 1e-8);
  for (std::size_t n = 0; n < N; ++n) {
    EXPECT_LE((r.state.users[n] - z.segment(static_cast<Eigen::Index>(n + 1) * d, d)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Solve, MedianOfPowerOneUsers) {
  // Three ℓ1 users with huge data at −1, 0, 2 and a tiny common weight:
  // the common parameter sits in the weighted median.
  std::vector<UserSpec> users(3);
  std::vector<Dataset> data;
  for (double y : {-1.0, 0.0, 2.0}) {
    Dataset d;
    for (int i = 0; i < 200; ++i) d.items.push_back({Vector::Ones(1), y});
    data.push_back(d);
  }
  for (auto& u : users) u.norm = NormSpec::lq(1, 1);
  GlobalSpec g;
  g.norm = NormSpec::lq(2, 1);
  g.weight = 1e-6;
  const SolveReport r = solve(users, g, data);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.state.common[0], 0.0, 1e-6);
  EXPECT_NEAR(r.state.users[0][0], -1.0 + 1.0 / 200, 1e-6);
}

TEST(Solve, LocalOptimalitySpotCheck) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Instance inst = random_instance(seed, 2, 3);
    ASSERT_TRUE(validate_config(inst.users, inst.global, 2).empty());
    const SolveReport r = solve(inst.users, inst.global, inst.data);
    EXPECT_TRUE(r.converged) << "seed " << seed << " residual " << r.residual;
    const double base = licchavi_loss(r.state, inst.users, inst.global, inst.data);
    Rng rng(seed + 1000);
    for (int k = 0; k < 100; ++k) {
      ModelState p = r.state;
      Vector h = random_vector(rng, 2 * 4);
      h /= h.norm();
      p.common += 1e-3 * h.head(2);
      for (int n = 0; n < 3; ++n) p.users[n] += 1e-3 * h.segment(2 * (n + 1), 2);
      EXPECT_LE(base, licchavi_loss(p, inst.users, inst.global, inst.data) + 1e-12);
    }
  }
}

TEST(Solve, UniqueOptimumFromRandomStarts) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance inst = random_instance(seed + 50, 2, 3);
    Rng rng(seed);
    SolverConfig a, b;
    a.init = ModelState::zeros(3, 2);
    b.init = ModelState::zeros(3, 2);
    a.init->common = random_vector(rng, 2, 5.0);
    b.init->common = random_vector(rng, 2, 5.0);
    for (int n = 0; n < 3; ++n) {
      a.init->users[n] = random_vector(rng, 2, 5.0);
      b.init->users[n] = random_vector(rng, 2, 5.0);
    }
    const SolveReport ra = solve(inst.users, inst.global, inst.data, a);
    const SolveReport rb = solve(inst.users, inst.global, inst.data, b);
    EXPECT_TRUE(ra.converged && rb.converged) << "seed " << seed;
    EXPECT_LE(max_diff(ra.state, rb.state), 10 * a.tolerance) << "seed " << seed;
  }
}

TEST(Solve, DeterministicGivenConfig) {
  const Instance inst = random_instance(7, 2, 3);
  const SolveReport a = solve(inst.users, inst.global, inst.data);
  const SolveReport b = solve(inst.users, inst.global, inst.data);
  EXPECT_EQ(a.state.common, b.state.common);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Solve, RejectsInvalidConfig) {
  Instance inst = random_instance(3, 2, 2);
  inst.global.power = 1.0;
  EXPECT_THROW(solve(inst.users, inst.global, inst.data), PreconditionError);
}

TEST(ModifiedSolve, ForcedUserKeepsVoteAndIgnoresData) {
  Instance inst = random_instance(4, 2, 3);
  const Vector w = (Vector(2) << 0.7, -1.1).finished();
  const SolveReport a = modified_solve(inst.users, inst.global, inst.data, 1, w);
  inst.data[1] = gen_linear(Vector::Constant(2, 50.0), 30, BoundedUniform{1.0}, 0.0, 1);
  const SolveReport b = modified_solve(inst.users, inst.global, inst.data, 1, w);
  EXPECT_EQ(a.state.users[1], w);
  EXPECT_LE((a.state.common - b.state.common).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_THROW(modified_solve(inst.users, inst.global, inst.data, 3, w), std::out_of_range);
}

TEST(ModifiedSolve, CounterexampleHonestVote) {
  const double A = 10.0, eps = 1.0 / 22.0;
  auto syn = std::make_shared<SyntheticLoss>();
  syn->value = [=](const Vector& t) {
    const double r = A * t[0] - t[1];
    return 0.5 * r * r + t[1] + eps * t.squaredNorm() + 1 / (4 * eps);
  };
  syn->gradient = [=](const Vector& t) {
    const double r = A * t[0] - t[1];
    return Vector((Vector(2) << r * A + 2 * eps * t[0], -r + 1 + 2 * eps * t[1]).finished());
  };
  syn->hessian = [=](const Vector&) {
    return Matrix((Matrix(2, 2) << A * A + 2 * eps, -A, -A, 1 + 2 * eps).finished());
  };
  UserSpec u1, u2;
  u1.norm = u2.norm = NormSpec::lq(1, 2);
  u1.loss_kind = LossKind::Synthetic;
  u1.synthetic = syn;
  GlobalSpec g;
  g.norm = NormSpec::lq(2, 2);
  const SolveReport r = modified_solve({u1, u2}, g, {Dataset{}, Dataset{}}, 1, (Vector(2) << 0.0, 1.0).finished());
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.state.common.cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE(r.state.users[0].cwiseAbs().maxCoeff(), 1e-9);
}

TEST(CommonProfile, EqualsSolveAtOptimum) {
  const Instance inst = random_instance(11, 2, 3);
  const SolveReport r = solve(inst.users, inst.global, inst.data);
  const ProfileResult p = common_profile_detail(inst.users, inst.global, inst.data, std::nullopt, r.state.common);
  EXPECT_NEAR(p.value, r.loss_value, 1e-9 * (1 + std::abs(r.loss_value)));
  // Moving ρ can only increase the profile.
  Vector off = r.state.common;
  off[0] += 0.1;
  EXPECT_GT(common_profile(inst.users, inst.global, inst.data, std::nullopt, off), p.value);
}

TEST(Solve1d, FindsMinimizersAndEdges) {
  // f(t) = |t − 1| + |t + 2|: minimizers [−2, 1].
  auto sub = [](double t) {
    auto s = [](double u) { return u > 0 ? Interval{1, 1} : (u < 0 ? Interval{-1, -1} : Interval{-1, 1}); };
    const Interval a = s(t - 1), b = s(t + 2);
    return Interval{a.lo + b.lo, a.hi + b.hi};
  };
  const double t = solve_1d(sub, {-10, 10});
  EXPECT_GE(t, -2.0);
  EXPECT_LE(t, 1.0);
  EXPECT_EQ(solve_1d(sub, {3, 5}), 3.0);
  EXPECT_EQ(solve_1d(sub, {-9, -5}), -5.0);
  // smooth: (t − π)²
  auto q = [](double u) { return Interval{2 * (u - M_PI), 2 * (u - M_PI)}; };
  EXPECT_NEAR(solve_1d_unbounded(q, {-1, 1}), M_PI, 1e-14);
  auto bad = [](double) { return Interval{1, 0}; };
  EXPECT_THROW(solve_1d(bad, {0, 1}), PreconditionError);
  auto none = [](double) { return Interval{-1, -1}; };
  EXPECT_THROW(solve_1d_unbounded(none, {0, 1}), PreconditionError);
}

TEST(AbsoluteCommonBound, ClosedForm) {
  std::vector<UserSpec> users(4);
  for (auto& u : users) u.norm = NormSpec::lq(2, 2);
  GlobalSpec g;
  g.norm = NormSpec::lq(2, 2);
  EXPECT_DOUBLE_EQ(absolute_common_bound(users, g), 2.0);
  g.power = 3.0;
  EXPECT_NEAR(absolute_common_bound(users, g), std::sqrt(4.0 / 3.0), 1e-15);
  users[0].power = 2.0;
  EXPECT_THROW(absolute_common_bound(users, g), PreconditionError);
}

}  // namespace licchavi
