#include "licchavi/datagen.hpp"
#include "licchavi/prng.hpp"
#include "licchavi/solver.hpp"

#include <gtest/gtest.h>

namespace licchavi {

namespace {

struct Separable {
  std::vector<UserSpec> users;
  GlobalSpec global;
  std::vector<Dataset> data;
};

// ℓ1 users with power 1 and axis-aligned linear data, so every coordinate
// is its own problem.
Separable separable_instance(std::uint64_t seed, Eigen::Index d, std::size_t N) {
  Rng rng(seed);
  Separable s;
  s.global.weight = rng.uniform(0.2, 2.0);
  s.global.power = 2.0;
  s.global.norm = NormSpec::lq(2.0, d);
  for (std::size_t n = 0; n < N; ++n) {
    UserSpec u;
    Vector diag(d);
    for (Eigen::Index j = 0; j < d; ++j) diag[j] = rng.uniform(0.5, 2.0);
    u.norm = NormSpec::scaled(Exponent::finite(1.0), diag);
    u.weight = rng.uniform(0.2, 3.0);
    Vector truth(d), mags(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      truth[j] = 3.0 * rng.normal();
      mags[j] = rng.uniform(0.5, 1.5);
    }
    const auto items = static_cast<std::size_t>(d) * (1 + rng.below(5));
    s.data.push_back(gen_linear(truth, items, CanonicalAxes{mags}, 0.5, seed * 31 + n));
    s.users.push_back(u);
  }
  return s;
}

double max_diff(const ModelState& a, const ModelState& b) {
  double m = (a.common - b.common).cwiseAbs().maxCoeff();
  for (std::size_t n = 0; n < a.users.size(); ++n) {
    m = std::max(m, (a.users[n] - b.users[n]).cwiseAbs().maxCoeff());
  }
  return m;
}

}  // namespace

TEST(Coordinatewise, AgreesWithJointSolve) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const Separable s = separable_instance(seed, 3, 4);
    const SolveReport a = solve_coordinatewise(s.users, s.global, s.data);
    const SolveReport b = solve(s.users, s.global, s.data);
    ASSERT_TRUE(a.converged) << "seed " << seed;
    ASSERT_TRUE(b.converged) << "seed " << seed;
    EXPECT_LE(max_diff(a.state, b.state), 1e-6) << "seed " << seed;
    EXPECT_NEAR(a.loss_value, b.loss_value, 1e-9 * (1.0 + std::abs(b.loss_value)));
  }
}

TEST(Coordinatewise, ForcedUserAgreesWithModifiedSolve) {
  const Separable s = separable_instance(7, 2, 3);
  const Vector w = (Vector(2) << 4.0, -2.5).finished();
  const SolveReport a = solve_coordinatewise(s.users, s.global, s.data, 1, w);
  const SolveReport b = modified_solve(s.users, s.global, s.data, 1, w);
  ASSERT_TRUE(a.converged);
  EXPECT_EQ(a.state.users[1], w);
  EXPECT_LE(max_diff(a.state, b.state), 1e-6);
}

TEST(Coordinatewise, RejectsNonSeparableProblems) {
  Separable s = separable_instance(3, 2, 2);
  Separable l2 = s;
  l2.users[0].norm = NormSpec::lq(2.0, 2);
  EXPECT_THROW(solve_coordinatewise(l2.users, l2.global, l2.data), PreconditionError);

  Separable squared = s;
  squared.users[1].power = 2.0;
  EXPECT_THROW(solve_coordinatewise(squared.users, squared.global, squared.data), PreconditionError);

  Separable dense = s;
  dense.data[0] = gen_linear(Vector::Ones(2), 5, BoundedUniform{1.0}, 0.1, 9);
  EXPECT_THROW(solve_coordinatewise(dense.users, dense.global, dense.data), PreconditionError);

  Separable mismatched = s;
  mismatched.global.power = 3.0;
  EXPECT_THROW(solve_coordinatewise(mismatched.users, mismatched.global, mismatched.data),
               PreconditionError);
}

TEST(Coordinatewise, ForcedUserMayHaveDenseData) {
  Separable s = separable_instance(5, 2, 3);
  s.data[2] = gen_linear(Vector::Ones(2), 5, BoundedUniform{1.0}, 0.1, 9);
  EXPECT_NO_THROW(solve_coordinatewise(s.users, s.global, s.data, 2, Vector::Zero(2)));
}

}  // namespace licchavi
