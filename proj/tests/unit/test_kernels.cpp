#include "licchavi/kernels/kernels.hpp"
#include "licchavi/prng.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace licchavi {

namespace {

Dataset random_dataset(std::size_t n, Eigen::Index d, std::uint64_t seed, bool labels) {
  Rng rng(seed);
  Dataset data;
  for (std::size_t i = 0; i < n; ++i) {
    Vector x(d);
    for (Eigen::Index j = 0; j < d; ++j) x[j] = rng.normal();
    data.items.push_back({x, labels ? (rng.uniform() < 0.5 ? -1.0 : 1.0) : rng.normal()});
  }
  return data;
}

std::vector<kernels::Isa> available() {
  std::vector<kernels::Isa> out{kernels::Isa::Scalar};
  if (kernels::isa_available(kernels::Isa::Avx2)) out.push_back(kernels::Isa::Avx2);
  return out;
}

}  // namespace

TEST(Kernels, PackLayout) {
  const Dataset data = random_dataset(5, 3, 1, false);
  const auto p = kernels::pack(data, 3);
  ASSERT_EQ(p.n, 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) EXPECT_EQ(p.column(j)[i], data.items[i].query[j]);
    EXPECT_EQ(p.answers[i], data.items[i].answer);
  }
}

// Every available ISA against naive loops, at sizes that exercise the
// vector tails.
class KernelOracle : public ::testing::TestWithParam<std::size_t> {};

TEST_P(KernelOracle, MatchesNaiveLoops) {
  const std::size_t n = GetParam();
  const Eigen::Index d = 3;
  const Dataset data = random_dataset(n, d, 10 + n, true);
  const auto p = kernels::pack(data, d);
  const double theta[3] = {0.3, -1.2, 0.7};
  std::vector<double> r(n), w(n);
  Rng rng(5);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = rng.normal();
    w[i] = rng.uniform();
  }
  for (const auto isa : available()) {
    SCOPED_TRACE(kernels::to_string(isa));
    const auto& k = kernels::table(isa);
    std::vector<double> z(n);
    k.margins(p, theta, z.data());
    for (std::size_t i = 0; i < n; ++i) {
      double e = 0;
      for (Eigen::Index j = 0; j < d; ++j) e += data.items[i].query[j] * theta[j];
      EXPECT_NEAR(z[i], e, 1e-13);
    }
    std::vector<double> out(d);
    k.transpose_times(p, r.data(), out.data());
    for (Eigen::Index j = 0; j < d; ++j) {
      double e = 0;
      for (std::size_t i = 0; i < n; ++i) e += data.items[i].query[j] * r[i];
      EXPECT_NEAR(out[j], e, 1e-11);
    }
    std::vector<double> gram(d * d), gram1(d * d);
    k.weighted_gram(p, w.data(), gram.data());
    k.weighted_gram(p, nullptr, gram1.data());
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = 0; b < d; ++b) {
        double e = 0, e1 = 0;
        for (std::size_t i = 0; i < n; ++i) {
          const double xx = data.items[i].query[a] * data.items[i].query[b];
          e += w[i] * xx;
          e1 += xx;
        }
        EXPECT_NEAR(gram[a + b * d], e, 1e-10);
        EXPECT_NEAR(gram1[a + b * d], e1, 1e-10);
      }
    }
    std::vector<double> resid(n), curv(n);
    k.logistic_terms(z.data(), p.answers.data(), n, resid.data(), curv.data());
    for (std::size_t i = 0; i < n; ++i) {
      const double s = 1.0 / (1.0 + std::exp(-z[i]));
      EXPECT_NEAR(resid[i], s - (p.answers[i] == 1.0 ? 1.0 : 0.0), 1e-14);
      EXPECT_NEAR(curv[i], s * (1.0 - s), 1e-14);
    }
    double e = 0;
    for (std::size_t i = 0; i < n; ++i) e += r[i] * w[i];
    EXPECT_NEAR(k.dot(r.data(), w.data(), n), e, 1e-11);
  }
}

INSTANTIATE_TEST_SUITE_P(Sizes, KernelOracle, ::testing::Values(0, 1, 3, 4, 7, 64, 1003));

TEST(Kernels, ScalarAndSimdAgree) {
  if (!kernels::isa_available(kernels::Isa::Avx2)) GTEST_SKIP() << "no AVX2 on this machine";
  const std::size_t n = 4099;
  const Eigen::Index d = 5;
  const Dataset data = random_dataset(n, d, 77, true);
  const auto p = kernels::pack(data, d);
  const auto& s = kernels::table(kernels::Isa::Scalar);
  const auto& v = kernels::table(kernels::Isa::Avx2);
  const double theta[5] = {1, -2, 0.5, 3, -0.25};
  std::vector<double> zs(n), zv(n);
  s.margins(p, theta, zs.data());
  v.margins(p, theta, zv.data());
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(zs[i], zv[i], 1e-13 * (1 + std::abs(zs[i])));
  std::vector<double> rs(n), cs(n), rv(n), cv(n);
  s.logistic_terms(zs.data(), p.answers.data(), n, rs.data(), cs.data());
  v.logistic_terms(zs.data(), p.answers.data(), n, rv.data(), cv.data());
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_NEAR(rs[i], rv[i], 1e-15);
    EXPECT_NEAR(cs[i], cv[i], 1e-15);
  }
  std::vector<double> ts(d), tv(d), gs(d * d), gv(d * d);
  s.transpose_times(p, rs.data(), ts.data());
  v.transpose_times(p, rs.data(), tv.data());
  s.weighted_gram(p, cs.data(), gs.data());
  v.weighted_gram(p, cs.data(), gv.data());
  for (Eigen::Index j = 0; j < d; ++j) EXPECT_NEAR(ts[j], tv[j], 1e-10);
  for (Eigen::Index j = 0; j < d * d; ++j) EXPECT_NEAR(gs[j], gv[j], 1e-10);
  EXPECT_NEAR(s.dot(zs.data(), rs.data(), n), v.dot(zs.data(), rs.data(), n), 1e-9);
}

TEST(Kernels, DeterministicPerIsa) {
  const Dataset data = random_dataset(1001, 4, 8, false);
  const auto p = kernels::pack(data, 4);
  for (const auto isa : available()) {
    const auto& k = kernels::table(isa);
    std::vector<double> a(16), b(16);
    k.weighted_gram(p, nullptr, a.data());
    k.weighted_gram(p, nullptr, b.data());
    EXPECT_EQ(a, b);
  }
}

TEST(Kernels, ActiveIsAvailable) { EXPECT_TRUE(kernels::isa_available(kernels::active_isa())); }

}  // namespace licchavi
