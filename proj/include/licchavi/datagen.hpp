#pragma once

// Honest, strategic and Byzantine dataset generators. All randomness comes
// from the Philox stream keyed by the caller's seed.

#include "licchavi/core.hpp"

#include <cstdint>
#include <variant>

namespace licchavi {

struct GaussianIid {
  Vector variances;  // diagonal covariance
};
struct BoundedUniform {
  double half_width = 1.0;  // queries uniform on [−M, M]^d
};
/// Query i lies on axis i mod d with magnitude magnitudes[axis].
struct CanonicalAxes {
  Vector magnitudes;
};

using QueryDistribution = std::variant<GaussianIid, BoundedUniform, CanonicalAxes>;

bool is_bounded(const QueryDistribution& dist);
std::vector<Vector> sample_queries(const QueryDistribution& dist, Eigen::Index d, std::size_t n,
                                   std::uint64_t seed);

Dataset gen_linear(const Vector& theta_true, std::size_t n, const QueryDistribution& dist,
                   double noise_sigma, std::uint64_t seed);
/// Throws PreconditionError for unbounded query distributions.
Dataset gen_logistic(const Vector& theta_true, std::size_t n, const QueryDistribution& dist,
                     std::uint64_t seed);
/// Honest generation as if the preferred parameter were w. noise_sigma is
/// ignored for logistic data.
Dataset gen_strategic(const Vector& w, std::size_t n, LossKind kind, const QueryDistribution& dist,
                      double noise_sigma, std::uint64_t seed);

struct HugeLabels {
  double magnitude = 1e6;
};
struct RandomNoise {
  double scale = 10.0;
};
struct FixedTarget {
  Vector w;
};
using ByzantineMode = std::variant<HugeLabels, RandomNoise, FixedTarget>;

/// Fabricated data aimed at users of kind `target`. Logistic targets always
/// receive ±1 answers. FixedTarget delegates to gen_strategic with `dist`.
Dataset gen_byzantine(const ByzantineMode& mode, std::size_t n, Eigen::Index d, std::uint64_t seed,
                      LossKind target = LossKind::Linear,
                      const QueryDistribution& dist = BoundedUniform{1.0},
                      double noise_sigma = 0.0);

const char* mode_name(const ByzantineMode& mode);

}  // namespace licchavi
