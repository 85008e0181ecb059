#include "licchavi/datagen.hpp"

#include "licchavi/losses.hpp"
#include "licchavi/prng.hpp"

#include <cmath>

namespace licchavi {

namespace {

constexpr std::uint64_t kQueryStream = 0;
constexpr std::uint64_t kAnswerStream = 1;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

bool is_bounded(const QueryDistribution& dist) {
  return !std::holds_alternative<GaussianIid>(dist);
}

std::vector<Vector> sample_queries(const QueryDistribution& dist, Eigen::Index d, std::size_t n,
                                   std::uint64_t seed) {
  Rng rng(seed, kQueryStream);
  std::vector<Vector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vector x = Vector::Zero(d);
    std::visit(overloaded{
                   [&](const GaussianIid& g) {
                     require_dimension(g.variances, d, "GaussianIid variances");
                     for (Eigen::Index j = 0; j < d; ++j) x[j] = std::sqrt(g.variances[j]) * rng.normal();
                   },
                   [&](const BoundedUniform& b) {
                     for (Eigen::Index j = 0; j < d; ++j) x[j] = rng.uniform(-b.half_width, b.half_width);
                   },
                   [&](const CanonicalAxes& c) {
                     require_dimension(c.magnitudes, d, "CanonicalAxes magnitudes");
                     const auto axis = static_cast<Eigen::Index>(i % static_cast<std::size_t>(d));
                     x[axis] = c.magnitudes[axis];
                   },
               },
               dist);
    out.push_back(std::move(x));
  }
  return out;
}

Dataset gen_linear(const Vector& theta_true, std::size_t n, const QueryDistribution& dist,
                   double noise_sigma, std::uint64_t seed) {
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("gen_linear: noise_sigma must be >= 0");
  const auto queries = sample_queries(dist, theta_true.size(), n, seed);
  Rng noise(seed, kAnswerStream);
  Dataset out;
  out.items.reserve(n);
  for (const auto& x : queries) {
    const double xi = noise_sigma > 0.0 ? noise_sigma * noise.normal() : 0.0;
    out.items.push_back({x, x.dot(theta_true) + xi});
  }
  return out;
}

Dataset gen_logistic(const Vector& theta_true, std::size_t n, const QueryDistribution& dist,
                     std::uint64_t seed) {
  if (!is_bounded(dist)) throw PreconditionError("gen_logistic: query distribution must be bounded");
  const auto queries = sample_queries(dist, theta_true.size(), n, seed);
  Rng coin(seed, kAnswerStream);
  Dataset out;
  out.items.reserve(n);
  for (const auto& x : queries) {
    const double y = coin.uniform() < sigmoid(x.dot(theta_true)) ? 1.0 : -1.0;
    out.items.push_back({x, y});
  }
  return out;
}

Dataset gen_strategic(const Vector& w, std::size_t n, LossKind kind, const QueryDistribution& dist,
                      double noise_sigma, std::uint64_t seed) {
  switch (kind) {
    case LossKind::Linear:
      return gen_linear(w, n, dist, noise_sigma, seed);
    case LossKind::Logistic:
      return gen_logistic(w, n, dist, seed);
    case LossKind::Synthetic:
      break;
  }
  throw PreconditionError("gen_strategic: synthetic losses have no data");
}

Dataset gen_byzantine(const ByzantineMode& mode, std::size_t n, Eigen::Index d, std::uint64_t seed,
                      LossKind target, const QueryDistribution& dist, double noise_sigma) {
  if (target == LossKind::Synthetic) throw PreconditionError("gen_byzantine: synthetic target");
  if (const auto* fixed = std::get_if<FixedTarget>(&mode)) {
    require_dimension(fixed->w, d, "FixedTarget");
    return gen_strategic(fixed->w, n, target, dist, noise_sigma, seed);
  }
  const bool logistic = target == LossKind::Logistic;
  Rng qrng(seed, kQueryStream);
  Rng arng(seed, kAnswerStream);
  Dataset out;
  out.items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vector x(d);
    double y = 0.0;
    if (const auto* huge = std::get_if<HugeLabels>(&mode)) {
      for (Eigen::Index j = 0; j < d; ++j) x[j] = qrng.uniform(-1.0, 1.0);
      const double sign = arng.uniform() < 0.5 ? -1.0 : 1.0;
      if (logistic) {
        x *= huge->magnitude;
        y = sign;
      } else {
        y = sign * huge->magnitude;
      }
    } else {
      const double scale = std::get<RandomNoise>(mode).scale;
      for (Eigen::Index j = 0; j < d; ++j) x[j] = scale * qrng.normal();
      y = logistic ? (arng.uniform() < 0.5 ? -1.0 : 1.0) : scale * arng.normal();
    }
    out.items.push_back({std::move(x), y});
  }
  return out;
}

const char* mode_name(const ByzantineMode& mode) {
  return std::visit(overloaded{[](const HugeLabels&) { return "huge_labels"; },
                               [](const RandomNoise&) { return "random_noise"; },
                               [](const FixedTarget&) { return "fixed_target"; }},
                    mode);
}

}  // namespace licchavi
