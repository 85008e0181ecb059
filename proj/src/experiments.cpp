#include "licchavi/experiments.hpp"

#include "licchavi/adversary.hpp"
#include "licchavi/datagen.hpp"
#include "licchavi/geometry.hpp"
#include "licchavi/losses.hpp"
#include "licchavi/prng.hpp"
#include "licchavi/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

namespace licchavi {

bool Check::passed() const {
  if (std::isnan(value) || std::isnan(threshold)) return false;
  if (op == "<=") return value <= threshold;
  if (op == ">=") return value >= threshold;
  if (op == "<") return value < threshold;
  if (op == ">") return value > threshold;
  if (op == "==") return value == threshold;
  return false;
}

bool ExperimentReport::verdict() const {
  if (!complete || checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed(); });
}

void ExperimentReport::add_check(std::string check_name, double value, std::string op,
                                 double threshold) {
  checks.push_back({std::move(check_name), value, std::move(op), threshold});
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double grid_median_aggregate(const std::vector<double>& points, const std::vector<double>& weights,
                             double global_weight, double global_power, double half_width,
                             double resolution) {
  if (points.size() != weights.size()) {
    throw std::invalid_argument("grid_median_aggregate: one weight per point");
  }
  const auto steps = static_cast<std::int64_t>(std::llround(2.0 * half_width / resolution));
  double best = -half_width, best_value = std::numeric_limits<double>::infinity();
  for (std::int64_t k = 0; k <= steps; ++k) {
    const double rho = -half_width + static_cast<double>(k) * resolution;
    double v = global_weight * std::pow(std::abs(rho), global_power);
    for (std::size_t i = 0; i < points.size(); ++i) v += weights[i] * std::abs(rho - points[i]);
    if (v < best_value) {
      best_value = v;
      best = rho;
    }
  }
  return best;
}

namespace {

// ---------------------------------------------------------------------------
// shared helpers

constexpr std::uint64_t kTagTheta = 1;
constexpr std::uint64_t kTagHonest = 2;
constexpr std::uint64_t kTagByzantine = 3;
constexpr std::uint64_t kTagTest = 4;
constexpr std::uint64_t kTagSpec = 5;
constexpr std::uint64_t kTagTarget = 6;
constexpr std::uint64_t kTagStrategic = 7;

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
  return derive_seed(derive_seed(derive_seed(seed, a), b), c);
}

Vector to_vector(const std::vector<double>& xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) v[static_cast<Eigen::Index>(i)] = xs[i];
  return v;
}

UserSpec make_user(double weight, double power, NormSpec norm, LossKind kind = LossKind::Linear) {
  UserSpec u;
  u.weight = weight;
  u.power = power;
  u.norm = std::move(norm);
  u.loss_kind = kind;
  return u;
}

GlobalSpec make_global(double weight, double power, NormSpec norm) {
  GlobalSpec g;
  g.weight = weight;
  g.power = power;
  g.norm = std::move(norm);
  return g;
}

Vector normal_vector(Rng& rng, Eigen::Index d, double scale) {
  Vector v(d);
  for (Eigen::Index j = 0; j < d; ++j) v[j] = scale * rng.normal();
  return v;
}

/// Uniform in the Euclidean ball of the given radius.
Vector ball_point(Rng& rng, Eigen::Index d, double radius) {
  Vector dir = normal_vector(rng, d, 1.0);
  while (dir.norm() == 0.0) dir = normal_vector(rng, d, 1.0);
  const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
  return dir / dir.norm() * r;
}

std::string metric_key(const std::string& base, std::int64_t n) { return base + "_n" + std::to_string(n); }

double max_of(const std::vector<double>& xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  return m;
}

void echo_tolerance(ExperimentReport& r, const std::string& key, double value) { r.metrics[key] = value; }

std::vector<GateViolation> common_gate(const RunConfig& c) {
  std::vector<GateViolation> out;
  if (c.params.count("global.q0") && !(c.real("global.q0") > 1.0)) {
    out.push_back({"global.q0", "strictly convex common norm",
                   "global.q0 must exceed 1 (got " + format_real(c.real("global.q0")) + ")"});
  }
  if (c.params.count("global.weight") && !(c.real("global.weight") > 0.0)) {
    out.push_back({"global.weight", "lambda_0 > 0", "global.weight must be positive"});
  }
  if (c.params.count("d") && c.integer("d") < 1) {
    out.push_back({"d", "dimension", "d must be at least 1"});
  }
  return out;
}

void require_positive_int(const RunConfig& c, const std::string& key, std::vector<GateViolation>& out) {
  if (c.integer(key) < 1) out.push_back({key, "parameter range", key + " must be at least 1"});
}

// ---------------------------------------------------------------------------
// gradient-PAC

struct PacSetup {
  LossKind kind;
  Eigen::Index d;
  Vector theta_true;
  double noise;
  QueryDistribution dist;
};

Dataset pac_dataset(const PacSetup& s, std::size_t n, std::uint64_t seed) {
  return s.kind == LossKind::Linear ? gen_linear(s.theta_true, n, s.dist, s.noise, seed)
                                    : gen_logistic(s.theta_true, n, s.dist, seed);
}

double fit_strong_convexity(const PacSetup& s, const UserSpec& spec, std::size_t n, double radius,
                            std::uint64_t seed) {
  const Dataset cal = pac_dataset(s, n, seed);
  if (s.kind == LossKind::Linear) {
    Matrix cov = Matrix::Zero(s.d, s.d);
    for (const auto& qa : cal.items) cov += qa.query * qa.query.transpose();
    cov /= static_cast<double>(n);
    return 0.5 * Eigen::SelfAdjointEigenSolver<Matrix>(cov).eigenvalues().minCoeff();
  }
  // Smallest ratio δᵀ(∇L(θ) − ∇L(θ†)) / (n min{r, r²}) over calibration points.
  const IndependentLoss loss(spec, cal, s.d);
  const Vector g0 = loss.gradient(s.theta_true);
  Rng rng(seed, 2);
  double ratio = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 500; ++i) {
    const Vector delta = ball_point(rng, s.d, radius);
    const double r = delta.norm();
    if (r == 0.0) continue;
    const Vector g = loss.gradient(s.theta_true + delta);
    ratio = std::min(ratio, delta.dot(g - g0) / (static_cast<double>(n) * std::min(r, r * r)));
  }
  return 0.5 * ratio;
}

}  // namespace

ExperimentReport exp_gradient_pac(const RunConfig& c, const RunContext& ctx) {
  ExperimentReport rep;
  const std::string kind_name = c.text("kind");
  const LossKind kind = kind_name == "linear" ? LossKind::Linear : LossKind::Logistic;
  PacSetup setup{kind, c.integer("d"), to_vector(c.reals("theta_true")), c.real("noise"),
                 BoundedUniform{c.real("query_half_width")}};
  const UserSpec spec = make_user(1.0, 1.0, NormSpec::lq(2.0, setup.d), kind);
  const auto n_grid = c.integers("n_grid");
  const auto test_points = static_cast<std::size_t>(c.integer("test_points"));
  const double radius = c.real("test_radius");

  GradientPacConstants k;
  k.A = fit_strong_convexity(setup, spec, static_cast<std::size_t>(c.integer("calibration_n")), radius,
                             static_cast<std::uint64_t>(c.integer("calibration_seed")));
  k.B = c.real("B");
  k.alpha = c.real("alpha");
  rep.metrics["A"] = k.A;
  rep.metrics["B"] = k.B;
  rep.metrics["alpha"] = k.alpha;

  const std::size_t cells = c.seeds.size() * n_grid.size();
  std::vector<std::size_t> satisfied(cells, 0);
  std::vector<double> min_margin(cells, 0.0);
  parallel_for(cells, ctx.jobs, [&](std::size_t idx) {
    const std::uint64_t seed = c.seeds[idx / n_grid.size()];
    const std::size_t gi = idx % n_grid.size();
    const auto n = static_cast<std::size_t>(n_grid[gi]);
    const Dataset data = pac_dataset(setup, n, sub_seed(seed, kTagHonest, n));
    // Test points depend on the seed only, so every n sees the same θ.
    Rng rng(sub_seed(seed, kTagTest));
    double lo = std::numeric_limits<double>::infinity();
    std::size_t ok = 0;
    for (std::size_t i = 0; i < test_points; ++i) {
      const Vector theta = setup.theta_true + ball_point(rng, setup.d, radius);
      const double m = gradient_pac_margin(data, spec, setup.theta_true, theta, k);
      if (m >= 0.0) ++ok;
      lo = std::min(lo, m);
    }
    satisfied[idx] = ok;
    min_margin[idx] = lo;
  });

  rep.per_seed.columns = {"seed", "n", "fraction", "min_margin"};
  std::vector<double> fraction(n_grid.size(), 0.0);
  for (std::size_t idx = 0; idx < cells; ++idx) {
    const std::size_t gi = idx % n_grid.size();
    fraction[gi] += static_cast<double>(satisfied[idx]);
    rep.per_seed.rows.push_back({static_cast<std::int64_t>(c.seeds[idx / n_grid.size()]), n_grid[gi],
                                 static_cast<double>(satisfied[idx]) / static_cast<double>(test_points),
                                 min_margin[idx]});
  }
  const double total = static_cast<double>(c.seeds.size() * test_points);
  double min_step = std::numeric_limits<double>::infinity();
  for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
    fraction[gi] /= total;
    rep.metrics[metric_key("fraction", n_grid[gi])] = fraction[gi];
    if (gi > 0) min_step = std::min(min_step, fraction[gi] - fraction[gi - 1]);
  }
  rep.metrics["final_fraction"] = fraction.back();
  rep.add_check("final_fraction", fraction.back(), ">=", c.real("min_fraction"));
  if (n_grid.size() > 1) {
    rep.metrics["min_fraction_step"] = min_step;
    rep.add_check("fraction_nondecreasing", min_step, ">=", 0.0);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// PAC learning curves

ExperimentReport exp_pac_curve(const RunConfig& c, const RunContext& ctx) {
  ExperimentReport rep;
  const bool strong = c.text("mode") == "strong";
  const Eigen::Index d = c.integer("d");
  const auto N = static_cast<std::size_t>(c.integer("N"));
  const auto n_grid = c.integers("n_grid");
  const double noise = c.real("noise");
  const double power = strong ? 1.0 : 2.0;
  const double mag = c.real("byzantine.magnitude");
  const std::size_t byz_count =
      strong ? std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(
                                           c.real("byzantine_fraction") * static_cast<double>(N - 1))),
                                       1, N - 1)
             : 0;

  std::vector<UserSpec> users(N, make_user(c.real("weight"), power, NormSpec::lq(2.0, d)));
  const GlobalSpec global = make_global(c.real("global.weight"), c.real("global.q0"), NormSpec::lq(2.0, d));
  const QueryDistribution dist = GaussianIid{Vector::Ones(d)};

  // Arm 0 is clean; strong mode adds five Byzantine choices for users 1..k.
  std::vector<std::optional<ByzantineMode>> arms{std::nullopt};
  std::vector<std::string> arm_names{"clean"};
  if (strong) {
    arms.emplace_back(HugeLabels{mag});
    arm_names.push_back("huge_labels_a");
    arms.emplace_back(HugeLabels{mag});
    arm_names.push_back("huge_labels_b");
    arms.emplace_back(RandomNoise{c.real("byzantine.noise_scale")});
    arm_names.push_back("random_noise");
    arms.emplace_back(FixedTarget{Vector::Constant(d, mag)});
    arm_names.push_back("fixed_target_pos");
    arms.emplace_back(FixedTarget{Vector::Constant(d, -mag)});
    arm_names.push_back("fixed_target_neg");
  }

  const std::size_t S = c.seeds.size(), G = n_grid.size(), Aa = arms.size();
  std::vector<double> err(S * G * Aa, 0.0), resid(S * G * Aa, 0.0);
  parallel_for(S * G * Aa, ctx.jobs, [&](std::size_t idx) {
    const std::size_t si = idx / (G * Aa), gi = (idx / Aa) % G, ai = idx % Aa;
    const std::uint64_t seed = c.seeds[si];
    const auto n = static_cast<std::size_t>(n_grid[gi]);
    Rng rng(sub_seed(seed, kTagTheta));
    std::vector<Vector> truth;
    for (std::size_t u = 0; u < N; ++u) truth.push_back(normal_vector(rng, d, c.real("theta_scale")));
    std::vector<Dataset> data;
    for (std::size_t u = 0; u < N; ++u) {
      // Honest data is shared by every arm.
      if (arms[ai] && u >= 1 && u <= byz_count) {
        data.push_back(gen_byzantine(*arms[ai], n, d, sub_seed(seed, kTagByzantine, ai * 1000 + u, n),
                                     LossKind::Linear, dist, noise));
      } else {
        data.push_back(gen_linear(truth[u], n, dist, noise, sub_seed(seed, kTagHonest, u, n)));
      }
    }
    const SolveReport r = solve(users, global, data);
    err[idx] = (r.state.users[0] - truth[0]).norm();
    resid[idx] = r.residual;
  });

  rep.per_seed.columns = {"seed", "n", "arm", "error", "residual"};
  for (std::size_t idx = 0; idx < err.size(); ++idx) {
    const std::size_t si = idx / (G * Aa), gi = (idx / Aa) % G, ai = idx % Aa;
    rep.per_seed.rows.push_back(
        {static_cast<std::int64_t>(c.seeds[si]), n_grid[gi], arm_names[ai], err[idx], resid[idx]});
  }
  // mean[ai][gi]
  std::vector<std::vector<double>> mean(Aa, std::vector<double>(G, 0.0));
  for (std::size_t idx = 0; idx < err.size(); ++idx) {
    const std::size_t gi = (idx / Aa) % G, ai = idx % Aa;
    mean[ai][gi] += err[idx] / static_cast<double>(S);
  }
  rep.metrics["max_residual"] = max_of(resid);
  rep.metrics["byzantine_users"] = static_cast<double>(byz_count);
  const double decay = c.real("decay_ratio");
  echo_tolerance(rep, "decay_ratio", decay);
  for (std::size_t ai = 0; ai < Aa; ++ai) {
    for (std::size_t gi = 0; gi < G; ++gi) {
      rep.metrics[metric_key("mean_error_" + arm_names[ai], n_grid[gi])] = mean[ai][gi];
    }
    const double ratio = mean[ai].back() / mean[ai].front();
    rep.metrics["decay_" + arm_names[ai]] = ratio;
    rep.add_check("decay_" + arm_names[ai], ratio, "<=", decay);
    if (ai > 0) {
      double worst = 0.0;
      for (std::size_t gi = 0; gi < G; ++gi) worst = std::max(worst, mean[ai][gi] / mean[0][gi]);
      rep.metrics["ratio_to_clean_" + arm_names[ai]] = worst;
      rep.add_check("ratio_to_clean_" + arm_names[ai], worst, "<=", c.real("byzantine_ratio"));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// strategyproofness under coordinate-wise queries

ExperimentReport exp_strategyproof(const RunConfig& c, const RunContext& ctx) {
  ExperimentReport rep;
  const Eigen::Index d = c.integer("d");
  const auto N = static_cast<std::size_t>(c.integer("N"));
  const auto s = static_cast<std::size_t>(c.integer("s"));
  const auto t = static_cast<std::size_t>(c.integer("t"));
  const auto n = static_cast<std::size_t>(c.integer("n"));
  const auto points = static_cast<std::size_t>(c.integer("sweep_points"));
  const double half = c.real("sweep_half_width");
  const double probe = c.real("clamp_probe");
  const auto wr = c.reals("weight_range");
  const auto dr = c.reals("diag_range");

  struct SeedResult {
    double adv_rho = -std::numeric_limits<double>::infinity();
    double adv_theta = -std::numeric_limits<double>::infinity();
    double clamp_err = 0.0;
    double min_step = std::numeric_limits<double>::infinity();
    double agreement = 0.0;
    double center_mismatch = 0.0;
    double honest_distance = 0.0;
    double residual = 0.0;
  };
  std::vector<SeedResult> results(c.seeds.size());
  parallel_for(c.seeds.size(), ctx.jobs, [&](std::size_t si) {
    const std::uint64_t seed = c.seeds[si];
    Rng rng(sub_seed(seed, kTagSpec));
    std::vector<UserSpec> users;
    std::vector<Vector> truth;
    for (std::size_t u = 0; u < N; ++u) {
      Vector diag(d);
      for (Eigen::Index j = 0; j < d; ++j) diag[j] = rng.uniform(dr[0], dr[1]);
      users.push_back(make_user(rng.uniform(wr[0], wr[1]), 1.0, NormSpec::scaled(Exponent::finite(1.0), diag)));
      truth.push_back(normal_vector(rng, d, c.real("theta_scale")));
    }
    const double q0 = c.real("global.q0");
    const GlobalSpec global = make_global(c.real("global.weight"), q0, NormSpec::lq(q0, d));
    const QueryDistribution axes = CanonicalAxes{Vector::Ones(d)};
    std::vector<Dataset> data;
    for (std::size_t u = 0; u < N; ++u) {
      data.push_back(gen_linear(truth[u], n, axes, c.real("noise"), sub_seed(seed, kTagHonest, u)));
    }

    const Vector& pref = truth[s];
    const SolveReport honest = solve_coordinatewise(users, global, data, s, pref);
    const SolveReport lo = solve_coordinatewise(users, global, data, s, Vector::Constant(d, -probe));
    const SolveReport hi = solve_coordinatewise(users, global, data, s, Vector::Constant(d, probe));
    const SolveReport joint = modified_solve(users, global, data, s, pref);

    SeedResult r;
    r.agreement = (joint.state.common - honest.state.common).cwiseAbs().maxCoeff();
    r.honest_distance = (honest.state.common - pref).cwiseAbs().maxCoeff();
    r.residual = honest.residual;
    const double step = points > 1 ? 2.0 * half / static_cast<double>(points - 1) : 0.0;
    const auto mid = static_cast<std::int64_t>(points / 2);
    for (Eigen::Index j = 0; j < d; ++j) {
      double prev = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < points; ++k) {
        Vector w = pref;
        w[j] = pref[j] + static_cast<double>(static_cast<std::int64_t>(k) - mid) * step;
        const SolveReport rw = solve_coordinatewise(users, global, data, s, w);
        const double rho = rw.state.common[j];
        r.adv_rho = std::max(r.adv_rho, std::abs(honest.state.common[j] - pref[j]) - std::abs(rho - pref[j]));
        r.adv_theta = std::max(r.adv_theta, std::abs(honest.state.users[t][j] - pref[j]) -
                                                std::abs(rw.state.users[t][j] - pref[j]));
        const double clamped = std::clamp(w[j], lo.state.common[j], hi.state.common[j]);
        r.clamp_err = std::max(r.clamp_err, std::abs(rho - clamped));
        r.min_step = std::min(r.min_step, rho - prev);
        prev = rho;
        if (static_cast<std::int64_t>(k) == mid) {
          const bool same = rw.state.common == honest.state.common && rw.state.users[t] == honest.state.users[t];
          r.center_mismatch = std::max(r.center_mismatch, same ? 0.0 : 1.0);
        }
      }
    }
    results[si] = r;
  });

  rep.per_seed.columns = {"seed",      "max_advantage_common", "max_advantage_target", "clamp_error",
                          "min_step",  "solver_agreement",     "honest_distance",      "residual"};
  SeedResult worst;
  worst.center_mismatch = 0.0;
  for (std::size_t si = 0; si < results.size(); ++si) {
    const auto& r = results[si];
    rep.per_seed.rows.push_back({static_cast<std::int64_t>(c.seeds[si]), r.adv_rho, r.adv_theta, r.clamp_err,
                                 r.min_step, r.agreement, r.honest_distance, r.residual});
    worst.adv_rho = std::max(worst.adv_rho, r.adv_rho);
    worst.adv_theta = std::max(worst.adv_theta, r.adv_theta);
    worst.clamp_err = std::max(worst.clamp_err, r.clamp_err);
    worst.min_step = std::min(worst.min_step, r.min_step);
    worst.agreement = std::max(worst.agreement, r.agreement);
    worst.center_mismatch = std::max(worst.center_mismatch, r.center_mismatch);
  }
  rep.metrics["max_advantage_common"] = worst.adv_rho;
  rep.metrics["max_advantage_target"] = worst.adv_theta;
  rep.metrics["max_clamp_error"] = worst.clamp_err;
  rep.metrics["min_monotone_step"] = worst.min_step;
  rep.metrics["max_solver_agreement"] = worst.agreement;
  rep.metrics["center_mismatch"] = worst.center_mismatch;
  rep.add_check("advantage_common", worst.adv_rho, "<=", c.real("advantage_tol"));
  rep.add_check("advantage_target", worst.adv_theta, "<=", c.real("advantage_tol"));
  rep.add_check("clamp_structure", worst.clamp_err, "<=", c.real("clamp_tol"));
  rep.add_check("monotone", worst.min_step, ">=", -c.real("monotone_tol"));
  rep.add_check("solver_agreement", worst.agreement, "<=", c.real("agreement_tol"));
  rep.add_check("honest_arm_identical", worst.center_mismatch, "==", 0.0);
  return rep;
}

// ---------------------------------------------------------------------------
// counterexample with a non-coordinate-wise loss

namespace {

struct NegativeInstance {
  std::vector<UserSpec> users;
  GlobalSpec global;
  std::vector<Dataset> data;
  Vector pref;  // strategic user's preference (0, 1)
};

NegativeInstance negative_instance(double A, double eps) {
  auto syn = std::make_shared<SyntheticLoss>();
  syn->value = [=](const Vector& t) {
    const double r = A * t[0] - t[1];
    return 0.5 * r * r + t[1] + eps * t.squaredNorm() + 1.0 / (4.0 * eps);
  };
  syn->gradient = [=](const Vector& t) {
    const double r = A * t[0] - t[1];
    Vector g(2);
    g << r * A + 2.0 * eps * t[0], -r + 1.0 + 2.0 * eps * t[1];
    return g;
  };
  syn->hessian = [=](const Vector&) {
    Matrix h(2, 2);
    h << A * A + 2.0 * eps, -A, -A, 1.0 + 2.0 * eps;
    return h;
  };
  NegativeInstance inst;
  UserSpec u1 = make_user(1.0, 1.0, NormSpec::lq(1.0, 2), LossKind::Synthetic);
  u1.synthetic = syn;
  inst.users = {u1, make_user(1.0, 1.0, NormSpec::lq(1.0, 2))};
  inst.global = make_global(1.0, 2.0, NormSpec::lq(2.0, 2));
  inst.data.resize(2);
  inst.pref = Vector(2);
  inst.pref << 0.0, 1.0;
  return inst;
}

// Distance of (ρ, θ₁) to the strategic user's preference.
double negative_objective(const ModelState& st, const Vector& pref) {
  return (st.common - pref).norm() + (st.users[0] - pref).norm();
}

}  // namespace

ExperimentReport exp_negative_example(const RunConfig& c, const RunContext& ctx) {
  ExperimentReport rep;
  const double A = c.real("A");
  const double eps = std::min((A - 1.0) / 2.0, 1.0 / (2.0 * (A + 1.0)));
  const NegativeInstance inst = negative_instance(A, eps);
  Vector w(2);
  w << (1.0 + 2.0 * eps) / A, 1.0;

  const SolveReport honest = modified_solve(inst.users, inst.global, inst.data, 1, inst.pref);
  const SolveReport strategic = modified_solve(inst.users, inst.global, inst.data, 1, w);
  const double g_honest = negative_objective(honest.state, inst.pref);
  const double g_strategic = negative_objective(strategic.state, inst.pref);

  ModelState claimed = ModelState::zeros(2, 2);
  claimed.common = w;
  claimed.users = {w, w};
  const double claimed_loss = licchavi_loss(claimed, inst.users, inst.global, inst.data);
  const double solver_loss = licchavi_loss(strategic.state, inst.users, inst.global, inst.data);

  // Best strategic vote on a grid, reported to show whether any vote helps.
  const auto box = c.reals("search_box");
  const auto m = static_cast<std::size_t>(c.integer("search_points"));
  std::vector<double> gains(m * m, 0.0);
  parallel_for(m * m, ctx.jobs, [&](std::size_t idx) {
    const double f0 = m > 1 ? static_cast<double>(idx / m) / static_cast<double>(m - 1) : 0.5;
    const double f1 = m > 1 ? static_cast<double>(idx % m) / static_cast<double>(m - 1) : 0.5;
    Vector v(2);
    v << box[0] + f0 * (box[1] - box[0]), box[2] + f1 * (box[3] - box[2]);
    const SolveReport r = modified_solve(inst.users, inst.global, inst.data, 1, v);
    gains[idx] = g_honest / negative_objective(r.state, inst.pref);
  });
  const auto best = static_cast<std::size_t>(std::max_element(gains.begin(), gains.end()) - gains.begin());
  const double b0 = m > 1 ? static_cast<double>(best / m) / static_cast<double>(m - 1) : 0.5;
  const double b1 = m > 1 ? static_cast<double>(best % m) / static_cast<double>(m - 1) : 0.5;

  const double claimed_gain = A / (1.0 + 2.0 * eps);
  const double tol = c.real("tolerance");
  const double honest_err = honest.state.common.cwiseAbs().maxCoeff();
  const double honest_theta_err = honest.state.users[0].cwiseAbs().maxCoeff();
  const double strategic_err = (strategic.state.common - w).cwiseAbs().maxCoeff();
  const double gain = g_honest / g_strategic;

  rep.metrics["epsilon"] = eps;
  rep.metrics["strategic_w0"] = w[0];
  rep.metrics["strategic_w1"] = w[1];
  rep.metrics["honest_common_0"] = honest.state.common[0];
  rep.metrics["honest_common_1"] = honest.state.common[1];
  rep.metrics["honest_user1_0"] = honest.state.users[0][0];
  rep.metrics["honest_user1_1"] = honest.state.users[0][1];
  rep.metrics["strategic_common_0"] = strategic.state.common[0];
  rep.metrics["strategic_common_1"] = strategic.state.common[1];
  rep.metrics["strategic_user1_0"] = strategic.state.users[0][0];
  rep.metrics["strategic_user1_1"] = strategic.state.users[0][1];
  rep.metrics["honest_residual"] = honest.residual;
  rep.metrics["strategic_residual"] = strategic.residual;
  rep.metrics["objective_honest"] = g_honest;
  rep.metrics["objective_strategic"] = g_strategic;
  rep.metrics["gain"] = gain;
  rep.metrics["claimed_gain"] = claimed_gain;
  rep.metrics["claimed_point_loss"] = claimed_loss;
  rep.metrics["solver_loss"] = solver_loss;
  rep.metrics["claimed_point_excess_loss"] = claimed_loss - solver_loss;
  rep.metrics["best_grid_gain"] = gains[best];
  rep.metrics["best_grid_w0"] = box[0] + b0 * (box[1] - box[0]);
  rep.metrics["best_grid_w1"] = box[2] + b1 * (box[3] - box[2]);
  rep.metrics["honest_common_error"] = honest_err;
  rep.metrics["honest_user1_error"] = honest_theta_err;
  rep.metrics["strategic_common_error"] = strategic_err;

  rep.per_seed.columns = {"arm", "w0", "w1", "common_0", "common_1", "user1_0", "user1_1", "objective",
                          "residual"};
  rep.per_seed.rows.push_back({std::string("honest"), inst.pref[0], inst.pref[1], honest.state.common[0],
                               honest.state.common[1], honest.state.users[0][0], honest.state.users[0][1],
                               g_honest, honest.residual});
  rep.per_seed.rows.push_back({std::string("strategic"), w[0], w[1], strategic.state.common[0],
                               strategic.state.common[1], strategic.state.users[0][0],
                               strategic.state.users[0][1], g_strategic, strategic.residual});

  rep.add_check("honest_common", honest_err, "<=", tol);
  rep.add_check("honest_user1", honest_theta_err, "<=", tol);
  rep.add_check("strategic_common", strategic_err, "<=", tol);
  rep.add_check("gain", gain, ">=", claimed_gain - c.real("gain_slack"));
  rep.add_check("best_grid_gain_exceeds_one", gains[best], ">", 1.0);
  return rep;
}

// ---------------------------------------------------------------------------
// manipulability of attackers with power > 1, and the power-1 defense

ExperimentReport exp_manipulability(const RunConfig& c, const RunContext& ctx) {
  ExperimentReport rep;
  const Eigen::Index d = c.integer("d");
  const auto n = static_cast<std::size_t>(c.integer("n"));
  const auto n_targets = static_cast<std::size_t>(c.integer("targets"));
  const double radius = c.real("target_radius");
  const QueryDistribution dist = GaussianIid{Vector::Ones(d)};
  const double honest_noise = c.real("honest.noise");
  const double attacker_noise = c.real("attacker.noise");
  const std::size_t s = 1;  // user 0 is honest, user 1 attacks

  const std::vector<UserSpec> users{
      make_user(c.real("honest.weight"), c.real("honest.power"), NormSpec::lq(2.0, d)),
      make_user(c.real("attacker.weight"), c.real("attacker.power"), NormSpec::lq(2.0, d))};
  const GlobalSpec global = make_global(c.real("global.weight"), c.real("global.q0"), NormSpec::lq(2.0, d));
  const std::vector<UserSpec> defense_users{
      make_user(c.real("defense.honest_weight"), 1.0, NormSpec::lq(2.0, d)),
      make_user(c.real("defense.attacker_weight"), 1.0, NormSpec::lq(2.0, d))};
  const GlobalSpec defense_global = make_global(c.real("defense.global_weight"), 2.0, NormSpec::lq(2.0, d));
  const double lh = defense_users[0].weight, lb = defense_users[1].weight;

  struct Row {
    Vector target;
    double gap = 0.0, predict = 0.0, target_gap = 0.0, target_predict = 0.0;
    double drift = 0.0, bound = 0.0, defense_gap = 0.0, reference_gap = 0.0, lambda_slack = 0.0;
  };
  const std::size_t S = c.seeds.size();
  std::vector<Row> rows(S * n_targets);
  parallel_for(rows.size(), ctx.jobs, [&](std::size_t idx) {
    const std::uint64_t seed = c.seeds[idx / n_targets];
    const std::size_t ti = idx % n_targets;
    Rng rng(sub_seed(seed, kTagTheta));
    const Vector truth = ball_point(rng, d, c.real("honest.theta_radius"));
    const Dataset honest = gen_linear(truth, n, dist, honest_noise, sub_seed(seed, kTagHonest));
    Rng trng(sub_seed(seed, kTagTarget, ti));
    const Vector chi = ball_point(trng, d, radius);
    const std::vector<Dataset> base{honest, Dataset{}};
    Row row;
    row.target = chi;

    // Common attack, end to end through real data.
    const AttackPlan plan = plan_common_manipulation(chi, users, global, base, s, n);
    const Dataset fake =
        gen_strategic(plan.strategic_vector, n, LossKind::Linear, dist, attacker_noise, sub_seed(seed, kTagStrategic, ti));
    const SolveReport got = solve(users, global, {honest, fake});
    row.gap = (got.state.common - chi).norm();
    row.predict = (got.state.common - plan.expected_common).norm();

    // Target attack on the honest user's parameters.
    const AttackPlan tplan = plan_target_manipulation(0, chi, users, global, base, s, n);
    const Dataset tfake = gen_strategic(tplan.strategic_vector, n, LossKind::Linear, dist, attacker_noise,
                                        sub_seed(seed, kTagStrategic, ti, 1));
    const SolveReport tgot = solve(users, global, {honest, tfake});
    row.target_gap = (tgot.state.users[0] - chi).norm();
    row.target_predict = (tgot.state.users[0] - tplan.expected_target).norm();

    // Defense: power 1 everywhere. The attacker pushes far past χ.
    const SolveReport ref = solve(defense_users, defense_global, base);
    const Vector rho_h = ref.state.common;
    Vector dir = chi - rho_h;
    if (dir.norm() == 0.0) dir = Vector::Unit(d, 0);
    const Vector push = rho_h + c.real("defense.push") * dir / dir.norm();
    const Dataset dfake = gen_strategic(push, n, LossKind::Linear, dist, attacker_noise,
                                        sub_seed(seed, kTagStrategic, ti, 2));
    const SolveReport def = solve(defense_users, defense_global, {honest, dfake});
    const double delta_true = (rho_h - truth).norm();
    const double delta_opt = (rho_h - ref.state.users[0]).norm();
    row.drift = (def.state.common - rho_h).norm();
    row.bound = 4.0 * lh / (lh - lb) * std::max(delta_true, delta_opt) + c.real("epsilon");
    row.defense_gap = (def.state.common - chi).norm();
    row.reference_gap = (rho_h - chi).norm();
    // Smallness of λ₀ relative to the majority margin.
    const double rn = rho_h.norm();
    row.lambda_slack = rn == 0.0 ? std::numeric_limits<double>::infinity()
                                 : (lh - lb) / (2.0 * defense_global.power * rn) - defense_global.weight;
    rows[idx] = row;
  });

  rep.per_seed.columns = {"seed", "target_index", "chi_0", "chi_1", "gap", "predictability", "target_gap",
                          "target_predictability", "defense_drift", "defense_bound", "defense_gap",
                          "reference_gap"};
  double gap = 0, predict = 0, tgap = 0, tpredict = 0, drift_excess = -std::numeric_limits<double>::infinity();
  double min_lambda_slack = std::numeric_limits<double>::infinity(), reached = 0;
  for (std::size_t idx = 0; idx < rows.size(); ++idx) {
    const Row& r = rows[idx];
    rep.per_seed.rows.push_back({static_cast<std::int64_t>(c.seeds[idx / n_targets]),
                                 static_cast<std::int64_t>(idx % n_targets), r.target[0],
                                 d > 1 ? r.target[1] : 0.0, r.gap, r.predict, r.target_gap, r.target_predict,
                                 r.drift, r.bound, r.defense_gap, r.reference_gap});
    gap = std::max(gap, r.gap);
    predict = std::max(predict, r.predict);
    tgap = std::max(tgap, r.target_gap);
    tpredict = std::max(tpredict, r.target_predict);
    drift_excess = std::max(drift_excess, r.drift - r.bound);
    min_lambda_slack = std::min(min_lambda_slack, r.lambda_slack);
    if (r.defense_gap <= c.real("gap_tol")) reached += 1;
  }
  rep.metrics["max_gap"] = gap;
  rep.metrics["max_predictability"] = predict;
  rep.metrics["max_target_gap"] = tgap;
  rep.metrics["max_target_predictability"] = tpredict;
  rep.metrics["max_defense_drift_minus_bound"] = drift_excess;
  rep.metrics["defense_targets_reached"] = reached;
  rep.metrics["defense_min_lambda0_slack"] = min_lambda_slack;
  rep.add_check("common_gap", gap, "<=", c.real("gap_tol"));
  rep.add_check("common_predictability", predict, "<=", c.real("predict_tol"));
  rep.add_check("target_gap", tgap, "<=", c.real("gap_tol"));
  rep.add_check("defense_drift_within_bound", drift_excess, "<=", 0.0);
  rep.add_check("defense_lambda0_condition", min_lambda_slack, ">=", 0.0);
  return rep;
}

// ---------------------------------------------------------------------------
// absolute bound on ρ* when every power is 1

ExperimentReport exp_byzantine_absolute(const RunConfig& c, const RunContext& ctx) {
  ExperimentReport rep;
  const Eigen::Index d = c.integer("d");
  const auto N = static_cast<std::size_t>(c.integer("N"));
  const auto n = static_cast<std::size_t>(c.integer("n"));
  const std::vector<UserSpec> users(N, make_user(c.real("weight"), 1.0, NormSpec::lq(2.0, d)));
  const GlobalSpec global = make_global(c.real("global.weight"), c.real("global.q0"), NormSpec::lq(2.0, d));
  const double bound = absolute_common_bound(users, global);

  const std::vector<ByzantineMode> modes{HugeLabels{c.real("huge_magnitude")},
                                         RandomNoise{c.real("noise_scale")},
                                         FixedTarget{Vector::Constant(d, c.real("target_magnitude"))}};
  const std::vector<std::string> arms{"huge_labels", "random_noise", "fixed_target", "mixed", "no_data", "honest"};
  const std::size_t S = c.seeds.size(), Aa = arms.size();
  std::vector<double> norms(S * Aa), resid(S * Aa);
  parallel_for(S * Aa, ctx.jobs, [&](std::size_t idx) {
    const std::uint64_t seed = c.seeds[idx / Aa];
    const std::size_t ai = idx % Aa;
    std::vector<Dataset> data(N);
    Rng rng(sub_seed(seed, kTagTheta));
    for (std::size_t u = 0; u < N; ++u) {
      const std::uint64_t us = sub_seed(seed, kTagByzantine, ai, u);
      if (ai < 3) {
        data[u] = gen_byzantine(modes[ai], n, d, us);
      } else if (ai == 3) {
        data[u] = gen_byzantine(modes[u % 3], n, d, us);
      } else if (ai == 5) {
        data[u] = gen_linear(normal_vector(rng, d, 1.0), n, BoundedUniform{1.0}, 0.1, us);
      }
    }
    const SolveReport r = solve(users, global, data);
    norms[idx] = r.state.common.norm();
    resid[idx] = r.residual;
  });

  rep.per_seed.columns = {"seed", "arm", "common_norm", "residual"};
  for (std::size_t idx = 0; idx < norms.size(); ++idx) {
    rep.per_seed.rows.push_back(
        {static_cast<std::int64_t>(c.seeds[idx / Aa]), arms[idx % Aa], norms[idx], resid[idx]});
  }
  for (std::size_t ai = 0; ai < Aa; ++ai) {
    double m = 0.0;
    for (std::size_t si = 0; si < S; ++si) m = std::max(m, norms[si * Aa + ai]);
    rep.metrics["max_common_norm_" + arms[ai]] = m;
  }
  const double worst = max_of(norms);
  rep.metrics["bound"] = bound;
  rep.metrics["max_common_norm"] = worst;
  rep.metrics["min_slack"] = bound - worst;
  rep.metrics["max_residual"] = max_of(resid);
  rep.metrics["bound_slack_tol"] = c.real("slack_tol");
  rep.add_check("common_norm_within_bound", worst, "<=", bound + c.real("slack_tol"));
  return rep;
}

// ---------------------------------------------------------------------------
// resilience of a strict honest majority

namespace {

// One-dimensional linear data reduced to ½a(θ − θ̂)² + const.
struct Quadratic {
  double a = 0.0, center = 0.0;
};

Quadratic reduce_1d(const Dataset& data) {
  double a = 0.0, b = 0.0;
  for (const auto& qa : data.items) {
    a += qa.query[0] * qa.query[0];
    b += qa.query[0] * qa.answer;
  }
  return {a, a > 0.0 ? b / a : 0.0};
}

// min over θ of ½a(θ − c)² + λ|θ − ρ|, and its minimizer.
std::pair<double, double> huber_profile(const Quadratic& q, double lambda, double rho) {
  if (q.a == 0.0) return {0.0, rho};
  const double u = rho - q.center, k = lambda / q.a;
  if (std::abs(u) <= k) return {0.5 * q.a * u * u, rho};
  return {lambda * std::abs(u) - 0.5 * lambda * k, q.center + (u > 0 ? k : -k)};
}

}  // namespace

ExperimentReport exp_byzantine_majority(const RunConfig& c, const RunContext& ctx) {
  ExperimentReport rep;
  const auto theta = c.reals("honest.theta");
  const std::size_t H = theta.size();
  const auto B = static_cast<std::size_t>(c.integer("byzantine.count"));
  const double wh = c.real("honest.weight"), wb = c.real("byzantine.weight");
  const double wc = c.real("contrast.byzantine_weight");
  const auto n_h = static_cast<std::size_t>(c.integer("honest.n"));
  const auto n_b = static_cast<std::size_t>(c.integer("byzantine.n"));
  const double l0 = c.real("global.weight"), q0 = c.real("global.q0");
  const double mag = c.real("byzantine.magnitude");
  const double half = c.real("grid.half_width"), res = c.real("grid.resolution");
  const double lambda_h = wh * static_cast<double>(H), lambda_b = wb * static_cast<double>(B);
  const QueryDistribution dist = BoundedUniform{1.0};

  auto make_users = [&](double byz_weight) {
    std::vector<UserSpec> users(H, make_user(wh, 1.0, NormSpec::lq(2.0, 1)));
    for (std::size_t b = 0; b < B; ++b) users.push_back(make_user(byz_weight, 1.0, NormSpec::lq(2.0, 1)));
    return users;
  };
  const auto users = make_users(wb);
  const auto contrast_users = make_users(wc);
  const GlobalSpec global = make_global(l0, q0, NormSpec::lq(q0, 1));

  // Aggregate of the true preferences.
  const double rho_true = grid_median_aggregate(theta, std::vector<double>(H, wh), l0, q0, half, res);
  double delta_true = 0.0;
  for (double t : theta) delta_true = std::max(delta_true, std::abs(rho_true - t));

  const std::vector<ByzantineMode> modes{HugeLabels{mag}, RandomNoise{c.real("byzantine.noise_scale")},
                                         FixedTarget{Vector::Constant(1, mag)},
                                         FixedTarget{Vector::Constant(1, -mag)}};
  const std::vector<std::string> names{"huge_labels", "random_noise", "fixed_target_pos", "fixed_target_neg"};
  const std::size_t M = modes.size(), S = c.seeds.size();

  struct SeedResult {
    double rho_ref = 0.0, rho_grid = 0.0, delta_opt = 0.0, bound = 0.0;
    std::vector<double> drift, contrast_drift;
  };
  std::vector<SeedResult> results(S);
  parallel_for(S, ctx.jobs, [&](std::size_t si) {
    const std::uint64_t seed = c.seeds[si];
    std::vector<Dataset> data;
    for (std::size_t h = 0; h < H; ++h) {
      data.push_back(gen_linear(Vector::Constant(1, theta[h]), n_h, dist, c.real("honest.noise"),
                                sub_seed(seed, kTagHonest, h)));
    }
    data.resize(H + B);
    SeedResult r;
    const SolveReport ref = solve(users, global, data);
    r.rho_ref = ref.state.common[0];

    // Grid oracle on the exact honest profile; Byzantine users without data
    // collapse onto ρ and contribute nothing.
    std::vector<Quadratic> quads;
    for (std::size_t h = 0; h < H; ++h) quads.push_back(reduce_1d(data[h]));
    const auto steps = static_cast<std::int64_t>(std::llround(2.0 * half / res));
    double best_value = std::numeric_limits<double>::infinity();
    for (std::int64_t k = 0; k <= steps; ++k) {
      const double rho = -half + static_cast<double>(k) * res;
      double v = l0 * std::pow(std::abs(rho), q0);
      for (const auto& q : quads) v += huber_profile(q, wh, rho).first;
      if (v < best_value) {
        best_value = v;
        r.rho_grid = rho;
      }
    }
    for (const auto& q : quads) {
      r.delta_opt = std::max(r.delta_opt, std::abs(r.rho_grid - huber_profile(q, wh, r.rho_grid).second));
    }
    r.bound = 4.0 * lambda_h / (lambda_h - lambda_b) * std::max(delta_true, r.delta_opt) + c.real("epsilon");

    for (std::size_t m = 0; m < M; ++m) {
      std::vector<Dataset> attacked = data;
      for (std::size_t b = 0; b < B; ++b) {
        attacked[H + b] = gen_byzantine(modes[m], n_b, 1, sub_seed(seed, kTagByzantine, m, b), LossKind::Linear,
                                        dist, c.real("honest.noise"));
      }
      r.drift.push_back(std::abs(solve(users, global, attacked).state.common[0] - r.rho_ref));
      r.contrast_drift.push_back(std::abs(solve(contrast_users, global, attacked).state.common[0] -
                                          solve(contrast_users, global, data).state.common[0]));
    }
    results[si] = std::move(r);
  });

  rep.per_seed.columns = {"seed", "mode", "drift", "bound", "contrast_drift", "honest_common", "grid_common",
                          "delta_optimum"};
  double worst_excess = -std::numeric_limits<double>::infinity(), worst_grid = 0.0, worst_drift = 0.0;
  double contrast = 0.0, delta_opt = 0.0;
  for (std::size_t si = 0; si < S; ++si) {
    const auto& r = results[si];
    for (std::size_t m = 0; m < M; ++m) {
      rep.per_seed.rows.push_back({static_cast<std::int64_t>(c.seeds[si]), names[m], r.drift[m], r.bound,
                                   r.contrast_drift[m], r.rho_ref, r.rho_grid, r.delta_opt});
      worst_excess = std::max(worst_excess, r.drift[m] - r.bound);
      worst_drift = std::max(worst_drift, r.drift[m]);
      contrast = std::max(contrast, r.contrast_drift[m]);
    }
    worst_grid = std::max(worst_grid, std::abs(r.rho_ref - r.rho_grid));
    delta_opt = std::max(delta_opt, r.delta_opt);
  }
  rep.metrics["lambda_honest"] = lambda_h;
  rep.metrics["lambda_byzantine"] = lambda_b;
  rep.metrics["honest_aggregate_true"] = rho_true;
  rep.metrics["delta_true"] = delta_true;
  rep.metrics["max_delta_optimum"] = delta_opt;
  rep.metrics["max_drift"] = worst_drift;
  rep.metrics["max_drift_minus_bound"] = worst_excess;
  rep.metrics["max_solver_grid_gap"] = worst_grid;
  rep.metrics["contrast_byzantine_weight"] = wc;
  rep.metrics["contrast_max_drift"] = contrast;
  rep.metrics["epsilon"] = c.real("epsilon");
  rep.add_check("drift_within_bound", worst_excess, "<=", 0.0);
  rep.add_check("solver_matches_grid", worst_grid, "<=", c.real("grid_tol"));
  return rep;
}

// ---------------------------------------------------------------------------
// catalog

namespace {

using V = std::vector<GateViolation>;

ParamSpec P(std::string key, double v, std::string help) {
  return {std::move(key), ValueType::Real, Value(v), false, std::move(help)};
}
ParamSpec I(std::string key, std::int64_t v, std::string help) {
  return {std::move(key), ValueType::Integer, Value(v), false, std::move(help)};
}
ParamSpec Str(std::string key, std::string v, std::string help, bool required = false) {
  return {std::move(key), ValueType::String, Value(std::move(v)), required, std::move(help)};
}
ParamSpec RL(std::string key, std::vector<double> v, std::string help) {
  return {std::move(key), ValueType::RealList, Value(std::move(v)), false, std::move(help)};
}
ParamSpec IL(std::string key, std::vector<std::int64_t> v, std::string help) {
  return {std::move(key), ValueType::IntegerList, Value(std::move(v)), false, std::move(help)};
}

void gate_n_grid(const RunConfig& c, V& out) {
  const auto g = c.integers("n_grid");
  if (g.empty()) out.push_back({"n_grid", "parameter range", "n_grid must be nonempty"});
  for (auto n : g) {
    if (n < 1) out.push_back({"n_grid", "parameter range", "every n in n_grid must be at least 1"});
  }
}

void gate_range(const RunConfig& c, const std::string& key, V& out) {
  const auto r = c.reals(key);
  if (r.size() != 2 || !(r[0] > 0.0) || !(r[0] <= r[1])) {
    out.push_back({key, "parameter range", key + " must be [lo, hi] with 0 < lo <= hi"});
  }
}

V gate_gradient_pac(const RunConfig& c) {
  V out = common_gate(c);
  const auto& kind = c.text("kind");
  if (kind != "linear" && kind != "logistic") {
    out.push_back({"kind", "parameter range", "kind must be 'linear' or 'logistic'"});
  }
  if (static_cast<std::int64_t>(c.reals("theta_true").size()) != c.integer("d")) {
    out.push_back({"theta_true", "dimension", "theta_true must have d entries"});
  }
  gate_n_grid(c, out);
  require_positive_int(c, "test_points", out);
  require_positive_int(c, "calibration_n", out);
  if (!(c.real("query_half_width") > 0.0)) {
    out.push_back({"query_half_width", "parameter range", "query_half_width must be positive"});
  }
  if (!(c.real("alpha") >= 0.0 && c.real("alpha") < 1.0)) {
    out.push_back({"alpha", "gradient-PAC exponent", "alpha must lie in [0, 1)"});
  }
  return out;
}

V gate_pac_curve(const RunConfig& c) {
  V out = common_gate(c);
  const auto& mode = c.text("mode");
  if (mode != "weak" && mode != "strong") {
    out.push_back({"mode", "parameter range", "mode must be 'weak' or 'strong'"});
  }
  if (c.integer("N") < (mode == "strong" ? 2 : 1)) {
    out.push_back({"N", "parameter range", "strong mode needs at least one co-user"});
  }
  if (!(c.real("weight") > 0.0)) out.push_back({"weight", "lambda_n > 0", "weight must be positive"});
  const double f = c.real("byzantine_fraction");
  if (!(f >= 0.0 && f < 1.0)) {
    out.push_back({"byzantine_fraction", "parameter range", "byzantine_fraction must lie in [0, 1)"});
  }
  gate_n_grid(c, out);
  return out;
}

V gate_strategyproof(const RunConfig& c) {
  V out = common_gate(c);
  const auto N = c.integer("N");
  if (N < 2) out.push_back({"N", "parameter range", "need at least two users"});
  if (c.integer("s") < 0 || c.integer("s") >= N) out.push_back({"s", "parameter range", "s must index a user"});
  if (c.integer("t") < 0 || c.integer("t") >= N || c.integer("t") == c.integer("s")) {
    out.push_back({"t", "parameter range", "t must index a user other than s"});
  }
  if (c.integer("sweep_points") < 3 || c.integer("sweep_points") % 2 == 0) {
    out.push_back({"sweep_points", "parameter range", "sweep_points must be odd and at least 3 so the sweep "
                                                      "contains the honest vote"});
  }
  require_positive_int(c, "n", out);
  gate_range(c, "weight_range", out);
  gate_range(c, "diag_range", out);
  return out;
}

V gate_negative_example(const RunConfig& c) {
  V out;
  if (!(c.real("A") > 1.0)) out.push_back({"A", "A > 1", "the construction needs A > 1"});
  if (c.reals("search_box").size() != 4) {
    out.push_back({"search_box", "parameter range", "search_box must be [w0_lo, w0_hi, w1_lo, w1_hi]"});
  }
  require_positive_int(c, "search_points", out);
  return out;
}

V gate_manipulability(const RunConfig& c) {
  V out = common_gate(c);
  if (!(c.real("attacker.power") > 1.0)) {
    out.push_back({"attacker.power", "attacker power > 1", "the attack needs attacker.power > 1"});
  }
  if (!(c.real("honest.power") > 1.0)) {
    out.push_back({"honest.power", "attacker power > 1",
                   "the target attack needs the target user's power above 1"});
  }
  if (!(c.real("defense.honest_weight") > c.real("defense.attacker_weight"))) {
    out.push_back({"defense.honest_weight", "strict majority voting power",
                   "defense.honest_weight must exceed defense.attacker_weight"});
  }
  require_positive_int(c, "n", out);
  require_positive_int(c, "targets", out);
  return out;
}

V gate_byzantine_absolute(const RunConfig& c) {
  V out = common_gate(c);
  if (!(c.real("weight") > 0.0)) out.push_back({"weight", "lambda_n > 0", "weight must be positive"});
  require_positive_int(c, "N", out);
  return out;
}

V gate_byzantine_majority(const RunConfig& c) {
  V out = common_gate(c);
  const auto theta = c.reals("honest.theta");
  if (theta.empty()) out.push_back({"honest.theta", "parameter range", "need at least one honest user"});
  const double lh = c.real("honest.weight") * static_cast<double>(theta.size());
  const double lb = c.real("byzantine.weight") * static_cast<double>(c.integer("byzantine.count"));
  if (!(c.real("honest.weight") > 0.0) || !(c.real("byzantine.weight") > 0.0)) {
    out.push_back({"byzantine.weight", "lambda_n > 0", "weights must be positive"});
  }
  if (!(lh > lb)) {
    out.push_back({"byzantine.weight", "strict majority voting power",
                   "honest weight " + format_real(lh) + " must exceed Byzantine weight " + format_real(lb)});
  }
  if (out.empty() && c.real("global.q0") > 1.0) {
    const double rho = grid_median_aggregate(theta, std::vector<double>(theta.size(), c.real("honest.weight")),
                                             c.real("global.weight"), c.real("global.q0"),
                                             c.real("grid.half_width"), c.real("grid.resolution"));
    const double scale = std::pow(std::abs(rho), c.real("global.q0") - 1.0);
    if (scale > 0.0 && c.real("global.weight") > (lh - lb) / (2.0 * c.real("global.q0") * scale)) {
      out.push_back({"global.weight", "small common regularization",
                     "global.weight must not exceed (lambda_H - lambda_-H) / (2 q0 N(rho_H)^(q0-1))"});
    }
  }
  if (!(c.real("grid.resolution") > 0.0) || !(c.real("grid.half_width") > 0.0)) {
    out.push_back({"grid.resolution", "parameter range", "grid resolution and half width must be positive"});
  }
  require_positive_int(c, "honest.n", out);
  return out;
}

std::vector<ExperimentInfo> build_catalog() {
  std::vector<ExperimentInfo> cat;
  cat.push_back(
      {"byzantine_absolute", "absolute common bound",
       "Every solved common parameter under Byzantine floods stays inside the closed-form ball when all "
       "powers are 1.",
       {I("d", 2, "dimension"), I("N", 4, "number of users, all Byzantine"), I("n", 200, "items per user"),
        P("weight", 1.0, "lambda_n of every user"), P("global.weight", 1.0, "lambda_0"),
        P("global.q0", 2.0, "common power q0"), P("huge_magnitude", 1e9, "HugeLabels magnitude"),
        P("noise_scale", 10.0, "RandomNoise scale"), P("target_magnitude", 1e6, "FixedTarget entries"),
        P("slack_tol", 1e-6, "allowed excess over the bound")},
       gate_byzantine_absolute, exp_byzantine_absolute});
  cat.push_back(
      {"byzantine_majority", "strict majority resilience",
       "With a strict honest majority of voting power, Byzantine data moves the common parameter by at most "
       "4 lambda_H / (lambda_H - lambda_-H) Delta_H + epsilon.",
       {RL("honest.theta", {-1.0, 0.0, 1.0}, "honest preferences (d = 1)"),
        P("honest.weight", 1.0, "lambda of each honest user"), I("honest.n", 1000, "items per honest user"),
        P("honest.noise", 0.1, "label noise of honest data"), I("byzantine.count", 2, "Byzantine users"),
        P("byzantine.weight", 1.0, "lambda of each Byzantine user"), I("byzantine.n", 1000, "items per Byzantine user"),
        P("byzantine.magnitude", 1e6, "HugeLabels and FixedTarget magnitude"),
        P("byzantine.noise_scale", 10.0, "RandomNoise scale"), P("global.weight", 1e-3, "lambda_0"),
        P("global.q0", 2.0, "common power q0"), P("epsilon", 0.05, "additive slack in the bound"),
        P("grid.half_width", 10.0, "oracle grid half width"), P("grid.resolution", 1e-4, "oracle grid step"),
        P("grid_tol", 1e-3, "allowed solver versus grid gap"),
        P("contrast.byzantine_weight", 2.0, "Byzantine weight of the ungated contrast run")},
       gate_byzantine_majority, exp_byzantine_majority});
  cat.push_back(
      {"gradient_pac", "gradient-PAC data",
       "Fraction of test points where the empirical gradient-PAC inequality holds, as n grows.",
       {Str("kind", "linear", "linear or logistic", true), I("d", 2, "dimension"),
        IL("n_grid", {100, 1000, 10000}, "dataset sizes"), I("test_points", 500, "test points per seed"),
        P("test_radius", 5.0, "test points are uniform in this ball around theta_true"),
        P("noise", 0.1, "label noise (linear)"), RL("theta_true", {1.0, -1.0}, "true parameter"),
        P("query_half_width", 1.0, "queries uniform on [-M, M]^d"), P("B", 1.0, "constant B"),
        P("alpha", 0.75, "exponent alpha"), I("calibration_n", 10000, "size of the dataset used to fit A"),
        I("calibration_seed", 0, "seed of the calibration dataset"),
        P("min_fraction", 0.99, "required fraction at the largest n")},
       gate_gradient_pac, exp_gradient_pac});
  cat.push_back(
      {"manipulability", "arbitrary manipulability for power > 1",
       "An attacker with power above 1 drives the common parameter, or another user's parameter, to any "
       "target; the power-1 majority defense keeps drift within the resilience bound.",
       {I("d", 2, "dimension"), I("n", 10000, "items per user"), I("targets", 10, "targets per seed"),
        P("target_radius", 3.0, "targets uniform in this ball"), P("honest.weight", 1.0, "lambda of the honest user"),
        P("honest.power", 2.0, "power of the honest user"), P("honest.noise", 0.1, "honest label noise"),
        P("honest.theta_radius", 2.0, "honest preference uniform in this ball"),
        P("attacker.weight", 1.0, "lambda of the attacker"), P("attacker.power", 2.0, "attacker power"),
        P("attacker.noise", 0.0, "label noise of the strategic data"), P("global.weight", 1.0, "lambda_0"),
        P("global.q0", 2.0, "common power q0"), P("defense.honest_weight", 2.0, "honest lambda, defense run"),
        P("defense.attacker_weight", 1.0, "attacker lambda, defense run"),
        P("defense.global_weight", 0.1, "lambda_0, defense run"),
        P("defense.push", 1e6, "distance of the defense-run attacker vote past the honest optimum"),
        P("epsilon", 0.05, "additive slack in the defense bound"), P("gap_tol", 0.1, "allowed distance to target"),
        P("predict_tol", 0.05, "allowed gap between planned and realized optimum")},
       gate_manipulability, exp_manipulability});
  cat.push_back(
      {"negative_example", "non-coordinate-wise counterexample",
       "Two users in two dimensions where the first user's loss couples coordinates; compares the strategic "
       "user's honest and strategic votes.",
       {P("A", 10.0, "coupling constant A > 1"), P("tolerance", 1e-3, "tolerance on the solved points"),
        P("gain_slack", 0.05, "allowed shortfall of the gain"), I("search_points", 41, "grid points per axis"),
        RL("search_box", {-0.5, 0.5, -0.5, 1.5}, "grid box [w0_lo, w0_hi, w1_lo, w1_hi]")},
       gate_negative_example, exp_negative_example});
  cat.push_back(
      {"pac_curve", "weak and strong PAC learning",
       "Error of a user's learned parameter against its preference as every dataset grows; strong mode adds "
       "Byzantine co-users.",
       {Str("mode", "weak", "weak or strong", true), I("d", 2, "dimension"), I("N", 5, "number of users"),
        IL("n_grid", {100, 1000, 10000}, "dataset sizes"), P("noise", 1.0, "label noise"),
        P("theta_scale", 1.0, "preferences drawn N(0, scale^2)"), P("weight", 1.0, "lambda_n"),
        P("global.weight", 1.0, "lambda_0"), P("global.q0", 2.0, "common power q0"),
        P("byzantine_fraction", 0.5, "share of co-users replaced in strong mode"),
        P("byzantine.magnitude", 1e6, "HugeLabels and FixedTarget magnitude"),
        P("byzantine.noise_scale", 10.0, "RandomNoise scale"),
        P("decay_ratio", 0.25, "required error ratio largest n / smallest n"),
        P("byzantine_ratio", 2.0, "allowed Byzantine to clean error ratio")},
       gate_pac_curve, exp_pac_curve});
  cat.push_back(
      {"strategyproof", "strategyproofness under coordinate-wise queries",
       "Sweeps a strategic user's vote per coordinate in a separable instance and checks that no vote beats "
       "the honest one.",
       {I("d", 2, "dimension"), I("N", 5, "number of users"), I("s", 0, "strategic user"),
        I("t", 1, "target user"), I("n", 200, "items per user"), P("noise", 0.5, "label noise"),
        P("theta_scale", 2.0, "preferences drawn N(0, scale^2)"), I("sweep_points", 41, "votes per coordinate"),
        P("sweep_half_width", 6.0, "sweep half width around the honest vote"),
        RL("weight_range", {0.5, 2.0}, "lambda_n drawn uniform in [lo, hi]"),
        RL("diag_range", {0.5, 2.0}, "norm diagonal drawn uniform in [lo, hi]"),
        P("global.weight", 0.1, "lambda_0"), P("global.q0", 2.0, "common power q0"),
        P("clamp_probe", 1e8, "extreme vote used to find the clamp interval"),
        P("advantage_tol", 1e-4, "allowed strategic advantage"), P("clamp_tol", 1e-6, "clamp structure tolerance"),
        P("monotone_tol", 1e-12, "allowed decrease between sweep points"),
        P("agreement_tol", 1e-5, "joint versus coordinate-wise solver agreement")},
       gate_strategyproof, exp_strategyproof});
  return cat;
}

}  // namespace

const std::vector<ExperimentInfo>& catalog() {
  static const std::vector<ExperimentInfo> cat = build_catalog();
  return cat;
}

const ExperimentInfo* find_experiment(const std::string& name) {
  for (const auto& e : catalog()) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

ExperimentReport run_experiment(const RunConfig& config, const RunContext& context) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  const ExperimentInfo* info = find_experiment(config.experiment);
  try {
    if (!info) throw std::invalid_argument("unknown experiment '" + config.experiment + "'");
    if (config.seeds.empty()) throw std::invalid_argument("no seeds");
    if (info->gate) {
      const auto v = info->gate(config);
      if (!v.empty()) throw PreconditionError(v.front().tag + ": " + v.front().message);
    }
    rep = info->run(config, context);
  } catch (const std::exception& e) {
    rep = ExperimentReport{};
    rep.complete = false;
    rep.error = e.what();
  }
  rep.name = config.experiment;
  rep.claim = info ? info->claim : "";
  rep.config = config;
  rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace licchavi
