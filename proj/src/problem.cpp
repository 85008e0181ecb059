#include "problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace licchavi::detail {

Roles Roles::all_free(std::size_t n) {
  Roles r;
  r.role.assign(n, Role::Free);
  r.fixed.assign(n, Vector());
  return r;
}

JointProblem::JointProblem(const std::vector<UserSpec>& users, const GlobalSpec& global,
                           const std::vector<Dataset>& data, Roles roles)
    : users_(users), global_(global), roles_(std::move(roles)), d_(global.norm.dimension()) {
  if (data.size() != users_.size()) {
    throw DimensionError("solver: one dataset per user is required");
  }
  if (roles_.role.size() != users_.size()) throw std::logic_error("JointProblem: roles size");
  roles_.fixed.resize(users_.size());
  const auto violations = validate_config(users_, global_, d_);
  if (!violations.empty()) {
    throw PreconditionError("solver: " + violations.front().assumption + ": " +
                            violations.front().message);
  }
  if (roles_.frozen_common) require_dimension(*roles_.frozen_common, d_, "frozen common");
  losses_.resize(users_.size());
  for (std::size_t n = 0; n < users_.size(); ++n) {
    if (roles_.role[n] == Role::Fixed) {
      require_dimension(roles_.fixed[n], d_, "forced user vector");
      require_finite(roles_.fixed[n], "forced user vector");
    }
    if (roles_.role[n] == Role::Free) losses_[n].emplace(users_[n], data[n], d_);
  }
}

Vector JointProblem::pack(const ModelState& state) const {
  Vector z = Vector::Zero(size());
  if (state.common.size() == d_) z.head(d_) = state.common;
  for (std::size_t n = 0; n < users_.size() && n < state.users.size(); ++n) {
    if (state.users[n].size() == d_) z.segment(slot(n + 1, 0), d_) = state.users[n];
  }
  return z;
}

ModelState JointProblem::unpack(const Vector& z) const {
  ModelState s;
  s.common = z.head(d_);
  s.users.resize(users_.size());
  for (std::size_t n = 0; n < users_.size(); ++n) {
    s.users[n] = z.segment(slot(n + 1, 0), d_);
  }
  return s;
}

Vector JointProblem::initial_point(const std::optional<ModelState>& init) const {
  Vector z = init ? pack(*init) : Vector::Zero(size());
  if (roles_.frozen_common) z.head(d_) = *roles_.frozen_common;
  for (std::size_t n = 0; n < users_.size(); ++n) {
    if (roles_.role[n] == Role::Fixed) z.segment(slot(n + 1, 0), d_) = roles_.fixed[n];
    if (roles_.role[n] == Role::Excluded) z.segment(slot(n + 1, 0), d_).setZero();
  }
  return z;
}

void JointProblem::evaluate(const Vector& z, double mu, bool want_value, bool want_gradient,
                            bool want_hessian, Evaluation& out) const {
  const Eigen::Index m = size();
  const std::size_t blocks = users_.size() + 1;
  out.value = 0.0;
  if (want_gradient) {
    out.gradient = Vector::Zero(m);
    out.block_scale = Vector::Zero(static_cast<Eigen::Index>(blocks));
  }
  if (want_hessian) out.hessian = Matrix::Zero(m, m);

  const Vector rho = z.head(d_);
  {
    const SmoothValue sv = smoothed_norm_power(global_.norm, global_.power, rho, mu, want_hessian);
    out.value += global_.weight * sv.value;
    if (want_gradient) {
      out.gradient.head(d_) += global_.weight * sv.gradient;
      out.block_scale[0] = std::max(out.block_scale[0], global_.weight * sv.gradient.cwiseAbs().maxCoeff());
    }
    if (want_hessian) out.hessian.topLeftCorner(d_, d_) += global_.weight * sv.hessian;
  }

  for (std::size_t n = 0; n < users_.size(); ++n) {
    if (!user_active(n)) continue;
    const auto& u = users_[n];
    const Eigen::Index off = slot(n + 1, 0);
    const Vector theta = z.segment(off, d_);
    const SmoothValue sv = smoothed_norm_power(u.norm, u.power, theta - rho, mu, want_hessian);
    out.value += u.weight * sv.value;
    if (want_gradient) {
      const Vector g = u.weight * sv.gradient;
      out.gradient.segment(off, d_) += g;
      out.gradient.head(d_) -= g;
      const double mag = g.cwiseAbs().maxCoeff();
      out.block_scale[0] = std::max(out.block_scale[0], mag);
      out.block_scale[static_cast<Eigen::Index>(n + 1)] =
          std::max(out.block_scale[static_cast<Eigen::Index>(n + 1)], mag);
    }
    if (want_hessian) {
      const Matrix h = u.weight * sv.hessian;
      out.hessian.block(off, off, d_, d_) += h;
      out.hessian.topLeftCorner(d_, d_) += h;
      out.hessian.block(off, 0, d_, d_) -= h;
      out.hessian.block(0, off, d_, d_) -= h;
    }
    if (!theta_free(n) || losses_[n]->is_zero()) continue;
    double v = 0.0;
    Vector g;
    Matrix h;
    losses_[n]->evaluate(theta, want_value ? &v : nullptr, want_gradient ? &g : nullptr,
                         want_hessian ? &h : nullptr);
    out.value += v;
    if (want_gradient) {
      out.gradient.segment(off, d_) += g;
      auto& sc = out.block_scale[static_cast<Eigen::Index>(n + 1)];
      sc = std::max(sc, losses_[n]->gradient_scale(theta, g));
    }
    if (want_hessian) out.hessian.block(off, off, d_, d_) += h;
  }
}

double JointProblem::value(const Vector& z) const {
  Evaluation e;
  evaluate(z, 0.0, true, false, false, e);
  return e.value;
}

double JointProblem::residual(const Vector& z) const {
  const std::size_t N = users_.size();
  const Vector rho = z.head(d_);
  std::vector<Vector> g(N + 1, Vector::Zero(d_));
  std::vector<double> scale(N + 1, 0.0);

  const SubgradientSet gs =
      norm_power_subgradient(global_.norm, global_.power, rho).scaled_by(global_.weight);
  g[0] = gs.representative;
  scale[0] = g[0].cwiseAbs().maxCoeff();

  struct Term {
    std::size_t n;
    SubgradientSet set;
  };
  std::vector<Term> terms;
  std::vector<Vector> c(N, Vector::Zero(d_));
  for (std::size_t n = 0; n < N; ++n) {
    if (!user_active(n)) continue;
    const Vector theta = z.segment(slot(n + 1, 0), d_);
    if (theta_free(n) && !losses_[n]->is_zero()) {
      g[n + 1] = losses_[n]->gradient(theta);
      scale[n + 1] = losses_[n]->gradient_scale(theta, g[n + 1]);
    }
    // θ − ρ is only known to rounding, which decides l∞ ties.
    const double rounding =
        32.0 * std::numeric_limits<double>::epsilon() * users_[n].norm.diag.cwiseAbs().maxCoeff() *
        (theta.cwiseAbs().maxCoeff() + rho.cwiseAbs().maxCoeff());
    SubgradientSet set = norm_power_subgradient(users_[n].norm, users_[n].power, theta - rho, rounding)
                             .scaled_by(users_[n].weight);
    double extreme = set.representative.cwiseAbs().maxCoeff();
    for (const auto& iv : set.free_coords) extreme = std::max({extreme, std::abs(iv.lo), std::abs(iv.hi)});
    scale[0] = std::max(scale[0], extreme);
    scale[n + 1] = std::max(scale[n + 1], extreme);
    c[n] = set.representative;
    if (!set.differentiable()) terms.push_back({n, std::move(set)});
  }

  Vector sum_c = Vector::Zero(d_);
  for (std::size_t n = 0; n < N; ++n) {
    if (user_active(n)) sum_c += c[n];
  }
  const double ref = 1.0 + *std::max_element(scale.begin(), scale.end());
  for (int sweep = 0; sweep < 5000 && !terms.empty(); ++sweep) {
    double change = 0.0;
    for (auto& t : terms) {
      const std::size_t n = t.n;
      const Vector a = g[n + 1];
      const Vector b = g[0] - (sum_c - c[n]);
      Vector target;
      if (theta_free(n) && common_free()) {
        target = 0.5 * (b - a);
      } else if (theta_free(n)) {
        target = -a;
      } else if (common_free()) {
        target = b;
      } else {
        continue;
      }
      const Vector next = t.set.project(target);
      change = std::max(change, (next - c[n]).cwiseAbs().maxCoeff());
      sum_c += next - c[n];
      c[n] = next;
    }
    if (change <= 1e-17 * ref) break;
  }

  double res = 0.0;
  if (common_free()) res = (g[0] - sum_c).cwiseAbs().maxCoeff() / (1.0 + scale[0]);
  for (std::size_t n = 0; n < N; ++n) {
    if (!theta_free(n)) continue;
    res = std::max(res, (g[n + 1] + c[n]).cwiseAbs().maxCoeff() / (1.0 + scale[n + 1]));
  }
  return res;
}

namespace {

struct UnionFind {
  std::vector<Eigen::Index> parent;
  explicit UnionFind(Eigen::Index n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  }
  Eigen::Index find(Eigen::Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(Eigen::Index a, Eigen::Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

Substitution JointProblem::free_substitution() const { return tied_substitution(Vector(), -1.0); }

Substitution JointProblem::tied_substitution(const Vector& z, double tau) const {
  const Eigen::Index m = size();
  std::vector<bool> constant(static_cast<std::size_t>(m), false);
  Vector constant_value = Vector::Zero(m);
  if (roles_.frozen_common) {
    for (Eigen::Index j = 0; j < d_; ++j) {
      constant[j] = true;
      constant_value[j] = (*roles_.frozen_common)[j];
    }
  }
  for (std::size_t n = 0; n < users_.size(); ++n) {
    if (theta_free(n)) continue;
    for (Eigen::Index j = 0; j < d_; ++j) {
      constant[slot(n + 1, j)] = true;
      constant_value[slot(n + 1, j)] = roles_.role[n] == Role::Fixed ? roles_.fixed[n][j] : 0.0;
    }
  }

  UnionFind uf(m);
  struct LinearTie {
    Eigen::Index slot, rho_slot, leader, leader_rho;
    double ratio;
  };
  std::vector<LinearTie> ties;
  std::vector<bool> dependent(static_cast<std::size_t>(m), false);
  if (tau >= 0.0) {
    const Vector rho = z.head(d_);
    const double rho_scale = 1.0 + rho.cwiseAbs().maxCoeff();
    for (std::size_t n = 0; n < users_.size(); ++n) {
      if (!user_active(n)) continue;
      const auto& spec = users_[n];
      const Vector u = z.segment(slot(n + 1, 0), d_) - rho;
      const bool l1 = !spec.norm.q.is_infinite() && spec.norm.q.value() == 1.0;
      if (l1) {
        for (Eigen::Index j = 0; j < d_; ++j) {
          if (std::abs(spec.norm.diag[j] * u[j]) <= tau * (1.0 + std::abs(rho[j]))) {
            uf.unite(slot(0, j), slot(n + 1, j));
          }
        }
      } else if (spec.power == 1.0 && norm_eval(spec.norm, u) <= tau * rho_scale) {
        for (Eigen::Index j = 0; j < d_; ++j) uf.unite(slot(0, j), slot(n + 1, j));
      } else if (spec.norm.q.is_infinite() && theta_free(n)) {
        // Near-maximal coordinates follow the largest one:
        // θᵢ − ρᵢ = rᵢ (θₖ − ρₖ) with |Dᵢ rᵢ| = Dₖ.
        const Vector du = spec.norm.diag.cwiseProduct(u);
        Eigen::Index k = 0;
        const double top = du.cwiseAbs().maxCoeff(&k);
        if (!(top > tau * rho_scale)) continue;
        for (Eigen::Index j = 0; j < d_; ++j) {
          if (j == k || std::abs(du[j]) < top - tau * rho_scale) continue;
          const double r = (du[j] < 0.0) == (du[k] < 0.0) ? 1.0 : -1.0;
          ties.push_back({slot(n + 1, j), slot(0, j), slot(n + 1, k), slot(0, k),
                          r * spec.norm.diag[k] / spec.norm.diag[j]});
          dependent[slot(n + 1, j)] = true;
        }
      }
    }
  }

  // Every group with a constant member is constant; the others become one
  // reduced variable each.
  std::vector<Eigen::Index> group_const(static_cast<std::size_t>(m), -1);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (constant[i] && group_const[uf.find(i)] < 0) group_const[uf.find(i)] = i;
  }
  Substitution sub;
  sub.z0 = Vector::Zero(m);
  std::vector<Eigen::Index> column_of(static_cast<std::size_t>(m), -1);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (dependent[i]) continue;
    const Eigen::Index root = uf.find(i);
    if (group_const[root] >= 0) {
      sub.z0[i] = constant_value[group_const[root]];
      continue;
    }
    if (column_of[root] < 0) {
      column_of[root] = static_cast<Eigen::Index>(sub.column_slots.size());
      sub.column_slots.emplace_back();
    }
    sub.column_slots[column_of[root]].push_back(i);
  }
  sub.T = Matrix::Zero(m, static_cast<Eigen::Index>(sub.column_slots.size()));
  for (std::size_t k = 0; k < sub.column_slots.size(); ++k) {
    for (const auto i : sub.column_slots[k]) sub.T(i, static_cast<Eigen::Index>(k)) = 1.0;
  }
  for (const auto& t : ties) {
    sub.z0[t.slot] = sub.z0[t.rho_slot] + t.ratio * (sub.z0[t.leader] - sub.z0[t.leader_rho]);
    sub.T.row(t.slot) = sub.T.row(t.rho_slot) + t.ratio * (sub.T.row(t.leader) - sub.T.row(t.leader_rho));
  }
  return sub;
}

Vector JointProblem::minimize(const Substitution& sub, const Vector& z_start, double mu,
                              std::size_t max_iterations, std::size_t& iterations, double gtol) const {
  const auto r = static_cast<Eigen::Index>(sub.column_slots.size());
  if (r == 0) return sub.z0;
  Vector y(r);
  for (Eigen::Index k = 0; k < r; ++k) {
    double acc = 0.0;
    for (const auto i : sub.column_slots[k]) acc += z_start[i];
    y[k] = acc / static_cast<double>(sub.column_slots[k].size());
  }
  Vector z = sub.z0 + sub.T * y;

  auto column_scale = [&](const Vector& block_scale, Eigen::Index k) {
    double s = 0.0;
    for (const auto i : sub.column_slots[k]) s = std::max(s, block_scale[i / d_]);
    return s;
  };
  auto slope = [&](const Vector& zt, const Vector& dz) {
    Evaluation e;
    evaluate(zt, mu, false, true, false, e);
    return e.gradient.dot(dz);
  };

  Evaluation e;
  double best_rel = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    evaluate(z, mu, false, true, true, e);
    const Vector gy = sub.T.transpose() * e.gradient;
    double rel = 0.0;
    for (Eigen::Index k = 0; k < r; ++k) {
      rel = std::max(rel, std::abs(gy[k]) / (1.0 + column_scale(e.block_scale, k)));
    }
    if (!(rel > gtol)) break;
    // Rounding floors the reachable gradient at tiny μ; stop once it stalls.
    if (rel < 0.5 * best_rel) {
      best_rel = rel;
      stalled = 0;
    } else if (++stalled >= 10) {
      break;
    }
    const Matrix hy = sub.T.transpose() * e.hessian * sub.T;

    Vector p;
    double delta = 1e-14 * (1.0 + hy.diagonal().cwiseAbs().maxCoeff());
    for (int attempt = 0; attempt < 40; ++attempt) {
      Eigen::LDLT<Matrix> ldlt(hy + delta * Matrix::Identity(r, r));
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        p = ldlt.solve(-gy);
        if (p.allFinite() && gy.dot(p) < 0.0) break;
      }
      p.resize(0);
      delta *= 100.0;
    }
    if (p.size() == 0) p = -gy;

    const Vector dz = sub.T * p;
    const double d0 = gy.dot(p);
    // Line search on the directional derivative φ'(t) = ∇F(z + t dz)·dz,
    // which stays accurate where objective differences would cancel.
    double lo = 0.0, hi = 1.0;
    double dhi = slope(z + dz, dz);
    if (dhi <= 0.0) {
      lo = 1.0;
      while (dhi < 0.5 * d0 && lo < 0x1p50) {
        hi = 2.0 * lo;
        dhi = slope(z + hi * dz, dz);
        if (dhi > 0.0) break;
        lo = hi;
      }
    }
    double t = lo;
    if (dhi > 0.0) {
      double dlo = lo == 0.0 ? d0 : slope(z + lo * dz, dz);
      for (int k = 0; k < 80 && dlo < 0.5 * d0; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double dm = slope(z + mid * dz, dz);
        if (dm <= 0.0) {
          lo = mid;
          dlo = dm;
        } else {
          hi = mid;
        }
      }
      t = lo;
    }
    ++iterations;
    if (t == 0.0) break;
    const Vector y_next = y + t * p;
    if ((y_next - y).cwiseAbs().maxCoeff() <= 1e-17 * (1.0 + y.cwiseAbs().maxCoeff())) break;
    y = y_next;
    z = sub.z0 + sub.T * y;
  }
  return z;
}

SolveReport JointProblem::run(const SolverConfig& config) const {
  if (!(config.tolerance > 0.0)) throw std::invalid_argument("SolverConfig: tolerance must be > 0");
  if (!(config.mu_factor > 0.0 && config.mu_factor < 1.0) || !(config.mu_end > 0.0)) {
    throw std::invalid_argument("SolverConfig: invalid smoothing schedule");
  }
  std::size_t iterations = 0;
  auto budget = [&](std::size_t cap) {
    return iterations >= config.max_iterations ? std::size_t{0}
                                               : std::min(cap, config.max_iterations - iterations);
  };

  Vector z = initial_point(config.init);
  const Substitution free = free_substitution();
  for (double mu = config.mu_start; mu >= config.mu_end * (1.0 - 1e-9); mu *= config.mu_factor) {
    // The smoothed optimum is O(μ) away from the true one, so each level
    // only needs a gradient accuracy proportional to μ.
    z = minimize(free, z, mu, budget(200), iterations, std::max(1e-15, 1e-3 * mu));
  }

  Vector best = z;
  double best_res = residual(z);
  for (const double tau : {0.0, 1e-9, 1e-7, 1e-5, 1e-3}) {
    if (best_res <= config.tolerance) break;
    Vector zc = z;
    for (int round = 0; round < 3; ++round) {
      const Substitution sub = tau == 0.0 ? free : tied_substitution(zc, tau);
      zc = minimize(sub, zc, 0.0, budget(100), iterations, 1e-15);
      const double r = residual(zc);
      if (r < best_res) {
        best_res = r;
        best = zc;
      }
      if (r <= config.tolerance || tau == 0.0) break;
    }
  }

  SolveReport rep;
  rep.state = unpack(best);
  for (std::size_t n = 0; n < users_.size(); ++n) {
    if (roles_.role[n] == Role::Excluded) rep.state.users[n] = Vector();
  }
  rep.loss_value = value(best);
  rep.residual = best_res;
  rep.iterations = iterations;
  rep.converged = best_res <= config.tolerance;
  return rep;
}

}  // namespace licchavi::detail
