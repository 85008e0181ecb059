#include "licchavi/solver.hpp"

#include "licchavi/losses.hpp"
#include "problem.hpp"

#include <cmath>
#include <limits>

namespace licchavi {

using detail::JointProblem;
using detail::Role;
using detail::Roles;

double licchavi_loss(const ModelState& state, const std::vector<UserSpec>& users,
                     const GlobalSpec& global, const std::vector<Dataset>& data) {
  const Eigen::Index d = state.common.size();
  if (state.users.size() != users.size() || data.size() != users.size()) {
    throw DimensionError("licchavi_loss: users, parameters and datasets must have equal counts");
  }
  require_dimension(global.norm.diag, d, "licchavi_loss global norm");
  double total = global.weight * std::pow(norm_eval(global.norm, state.common), global.power);
  for (std::size_t n = 0; n < users.size(); ++n) {
    require_dimension(state.users[n], d, "licchavi_loss user parameter");
    total += independent_loss(users[n], state.users[n], data[n]).value;
    total += users[n].weight *
             std::pow(norm_eval(users[n].norm, state.users[n] - state.common), users[n].power);
  }
  return total;
}

SolveReport solve(const std::vector<UserSpec>& users, const GlobalSpec& global,
                  const std::vector<Dataset>& data, const SolverConfig& config) {
  return JointProblem(users, global, data, Roles::all_free(users.size())).run(config);
}

SolveReport modified_solve(const std::vector<UserSpec>& users, const GlobalSpec& global,
                           const std::vector<Dataset>& data, std::size_t s, const Vector& w,
                           const SolverConfig& config) {
  if (s >= users.size()) throw std::out_of_range("modified_solve: strategic user index");
  Roles roles = Roles::all_free(users.size());
  roles.role[s] = Role::Fixed;
  roles.fixed[s] = w;
  return JointProblem(users, global, data, std::move(roles)).run(config);
}

ProfileResult common_profile_detail(const std::vector<UserSpec>& users, const GlobalSpec& global,
                                    const std::vector<Dataset>& data,
                                    std::optional<std::size_t> exclude, const Vector& rho,
                                    const SolverConfig& config) {
  Roles roles = Roles::all_free(users.size());
  if (exclude) {
    if (*exclude >= users.size()) throw std::out_of_range("common_profile: excluded user index");
    roles.role[*exclude] = Role::Excluded;
  }
  require_finite(rho, "common_profile rho");
  roles.frozen_common = rho;
  const SolveReport rep = JointProblem(users, global, data, std::move(roles)).run(config);
  return {rep.loss_value, rep.state.users};
}

double common_profile(const std::vector<UserSpec>& users, const GlobalSpec& global,
                      const std::vector<Dataset>& data, std::optional<std::size_t> exclude,
                      const Vector& rho) {
  return common_profile_detail(users, global, data, exclude, rho).value;
}

namespace {

Interval checked(const std::function<Interval(double)>& f, double t) {
  const Interval s = f(t);
  if (std::isnan(s.lo) || std::isnan(s.hi) || s.lo > s.hi) {
    throw PreconditionError("solve_1d: subgradient oracle returned an invalid interval");
  }
  return s;
}

}  // namespace

double solve_1d(const std::function<Interval(double)>& subgradient, Interval bracket) {
  double a = bracket.lo, b = bracket.hi;
  if (!(a <= b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw PreconditionError("solve_1d: bracket must be a finite interval");
  }
  const Interval sa = checked(subgradient, a);
  if (sa.hi >= 0.0) return a;
  const Interval sb = checked(subgradient, b);
  if (sb.lo <= 0.0) return b;
  double ga = sa.hi, gb = sb.lo;
  while (true) {
    const double m = a + 0.5 * (b - a);
    if (m <= a || m >= b) break;
    const Interval s = checked(subgradient, m);
    if (s.hi < 0.0) {
      a = m;
      ga = s.hi;
    } else if (s.lo > 0.0) {
      b = m;
      gb = s.lo;
    } else {
      return m;
    }
  }
  return -ga <= gb ? a : b;
}

double solve_1d_unbounded(const std::function<Interval(double)>& subgradient, Interval bracket) {
  double lo = bracket.lo, hi = bracket.hi;
  double width = std::max(hi - lo, 1.0);
  for (int k = 0; checked(subgradient, lo).lo > 0.0; ++k) {
    lo -= width;
    width *= 2.0;
    if (k > 2000 || !std::isfinite(lo)) throw PreconditionError("solve_1d: no minimizer to the left");
  }
  width = std::max(hi - lo, 1.0);
  for (int k = 0; checked(subgradient, hi).hi < 0.0; ++k) {
    hi += width;
    width *= 2.0;
    if (k > 2000 || !std::isfinite(hi)) throw PreconditionError("solve_1d: no minimizer to the right");
  }
  return solve_1d(subgradient, {lo, hi});
}

double absolute_common_bound(const std::vector<UserSpec>& users, const GlobalSpec& global) {
  double numerator = 0.0;
  for (const auto& u : users) {
    if (u.power != 1.0) throw PreconditionError("absolute_common_bound: every user power must be 1");
    numerator += u.weight * norm_equivalence(u.norm).upper;
  }
  const double a0 = norm_equivalence(global.norm).lower;
  const double denom = std::pow(a0, global.power) * global.weight * global.power;
  return std::pow(numerator / denom, 1.0 / (global.power - 1.0));
}

}  // namespace licchavi
