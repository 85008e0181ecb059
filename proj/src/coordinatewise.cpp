#include "licchavi/losses.hpp"
#include "licchavi/solver.hpp"
#include "problem.hpp"

#include <algorithm>
#include <cmath>

namespace licchavi {

namespace {

void require_separable(const std::vector<UserSpec>& users, const GlobalSpec& global,
                       const std::vector<IndependentLoss>& losses, std::optional<std::size_t> forced) {
  for (std::size_t n = 0; n < users.size(); ++n) {
    const auto& u = users[n];
    if (u.norm.q.is_infinite() || u.norm.q.value() != 1.0 || u.power != 1.0) {
      throw PreconditionError("solve_coordinatewise: user " + std::to_string(n) +
                              " must use a scaled l1 norm with power 1");
    }
    if (forced && *forced == n) continue;
    if (!losses[n].is_coordinatewise()) {
      throw PreconditionError("solve_coordinatewise: user " + std::to_string(n) +
                              " has queries touching several coordinates");
    }
  }
  if (global.norm.q.is_infinite() || global.norm.q.value() != global.power) {
    throw PreconditionError("solve_coordinatewise: common norm exponent must equal the common power");
  }
}

double sgn(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

SolveReport run_coordinatewise(const std::vector<UserSpec>& users, const GlobalSpec& global,
                               const std::vector<Dataset>& data, std::optional<std::size_t> forced,
                               const Vector& w, const SolverConfig& config) {
  const Eigen::Index d = global.norm.dimension();
  if (data.size() != users.size()) throw DimensionError("solve_coordinatewise: one dataset per user");
  const auto violations = validate_config(users, global, d);
  if (!violations.empty()) {
    throw PreconditionError("solve_coordinatewise: " + violations.front().assumption + ": " +
                            violations.front().message);
  }
  static const Dataset kEmpty;
  std::vector<IndependentLoss> losses;
  losses.reserve(users.size());
  for (std::size_t n = 0; n < users.size(); ++n) {
    if (users[n].loss_kind == LossKind::Synthetic) {
      throw PreconditionError("solve_coordinatewise: synthetic losses are not coordinate-wise");
    }
    losses.emplace_back(users[n], forced && *forced == n ? kEmpty : data[n], d);
  }
  require_separable(users, global, losses, forced);
  if (forced) require_dimension(w, d, "forced user vector");

  const double q0 = global.power;
  std::size_t evaluations = 0;
  ModelState state = ModelState::zeros(users.size(), d);
  for (Eigen::Index j = 0; j < d; ++j) {
    // Profile derivative of user n at ρ: clamp(f'(ρ), −c, c) since θ(ρ) is
    // ρ clamped to the interval where |f'| ≤ c.
    auto subgradient = [&](double rho) {
      ++evaluations;
      const double c0 = global.weight * std::pow(global.norm.diag[j], q0);
      double g = c0 * q0 * sgn(rho) * std::pow(std::abs(rho), q0 - 1.0);
      Interval out{g, g};
      for (std::size_t n = 0; n < users.size(); ++n) {
        const double c = users[n].weight * users[n].norm.diag[j];
        if (forced && *forced == n) {
          const double u = rho - w[j];
          if (u == 0.0) {
            out.lo -= c;
            out.hi += c;
          } else {
            out.lo += c * sgn(u);
            out.hi += c * sgn(u);
          }
          continue;
        }
        if (losses[n].coordinate_constant(j)) continue;
        const double h = std::clamp(losses[n].coordinate_derivative(j, rho), -c, c);
        out.lo += h;
        out.hi += h;
      }
      return out;
    };
    const double rho = solve_1d_unbounded(subgradient, {-1.0, 1.0});
    state.common[j] = rho;

    for (std::size_t n = 0; n < users.size(); ++n) {
      if (forced && *forced == n) {
        state.users[n][j] = w[j];
        continue;
      }
      const double c = users[n].weight * users[n].norm.diag[j];
      auto user_sub = [&](double t) {
        const double f = losses[n].coordinate_derivative(j, t);
        if (t < rho) return Interval{f - c, f - c};
        if (t > rho) return Interval{f + c, f + c};
        return Interval{f - c, f + c};
      };
      const Interval at = user_sub(rho);
      state.users[n][j] =
          at.lo <= 0.0 && at.hi >= 0.0 ? rho : solve_1d_unbounded(user_sub, {rho - 1.0, rho + 1.0});
    }
  }

  detail::Roles roles = detail::Roles::all_free(users.size());
  if (forced) {
    roles.role[*forced] = detail::Role::Fixed;
    roles.fixed[*forced] = w;
  }
  const detail::JointProblem problem(users, global, data, roles);
  const Vector z = problem.pack(state);
  SolveReport rep;
  rep.state = state;
  rep.loss_value = problem.value(z);
  rep.residual = problem.residual(z);
  rep.iterations = evaluations;
  rep.converged = rep.residual <= config.tolerance;
  return rep;
}

}  // namespace

SolveReport solve_coordinatewise(const std::vector<UserSpec>& users, const GlobalSpec& global,
                                 const std::vector<Dataset>& data, const SolverConfig& config) {
  return run_coordinatewise(users, global, data, std::nullopt, Vector(), config);
}

SolveReport solve_coordinatewise(const std::vector<UserSpec>& users, const GlobalSpec& global,
                                 const std::vector<Dataset>& data, std::size_t s, const Vector& w,
                                 const SolverConfig& config) {
  if (s >= users.size()) throw std::out_of_range("solve_coordinatewise: strategic user index");
  return run_coordinatewise(users, global, data, s, w, config);
}

}  // namespace licchavi
