#include "licchavi/adversary.hpp"

#include "licchavi/geometry.hpp"
#include "licchavi/losses.hpp"

namespace licchavi {

namespace {

void require_attacker(const UserSpec& u, const char* who) {
  if (!(u.power > 1.0)) {
    throw PreconditionError(std::string(who) + ": power must exceed 1 (power 1 resists this attack)");
  }
  if (!u.norm.is_identity()) throw PreconditionError(std::string(who) + ": norm must be an unscaled lq");
}

}  // namespace

Vector profile_gradient(const std::vector<UserSpec>& users, const GlobalSpec& global,
                        const std::vector<Dataset>& data, std::size_t s, const Vector& rho,
                        double step) {
  Vector g(rho.size());
  for (Eigen::Index j = 0; j < rho.size(); ++j) {
    Vector hi = rho, lo = rho;
    hi[j] += step;
    lo[j] -= step;
    g[j] = (common_profile(users, global, data, s, hi) - common_profile(users, global, data, s, lo)) /
           (2.0 * step);
  }
  return g;
}

AttackPlan plan_common_manipulation(const Vector& target, const std::vector<UserSpec>& users,
                                    const GlobalSpec& global, const std::vector<Dataset>& data,
                                    std::size_t s, std::size_t dataset_size,
                                    const SolverConfig& config) {
  if (s >= users.size()) throw std::out_of_range("plan_common_manipulation: attacker index");
  if (dataset_size < 1) throw PreconditionError("plan_common_manipulation: dataset size must be >= 1");
  require_attacker(users[s], "plan_common_manipulation");
  require_dimension(target, global.norm.dimension(), "attack target");

  const Vector g = profile_gradient(users, global, data, s, target);
  const Vector x = counter_gradient(users[s].norm, users[s].power, users[s].weight, -g);

  AttackPlan plan;
  plan.attacker = s;
  plan.strategic_vector = target - x;
  plan.target_common = target;
  plan.dataset_size = dataset_size;
  const SolveReport rep = modified_solve(users, global, data, s, plan.strategic_vector, config);
  plan.expected_common = rep.state.common;
  plan.achieved_gap = (rep.state.common - target).norm();
  return plan;
}

AttackPlan plan_target_manipulation(std::size_t target_user, const Vector& target,
                                    const std::vector<UserSpec>& users, const GlobalSpec& global,
                                    const std::vector<Dataset>& data, std::size_t s,
                                    std::size_t dataset_size, const SolverConfig& config) {
  if (target_user >= users.size() || s >= users.size()) {
    throw std::out_of_range("plan_target_manipulation: user index");
  }
  if (target_user == s) throw PreconditionError("plan_target_manipulation: target must differ from attacker");
  require_attacker(users[target_user], "plan_target_manipulation (target user)");
  require_attacker(users[s], "plan_target_manipulation (attacker)");

  // θₜ* = χ iff ∇Lₜ(χ) + λₜ∇‖·‖^{qₜ}(χ − ρ⊙) = 0.
  const Vector gt = independent_loss(users[target_user], target, data[target_user]).gradient;
  const Vector x = counter_gradient(users[target_user].norm, users[target_user].power,
                                    users[target_user].weight, -gt);
  const Vector rho_target = target - x;

  AttackPlan plan = plan_common_manipulation(rho_target, users, global, data, s, dataset_size, config);
  const SolveReport rep = modified_solve(users, global, data, s, plan.strategic_vector, config);
  plan.expected_target = rep.state.users[target_user];
  plan.achieved_gap = (plan.expected_target - target).norm();
  return plan;
}

Dataset honest_report(std::size_t /*s*/, const Vector& theta_true, std::size_t n, LossKind kind,
                      const QueryDistribution& dist, double noise_sigma, std::uint64_t seed) {
  return gen_strategic(theta_true, n, kind, dist, noise_sigma, seed);
}

}  // namespace licchavi
