#pragma once

// Manipulation attacks for attackers whose discrepancy power exceeds 1.
//
// The common attack cancels the profile gradient g = ∇ρ L*₋ₛ(χ): it picks x
// with λₛ∇‖x‖^{qₛ} = −g and reports w = χ − x, which makes χ stationary for
// the modified loss. The target attack first finds the ρ⊙ that makes user
// t's optimum equal χ and then runs the common attack toward ρ⊙. Every plan
// verifies itself with modified_solve.

#include "licchavi/core.hpp"
#include "licchavi/datagen.hpp"
#include "licchavi/solver.hpp"

namespace licchavi {

struct AttackPlan {
  std::size_t attacker = 0;
  Vector strategic_vector;  // w
  Vector target_common;     // χ for the common attack, ρ⊙ for the target attack
  Vector expected_common;   // ρ*(w) from modified_solve
  Vector expected_target;   // θₜ*(w), target attack only
  std::size_t dataset_size = 10000;
  double achieved_gap = 0.0;  // ‖ρ*(w) − χ‖₂, or ‖θₜ*(w) − χ‖₂ for the target attack
};

/// Central finite-difference gradient of common_profile without user s.
Vector profile_gradient(const std::vector<UserSpec>& users, const GlobalSpec& global,
                        const std::vector<Dataset>& data, std::size_t s, const Vector& rho,
                        double step = 1e-5);

AttackPlan plan_common_manipulation(const Vector& target, const std::vector<UserSpec>& users,
                                    const GlobalSpec& global, const std::vector<Dataset>& data,
                                    std::size_t s, std::size_t dataset_size = 10000,
                                    const SolverConfig& config = {});

AttackPlan plan_target_manipulation(std::size_t target_user, const Vector& target,
                                    const std::vector<UserSpec>& users, const GlobalSpec& global,
                                    const std::vector<Dataset>& data, std::size_t s,
                                    std::size_t dataset_size = 10000,
                                    const SolverConfig& config = {});

/// Honest data for user s: gen_strategic with w = θ†ₛ.
Dataset honest_report(std::size_t s, const Vector& theta_true, std::size_t n, LossKind kind,
                      const QueryDistribution& dist, double noise_sigma, std::uint64_t seed);

}  // namespace licchavi
