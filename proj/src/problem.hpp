#pragma once

// Joint minimization engine behind solve(), modified_solve() and
// common_profile().
//
// Variables live in one stacked vector z = [ρ, θ₁, ..., θ_N]. A user slot is
// free, fixed to a given vector (the forced strategic user, whose data is
// dropped), or excluded from the objective. ρ itself may be frozen. All
// minimization runs over an affine substitution z = z0 + T y, which is how
// fixed slots and, during polishing, tied kink coordinates are removed.

#include "licchavi/losses.hpp"
#include "licchavi/solver.hpp"

#include <optional>

namespace licchavi::detail {

enum class Role { Free, Fixed, Excluded };

struct Roles {
  std::vector<Role> role;
  std::vector<Vector> fixed;  // fixed[n] used iff role[n] == Role::Fixed
  std::optional<Vector> frozen_common;

  static Roles all_free(std::size_t n);
};

struct Substitution {
  Vector z0;
  Matrix T;
  std::vector<std::vector<Eigen::Index>> column_slots;
};

struct Evaluation {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
  Vector block_scale;  // per block (0 = ρ, n+1 = θ_n): magnitude of cancelling terms
};

class JointProblem {
 public:
  JointProblem(const std::vector<UserSpec>& users, const GlobalSpec& global,
               const std::vector<Dataset>& data, Roles roles);

  Eigen::Index dimension() const { return d_; }
  std::size_t num_users() const { return users_.size(); }
  Eigen::Index size() const { return static_cast<Eigen::Index>(users_.size() + 1) * d_; }

  Vector pack(const ModelState& state) const;
  ModelState unpack(const Vector& z) const;
  Vector initial_point(const std::optional<ModelState>& init) const;

  /// Smoothed objective (mu = 0 is exact, with zero derivatives at kinks).
  void evaluate(const Vector& z, double mu, bool want_value, bool want_gradient,
                bool want_hessian, Evaluation& out) const;
  double value(const Vector& z) const;

  /// Relative min-norm subgradient over the free variables.
  double residual(const Vector& z) const;

  Substitution free_substitution() const;
  /// Ties every kink coordinate within tau (relative) of its kink.
  Substitution tied_substitution(const Vector& z, double tau) const;

  /// Damped Newton with a derivative-based line search over y, stopping once
  /// the relative reduced gradient is at most gtol.
  Vector minimize(const Substitution& sub, const Vector& z_start, double mu,
                  std::size_t max_iterations, std::size_t& iterations, double gtol) const;

  SolveReport run(const SolverConfig& config) const;

 private:
  bool user_active(std::size_t n) const { return roles_.role[n] != Role::Excluded; }
  bool theta_free(std::size_t n) const { return roles_.role[n] == Role::Free; }
  bool common_free() const { return !roles_.frozen_common.has_value(); }
  Eigen::Index slot(std::size_t block, Eigen::Index j) const {
    return static_cast<Eigen::Index>(block) * d_ + j;
  }

  std::vector<UserSpec> users_;
  GlobalSpec global_;
  Roles roles_;
  Eigen::Index d_ = 0;
  std::vector<std::optional<IndependentLoss>> losses_;
};

}  // namespace licchavi::detail
