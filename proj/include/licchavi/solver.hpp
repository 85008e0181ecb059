#pragma once

// The Licchavi loss and its minimizers.
//
//   Loss(ρ, θ) = Σₙ Lₙ(θₙ) + Σₙ λₙ 𝒩ₙ^{qₙ}(θₙ − ρ) + λ₀ 𝒩₀^{q₀}(ρ)
//
// solve() smooths every kink (|t| → sqrt(t² + μ²), max → log-sum-exp at
// temperature μ), follows μ down a geometric schedule with damped Newton, and
// then polishes: coordinates sitting on a kink are tied to it exactly and the
// remaining smooth problem is solved again at μ = 0. The reported residual is
// the min-norm element of the true subdifferential, relative to the size of
// the terms that cancel in it.

#include "licchavi/core.hpp"
#include "licchavi/geometry.hpp"

#include <functional>
#include <optional>

namespace licchavi {

struct SolverConfig {
  double tolerance = 1e-7;
  std::size_t max_iterations = 200000;
  // smoothing schedule μ_k = mu_start · mu_factor^k down to mu_end
  double mu_start = 1.0;
  double mu_factor = 0.1;
  double mu_end = 1e-10;
  std::optional<ModelState> init;
};

struct SolveReport {
  ModelState state;
  double loss_value = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Exact Loss(ρ, θ) from the raw data.
double licchavi_loss(const ModelState& state, const std::vector<UserSpec>& users,
                     const GlobalSpec& global, const std::vector<Dataset>& data);

SolveReport solve(const std::vector<UserSpec>& users, const GlobalSpec& global,
                  const std::vector<Dataset>& data, const SolverConfig& config = {});

/// Minimizes the modified loss in which user s reports θₛ = w and no data;
/// data[s] is ignored. The returned state has users[s] = w.
SolveReport modified_solve(const std::vector<UserSpec>& users, const GlobalSpec& global,
                           const std::vector<Dataset>& data, std::size_t s, const Vector& w,
                           const SolverConfig& config = {});

struct ProfileResult {
  double value = 0.0;
  std::vector<Vector> users;  // minimizing θₙ (user `exclude` left empty)
};

/// min over θ₋ₛ of the loss without user s, at fixed ρ. exclude = nullopt
/// keeps every user.
ProfileResult common_profile_detail(const std::vector<UserSpec>& users, const GlobalSpec& global,
                                    const std::vector<Dataset>& data,
                                    std::optional<std::size_t> exclude, const Vector& rho,
                                    const SolverConfig& config = {});
double common_profile(const std::vector<UserSpec>& users, const GlobalSpec& global,
                      const std::vector<Dataset>& data, std::optional<std::size_t> exclude,
                      const Vector& rho);

/// Minimizes a convex function of one variable given its one-sided
/// derivatives: subgradient(t) returns [f'₋(t), f'₊(t)]. Bisection on the
/// sign of the subgradient down to adjacent doubles; returns a point whose
/// subdifferential contains 0, or an optimal bracket edge.
double solve_1d(const std::function<Interval(double)>& subgradient, Interval bracket);

/// As solve_1d, doubling the bracket outward from `bracket` until it
/// sandwiches a sign change. Throws PreconditionError if none is found.
double solve_1d_unbounded(const std::function<Interval(double)>& subgradient, Interval bracket);

/// Separable problems (users' losses each touch one coordinate per query,
/// ℓ1 user norms with power 1, 𝒩₀ a scaled ℓ_{q₀}) solved as d independent
/// one-dimensional problems. Throws PreconditionError otherwise.
SolveReport solve_coordinatewise(const std::vector<UserSpec>& users, const GlobalSpec& global,
                                 const std::vector<Dataset>& data, const SolverConfig& config = {});
/// Coordinate-wise counterpart of modified_solve.
SolveReport solve_coordinatewise(const std::vector<UserSpec>& users, const GlobalSpec& global,
                                 const std::vector<Dataset>& data, std::size_t s, const Vector& w,
                                 const SolverConfig& config = {});

/// Closed-form bound on ‖ρ*‖₂ when every user has power 1.
double absolute_common_bound(const std::vector<UserSpec>& users, const GlobalSpec& global);

}  // namespace licchavi
