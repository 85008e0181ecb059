#pragma once

// Scaled ℓq norms N(x) = ‖diag ⊙ x‖_q, the subdifferential of N^p, and the
// counter-gradient construction used by the manipulation attacks.

#include "licchavi/core.hpp"

#include <vector>

namespace licchavi {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
  bool degenerate() const { return lo == hi; }
};

/// Shape of the exact subdifferential described by a SubgradientSet.
///  - Box: the product of the per-coordinate intervals (exact).
///  - DualBall: { diag ⊙ v : ‖v‖_{dual_q} ≤ radius }, occurring at x = 0 with
///    p = 1; the intervals are its bounding box.
///  - Simplex: ℓ∞ ties; coordinate j in the tie set equals scale_j μ_j with μ
///    on the probability simplex; intervals are [0, scale_j] (ordered).
enum class SubgradientShape { Box, DualBall, Simplex };

struct SubgradientSet {
  Vector representative;
  std::vector<Interval> free_coords;
  SubgradientShape shape = SubgradientShape::Box;
  double dual_q = 1.0;  // DualBall only
  double radius = 0.0;  // DualBall only
  Vector scale;         // DualBall: diag; Simplex: per-coordinate extreme value

  bool differentiable() const;
  /// Exact membership test (tolerance `tol` per coordinate or on the norm).
  bool contains(const Vector& g, double tol = 1e-12) const;
  /// Euclidean projection onto the set.
  Vector project(const Vector& m) const;
  SubgradientSet scaled_by(double factor) const;
};

double norm_eval(const NormSpec& spec, const Vector& x);

/// Coordinates of an l∞ norm whose scaled magnitudes lie within `tie_tol` of
/// the max count as tied; callers pass the rounding error of x.
SubgradientSet norm_power_subgradient(const NormSpec& spec, double power, const Vector& x,
                                      double tie_tol = 0.0);

/// Returns x with g ∈ ∂(weight · ‖x‖_q^power). Identity scaling only; power > 1.
Vector counter_gradient(const NormSpec& spec, double power, double weight, const Vector& g);

/// Norm-equivalence constants: lower · ‖x‖₂ ≤ N(x) ≤ upper · ‖x‖₂.
struct NormEquivalence {
  double lower = 1.0;
  double upper = 1.0;
};
NormEquivalence norm_equivalence(const NormSpec& spec);

/// flip coordinate j of x.
Vector reflect(const Vector& x, Eigen::Index j);

/// Smooth surrogate of N^p: |t| → sqrt(t² + μ²) coordinate-wise and, for
/// q = ∞, max → μ-temperature log-sum-exp. μ = 0 evaluates the exact
/// function, with derivatives defined as 0 where it is not differentiable.
struct SmoothValue {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;  // left empty unless requested
};
SmoothValue smoothed_norm_power(const NormSpec& spec, double power, const Vector& x, double mu,
                                bool want_hessian);

}  // namespace licchavi
