#pragma once

// Per-pair losses, the independent loss Lₙ = Σ ℓ + Φₙ, and the empirical
// gradient-PAC margin.

#include "licchavi/core.hpp"
#include "licchavi/kernels/kernels.hpp"

namespace licchavi {

struct LossEval {
  double value = 0.0;
  Vector gradient;
};

double sigmoid(double z);
/// log(1 + e^z) without overflow.
double softplus(double z);

LossEval linear_loss(const Vector& theta, const QueryAnswer& qa);
/// Throws std::invalid_argument unless qa.answer is ±1.
LossEval logistic_loss(const Vector& theta, const QueryAnswer& qa);

/// Sum of per-pair losses plus Φₙ. Throws PreconditionError if the dataset
/// does not match spec.loss_kind.
LossEval independent_loss(const UserSpec& spec, const Vector& theta, const Dataset& data);

/// (θ − θ†)ᵀ∇L(θ) − [A n min{r, r²} − B n^α r] with r = ‖θ − θ†‖₂.
/// Nonnegative iff the gradient-PAC inequality holds at θ.
double gradient_pac_margin(const Dataset& data, const UserSpec& spec, const Vector& theta_true,
                           const Vector& theta, const GradientPacConstants& constants);

/// Independent loss compiled for repeated evaluation: linear data is reduced
/// to sufficient statistics, logistic data is packed for the SIMD kernels.
class IndependentLoss {
 public:
  IndependentLoss(const UserSpec& spec, const Dataset& data, Eigen::Index d);

  Eigen::Index dimension() const { return d_; }
  /// L ≡ 0 (no data, no Φ, not synthetic).
  bool is_zero() const { return zero_; }
  /// Every query touches at most one coordinate, so L splits as Σ_j f_j(θ_j).
  bool is_coordinatewise() const { return coordinatewise_; }

  double value(const Vector& theta) const;
  Vector gradient(const Vector& theta) const;
  void evaluate(const Vector& theta, double* value, Vector* gradient, Matrix* hessian) const;
  /// Magnitude of the terms that cancel inside the gradient at θ, given that
  /// gradient; used to make residuals relative.
  double gradient_scale(const Vector& theta, const Vector& gradient) const;

  /// Restriction to coordinate j (requires is_coordinatewise()).
  double coordinate_value(Eigen::Index j, double t) const;
  double coordinate_derivative(Eigen::Index j, double t) const;
  double coordinate_curvature(Eigen::Index j, double t) const;
  /// True if f_j is constant (coordinate j never queried and Φ = 0).
  bool coordinate_constant(Eigen::Index j) const;

 private:
  LossKind kind_;
  Eigen::Index d_;
  double ridge_;
  bool zero_ = false;
  bool coordinatewise_ = false;
  std::shared_ptr<const SyntheticLoss> synthetic_;
  // linear
  Matrix gram_;
  Vector xty_;
  double yty_ = 0.0;
  // logistic
  kernels::PackedDataset packed_;
  std::vector<std::vector<std::pair<double, double>>> axis_items_;  // (x_ij, y_i) per axis
};

}  // namespace licchavi
