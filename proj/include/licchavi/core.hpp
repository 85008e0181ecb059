#pragma once

// Domain types shared by every module: vectors, norms, user and global
// regularization specs, datasets, model state.

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace licchavi {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws DimensionError unless `v` has `expected` entries.
void require_dimension(const Vector& v, Eigen::Index expected, const char* what);
/// Throws std::invalid_argument if any entry of `v` is NaN or infinite.
void require_finite(const Vector& v, const char* what);

/// Exponent of an ℓq norm. Infinity is a distinguished state rather than a
/// float infinity so arithmetic paths never see `inf`.
class Exponent {
 public:
  static Exponent finite(double q);
  static Exponent infinity() { return Exponent(); }

  bool is_infinite() const { return infinite_; }
  /// Finite value; throws std::logic_error when infinite.
  double value() const;
  bool operator==(const Exponent&) const = default;

 private:
  Exponent() = default;
  double value_ = 0.0;
  bool infinite_ = true;
};

/// x ↦ ‖diag ⊙ x‖_q.
struct NormSpec {
  Exponent q = Exponent::finite(2.0);
  Vector diag;

  static NormSpec lq(double q, Eigen::Index d);
  static NormSpec linf(Eigen::Index d);
  static NormSpec scaled(Exponent q, Vector diag);

  Eigen::Index dimension() const { return diag.size(); }
  bool is_identity() const;
};

enum class LossKind { Linear, Logistic, Synthetic };

const char* to_string(LossKind kind);

/// Closed-form convex independent loss (used where a user's loss is given
/// directly instead of being induced by a dataset).
struct SyntheticLoss {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;
};

/// Separable convex parameter regularization Φ(θ) = ridge · Σ θ_j².
struct ParamReg {
  double ridge = 0.0;
};

struct UserSpec {
  double weight = 1.0;  // λₙ
  double power = 1.0;   // qₙ
  NormSpec norm;
  LossKind loss_kind = LossKind::Linear;
  ParamReg param_reg;
  std::shared_ptr<const SyntheticLoss> synthetic;  // required iff Synthetic
};

struct GlobalSpec {
  double weight = 1.0;  // λ₀
  double power = 2.0;   // q₀
  NormSpec norm;
};

struct QueryAnswer {
  Vector query;
  double answer = 0.0;
};

struct Dataset {
  std::vector<QueryAnswer> items;
  int owner = -1;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
};

/// Common parameters ρ plus one parameter vector per user, all of dimension d.
struct ModelState {
  Vector common;
  std::vector<Vector> users;

  static ModelState zeros(std::size_t num_users, Eigen::Index d);
  Eigen::Index dimension() const { return common.size(); }
  std::size_t num_users() const { return users.size(); }
};

struct GradientPacConstants {
  double A = 0.0;
  double B = 0.0;
  double alpha = 0.0;
};

struct Violation {
  std::string assumption;
  std::string message;
};

/// Checks the standing assumptions on a configuration. Violations are data:
/// an empty result means the configuration is admissible.
std::vector<Violation> validate_config(const std::vector<UserSpec>& users,
                                       const GlobalSpec& global, Eigen::Index dimension);

/// Checks that `data` is consistent with `spec` (dimension, label domain).
std::vector<Violation> validate_dataset(const UserSpec& spec, const Dataset& data,
                                        Eigen::Index dimension);

}  // namespace licchavi
