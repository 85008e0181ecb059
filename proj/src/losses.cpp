#include "licchavi/losses.hpp"

#include <cmath>

namespace licchavi {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

LossEval linear_loss(const Vector& theta, const QueryAnswer& qa) {
  require_dimension(qa.query, theta.size(), "linear_loss");
  const double r = theta.dot(qa.query) - qa.answer;
  return {0.5 * r * r, r * qa.query};
}

LossEval logistic_loss(const Vector& theta, const QueryAnswer& qa) {
  require_dimension(qa.query, theta.size(), "logistic_loss");
  if (qa.answer != 1.0 && qa.answer != -1.0) {
    throw std::invalid_argument("logistic_loss: answer must be +1 or -1");
  }
  const double z = theta.dot(qa.query);
  const double coef = sigmoid(z) - (qa.answer > 0.0 ? 1.0 : 0.0);
  return {softplus(-qa.answer * z), coef * qa.query};
}

LossEval independent_loss(const UserSpec& spec, const Vector& theta, const Dataset& data) {
  const Eigen::Index d = theta.size();
  const auto violations = validate_dataset(spec, data, d);
  if (!violations.empty()) throw PreconditionError("independent_loss: " + violations.front().message);

  LossEval out{spec.param_reg.ridge * theta.squaredNorm(), 2.0 * spec.param_reg.ridge * theta};
  if (spec.loss_kind == LossKind::Synthetic) {
    if (!spec.synthetic) throw PreconditionError("independent_loss: synthetic kind without a loss");
    out.value += spec.synthetic->value(theta);
    out.gradient += spec.synthetic->gradient(theta);
    return out;
  }
  for (const auto& qa : data.items) {
    const LossEval e =
        spec.loss_kind == LossKind::Linear ? linear_loss(theta, qa) : logistic_loss(theta, qa);
    out.value += e.value;
    out.gradient += e.gradient;
  }
  return out;
}

double gradient_pac_margin(const Dataset& data, const UserSpec& spec, const Vector& theta_true,
                           const Vector& theta, const GradientPacConstants& constants) {
  if (data.empty()) throw PreconditionError("gradient_pac_margin: empty dataset");
  require_dimension(theta_true, theta.size(), "gradient_pac_margin");
  const Vector delta = theta - theta_true;
  const double r = delta.norm();
  const double n = static_cast<double>(data.size());
  const double lhs = delta.dot(independent_loss(spec, theta, data).gradient);
  const double rhs =
      constants.A * n * std::min(r, r * r) - constants.B * std::pow(n, constants.alpha) * r;
  return lhs - rhs;
}

IndependentLoss::IndependentLoss(const UserSpec& spec, const Dataset& data, Eigen::Index d)
    : kind_(spec.loss_kind), d_(d), ridge_(spec.param_reg.ridge), synthetic_(spec.synthetic) {
  const auto violations = validate_dataset(spec, data, d);
  if (!violations.empty()) throw PreconditionError("IndependentLoss: " + violations.front().message);
  if (kind_ == LossKind::Synthetic && !synthetic_) {
    throw PreconditionError("IndependentLoss: synthetic kind without a loss");
  }
  zero_ = kind_ != LossKind::Synthetic && data.empty() && ridge_ == 0.0;

  coordinatewise_ = kind_ != LossKind::Synthetic;
  axis_items_.assign(static_cast<std::size_t>(d), {});
  for (const auto& qa : data.items) {
    Eigen::Index nonzero = 0;
    Eigen::Index axis = 0;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (qa.query[j] != 0.0) {
        ++nonzero;
        axis = j;
      }
    }
    if (nonzero > 1) coordinatewise_ = false;
    if (nonzero == 1) axis_items_[static_cast<std::size_t>(axis)].emplace_back(qa.query[axis], qa.answer);
  }
  if (!coordinatewise_) axis_items_.clear();

  if (kind_ == LossKind::Linear) {
    gram_ = Matrix::Zero(d, d);
    xty_ = Vector::Zero(d);
    if (!data.empty()) {
      const auto packed = kernels::pack(data, d);
      const auto& k = kernels::active();
      k.weighted_gram(packed, nullptr, gram_.data());
      k.transpose_times(packed, packed.answers.data(), xty_.data());
      yty_ = k.dot(packed.answers.data(), packed.answers.data(), packed.n);
    }
  } else if (kind_ == LossKind::Logistic) {
    packed_ = kernels::pack(data, d);
  }
}

void IndependentLoss::evaluate(const Vector& theta, double* value, Vector* gradient,
                               Matrix* hessian) const {
  require_dimension(theta, d_, "IndependentLoss");
  double v = ridge_ * theta.squaredNorm();
  Vector g = 2.0 * ridge_ * theta;
  Matrix h;
  if (hessian) h = 2.0 * ridge_ * Matrix::Identity(d_, d_);

  switch (kind_) {
    case LossKind::Linear: {
      const Vector gt = gram_ * theta;
      v += 0.5 * theta.dot(gt) - theta.dot(xty_) + 0.5 * yty_;
      g += gt - xty_;
      if (hessian) h += gram_;
      break;
    }
    case LossKind::Logistic: {
      const std::size_t n = packed_.n;
      if (n == 0) break;
      const auto& k = kernels::active();
      std::vector<double> z(n), resid(n), curv(hessian ? n : 0);
      k.margins(packed_, theta.data(), z.data());
      if (value) {
        for (std::size_t i = 0; i < n; ++i) v += softplus(-packed_.answers[i] * z[i]);
      }
      if (gradient || hessian) {
        k.logistic_terms(z.data(), packed_.answers.data(), n, resid.data(),
                         hessian ? curv.data() : nullptr);
        Vector gl(d_);
        k.transpose_times(packed_, resid.data(), gl.data());
        g += gl;
        if (hessian) {
          Matrix hl(d_, d_);
          k.weighted_gram(packed_, curv.data(), hl.data());
          h += hl;
        }
      }
      break;
    }
    case LossKind::Synthetic: {
      if (value) v += synthetic_->value(theta);
      if (gradient) g += synthetic_->gradient(theta);
      if (hessian) {
        if (synthetic_->hessian) {
          h += synthetic_->hessian(theta);
        } else {
          const double step = 1e-6;
          Matrix fd(d_, d_);
          for (Eigen::Index j = 0; j < d_; ++j) {
            Vector tp = theta, tm = theta;
            tp[j] += step;
            tm[j] -= step;
            fd.col(j) = (synthetic_->gradient(tp) - synthetic_->gradient(tm)) / (2.0 * step);
          }
          h += 0.5 * (fd + fd.transpose());
        }
      }
      break;
    }
  }
  if (value) *value = v;
  if (gradient) *gradient = std::move(g);
  if (hessian) *hessian = std::move(h);
}

double IndependentLoss::value(const Vector& theta) const {
  double v = 0.0;
  evaluate(theta, &v, nullptr, nullptr);
  return v;
}

Vector IndependentLoss::gradient(const Vector& theta) const {
  Vector g;
  evaluate(theta, nullptr, &g, nullptr);
  return g;
}

double IndependentLoss::gradient_scale(const Vector& theta, const Vector& gradient) const {
  if (kind_ == LossKind::Linear) {
    return (gram_ * theta).cwiseAbs().maxCoeff() + xty_.cwiseAbs().maxCoeff() +
           2.0 * ridge_ * theta.cwiseAbs().maxCoeff();
  }
  return gradient.cwiseAbs().maxCoeff();
}

bool IndependentLoss::coordinate_constant(Eigen::Index j) const {
  if (!coordinatewise_) throw PreconditionError("IndependentLoss: not coordinate-wise");
  return ridge_ == 0.0 && axis_items_[static_cast<std::size_t>(j)].empty();
}

double IndependentLoss::coordinate_value(Eigen::Index j, double t) const {
  if (!coordinatewise_) throw PreconditionError("IndependentLoss: not coordinate-wise");
  double v = ridge_ * t * t;
  for (const auto& [x, y] : axis_items_[static_cast<std::size_t>(j)]) {
    if (kind_ == LossKind::Linear) {
      const double r = x * t - y;
      v += 0.5 * r * r;
    } else {
      v += softplus(-y * x * t);
    }
  }
  return v;
}

double IndependentLoss::coordinate_derivative(Eigen::Index j, double t) const {
  if (!coordinatewise_) throw PreconditionError("IndependentLoss: not coordinate-wise");
  if (kind_ == LossKind::Linear) return (gram_(j, j) + 2.0 * ridge_) * t - xty_[j];
  double g = 2.0 * ridge_ * t;
  for (const auto& [x, y] : axis_items_[static_cast<std::size_t>(j)]) {
    g += (sigmoid(x * t) - (y > 0.0 ? 1.0 : 0.0)) * x;
  }
  return g;
}

double IndependentLoss::coordinate_curvature(Eigen::Index j, double t) const {
  if (!coordinatewise_) throw PreconditionError("IndependentLoss: not coordinate-wise");
  if (kind_ == LossKind::Linear) return gram_(j, j) + 2.0 * ridge_;
  double h = 2.0 * ridge_;
  for (const auto& [x, y] : axis_items_[static_cast<std::size_t>(j)]) {
    const double s = sigmoid(x * t);
    h += s * (1.0 - s) * x * x;
  }
  return h;
}

}  // namespace licchavi
