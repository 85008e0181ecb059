#include "licchavi/core.hpp"

#include <cmath>
#include <sstream>

namespace licchavi {

void require_dimension(const Vector& v, Eigen::Index expected, const char* what) {
  if (v.size() != expected) {
    std::ostringstream os;
    os << what << ": expected dimension " << expected << ", got " << v.size();
    throw DimensionError(os.str());
  }
}

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
}

Exponent Exponent::finite(double q) {
  if (!std::isfinite(q)) {
    throw std::invalid_argument("Exponent::finite: use Exponent::infinity() for q = inf");
  }
  Exponent e;
  e.value_ = q;
  e.infinite_ = false;
  return e;
}

double Exponent::value() const {
  if (infinite_) throw std::logic_error("Exponent::value() on infinite exponent");
  return value_;
}

NormSpec NormSpec::lq(double q, Eigen::Index d) {
  return NormSpec{Exponent::finite(q), Vector::Ones(d)};
}

NormSpec NormSpec::linf(Eigen::Index d) { return NormSpec{Exponent::infinity(), Vector::Ones(d)}; }

NormSpec NormSpec::scaled(Exponent q, Vector diag) { return NormSpec{q, std::move(diag)}; }

bool NormSpec::is_identity() const { return (diag.array() == 1.0).all(); }

const char* to_string(LossKind kind) {
  switch (kind) {
    case LossKind::Linear:
      return "linear";
    case LossKind::Logistic:
      return "logistic";
    case LossKind::Synthetic:
      return "synthetic";
  }
  return "unknown";
}

ModelState ModelState::zeros(std::size_t num_users, Eigen::Index d) {
  ModelState s;
  s.common = Vector::Zero(d);
  s.users.assign(num_users, Vector::Zero(d));
  return s;
}

namespace {

void check_norm(const NormSpec& norm, Eigen::Index d, const std::string& who,
                std::vector<Violation>& out) {
  if (norm.diag.size() != d) {
    out.push_back({"dimension", who + ": norm diagonal has dimension " +
                                    std::to_string(norm.diag.size()) + ", expected " +
                                    std::to_string(d)});
    return;
  }
  if (!norm.diag.allFinite() || (norm.diag.array() <= 0.0).any()) {
    out.push_back({"NormSpec", who + ": diagonal scales must be finite and > 0"});
  }
  if (!norm.q.is_infinite() && !(norm.q.value() >= 1.0)) {
    out.push_back({"NormSpec", who + ": norm exponent q must be >= 1"});
  }
}

}  // namespace

std::vector<Violation> validate_config(const std::vector<UserSpec>& users,
                                       const GlobalSpec& global, Eigen::Index dimension) {
  std::vector<Violation> out;
  if (dimension < 1) out.push_back({"dimension", "dimension d must be >= 1"});

  if (!(global.weight > 0.0) || !std::isfinite(global.weight)) {
    out.push_back({"strictly convex common norm", "common weight lambda_0 must be > 0"});
  }
  if (!(global.power > 1.0) || !std::isfinite(global.power)) {
    out.push_back({"strictly convex common norm", "common power q_0 must be > 1"});
  }
  check_norm(global.norm, dimension, "global", out);
  if (global.norm.q.is_infinite() || global.norm.q.value() <= 1.0) {
    out.push_back({"strictly convex common norm",
                   "common norm must have a strictly convex unit ball (1 < q < inf); "
                   "l1 and l_inf are excluded"});
  }

  for (std::size_t n = 0; n < users.size(); ++n) {
    const auto& u = users[n];
    const std::string who = "user " + std::to_string(n);
    if (!(u.weight > 0.0) || !std::isfinite(u.weight)) {
      out.push_back({"lambda_n > 0", who + ": weight must be > 0"});
    }
    if (!(u.power >= 1.0) || !std::isfinite(u.power)) {
      out.push_back({"q_n >= 1", who + ": power must be >= 1"});
    }
    check_norm(u.norm, dimension, who, out);
    if (!(u.param_reg.ridge >= 0.0)) {
      out.push_back({"convex losses", who + ": parameter regularization must be convex (ridge >= 0)"});
    }
    if (u.loss_kind == LossKind::Synthetic && !u.synthetic) {
      out.push_back({"convex losses", who + ": synthetic loss kind without a loss function"});
    }
  }
  return out;
}

std::vector<Violation> validate_dataset(const UserSpec& spec, const Dataset& data,
                                        Eigen::Index dimension) {
  std::vector<Violation> out;
  if (spec.loss_kind == LossKind::Synthetic && !data.empty()) {
    out.push_back({"dataset", "synthetic losses do not take a dataset"});
  }
  for (std::size_t i = 0; i < data.items.size(); ++i) {
    const auto& qa = data.items[i];
    if (qa.query.size() != dimension) {
      out.push_back({"dimension", "item " + std::to_string(i) + ": query dimension mismatch"});
      continue;
    }
    if (!qa.query.allFinite() || !std::isfinite(qa.answer)) {
      out.push_back({"dataset", "item " + std::to_string(i) + ": non-finite value"});
    }
    if (spec.loss_kind == LossKind::Logistic && qa.answer != 1.0 && qa.answer != -1.0) {
      out.push_back({"dataset", "item " + std::to_string(i) + ": logistic answers must be +1 or -1"});
    }
  }
  return out;
}

}  // namespace licchavi
