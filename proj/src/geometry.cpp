#include "licchavi/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace licchavi {

namespace {

double sgn(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

Vector scaled_coords(const NormSpec& spec, const Vector& x) {
  require_dimension(x, spec.diag.size(), "norm argument");
  return spec.diag.cwiseProduct(x);
}

// (Σ |u_j|^q)^{1/q} computed relative to max |u_j| so large q cannot overflow.
double lq_of(const Vector& u, double q) {
  const double m = u.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (Eigen::Index j = 0; j < u.size(); ++j) s += std::pow(std::abs(u[j]) / m, q);
  return m * std::pow(s, 1.0 / q);
}

// Bisection for the root of a decreasing function on [lo, hi].
template <typename F>
double bisect_decreasing(F&& f, double lo, double hi, double target) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace

double norm_eval(const NormSpec& spec, const Vector& x) {
  const Vector u = scaled_coords(spec, x);
  if (u.size() == 0) return 0.0;
  if (spec.q.is_infinite()) return u.cwiseAbs().maxCoeff();
  return lq_of(u, spec.q.value());
}

bool SubgradientSet::differentiable() const {
  return std::all_of(free_coords.begin(), free_coords.end(),
                     [](const Interval& i) { return i.degenerate(); });
}

bool SubgradientSet::contains(const Vector& g, double tol) const {
  if (g.size() != representative.size()) return false;
  switch (shape) {
    case SubgradientShape::Box:
      for (Eigen::Index j = 0; j < g.size(); ++j) {
        if (!free_coords[j].contains(g[j], tol)) return false;
      }
      return true;
    case SubgradientShape::DualBall: {
      double s = 0.0;
      for (Eigen::Index j = 0; j < g.size(); ++j) {
        s += std::pow(std::abs(g[j]) / (radius * scale[j]), dual_q);
      }
      return std::pow(s, 1.0 / dual_q) <= 1.0 + tol;
    }
    case SubgradientShape::Simplex: {
      double total = 0.0;
      for (Eigen::Index j = 0; j < g.size(); ++j) {
        if (scale[j] == 0.0) {
          if (std::abs(g[j] - representative[j]) > tol) return false;
          continue;
        }
        const double mu = g[j] / scale[j];
        if (mu < -tol) return false;
        total += mu;
      }
      return std::abs(total - 1.0) <= tol * static_cast<double>(g.size()) + tol;
    }
  }
  return false;
}

Vector SubgradientSet::project(const Vector& m) const {
  const Eigen::Index d = m.size();
  Vector out(d);
  auto clamp_box = [&]() {
    for (Eigen::Index j = 0; j < d; ++j) out[j] = std::clamp(m[j], free_coords[j].lo, free_coords[j].hi);
  };
  switch (shape) {
    case SubgradientShape::Box:
      clamp_box();
      return out;
    case SubgradientShape::DualBall: {
      const Vector s = radius * scale;
      if (dual_q == 2.0) {
        auto phi = [&](double gamma) {
          double acc = 0.0;
          for (Eigen::Index j = 0; j < d; ++j) {
            const double t = m[j] * s[j] / (s[j] * s[j] + gamma);
            acc += t * t;
          }
          return acc;
        };
        if (phi(0.0) <= 1.0) return m;
        const double hi = m.norm() * s.maxCoeff() + 1.0;
        const double gamma = bisect_decreasing(phi, 0.0, hi, 1.0);
        for (Eigen::Index j = 0; j < d; ++j) out[j] = m[j] * s[j] * s[j] / (s[j] * s[j] + gamma);
        return out;
      }
      if (dual_q == 1.0) {
        double inside = 0.0;
        for (Eigen::Index j = 0; j < d; ++j) inside += std::abs(m[j]) / s[j];
        if (inside <= 1.0) return m;
        auto t_of = [&](Eigen::Index j, double nu) {
          return std::max(0.0, (s[j] * std::abs(m[j]) - 0.5 * nu) / (s[j] * s[j]));
        };
        auto total = [&](double nu) {
          double acc = 0.0;
          for (Eigen::Index j = 0; j < d; ++j) acc += t_of(j, nu);
          return acc;
        };
        const double hi = 2.0 * (s.cwiseProduct(m.cwiseAbs())).maxCoeff();
        const double nu = bisect_decreasing(total, 0.0, hi, 1.0);
        for (Eigen::Index j = 0; j < d; ++j) out[j] = sgn(m[j]) * s[j] * t_of(j, nu);
        return out;
      }
      double inside = 0.0;
      for (Eigen::Index j = 0; j < d; ++j) inside += std::pow(std::abs(m[j]) / s[j], dual_q);
      if (inside <= 1.0) return m;
      // KKT: t + ν q t^{q−1} / s^q = |m| per coordinate, ν chosen so the
      // constraint is active.
      auto t_of = [&](Eigen::Index j, double nu) {
        const double target = std::abs(m[j]);
        auto lhs = [&](double t) { return t + nu * dual_q * std::pow(t, dual_q - 1.0) / std::pow(s[j], dual_q); };
        double lo = 0.0, hi = target;
        for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (mid <= lo || mid >= hi) break;
          (lhs(mid) < target ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
      };
      auto total = [&](double nu) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < d; ++j) acc += std::pow(t_of(j, nu) / s[j], dual_q);
        return acc;
      };
      double hi = 1.0;
      while (total(hi) > 1.0 && hi < 1e300) hi *= 2.0;
      const double nu = bisect_decreasing(total, 0.0, hi, 1.0);
      for (Eigen::Index j = 0; j < d; ++j) out[j] = sgn(m[j]) * t_of(j, nu);
      return out;
    }
    case SubgradientShape::Simplex: {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < d; ++j) {
        if (scale[j] == 0.0) continue;
        lo = std::min(lo, scale[j] * m[j] - scale[j] * scale[j]);
        hi = std::max(hi, scale[j] * m[j]);
      }
      auto mu_of = [&](Eigen::Index j, double tau) {
        return std::max(0.0, (scale[j] * m[j] - tau) / (scale[j] * scale[j]));
      };
      auto total = [&](double tau) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < d; ++j) {
          if (scale[j] != 0.0) acc += mu_of(j, tau);
        }
        return acc;
      };
      const double tau = bisect_decreasing(total, lo - 1.0, hi, 1.0);
      const double sum = total(tau);
      for (Eigen::Index j = 0; j < d; ++j) {
        out[j] = scale[j] == 0.0 ? representative[j] : scale[j] * mu_of(j, tau) / sum;
      }
      return out;
    }
  }
  return out;
}

SubgradientSet SubgradientSet::scaled_by(double factor) const {
  SubgradientSet s = *this;
  s.representative *= factor;
  for (auto& i : s.free_coords) {
    const double a = i.lo * factor;
    const double b = i.hi * factor;
    i = {std::min(a, b), std::max(a, b)};
  }
  if (shape == SubgradientShape::DualBall) {
    s.radius *= factor;
  } else if (shape == SubgradientShape::Simplex) {
    s.scale *= factor;
  }
  return s;
}

SubgradientSet norm_power_subgradient(const NormSpec& spec, double power, const Vector& x,
                                      double tie_tol) {
  if (!(power >= 1.0)) throw PreconditionError("norm_power_subgradient: power must be >= 1");
  const Vector u = scaled_coords(spec, x);
  const Eigen::Index d = u.size();
  const double n = norm_eval(spec, x);

  SubgradientSet out;
  out.representative = Vector::Zero(d);
  out.free_coords.assign(static_cast<std::size_t>(d), Interval{0.0, 0.0});
  out.scale = Vector::Zero(d);

  if (n == 0.0) {
    if (power > 1.0) return out;
    for (Eigen::Index j = 0; j < d; ++j) out.free_coords[j] = {-spec.diag[j], spec.diag[j]};
    if (spec.q.is_infinite() || spec.q.value() > 1.0) {
      out.shape = SubgradientShape::DualBall;
      out.dual_q = spec.q.is_infinite() ? 1.0 : spec.q.value() / (spec.q.value() - 1.0);
      out.radius = 1.0;
      out.scale = spec.diag;
    }
    return out;
  }

  const double outer = power * std::pow(n, power - 1.0);
  if (spec.q.is_infinite()) {
    std::vector<Eigen::Index> ties;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (std::abs(u[j]) >= n - tie_tol) ties.push_back(j);
    }
    if (ties.size() == 1) {
      const auto j = ties.front();
      out.representative[j] = outer * spec.diag[j] * sgn(u[j]);
      out.free_coords[j] = {out.representative[j], out.representative[j]};
      return out;
    }
    out.shape = SubgradientShape::Simplex;
    const double share = 1.0 / static_cast<double>(ties.size());
    for (const auto j : ties) {
      const double c = outer * spec.diag[j] * sgn(u[j]);
      out.scale[j] = c;
      out.representative[j] = c * share;
      out.free_coords[j] = {std::min(0.0, c), std::max(0.0, c)};
    }
    return out;
  }

  const double q = spec.q.value();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (u[j] == 0.0) {
      if (q == 1.0) out.free_coords[j] = {-outer * spec.diag[j], outer * spec.diag[j]};
      continue;
    }
    const double g = outer * spec.diag[j] * sgn(u[j]) * std::pow(std::abs(u[j]) / n, q - 1.0);
    out.representative[j] = g;
    out.free_coords[j] = {g, g};
  }
  return out;
}

Vector counter_gradient(const NormSpec& spec, double power, double weight, const Vector& g) {
  if (!(power > 1.0)) throw PreconditionError("counter_gradient: requires power > 1");
  if (!(weight > 0.0)) throw PreconditionError("counter_gradient: requires weight > 0");
  if (!spec.is_identity()) throw PreconditionError("counter_gradient: identity scaling only");
  require_dimension(g, spec.diag.size(), "counter_gradient");
  const Eigen::Index d = g.size();
  Vector x = Vector::Zero(d);
  if ((g.array() == 0.0).all()) return x;

  const double lp = weight * power;
  if (spec.q.is_infinite()) {
    const double alpha = std::pow(g.lpNorm<1>() / lp, 1.0 / (power - 1.0));
    for (Eigen::Index j = 0; j < d; ++j) x[j] = alpha * sgn(g[j]);
    return x;
  }
  const double q = spec.q.value();
  if (q == 1.0) {
    Eigen::Index jstar = 0;
    g.cwiseAbs().maxCoeff(&jstar);
    x[jstar] = sgn(g[jstar]) * std::pow(std::abs(g[jstar]) / lp, 1.0 / (power - 1.0));
    return x;
  }
  Vector z(d);
  for (Eigen::Index j = 0; j < d; ++j) z[j] = sgn(g[j]) * std::pow(std::abs(g[j]) / lp, 1.0 / (q - 1.0));
  const double alpha = std::pow(lq_of(z, q), (q - power) / (power - 1.0));
  return alpha * z;
}

NormEquivalence norm_equivalence(const NormSpec& spec) {
  const double d = static_cast<double>(spec.diag.size());
  const double dmin = spec.diag.minCoeff();
  const double dmax = spec.diag.maxCoeff();
  if (spec.q.is_infinite()) return {dmin / std::sqrt(d), dmax};
  const double q = spec.q.value();
  const double factor = std::pow(d, 1.0 / q - 0.5);
  if (q <= 2.0) return {dmin, dmax * factor};
  return {dmin * factor, dmax};
}

Vector reflect(const Vector& x, Eigen::Index j) {
  Vector y = x;
  y[j] = -y[j];
  return y;
}

SmoothValue smoothed_norm_power(const NormSpec& spec, double p, const Vector& x, double mu,
                                bool want_hessian) {
  const Vector u = scaled_coords(spec, x);
  const Eigen::Index d = u.size();
  const Vector& D = spec.diag;
  SmoothValue out;
  out.gradient = Vector::Zero(d);
  if (want_hessian) out.hessian = Matrix::Zero(d, d);

  Vector a(d), da(d), dda(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    a[j] = mu > 0.0 ? std::hypot(u[j], mu) : std::abs(u[j]);
    da[j] = a[j] > 0.0 ? u[j] / a[j] : 0.0;
    dda[j] = (mu > 0.0 && a[j] > 0.0) ? mu * mu / (a[j] * a[j] * a[j]) : 0.0;
  }
  const double m = d > 0 ? a.maxCoeff() : 0.0;
  if (m == 0.0) return out;

  if (spec.q.is_infinite()) {
    double N = m;
    Vector pi = Vector::Zero(d);
    if (mu > 0.0) {
      double Z = 0.0;
      for (Eigen::Index j = 0; j < d; ++j) {
        pi[j] = std::exp((a[j] - m) / mu);
        Z += pi[j];
      }
      pi /= Z;
      N = m + mu * std::log(Z);
    } else {
      double count = 0.0;
      for (Eigen::Index j = 0; j < d; ++j) count += a[j] == m ? 1.0 : 0.0;
      for (Eigen::Index j = 0; j < d; ++j) pi[j] = a[j] == m ? 1.0 / count : 0.0;
    }
    Vector dN(d);
    for (Eigen::Index j = 0; j < d; ++j) dN[j] = pi[j] * da[j] * D[j];
    out.value = std::pow(N, p);
    const double g1 = p * std::pow(N, p - 1.0);
    out.gradient = g1 * dN;
    if (want_hessian) {
      if (p != 1.0) out.hessian += p * (p - 1.0) * std::pow(N, p - 2.0) * dN * dN.transpose();
      for (Eigen::Index j = 0; j < d; ++j) {
        out.hessian(j, j) += g1 * pi[j] * dda[j] * D[j] * D[j];
      }
      if (mu > 0.0) {
        Vector s(d);
        for (Eigen::Index j = 0; j < d; ++j) s[j] = da[j] * D[j];
        const Vector ps = pi.cwiseProduct(s);
        Matrix soft = -ps * ps.transpose();
        for (Eigen::Index j = 0; j < d; ++j) soft(j, j) += pi[j] * s[j] * s[j];
        out.hessian += (g1 / mu) * soft;
      }
    }
    return out;
  }

  const double q = spec.q.value();
  double acc = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) acc += std::pow(a[j] / m, q);
  const double N = m * std::pow(acc, 1.0 / q);
  out.value = std::pow(N, p);

  Vector r(d);  // (a_j / N)^{q-1} a'_j D_j
  for (Eigen::Index j = 0; j < d; ++j) {
    r[j] = (q == 1.0 ? 1.0 : std::pow(a[j] / N, q - 1.0)) * da[j] * D[j];
  }
  out.gradient = p * std::pow(N, p - 1.0) * r;
  if (want_hessian) {
    const double Np2 = std::pow(N, p - 2.0);
    if (p != q) out.hessian += p * (p - q) * Np2 * r * r.transpose();
    for (Eigen::Index j = 0; j < d; ++j) {
      if (a[j] == 0.0) continue;
      double diag = 0.0;
      if (q != 1.0) diag += (q - 1.0) * std::pow(a[j] / N, q - 2.0) * da[j] * da[j];
      diag += (q == 1.0 ? 1.0 : std::pow(a[j] / N, q - 1.0)) * N * dda[j];
      out.hessian(j, j) += p * Np2 * D[j] * D[j] * diag;
    }
  }
  return out;
}

}  // namespace licchavi
