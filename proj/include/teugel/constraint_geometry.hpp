#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "teugel/errors.hpp"
#include "teugel/quadrature.hpp"

namespace teugel {

/// Closed convex target set for the terminal-expectation constraint.
/// Supported kinds have exact Euclidean projections and support functions.
class ConstraintSet {
public:
  enum class Kind { All, Box, Ball, Point };

  static ConstraintSet all(std::size_t dim) { return ConstraintSet(Kind::All, dim); }
  static ConstraintSet box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
    ConstraintSet s(Kind::Box, static_cast<std::size_t>(lo.size()));
    if (lo.size() != hi.size() || (hi - lo).minCoeff() < 0.0)
      throw ConfigError("ConstraintSet: invalid box bounds");
    s.lo_ = std::move(lo);
    s.hi_ = std::move(hi);
    return s;
  }
  static ConstraintSet ball(Eigen::VectorXd center, double radius) {
    if (!(radius >= 0.0)) throw ConfigError("ConstraintSet: negative ball radius");
    ConstraintSet s(Kind::Ball, static_cast<std::size_t>(center.size()));
    s.center_ = std::move(center);
    s.radius_ = radius;
    return s;
  }
  static ConstraintSet point(Eigen::VectorXd value) {
    ConstraintSet s(Kind::Point, static_cast<std::size_t>(value.size()));
    s.center_ = std::move(value);
    return s;
  }

  Kind kind() const { return kind_; }
  std::size_t dimension() const { return dim_; }
  bool is_all() const { return kind_ == Kind::All; }

  Eigen::VectorXd project(const Eigen::VectorXd& z) const {
    check_dim(z);
    switch (kind_) {
      case Kind::All:
        return z;
      case Kind::Box:
        return z.cwiseMax(lo_).cwiseMin(hi_);
      case Kind::Ball: {
        const Eigen::VectorXd d = z - center_;
        const double r = d.norm();
        if (r <= radius_) return z;
        return center_ + (radius_ / r) * d;
      }
      case Kind::Point:
        return center_;
    }
    throw std::logic_error("unreachable");
  }

  double distance(const Eigen::VectorXd& z) const { return (z - project(z)).norm(); }

  /// sup_{z in Q} <mu, z>; +inf for unbounded directions.
  double support(const Eigen::VectorXd& mu) const {
    check_dim(mu);
    switch (kind_) {
      case Kind::All: {
        return mu.isZero(0.0) ? 0.0 : std::numeric_limits<double>::infinity();
      }
      case Kind::Box: {
        double s = 0.0;
        for (Eigen::Index i = 0; i < mu.size(); ++i)
          s += mu(i) > 0.0 ? mu(i) * hi_(i) : mu(i) * lo_(i);
        return s;
      }
      case Kind::Ball:
        return mu.dot(center_) + radius_ * mu.norm();
      case Kind::Point:
        return mu.dot(center_);
    }
    throw std::logic_error("unreachable");
  }

  /// Deterministic interior-ish sample points for inequality spot checks.
  Eigen::VectorXd sample(double u01, std::size_t axis_seed) const {
    switch (kind_) {
      case Kind::All: {
        Eigen::VectorXd z(static_cast<Eigen::Index>(dim_));
        for (Eigen::Index i = 0; i < z.size(); ++i)
          z(i) = 20.0 * (u01 - 0.5) * (1.0 + static_cast<double>((axis_seed + i) % 3));
        return z;
      }
      case Kind::Box: {
        Eigen::VectorXd z(static_cast<Eigen::Index>(dim_));
        for (Eigen::Index i = 0; i < z.size(); ++i) {
          const double w = std::fmod(u01 * (1.7 + static_cast<double>((axis_seed + i) % 5)), 1.0);
          z(i) = lo_(i) + (hi_(i) - lo_(i)) * w;
        }
        return z;
      }
      case Kind::Ball: {
        Eigen::VectorXd d(static_cast<Eigen::Index>(dim_));
        for (Eigen::Index i = 0; i < d.size(); ++i)
          d(i) = std::sin((u01 + 0.1) * (static_cast<double>(axis_seed + i) + 1.0) * 12.9898);
        if (d.norm() > 0.0) d *= (radius_ * std::fmod(u01 * 7.31, 1.0)) / d.norm();
        return center_ + d;
      }
      case Kind::Point:
        return center_;
    }
    throw std::logic_error("unreachable");
  }

private:
  ConstraintSet(Kind kind, std::size_t dim) : kind_(kind), dim_(dim) {}
  void check_dim(const Eigen::VectorXd& z) const {
    if (static_cast<std::size_t>(z.size()) != dim_)
      throw ConfigError("ConstraintSet: dimension mismatch");
  }

  Kind kind_;
  std::size_t dim_;
  Eigen::VectorXd lo_, hi_, center_;
  double radius_ = 0.0;
};

struct PhiValue {
  double value = 0.0;
  bool gradient_defined = false;
  double grad_s = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd grad_z;
};

/// Euclidean distance from (s, z) to (-inf, J_star - eps] x Q together with
/// its gradient by projection difference. On the set itself the gradient is
/// reported undefined (NaN), never silently zero.
inline PhiValue distance_phi(double s, const Eigen::VectorXd& z, double eps, double j_star,
                             const ConstraintSet& q) {
  if (!(eps > 0.0)) throw ConfigError("distance_phi: eps must be > 0");
  PhiValue out;
  const double s_proj = std::min(s, j_star - eps);
  const Eigen::VectorXd z_proj = q.project(z);
  const double ds = s - s_proj;
  const Eigen::VectorXd dz = z - z_proj;
  out.value = std::sqrt(ds * ds + dz.squaredNorm());
  if (out.value > 0.0) {
    out.gradient_defined = true;
    out.grad_s = ds / out.value;
    out.grad_z = dz / out.value;
  } else {
    out.grad_z = Eigen::VectorXd::Constant(z.size(), std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

/// Normalizing constant of the standard bump on the unit ball of R^dim,
/// alpha(w) = C exp(1 / (|w|^2 - 1)) for |w| < 1. Radially symmetric, so a
/// 1-d quadrature over the radius suffices: C^{-1} = surf(dim) *
/// int_0^1 r^{dim-1} exp(1/(r^2-1)) dr.
inline double mollifier_constant(std::size_t dim, int quad_order = 200) {
  auto rule = gauss_legendre(quad_order, 0.0, 1.0);
  double integral = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double r = rule.nodes[i];
    const double bump = std::exp(1.0 / (r * r - 1.0));
    integral += rule.weights[i] * std::pow(r, static_cast<double>(dim - 1)) * bump;
  }
  const double surface = 2.0 * std::pow(std::numbers::pi, 0.5 * static_cast<double>(dim)) /
                         std::tgamma(0.5 * static_cast<double>(dim));
  return 1.0 / (surface * integral);
}

/// Smoothed distance Psi(s, z; eps, delta): convolution of Phi with the
/// delta-scaled bump, evaluated by tensor Gauss-Legendre over the cube
/// enclosing the mollifier ball.
inline double mollify_psi(double s, const Eigen::VectorXd& z, double eps, double delta,
                          double j_star, const ConstraintSet& q, int quad_order = 24) {
  if (!(delta > 0.0)) throw ConfigError("mollify_psi: delta must be > 0");
  if (quad_order < 8) throw ConfigError("mollify_psi: quadrature order too low");
  const std::size_t dim = q.dimension() + 1;
  const double c = mollifier_constant(dim);
  auto rule = gauss_legendre(quad_order, -1.0, 1.0);

  // integrate over the unit cube in w = (sbar, zbar)/delta
  std::vector<int> idx(dim, 0);
  Eigen::VectorXd w(static_cast<Eigen::Index>(dim));
  double sum = 0.0;
  while (true) {
    double weight = 1.0;
    for (std::size_t i = 0; i < dim; ++i) {
      w(static_cast<Eigen::Index>(i)) = rule.nodes[static_cast<std::size_t>(idx[i])];
      weight *= rule.weights[static_cast<std::size_t>(idx[i])];
    }
    const double r2 = w.squaredNorm();
    if (r2 < 1.0) {
      const double alpha = c * std::exp(1.0 / (r2 - 1.0));
      const Eigen::VectorXd z_shift = z - delta * w.tail(static_cast<Eigen::Index>(dim - 1));
      const double phi = distance_phi(s - delta * w(0), z_shift, eps, j_star, q).value;
      sum += weight * alpha * phi;
    }
    std::size_t k = 0;
    while (k < dim && ++idx[k] == quad_order) idx[k++] = 0;
    if (k == dim) break;
  }
  // the change of variables cancels the delta^{-(k+1)} scaling exactly
  return sum;
}

struct TransversalityReport {
  bool holds = false;
  double worst_violation = 0.0;  // sup_z <mu, z - EG>, positive means violated
};

/// <mu, z - EG> <= tol for all z in Q, checked exactly through the support
/// function. Unbounded Q passes only for mu = 0.
inline TransversalityReport transversality(const Eigen::VectorXd& mu, const Eigen::VectorXd& eg,
                                           const ConstraintSet& q, double tol = 1e-9) {
  TransversalityReport rep;
  const double sup = q.support(mu);
  rep.worst_violation = sup - mu.dot(eg);
  rep.holds = rep.worst_violation <= tol;
  return rep;
}

/// |lambda|^2 + |mu|^2 = 1 within tolerance with lambda >= 0.
inline bool nontriviality(double lambda, const Eigen::VectorXd& mu, double tol = 1e-9) {
  if (lambda < 0.0) return false;
  return std::abs(lambda * lambda + mu.squaredNorm() - 1.0) <= tol;
}

}  // namespace teugel
