#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "teugel/errors.hpp"
#include "teugel/multi_index.hpp"
#include "teugel/quadrature.hpp"

namespace teugel {

struct Atom {
  Eigen::VectorXd point;
  double rate = 0.0;
};

/// Jump measure given by finitely many weighted atoms.
struct AtomList {
  std::vector<Atom> atoms;
};

/// Jump measure with a density on a bounded box. The density is not
/// normalized; its integral over the box is the total intensity.
struct DensitySpec {
  std::vector<std::pair<double, double>> support;  // per-axis [lo, hi]
  std::function<double(const Eigen::VectorXd&)> density;
  int quad_order = 32;
  int density_degree = -1;  // polynomial degree if known, else -1 (inexact)
  std::string kind = "custom";
};

/// Levy triplet restricted to finite activity: drift, Gaussian covariance,
/// and a jump measure with finite total mass on a bounded support.
/// Immutable after construction; safe for concurrent reads.
class LevyModel {
public:
  LevyModel(std::size_t dimension, Eigen::VectorXd drift, Eigen::MatrixXd gaussian_cov,
            std::variant<AtomList, DensitySpec> jump_spec)
      : n_(dimension),
        drift_(std::move(drift)),
        cov_(std::move(gaussian_cov)),
        jumps_(std::move(jump_spec)) {
    if (n_ < 1) throw ConfigError("LevyModel: dimension must be >= 1");
    if (static_cast<std::size_t>(drift_.size()) != n_)
      throw ConfigError("LevyModel: drift dimension mismatch");
    if (static_cast<std::size_t>(cov_.rows()) != n_ ||
        static_cast<std::size_t>(cov_.cols()) != n_)
      throw ConfigError("LevyModel: covariance must be n x n");
    if (!cov_.isApprox(cov_.transpose(), 1e-12))
      throw ConfigError("LevyModel: covariance must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov_);
    if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, es.eigenvalues().maxCoeff()))
      throw ConfigError("LevyModel: covariance has a negative eigenvalue");
    Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
    cov_sqrt_ = es.eigenvectors() * clipped.cwiseSqrt().asDiagonal() *
                es.eigenvectors().transpose();
    has_gaussian_ = clipped.maxCoeff() > 0.0;

    if (const auto* al = std::get_if<AtomList>(&jumps_)) {
      for (const auto& a : al->atoms) {
        if (static_cast<std::size_t>(a.point.size()) != n_)
          throw ConfigError("LevyModel: atom dimension mismatch");
        if (!(a.rate > 0.0)) throw ConfigError("LevyModel: atom rate must be > 0");
        intensity_ += a.rate;
      }
    } else {
      const auto& d = std::get<DensitySpec>(jumps_);
      if (d.support.size() != n_)
        throw ConfigError("LevyModel: density support dimension mismatch");
      for (const auto& [lo, hi] : d.support) {
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
          throw ConfigError("LevyModel: density support must be a bounded box");
      }
      if (!d.density) throw ConfigError("LevyModel: density function missing");
      if (d.quad_order < 1) throw ConfigError("LevyModel: quad_order must be >= 1");
      intensity_ = integrate_density([](const Eigen::VectorXd&) { return 1.0; });
      if (!(intensity_ > 0.0) || !std::isfinite(intensity_))
        throw ConfigError("LevyModel: density must have positive finite mass");
      density_envelope_ = 1.5 * scan_density_max(d);
    }
  }

  std::size_t dimension() const { return n_; }
  const Eigen::VectorXd& drift() const { return drift_; }
  const Eigen::MatrixXd& gaussian_cov() const { return cov_; }
  const Eigen::MatrixXd& gaussian_cov_sqrt() const { return cov_sqrt_; }
  bool has_gaussian_part() const { return has_gaussian_; }
  double intensity() const { return intensity_; }
  bool is_atomic() const { return std::holds_alternative<AtomList>(jumps_); }
  const AtomList& atoms() const { return std::get<AtomList>(jumps_); }
  const DensitySpec& density() const { return std::get<DensitySpec>(jumps_); }
  double density_envelope() const { return density_envelope_; }

  /// m_p = integral of x^p against the jump measure. Exact for atoms;
  /// Gauss-Legendre for densities, rejecting degrees beyond exactness.
  double moment(const MultiIndex& p) const {
    if (p.dimension() != n_) throw ConfigError("moment: index dimension mismatch");
    if (p.degree() < 1) throw ConfigError("moment: |p| >= 1 required");
    if (const auto* al = std::get_if<AtomList>(&jumps_)) {
      double m = 0.0;
      for (const auto& a : al->atoms) m += a.rate * monomial(a.point, p);
      return m;
    }
    const auto& d = std::get<DensitySpec>(jumps_);
    if (d.density_degree >= 0) {
      const int exact = 2 * d.quad_order - 1;
      if (p.degree() + d.density_degree > exact)
        throw ConfigError("moment: degree " + std::to_string(p.degree()) +
                          " exceeds quadrature exactness for index " + p.to_string());
    }
    return integrate_density([&](const Eigen::VectorXd& x) { return monomial(x, p); });
  }

  /// Mean of X_i(1): drift plus first jump moment of coordinate i.
  double mean_rate(std::size_t axis) const {
    return drift_(static_cast<Eigen::Index>(axis)) + moment(MultiIndex::unit(n_, axis));
  }

  /// Tensor Gauss-Legendre integral of f against the jump density.
  double integrate_density(const std::function<double(const Eigen::VectorXd&)>& f) const {
    const auto& d = std::get<DensitySpec>(jumps_);
    std::vector<QuadratureRule> rules;
    rules.reserve(n_);
    for (const auto& [lo, hi] : d.support)
      rules.push_back(gauss_legendre(d.quad_order, lo, hi));
    double sum = 0.0;
    Eigen::VectorXd x(n_);
    std::vector<int> idx(n_, 0);
    while (true) {
      double w = 1.0;
      for (std::size_t i = 0; i < n_; ++i) {
        x(static_cast<Eigen::Index>(i)) = rules[i].nodes[static_cast<std::size_t>(idx[i])];
        w *= rules[i].weights[static_cast<std::size_t>(idx[i])];
      }
      sum += w * d.density(x) * f(x);
      std::size_t k = 0;
      while (k < n_ && ++idx[k] == d.quad_order) idx[k++] = 0;
      if (k == n_) break;
    }
    return sum;
  }

private:
  double scan_density_max(const DensitySpec& d) const {
    const int scan = 64;
    double fmax = 0.0;
    Eigen::VectorXd x(static_cast<Eigen::Index>(n_));
    std::vector<int> idx(n_, 0);
    while (true) {
      for (std::size_t i = 0; i < n_; ++i) {
        const auto& [lo, hi] = d.support[i];
        x(static_cast<Eigen::Index>(i)) = lo + (hi - lo) * (idx[i] + 0.5) / scan;
      }
      fmax = std::max(fmax, d.density(x));
      std::size_t k = 0;
      while (k < n_ && ++idx[k] == scan) idx[k++] = 0;
      if (k == n_) break;
    }
    return fmax;
  }

  static double monomial(const Eigen::VectorXd& x, const MultiIndex& p) {
    double v = 1.0;
    for (std::size_t i = 0; i < p.dimension(); ++i)
      for (int e = 0; e < p[i]; ++e) v *= x(static_cast<Eigen::Index>(i));
    return v;
  }

  std::size_t n_;
  Eigen::VectorXd drift_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd cov_sqrt_;
  bool has_gaussian_ = false;
  std::variant<AtomList, DensitySpec> jumps_;
  double intensity_ = 0.0;
  double density_envelope_ = 0.0;
};

/// Moments m_p precomputed up to a degree cap and shared read-only.
class MomentTable {
public:
  MomentTable() = default;
  MomentTable(const LevyModel& model, int max_degree) : max_degree_(max_degree) {
    for (const auto& p : enumerate_multiindices(model.dimension(), max_degree))
      table_[p] = model.moment(p);
    intensity_ = model.intensity();
  }

  /// m_0 is the total intensity.
  double intensity() const { return intensity_; }
  int max_degree() const { return max_degree_; }

  double at(const MultiIndex& p) const {
    if (p.degree() == 0) return intensity_;
    auto it = table_.find(p);
    if (it == table_.end())
      throw NumericalError("MomentTable: missing moment " + p.to_string() +
                           " (table degree " + std::to_string(max_degree_) + ")");
    return it->second;
  }

private:
  MultiIndexMap<double> table_;
  double intensity_ = 0.0;
  int max_degree_ = 0;
};

struct ExponentialMomentReport {
  bool finite = false;
  double value = std::numeric_limits<double>::quiet_NaN();
  bool overflowed = false;
  std::string note;
};

/// Checks the exponential-tail integral of the jump measure outside the
/// epsilon-ball. Always finite under the finite-activity restriction; the
/// value is reported, with overflow flagged as +inf.
inline ExponentialMomentReport validate_exponential_moment(const LevyModel& model,
                                                           double lambda, double eps) {
  if (!(lambda > 0.0) || !(eps > 0.0))
    throw ConfigError("validate_exponential_moment: lambda > 0 and eps > 0 required");
  ExponentialMomentReport rep;
  double value = 0.0;
  if (model.is_atomic()) {
    for (const auto& a : model.atoms().atoms) {
      const double r = a.point.norm();
      if (r >= eps) value += a.rate * std::exp(lambda * r);
    }
  } else if (model.dimension() == 1) {
    // Split at the epsilon ball so each piece is smooth for the quadrature.
    const auto& d = model.density();
    const auto [lo, hi] = d.support[0];
    auto piece = [&](double a, double b) {
      if (!(a < b)) return 0.0;
      auto rule = gauss_legendre(d.quad_order, a, b);
      double s = 0.0;
      Eigen::VectorXd x(1);
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        x(0) = rule.nodes[i];
        s += rule.weights[i] * d.density(x) * std::exp(lambda * std::abs(x(0)));
      }
      return s;
    };
    value = piece(lo, std::min(hi, -eps)) + piece(std::max(lo, eps), hi);
  } else {
    value = model.integrate_density([&](const Eigen::VectorXd& x) {
      const double r = x.norm();
      return r >= eps ? std::exp(lambda * r) : 0.0;
    });
  }
  rep.finite = true;
  rep.value = value;
  if (!std::isfinite(value)) {
    rep.overflowed = true;
    rep.value = std::numeric_limits<double>::infinity();
    rep.note = "finite sum overflowed double range; reported as +inf";
  }
  return rep;
}

}  // namespace teugel
