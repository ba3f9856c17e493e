#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "teugel/errors.hpp"
#include "teugel/levy_model.hpp"
#include "teugel/multi_index.hpp"
#include "teugel/path.hpp"

namespace teugel {

/// Bracket matrix of the compensated power-jump family:
///   G[a][b] = m_{p_a + p_b} + Sigma_{ij} when p_a = e_i and p_b = e_j.
/// The Gaussian part enters degree-1 pairs only.
inline Eigen::MatrixXd gram_matrix(const MomentTable& moments, const Eigen::MatrixXd& sigma,
                                   const std::vector<MultiIndex>& indices) {
  const Eigen::Index k = static_cast<Eigen::Index>(indices.size());
  Eigen::MatrixXd g(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a; b < k; ++b) {
      const auto& p = indices[static_cast<std::size_t>(a)];
      const auto& q = indices[static_cast<std::size_t>(b)];
      double v = moments.at(p + q);
      if (p.is_unit() && q.is_unit() && sigma.size() > 0)
        v += sigma(static_cast<Eigen::Index>(p.unit_axis()),
                   static_cast<Eigen::Index>(q.unit_axis()));
      g(a, b) = v;
      g(b, a) = v;
    }
  }
  return g;
}

/// Monic orthogonal basis over the compensated power-jump processes:
/// H^p = Y^p + sum_{q < p} c_q Y^q with predictable covariation
/// <H^p, H^q>_t = delta_{pq} kappa_p t. Immutable after construction.
struct TeugelBasis {
  int degree = 0;
  std::vector<MultiIndex> indices;           // graded-lex order
  std::vector<std::vector<double>> coeffs;   // coeffs[k][j], j <= k, coeffs[k][k] = 1
  std::vector<double> kappa;                 // residual squared norms, >= 0
  std::vector<bool> degenerate;
  std::vector<std::size_t> nondegenerate;    // positions with kappa above threshold
  double rank_tol = 1e-10;
  std::string normalization = "monic";

  std::size_t size() const { return indices.size(); }

  std::size_t position_of(const MultiIndex& p) const {
    for (std::size_t k = 0; k < indices.size(); ++k)
      if (indices[k] == p) return k;
    throw ConfigError("TeugelBasis: index " + p.to_string() + " not in basis");
  }

  /// Sparse view of H^p over strictly preceding Y^q (leading 1 excluded).
  std::vector<std::pair<MultiIndex, double>> preceding_coeffs(std::size_t k) const {
    std::vector<std::pair<MultiIndex, double>> out;
    for (std::size_t j = 0; j < k; ++j)
      if (coeffs[k][j] != 0.0) out.emplace_back(indices[j], coeffs[k][j]);
    return out;
  }
};

/// Classical monic Gram-Schmidt in graded-lex order with rank monitoring.
/// Indices whose residual norm falls below rank_tol * max kappa are flagged
/// degenerate and excluded from later projections. A full second projection
/// pass runs whenever an off-diagonal residual exceeds 1e-12 * ||G||.
inline TeugelBasis orthogonalize(const Eigen::MatrixXd& gram,
                                 const std::vector<MultiIndex>& indices,
                                 double rank_tol = 1e-10) {
  const std::size_t count = indices.size();
  if (static_cast<std::size_t>(gram.rows()) != count ||
      static_cast<std::size_t>(gram.cols()) != count)
    throw ConfigError("orthogonalize: gram size does not match index count");

  const double gscale = std::max(gram.cwiseAbs().maxCoeff(), 1.0);
  const double neg_tol = 1e-8 * gscale;

  TeugelBasis basis;
  basis.indices = indices;
  basis.rank_tol = rank_tol;
  basis.degree = 0;
  for (const auto& p : indices) basis.degree = std::max(basis.degree, p.degree());
  basis.coeffs.assign(count, {});
  basis.kappa.assign(count, 0.0);
  basis.degenerate.assign(count, false);

  // The degeneracy threshold references the global max kappa, which is only
  // known after a sweep. During a sweep a running-max threshold keeps exact
  // rank drops out of the projections; iterate until the flag set is stable.
  std::vector<bool> flagged(count, false);
  for (int round = 0; round < 4; ++round) {
    std::vector<Eigen::VectorXd> cvec(count);
    std::vector<double> kap(count, 0.0);
    std::vector<bool> skip = flagged;
    double max_kappa = 0.0;
    auto inner = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
      return a.dot(gram.topLeftCorner(a.size(), b.size()) * b);
    };
    for (std::size_t k = 0; k < count; ++k) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k + 1));
      c(static_cast<Eigen::Index>(k)) = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < k; ++j) {
          if (skip[j]) continue;
          Eigen::VectorXd cj = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k + 1));
          cj.head(cvec[j].size()) = cvec[j];
          const double alpha = inner(c, cj) / kap[j];
          c -= alpha * cj;
        }
        if (pass == 0) {
          // Check residual off-diagonals; re-project once if any are large.
          bool needs_second = false;
          for (std::size_t j = 0; j < k && !needs_second; ++j) {
            if (skip[j]) continue;
            Eigen::VectorXd cj = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k + 1));
            cj.head(cvec[j].size()) = cvec[j];
            if (std::abs(inner(c, cj)) > 1e-12 * gscale) needs_second = true;
          }
          if (!needs_second) break;
        }
      }
      double residual = inner(c, c);
      if (residual < -neg_tol)
        throw NumericalError("orthogonalize: negative residual " + std::to_string(residual) +
                             " at index " + indices[k].to_string());
      residual = std::max(residual, 0.0);
      cvec[k] = c;
      kap[k] = residual;
      max_kappa = std::max(max_kappa, residual);
      if (kap[k] <= rank_tol * max_kappa) skip[k] = true;
    }
    std::vector<bool> next(count, false);
    for (std::size_t k = 0; k < count; ++k) next[k] = kap[k] <= rank_tol * max_kappa;
    const bool stable = next == flagged;
    flagged = next;
    for (std::size_t k = 0; k < count; ++k) {
      basis.coeffs[k].assign(k + 1, 0.0);
      for (std::size_t j = 0; j <= k; ++j) basis.coeffs[k][j] = cvec[k](static_cast<Eigen::Index>(j));
      basis.kappa[k] = kap[k];
      basis.degenerate[k] = flagged[k];
    }
    if (stable) break;
  }
  basis.nondegenerate.clear();
  for (std::size_t k = 0; k < count; ++k)
    if (!basis.degenerate[k]) basis.nondegenerate.push_back(k);
  return basis;
}

/// Path-wise evaluation of X^p, Y^p and H^p. Precomputes, per basis index,
/// the compensator rate and the degree-1 Gaussian loadings so increments
/// over grid cells are exact sums over the cell's jumps.
class BasisEvaluator {
public:
  BasisEvaluator(const TeugelBasis& basis, const MomentTable& moments, const LevyModel& model)
      : basis_(&basis), model_(&model) {
    const std::size_t count = basis.size();
    const std::size_t n = model.dimension();
    comp_rate_.assign(count, 0.0);
    gauss_load_.assign(count, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)));
    for (std::size_t k = 0; k < count; ++k) {
      Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
      for (std::size_t j = 0; j <= k; ++j) {
        const double c = basis.coeffs[k][j];
        if (c == 0.0) continue;
        comp_rate_[k] += c * moments.at(basis.indices[j]);
        if (basis.indices[j].is_unit())
          w(static_cast<Eigen::Index>(basis.indices[j].unit_axis())) += c;
      }
      // Gaussian increments enter through unit indices; fold the covariance
      // square root into per-index loadings on the unit normals.
      if (model.has_gaussian_part())
        gauss_load_[k] = model.gaussian_cov_sqrt().transpose() * w;
    }
  }

  const TeugelBasis& basis() const { return *basis_; }

  /// X^p(t): running sum over jumps of the p-monomial of the jump size.
  static double power_jump(const JumpPath& path, const MultiIndex& p, double t) {
    double sum = 0.0;
    for (const auto& j : path.jumps) {
      if (j.time > t) break;
      sum += monomial(j.size, p);
    }
    return sum;
  }

  /// H^p(t) at position k. Degenerate indices error unless explicitly allowed
  /// (their path values are identically zero up to roundoff).
  double teugel_at(const JumpPath& path, std::size_t k, double t,
                   bool allow_degenerate = false) const {
    check_position(k, allow_degenerate);
    double sum = -comp_rate_[k] * t;
    for (const auto& jump : path.jumps) {
      if (jump.time > t) break;
      for (std::size_t j = 0; j <= k; ++j) {
        const double c = basis_->coeffs[k][j];
        if (c != 0.0) sum += c * monomial(jump.size, basis_->indices[j]);
      }
    }
    if (path.has_gaussian && !gauss_load_[k].isZero(0.0))
      sum += gaussian_between(path, k, 0.0, t);
    return sum;
  }

  double teugel_at(const JumpPath& path, const MultiIndex& p, double t,
                   bool allow_degenerate = false) const {
    return teugel_at(path, basis_->position_of(p), t, allow_degenerate);
  }

  /// Exact increment of H^p over grid cell `cell`.
  double increment(const JumpPath& path, std::size_t k, int cell,
                   bool allow_degenerate = false) const {
    check_position(k, allow_degenerate);
    const double dt = path.dt();
    const double t0 = cell * dt;
    double sum = -comp_rate_[k] * dt;
    auto [lo, hi] = path.jumps_in(t0, t0 + dt);
    for (std::size_t ji = lo; ji < hi; ++ji) {
      for (std::size_t j = 0; j <= k; ++j) {
        const double c = basis_->coeffs[k][j];
        if (c != 0.0) sum += c * monomial(path.jumps[ji].size, basis_->indices[j]);
      }
    }
    if (path.has_gaussian && !gauss_load_[k].isZero(0.0)) {
      const double sdt = std::sqrt(dt);
      for (Eigen::Index d = 0; d < gauss_load_[k].size(); ++d)
        if (gauss_load_[k](d) != 0.0)
          sum += gauss_load_[k](d) * sdt * path.gaussian_unit(cell, static_cast<int>(d));
    }
    return sum;
  }

  /// Increments of all non-degenerate indices over one cell, in basis order.
  void increments(const JumpPath& path, int cell, std::vector<double>& out) const {
    const auto& nd = basis_->nondegenerate;
    out.assign(nd.size(), 0.0);
    const double dt = path.dt();
    const double t0 = cell * dt;
    for (std::size_t i = 0; i < nd.size(); ++i) out[i] = -comp_rate_[nd[i]] * dt;
    auto [lo, hi] = path.jumps_in(t0, t0 + dt);
    if (hi > lo) {
      std::vector<double> monoms(basis_->size());
      for (std::size_t ji = lo; ji < hi; ++ji) {
        for (std::size_t j = 0; j < basis_->size(); ++j)
          monoms[j] = monomial(path.jumps[ji].size, basis_->indices[j]);
        for (std::size_t i = 0; i < nd.size(); ++i) {
          const std::size_t k = nd[i];
          double s = 0.0;
          for (std::size_t j = 0; j <= k; ++j) {
            const double c = basis_->coeffs[k][j];
            if (c != 0.0) s += c * monoms[j];
          }
          out[i] += s;
        }
      }
    }
    if (path.has_gaussian) {
      const double sdt = std::sqrt(dt);
      const Eigen::Index n = static_cast<Eigen::Index>(model_->dimension());
      for (Eigen::Index d = 0; d < n; ++d) {
        bool any = false;
        for (std::size_t i = 0; i < nd.size() && !any; ++i) any = gauss_load_[nd[i]](d) != 0.0;
        if (!any) continue;
        const double z = sdt * path.gaussian_unit(cell, static_cast<int>(d));
        for (std::size_t i = 0; i < nd.size(); ++i) out[i] += gauss_load_[nd[i]](d) * z;
      }
    }
  }

private:
  void check_position(std::size_t k, bool allow_degenerate) const {
    if (k >= basis_->size()) throw ConfigError("BasisEvaluator: position out of range");
    if (!allow_degenerate && basis_->degenerate[k])
      throw ConfigError("BasisEvaluator: index " + basis_->indices[k].to_string() +
                        " is degenerate");
  }

  // Gaussian contribution over [t0, t1], accruing linearly inside a cell.
  double gaussian_between(const JumpPath& path, std::size_t k, double t0, double t1) const {
    const double dt = path.dt();
    const double sdt = std::sqrt(dt);
    double sum = 0.0;
    const int c_lo = static_cast<int>(t0 / dt);
    const int c_hi = std::min(static_cast<int>(std::ceil(t1 / dt)), path.grid_cells);
    for (int c = c_lo; c < c_hi; ++c) {
      const double overlap =
          (std::min(t1, (c + 1) * dt) - std::max(t0, c * dt)) / dt;
      if (overlap <= 0.0) continue;
      for (Eigen::Index d = 0; d < gauss_load_[k].size(); ++d)
        if (gauss_load_[k](d) != 0.0)
          sum += overlap * gauss_load_[k](d) * sdt * path.gaussian_unit(c, static_cast<int>(d));
    }
    return sum;
  }

  static double monomial(const Eigen::VectorXd& x, const MultiIndex& p) {
    double v = 1.0;
    for (std::size_t i = 0; i < p.dimension(); ++i)
      for (int e = 0; e < p[i]; ++e) v *= x(static_cast<Eigen::Index>(i));
    return v;
  }

  const TeugelBasis* basis_;
  const LevyModel* model_;
  std::vector<double> comp_rate_;
  std::vector<Eigen::VectorXd> gauss_load_;
};

struct CovariationEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

/// Monte Carlo orthogonality oracle: mean of H^p(T) H^q(T) over paths.
/// Expectation is delta_{pq} kappa_p T for non-degenerate indices.
inline CovariationEstimate realized_covariation(const std::vector<JumpPath>& paths,
                                                const BasisEvaluator& eval,
                                                const MultiIndex& p, const MultiIndex& q,
                                                double horizon) {
  if (paths.size() < 2) throw ConfigError("realized_covariation: need at least 2 paths");
  const std::size_t kp = eval.basis().position_of(p);
  const std::size_t kq = eval.basis().position_of(q);
  double sum = 0.0, sumsq = 0.0;
  for (const auto& path : paths) {
    const double hp = eval.teugel_at(path, kp, horizon, true);
    const double hq = (kq == kp) ? hp : eval.teugel_at(path, kq, horizon, true);
    const double prod = hp * hq;
    sum += prod;
    sumsq += prod * prod;
  }
  const double n = static_cast<double>(paths.size());
  CovariationEstimate est;
  est.estimate = sum / n;
  const double var = std::max(0.0, (sumsq - sum * sum / n) / (n - 1.0));
  est.stderr_ = std::sqrt(var / n);
  return est;
}

}  // namespace teugel
