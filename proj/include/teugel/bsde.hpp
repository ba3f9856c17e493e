#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "teugel/errors.hpp"
#include "teugel/forward.hpp"
#include "teugel/teugel_basis.hpp"

namespace teugel {

/// Regression dictionary for conditional expectations: polynomial features
/// of the state up to degree 2 or 3, optionally with the running jump count.
struct FeatureSpec {
  int degree = 2;
  bool jump_count = true;

  static FeatureSpec parse(const std::string& kind, bool jump_count = true) {
    FeatureSpec f;
    f.jump_count = jump_count;
    if (kind == "poly2")
      f.degree = 2;
    else if (kind == "poly3")
      f.degree = 3;
    else
      throw ConfigError("FeatureSpec: unknown kind '" + kind + "' (poly2|poly3)");
    return f;
  }
};

class FeatureBuilder {
public:
  FeatureBuilder(FeatureSpec spec, std::size_t state_dim) : spec_(spec), m_(state_dim) {
    if (spec_.degree < 1 || spec_.degree > 3)
      throw ConfigError("FeatureBuilder: degree must be 1, 2 or 3");
    count_ = 1 + m_;
    if (spec_.degree >= 2) count_ += m_ * (m_ + 1) / 2;
    if (spec_.degree >= 3) count_ += m_ * (m_ + 1) * (m_ + 2) / 6;
    if (spec_.jump_count) count_ += 1;
  }

  std::size_t size() const { return count_; }

  void fill(const PathBundle& bundle, std::size_t path, int step, double* out) const {
    const double* x = bundle.state(path, step);
    std::size_t c = 0;
    out[c++] = 1.0;
    for (std::size_t j = 0; j < m_; ++j) out[c++] = x[j];
    if (spec_.degree >= 2)
      for (std::size_t j = 0; j < m_; ++j)
        for (std::size_t l = j; l < m_; ++l) out[c++] = x[j] * x[l];
    if (spec_.degree >= 3)
      for (std::size_t j = 0; j < m_; ++j)
        for (std::size_t l = j; l < m_; ++l)
          for (std::size_t r = l; r < m_; ++r) out[c++] = x[j] * x[l] * x[r];
    if (spec_.jump_count)
      out[c++] = static_cast<double>(bundle.jumps_before(path, step));
  }

private:
  FeatureSpec spec_;
  std::size_t m_;
  std::size_t count_;
};

/// Backward problem: terminal condition per path and driver f(t, y, z).
/// z is laid out index-major over the basis' non-degenerate positions,
/// each block of length ydim; entries are the true martingale integrands.
struct BsdeProblem {
  Eigen::Index ydim = 1;
  std::function<void(const PathBundle&, std::size_t path, double* out)> terminal;
  std::function<void(const PathBundle&, int step, std::size_t path, double t, const double* y,
                     const double* z, double* out)>
      driver;
  double lipschitz = 0.0;
  bool driver_uses_y = true;
  std::size_t symmetrize_dim = 0;  // > 0: ydim = d*d, symmetrize each step
};

/// Regression-coefficient representation of the backward solution.
/// Per-path values are reconstructed on demand from the per-step
/// coefficients; the reconstruction repeats the solver's arithmetic, so
/// reconstructed values equal the backward-pass values bitwise.
class BSDESolution {
public:
  int grid = 0;
  Eigen::Index ydim = 1;
  std::vector<std::size_t> z_positions;            // basis positions (non-degenerate)
  std::vector<double> z_kappa;                     // matching norms
  std::vector<Eigen::MatrixXd> beta_y;             // [step] (K x ydim)
  std::vector<std::vector<Eigen::MatrixXd>> beta_z;  // [step][zi] (K x ydim)
  std::vector<double> step_residual_rms;           // projected residual per step
  std::vector<int> fixed_point_iterations;
  std::vector<std::string> warnings;

  std::size_t z_count() const { return z_positions.size(); }

  /// Y_step and Z_step for one path (y_out: ydim, z_out: z_count * ydim).
  void evaluate(const PathBundle& bundle, const FeatureBuilder& features,
                const BsdeProblem& problem, int step, std::size_t path, double* y_out,
                double* z_out) const;
};

namespace detail {

inline void symmetrize_in_place(double* y, std::size_t d) {
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a + 1; b < d; ++b) {
      const double avg = 0.5 * (y[a * d + b] + y[b * d + a]);
      y[a * d + b] = avg;
      y[b * d + a] = avg;
    }
}

/// Per-path implicit step: y = yhat + f(t, y, z) dt by damped fixed point.
inline int solve_implicit(const BsdeProblem& problem, const PathBundle& bundle, int step,
                          std::size_t path, double t, double dt, const double* yhat,
                          const double* z, double* y) {
  const Eigen::Index d = problem.ydim;
  std::vector<double> f(static_cast<std::size_t>(d));
  if (!problem.driver_uses_y) {
    problem.driver(bundle, step, path, t, yhat, z, f.data());
    for (Eigen::Index j = 0; j < d; ++j) y[j] = yhat[j] + f[static_cast<std::size_t>(j)] * dt;
    return 1;
  }
  const double damping = problem.lipschitz * dt > 1.0 ? 0.5 : 1.0;
  for (Eigen::Index j = 0; j < d; ++j) y[j] = yhat[j];
  for (int iter = 1; iter <= 50; ++iter) {
    problem.driver(bundle, step, path, t, y, z, f.data());
    double delta = 0.0, scale = 1.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double target = yhat[j] + f[static_cast<std::size_t>(j)] * dt;
      const double next = y[j] + damping * (target - y[j]);
      delta = std::max(delta, std::abs(next - y[j]));
      scale = std::max(scale, std::abs(next));
      y[j] = next;
    }
    if (delta <= 1e-10 * scale) return iter;
  }
  throw NumericalError("solve_bsde: fixed point did not converge at step " +
                       std::to_string(step));
}

}  // namespace detail

/// Backward induction with global least-squares conditional expectations:
///   Z^p_i = E[(Y_{i+1} - E[Y_{i+1}|F_i]) dH^p_i | F_i] / (kappa_p dt)
///   Y_i   = E[Y_{i+1}|F_i] + f(t_i, Y_i, Z_i) dt
/// The centered Z target leaves constant terminal data with Z identically
/// zero and reduces regression variance otherwise.
inline BSDESolution solve_bsde(const PathBundle& bundle, const BasisEvaluator& eval,
                               const FeatureBuilder& features, const BsdeProblem& problem) {
  const auto& basis = eval.basis();
  const std::size_t n_paths = bundle.count;
  const int grid = bundle.grid;
  const double dt = bundle.dt();
  const Eigen::Index ydim = problem.ydim;
  const std::size_t nz = basis.nondegenerate.size();
  const Eigen::Index k_feat = static_cast<Eigen::Index>(features.size());
  if (n_paths < features.size())
    throw ConfigError("solve_bsde: more features than paths");

  BSDESolution sol;
  sol.grid = grid;
  sol.ydim = ydim;
  sol.z_positions = basis.nondegenerate;
  for (std::size_t pos : basis.nondegenerate) sol.z_kappa.push_back(basis.kappa[pos]);
  sol.beta_y.assign(static_cast<std::size_t>(grid), Eigen::MatrixXd());
  sol.beta_z.assign(static_cast<std::size_t>(grid), {});
  sol.step_residual_rms.assign(static_cast<std::size_t>(grid), 0.0);
  sol.fixed_point_iterations.assign(static_cast<std::size_t>(grid), 0);

  Eigen::MatrixXd y_next(static_cast<Eigen::Index>(n_paths), ydim);
  for (std::size_t p = 0; p < n_paths; ++p) {
    std::vector<double> term(static_cast<std::size_t>(ydim));
    problem.terminal(bundle, p, term.data());
    if (problem.symmetrize_dim > 0) detail::symmetrize_in_place(term.data(), problem.symmetrize_dim);
    for (Eigen::Index j = 0; j < ydim; ++j) y_next(static_cast<Eigen::Index>(p), j) = term[j];
  }

  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMat phi(static_cast<Eigen::Index>(n_paths), k_feat);
  Eigen::MatrixXd dh(static_cast<Eigen::Index>(n_paths), static_cast<Eigen::Index>(nz));
  Eigen::MatrixXd y_cur(static_cast<Eigen::Index>(n_paths), ydim);
  std::vector<double> dh_row;
  std::vector<double> zrow(nz * static_cast<std::size_t>(ydim));
  std::vector<double> yrow(static_cast<std::size_t>(ydim));
  std::vector<double> yhat_row(static_cast<std::size_t>(ydim));

  for (int step = grid - 1; step >= 0; --step) {
    const double t = bundle.time(step);
    for (std::size_t p = 0; p < n_paths; ++p) {
      features.fill(bundle, p, step, phi.row(static_cast<Eigen::Index>(p)).data());
      eval.increments(bundle.paths[p], step, dh_row);
      for (std::size_t k = 0; k < nz; ++k)
        dh(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k)) = dh_row[k];
    }
    // phi rows are strided views; assemble the normal equations directly.
    Eigen::MatrixXd gram = phi.transpose() * phi;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gram);
    if (qr.rank() < k_feat)
      sol.warnings.push_back("step " + std::to_string(step) +
                             ": regression rank " + std::to_string(qr.rank()) + " < " +
                             std::to_string(k_feat) + ", features reduced");

    Eigen::MatrixXd beta_y = qr.solve(phi.transpose() * y_next);
    Eigen::MatrixXd yhat = phi * beta_y;

    std::vector<Eigen::MatrixXd> beta_z(nz);
    std::vector<Eigen::MatrixXd> zhat(nz);
    for (std::size_t k = 0; k < nz; ++k) {
      const double scale = 1.0 / (basis.kappa[basis.nondegenerate[k]] * dt);
      Eigen::MatrixXd target =
          (((y_next - yhat).array().colwise() * dh.col(static_cast<Eigen::Index>(k)).array()) *
           scale)
              .matrix();
      beta_z[k] = qr.solve(phi.transpose() * target);
      zhat[k] = phi * beta_z[k];
    }

    double res_sq = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) {
      const Eigen::Index pi = static_cast<Eigen::Index>(p);
      for (Eigen::Index j = 0; j < ydim; ++j) yhat_row[static_cast<std::size_t>(j)] = yhat(pi, j);
      for (std::size_t k = 0; k < nz; ++k)
        for (Eigen::Index j = 0; j < ydim; ++j)
          zrow[k * static_cast<std::size_t>(ydim) + static_cast<std::size_t>(j)] = zhat[k](pi, j);
      sol.fixed_point_iterations[static_cast<std::size_t>(step)] = std::max(
          sol.fixed_point_iterations[static_cast<std::size_t>(step)],
          detail::solve_implicit(problem, bundle, step, p, t, dt, yhat_row.data(), zrow.data(),
                                 yrow.data()));
      if (problem.symmetrize_dim > 0)
        detail::symmetrize_in_place(yrow.data(), problem.symmetrize_dim);
      for (Eigen::Index j = 0; j < ydim; ++j) y_cur(pi, j) = yrow[static_cast<std::size_t>(j)];
      // discrete relation residual before projection
      for (Eigen::Index j = 0; j < ydim; ++j) {
        double r = yhat(pi, j) - y_next(pi, j);
        for (std::size_t k = 0; k < nz; ++k)
          r += zhat[k](pi, j) * dh(pi, static_cast<Eigen::Index>(k));
        res_sq += r * r;
      }
    }
    sol.step_residual_rms[static_cast<std::size_t>(step)] =
        std::sqrt(res_sq / static_cast<double>(n_paths));
    sol.beta_y[static_cast<std::size_t>(step)] = std::move(beta_y);
    sol.beta_z[static_cast<std::size_t>(step)] = std::move(beta_z);
    y_next = y_cur;
  }
  return sol;
}

inline void BSDESolution::evaluate(const PathBundle& bundle, const FeatureBuilder& features,
                                   const BsdeProblem& problem, int step, std::size_t path,
                                   double* y_out, double* z_out) const {
  const std::size_t nz = z_positions.size();
  if (step == grid) {
    problem.terminal(bundle, path, y_out);
    if (problem.symmetrize_dim > 0) detail::symmetrize_in_place(y_out, problem.symmetrize_dim);
    if (z_out)
      for (std::size_t k = 0; k < nz * static_cast<std::size_t>(ydim); ++k) z_out[k] = 0.0;
    return;
  }
  std::vector<double> phi(features.size());
  features.fill(bundle, path, step, phi.data());
  Eigen::Map<const Eigen::VectorXd> phi_v(phi.data(), static_cast<Eigen::Index>(phi.size()));
  const auto& by = beta_y[static_cast<std::size_t>(step)];
  std::vector<double> yhat(static_cast<std::size_t>(ydim));
  for (Eigen::Index j = 0; j < ydim; ++j) yhat[static_cast<std::size_t>(j)] = by.col(j).dot(phi_v);
  std::vector<double> z(nz * static_cast<std::size_t>(ydim));
  for (std::size_t k = 0; k < nz; ++k) {
    const auto& bz = beta_z[static_cast<std::size_t>(step)][k];
    for (Eigen::Index j = 0; j < ydim; ++j)
      z[k * static_cast<std::size_t>(ydim) + static_cast<std::size_t>(j)] = bz.col(j).dot(phi_v);
  }
  detail::solve_implicit(problem, bundle, step, path, bundle.time(step), bundle.dt(),
                         yhat.data(), z.data(), y_out);
  if (problem.symmetrize_dim > 0) detail::symmetrize_in_place(y_out, problem.symmetrize_dim);
  if (z_out)
    for (std::size_t k = 0; k < z.size(); ++k) z_out[k] = z[k];
}

struct ResidualReport {
  std::vector<double> projected_rms;   // per step
  std::vector<double> threshold;       // 3x expected noise level per step
  std::vector<int> flagged_steps;
};

/// Projects the discrete backward-relation residual
///   Y_i - Y_{i+1} - f dt + sum_p Z^p dH^p
/// onto the regression dictionary extended with the dH-weighted features.
/// A residual with structure in that span signals a corrupted solution.
/// `scale_z` rescales Z before the check (negative controls use != 1).
inline ResidualReport residual_check(const BSDESolution& sol, const BsdeProblem& problem,
                                     const PathBundle& bundle, const BasisEvaluator& eval,
                                     const FeatureBuilder& features, double scale_z = 1.0) {
  const std::size_t n_paths = bundle.count;
  const int grid = bundle.grid;
  const double dt = bundle.dt();
  const Eigen::Index ydim = problem.ydim;
  const std::size_t nz = sol.z_positions.size();
  const Eigen::Index kf = static_cast<Eigen::Index>(features.size());
  const Eigen::Index kd = kf * static_cast<Eigen::Index>(1 + nz);

  ResidualReport rep;
  rep.projected_rms.assign(static_cast<std::size_t>(grid), 0.0);
  rep.threshold.assign(static_cast<std::size_t>(grid), 0.0);

  Eigen::MatrixXd dict(static_cast<Eigen::Index>(n_paths), kd);
  Eigen::MatrixXd resid(static_cast<Eigen::Index>(n_paths), ydim);
  std::vector<double> phi(features.size());
  std::vector<double> y_i(static_cast<std::size_t>(ydim)), y_ip(static_cast<std::size_t>(ydim));
  std::vector<double> z(nz * static_cast<std::size_t>(ydim));
  std::vector<double> f(static_cast<std::size_t>(ydim));
  std::vector<double> dh_row;

  for (int step = 0; step < grid; ++step) {
    const double t = bundle.time(step);
    for (std::size_t p = 0; p < n_paths; ++p) {
      const Eigen::Index pi = static_cast<Eigen::Index>(p);
      features.fill(bundle, p, step, phi.data());
      eval.increments(bundle.paths[p], step, dh_row);
      sol.evaluate(bundle, features, problem, step, p, y_i.data(), z.data());
      for (auto& zv : z) zv *= scale_z;
      sol.evaluate(bundle, features, problem, step + 1, p, y_ip.data(), nullptr);
      problem.driver(bundle, step, p, t, y_i.data(), z.data(), f.data());
      for (Eigen::Index j = 0; j < ydim; ++j) {
        double r = y_i[static_cast<std::size_t>(j)] - y_ip[static_cast<std::size_t>(j)] -
                   f[static_cast<std::size_t>(j)] * dt;
        for (std::size_t k = 0; k < nz; ++k)
          r += z[k * static_cast<std::size_t>(ydim) + static_cast<std::size_t>(j)] * dh_row[k];
        resid(pi, j) = r;
      }
      for (Eigen::Index c = 0; c < kf; ++c) dict(pi, c) = phi[static_cast<std::size_t>(c)];
      for (std::size_t k = 0; k < nz; ++k) {
        const double w = dh_row[k] / std::sqrt(sol.z_kappa[k] * dt);
        for (Eigen::Index c = 0; c < kf; ++c)
          dict(pi, kf * static_cast<Eigen::Index>(k + 1) + c) =
              phi[static_cast<std::size_t>(c)] * w;
      }
    }
    Eigen::MatrixXd gram = dict.transpose() * dict;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gram);
    Eigen::MatrixXd coef = qr.solve(dict.transpose() * resid);
    Eigen::MatrixXd proj = dict * coef;
    const double rms = std::sqrt(proj.squaredNorm() / static_cast<double>(n_paths));
    const double sigma = std::sqrt(resid.squaredNorm() / static_cast<double>(n_paths));
    const double expected =
        sigma * std::sqrt(static_cast<double>(kd) / static_cast<double>(n_paths));
    rep.projected_rms[static_cast<std::size_t>(step)] = rms;
    rep.threshold[static_cast<std::size_t>(step)] = 3.0 * expected + 1e-12;
    if (rms > rep.threshold[static_cast<std::size_t>(step)])
      rep.flagged_steps.push_back(step);
  }
  return rep;
}

}  // namespace teugel
