#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "teugel/control.hpp"
#include "teugel/errors.hpp"
#include "teugel/path.hpp"
#include "teugel/problem.hpp"
#include "teugel/teugel_basis.hpp"

namespace teugel {

/// One path of the controlled state on the grid, with the control values
/// applied per cell (row grid = value at T, used by the cost trapezoid).
struct StatePath {
  std::vector<double> times;
  Eigen::MatrixXd states;    // (grid+1) x m
  Eigen::MatrixXd controls;  // (grid+1) x du
  bool finite = true;
};

/// Monte Carlo substrate shared by the solvers: jump paths plus the dense
/// state/control history, stored column-per-path so per-path slices are
/// contiguous. Immutable once built.
struct PathBundle {
  double horizon = 0.0;
  int grid = 0;
  std::size_t count = 0;
  std::size_t state_dim = 0;
  std::size_t control_dim = 0;
  std::vector<JumpPath> paths;
  Eigen::MatrixXd states;    // ((grid+1) * m) x N
  Eigen::MatrixXd controls;  // ((grid+1) * du) x N, may be empty
  std::vector<std::uint8_t> ok;

  double dt() const { return horizon / grid; }
  double time(int step) const { return step * dt(); }

  const double* state(std::size_t path, int step) const {
    return &states(static_cast<Eigen::Index>(step) * static_cast<Eigen::Index>(state_dim),
                   static_cast<Eigen::Index>(path));
  }
  const double* control(std::size_t path, int step) const {
    return &controls(static_cast<Eigen::Index>(step) * static_cast<Eigen::Index>(control_dim),
                     static_cast<Eigen::Index>(path));
  }
  Eigen::Map<const Eigen::VectorXd> state_vec(std::size_t path, int step) const {
    return {state(path, step), static_cast<Eigen::Index>(state_dim)};
  }
  std::size_t jumps_before(std::size_t path, int step) const {
    return paths[path].jump_count_up_to(time(step));
  }
};

inline std::vector<JumpPath> sample_paths(const LevyModel& model, double horizon, int grid,
                                          std::size_t count, std::uint64_t seed) {
  std::vector<JumpPath> paths;
  paths.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    paths.push_back(sample_path(model, horizon, grid, seed, i));
  return paths;
}

/// Resolves the problem's jump coefficients against the basis order once;
/// indices absent from the problem contribute zero.
struct ForwardContext {
  const ProblemSpec* spec = nullptr;
  const BasisEvaluator* eval = nullptr;
  std::vector<const std::vector<Polynomial>*> gamma;  // aligned with nondegenerate

  ForwardContext(const ProblemSpec& s, const BasisEvaluator& e) : spec(&s), eval(&e) {
    const auto& basis = e.basis();
    for (std::size_t pos : basis.nondegenerate)
      gamma.push_back(s.jump_coefficient(basis.indices[pos]));
  }
};

namespace detail {

/// One Euler cell update: x_next = x + g dt + sum_p gamma^p dH^p.
inline void euler_step(const ForwardContext& ctx, const double* x, const double* v,
                       const std::vector<double>& dh, double dt, double* x_next) {
  const std::size_t m = ctx.spec->state_dim();
  for (std::size_t j = 0; j < m; ++j)
    x_next[j] = x[j] + ctx.spec->drift()[j](x, v) * dt;
  for (std::size_t k = 0; k < ctx.gamma.size(); ++k) {
    if (!ctx.gamma[k] || dh[k] == 0.0) continue;
    for (std::size_t j = 0; j < m; ++j) x_next[j] += (*ctx.gamma[k])[j](x, v) * dh[k];
  }
}

inline bool all_finite(const double* x, std::size_t m) {
  for (std::size_t j = 0; j < m; ++j)
    if (!std::isfinite(x[j])) return false;
  return true;
}

}  // namespace detail

/// Euler scheme for the controlled system along one jump path. Jumps inside
/// a cell act through the exact basis increment with the cell's left-limit
/// state. Spiked controls evaluate both branches against the base
/// trajectory, which is integrated alongside.
inline StatePath integrate_forward(const ProblemSpec& spec, const BasisEvaluator& eval,
                                   const Control& control, const JumpPath& path) {
  ForwardContext ctx(spec, eval);
  const std::size_t m = spec.state_dim();
  const std::size_t du = spec.control_dim();
  const int grid = path.grid_cells;
  const double dt = path.dt();

  StatePath out;
  out.times.resize(static_cast<std::size_t>(grid) + 1);
  out.states.resize(grid + 1, static_cast<Eigen::Index>(m));
  out.controls.resize(grid + 1, static_cast<Eigen::Index>(du));
  for (int i = 0; i <= grid; ++i) out.times[static_cast<std::size_t>(i)] = i * dt;

  Eigen::VectorXd x = spec.x0(), xb = spec.x0(), x_next(static_cast<Eigen::Index>(m)),
                  xb_next(static_cast<Eigen::Index>(m));
  const bool track_base = control.is_spiked();
  std::vector<double> dh;
  out.states.row(0) = x.transpose();
  for (int i = 0; i <= grid; ++i) {
    const double t = i * dt;
    const Eigen::VectorXd v = control.value(t, track_base ? xb : x);
    out.controls.row(i) = v.transpose();
    if (i == grid) break;
    eval.increments(path, i, dh);
    detail::euler_step(ctx, x.data(), v.data(), dh, dt, x_next.data());
    if (track_base) {
      const Eigen::VectorXd vb = control.base().value(t, xb);
      detail::euler_step(ctx, xb.data(), vb.data(), dh, dt, xb_next.data());
      xb = xb_next;
    }
    if (!detail::all_finite(x_next.data(), m)) {
      out.finite = false;
      for (int r = i + 1; r <= grid; ++r) {
        out.states.row(r) = x.transpose();
        out.controls.row(r) = out.controls.row(i);
      }
      break;
    }
    x = x_next;
    out.states.row(i + 1) = x.transpose();
  }
  return out;
}

/// Forward integration over a whole path set into a dense bundle.
inline PathBundle integrate_bundle(const ProblemSpec& spec, const BasisEvaluator& eval,
                                   const Control& control, std::vector<JumpPath> paths) {
  if (paths.empty()) throw ConfigError("integrate_bundle: need at least one path");
  PathBundle b;
  b.horizon = paths.front().horizon;
  b.grid = paths.front().grid_cells;
  b.count = paths.size();
  b.state_dim = spec.state_dim();
  b.control_dim = spec.control_dim();
  b.paths = std::move(paths);
  b.states.resize(static_cast<Eigen::Index>((b.grid + 1) * b.state_dim),
                  static_cast<Eigen::Index>(b.count));
  b.controls.resize(static_cast<Eigen::Index>((b.grid + 1) * b.control_dim),
                    static_cast<Eigen::Index>(b.count));
  b.ok.assign(b.count, 1);
  for (std::size_t p = 0; p < b.count; ++p) {
    StatePath sp = integrate_forward(spec, eval, control, b.paths[p]);
    if (!sp.finite) b.ok[p] = 0;
    for (int i = 0; i <= b.grid; ++i) {
      for (std::size_t j = 0; j < b.state_dim; ++j)
        b.states(static_cast<Eigen::Index>(i * b.state_dim + j), static_cast<Eigen::Index>(p)) =
            sp.states(i, static_cast<Eigen::Index>(j));
      for (std::size_t j = 0; j < b.control_dim; ++j)
        b.controls(static_cast<Eigen::Index>(i * b.control_dim + j),
                   static_cast<Eigen::Index>(p)) = sp.controls(i, static_cast<Eigen::Index>(j));
    }
  }
  return b;
}

/// Bundle whose "state" is the Levy process itself; the feature substrate
/// for stand-alone BSDE runs.
inline PathBundle levy_state_bundle(const LevyModel& model, std::vector<JumpPath> paths) {
  if (paths.empty()) throw ConfigError("levy_state_bundle: need at least one path");
  PathBundle b;
  b.horizon = paths.front().horizon;
  b.grid = paths.front().grid_cells;
  b.count = paths.size();
  b.state_dim = model.dimension();
  b.control_dim = 0;
  b.paths = std::move(paths);
  b.states.resize(static_cast<Eigen::Index>((b.grid + 1) * b.state_dim),
                  static_cast<Eigen::Index>(b.count));
  b.controls.resize(0, static_cast<Eigen::Index>(b.count));
  b.ok.assign(b.count, 1);
  const double dt = b.dt();
  const Eigen::MatrixXd& root = model.gaussian_cov_sqrt();
  const bool gauss = model.has_gaussian_part();
  const double sdt = std::sqrt(dt);
  const Eigen::Index n = static_cast<Eigen::Index>(model.dimension());
  for (std::size_t p = 0; p < b.count; ++p) {
    const JumpPath& path = b.paths[p];
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::size_t next_jump = 0;
    for (int i = 0; i <= b.grid; ++i) {
      for (Eigen::Index j = 0; j < n; ++j)
        b.states(static_cast<Eigen::Index>(i) * n + j, static_cast<Eigen::Index>(p)) = x(j);
      if (i == b.grid) break;
      x += model.drift() * dt;
      if (gauss) {
        Eigen::VectorXd z(n);
        for (Eigen::Index j = 0; j < n; ++j) z(j) = path.gaussian_unit(i, static_cast<int>(j));
        x += root * z * sdt;
      }
      const double t_hi = (i + 1) * dt;
      while (next_jump < path.jumps.size() && path.jumps[next_jump].time <= t_hi)
        x += path.jumps[next_jump++].size;
    }
  }
  return b;
}

struct MonteCarloValue {
  double value = 0.0;
  double stderr_ = 0.0;
};

namespace detail {

inline MonteCarloValue reduce_mean(const std::vector<double>& samples) {
  double sum = 0.0, sumsq = 0.0;
  for (double s : samples) {
    sum += s;
    sumsq += s * s;
  }
  const double n = static_cast<double>(samples.size());
  MonteCarloValue out;
  out.value = sum / n;
  if (samples.size() > 1)
    out.stderr_ = std::sqrt(std::max(0.0, (sumsq - sum * sum / n) / (n - 1.0)) / n);
  return out;
}

}  // namespace detail

/// Cost J = E int_0^T ell(x, v) dt + E h(x0, x(T)), trapezoidal in time.
inline MonteCarloValue cost(const ProblemSpec& spec, const PathBundle& bundle) {
  if (bundle.count < 1) throw ConfigError("cost: empty bundle");
  const double dt = bundle.dt();
  std::vector<double> per_path(bundle.count, 0.0);
  for (std::size_t p = 0; p < bundle.count; ++p) {
    double integral = 0.0;
    double prev = spec.running_cost()(bundle.state(p, 0), bundle.control(p, 0));
    for (int i = 1; i <= bundle.grid; ++i) {
      const double cur = spec.running_cost()(bundle.state(p, i), bundle.control(p, i));
      integral += 0.5 * (prev + cur) * dt;
      prev = cur;
    }
    per_path[p] =
        integral + spec.terminal_cost()(spec.x0().data(), bundle.state(p, bundle.grid));
  }
  return detail::reduce_mean(per_path);
}

/// E G(x0, x(T)) componentwise with standard errors.
inline std::vector<MonteCarloValue> constraint_value(const ProblemSpec& spec,
                                                     const PathBundle& bundle) {
  std::vector<MonteCarloValue> out;
  std::vector<double> per_path(bundle.count);
  for (const auto& g : spec.constraint()) {
    for (std::size_t p = 0; p < bundle.count; ++p)
      per_path[p] = g(spec.x0().data(), bundle.state(p, bundle.grid));
    out.push_back(detail::reduce_mean(per_path));
  }
  return out;
}

/// sup over grid times of (E |v(t)|^8)^{1/8}, the admissibility norm.
/// Feedback controls are evaluated on the bundle's simulated states.
inline double admissibility_norm(const Control& control, const PathBundle& bundle) {
  if (bundle.count < 1) throw ConfigError("admissibility_norm: empty bundle");
  double sup = 0.0;
  for (int i = 0; i <= bundle.grid; ++i) {
    const double t = bundle.time(i);
    double mean8 = 0.0;
    for (std::size_t p = 0; p < bundle.count; ++p) {
      const Eigen::VectorXd v = control.value(t, bundle.state_vec(p, i));
      const double a = v.norm();
      mean8 += std::pow(a, 8.0);
    }
    mean8 /= static_cast<double>(bundle.count);
    sup = std::max(sup, std::pow(mean8, 1.0 / 8.0));
  }
  return sup;
}

}  // namespace teugel
