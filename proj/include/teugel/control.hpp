#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "teugel/errors.hpp"

namespace teugel {

/// Control domain U: a box or a finite value set.
struct ControlDomain {
  enum class Kind { Box, Finite };
  Kind kind = Kind::Box;
  Eigen::VectorXd lo, hi;                 // Box
  std::vector<Eigen::VectorXd> values;    // Finite

  static ControlDomain box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
    if (lo.size() != hi.size() || (hi - lo).minCoeff() < 0.0)
      throw ConfigError("ControlDomain: invalid box");
    ControlDomain d;
    d.kind = Kind::Box;
    d.lo = std::move(lo);
    d.hi = std::move(hi);
    return d;
  }
  static ControlDomain finite(std::vector<Eigen::VectorXd> values) {
    if (values.empty()) throw ConfigError("ControlDomain: empty finite set");
    ControlDomain d;
    d.kind = Kind::Finite;
    d.values = std::move(values);
    return d;
  }

  std::size_t dimension() const {
    return kind == Kind::Box ? static_cast<std::size_t>(lo.size())
                             : static_cast<std::size_t>(values.front().size());
  }

  bool contains(const Eigen::VectorXd& v, double tol = 1e-12) const {
    if (kind == Kind::Box)
      return (v - lo).minCoeff() >= -tol && (hi - v).minCoeff() >= -tol;
    for (const auto& w : values)
      if ((w - v).lpNorm<Eigen::Infinity>() <= tol) return true;
    return false;
  }

  /// Scan grid for maximum-condition sweeps: the finite set itself, or the
  /// box discretized with `steps` points per axis.
  std::vector<Eigen::VectorXd> scan_grid(int steps = 21) const {
    if (kind == Kind::Finite) return values;
    if (steps < 1) throw ConfigError("ControlDomain: scan steps must be >= 1");
    std::vector<Eigen::VectorXd> grid;
    const std::size_t d = dimension();
    std::vector<int> idx(d, 0);
    while (true) {
      Eigen::VectorXd v(static_cast<Eigen::Index>(d));
      for (std::size_t i = 0; i < d; ++i) {
        const double w = steps == 1 ? 0.5 : static_cast<double>(idx[i]) / (steps - 1);
        v(static_cast<Eigen::Index>(i)) =
            lo(static_cast<Eigen::Index>(i)) +
            w * (hi(static_cast<Eigen::Index>(i)) - lo(static_cast<Eigen::Index>(i)));
      }
      grid.push_back(std::move(v));
      std::size_t k = 0;
      while (k < d && ++idx[k] == steps) idx[k++] = 0;
      if (k == d) break;
    }
    return grid;
  }
};

/// Admissible control: deterministic in t, feedback in (t, x), or a spike
/// variation replacing the base control on [t0, t0 + rho).
class Control {
public:
  enum class Kind { Deterministic, Feedback, Spiked };
  using TimeFn = std::function<Eigen::VectorXd(double)>;
  using StateFn = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

  static Control constant(Eigen::VectorXd v) {
    Eigen::VectorXd value = std::move(v);
    return deterministic([value](double) { return value; });
  }
  static Control deterministic(TimeFn fn) {
    Control c;
    c.kind_ = Kind::Deterministic;
    c.time_fn_ = std::move(fn);
    return c;
  }
  static Control feedback(StateFn fn) {
    Control c;
    c.kind_ = Kind::Feedback;
    c.state_fn_ = std::move(fn);
    return c;
  }

  Kind kind() const { return kind_; }
  bool is_spiked() const { return kind_ == Kind::Spiked; }
  bool depends_on_state() const {
    if (kind_ == Kind::Feedback) return true;
    if (kind_ == Kind::Spiked)
      return base_->depends_on_state() || probe_->depends_on_state();
    return false;
  }

  double spike_start() const { return t0_; }
  double spike_length() const { return rho_; }
  const Control& base() const { return *base_; }
  const Control& probe() const { return *probe_; }
  bool in_spike(double t) const {
    return kind_ == Kind::Spiked && t >= t0_ && t < t0_ + rho_;
  }

  /// Control value at time t. Feedback controls read `state`; a spiked
  /// control evaluates both branches against the base trajectory's state,
  /// which callers must supply as `state`.
  Eigen::VectorXd value(double t, const Eigen::VectorXd& state) const {
    switch (kind_) {
      case Kind::Deterministic:
        return time_fn_(t);
      case Kind::Feedback:
        return state_fn_(t, state);
      case Kind::Spiked:
        return in_spike(t) ? probe_->value(t, state) : base_->value(t, state);
    }
    throw std::logic_error("unreachable");
  }

  friend Control spike_control(const Control& u, const Control& v, double t0, double rho,
                               double horizon);

private:
  Kind kind_ = Kind::Deterministic;
  TimeFn time_fn_;
  StateFn state_fn_;
  std::shared_ptr<const Control> base_, probe_;
  double t0_ = 0.0, rho_ = 0.0;
};

/// Spike variation: v on [t0, t0 + rho), u elsewhere.
inline Control spike_control(const Control& u, const Control& v, double t0, double rho,
                             double horizon) {
  if (!(rho > 0.0) || t0 < 0.0 || t0 + rho > horizon + 1e-12)
    throw ConfigError("spike_control: [t0, t0+rho] must lie inside [0, T]");
  if (u.is_spiked() || v.is_spiked())
    throw ConfigError("spike_control: nested spikes are not supported");
  Control c;
  c.kind_ = Control::Kind::Spiked;
  c.base_ = std::make_shared<Control>(u);
  c.probe_ = std::make_shared<Control>(v);
  c.t0_ = t0;
  c.rho_ = std::min(rho, horizon - t0);
  return c;
}

/// Distance d^ between a spiked control and its base: the measure of the
/// spike interval when base and probe differ there, else 0. Deterministic
/// controls are compared on a fine grid; feedback controls against the
/// supplied reference states (zero state by default).
inline double spike_distance(const Control& spiked, int probe_points = 257,
                             const Eigen::VectorXd& reference_state = Eigen::VectorXd()) {
  if (!spiked.is_spiked()) return 0.0;
  const double t0 = spiked.spike_start(), rho = spiked.spike_length();
  Eigen::VectorXd state = reference_state;
  for (int i = 0; i < probe_points; ++i) {
    const double t = t0 + rho * (i + 0.5) / probe_points;
    Eigen::VectorXd a = spiked.base().value(t, state.size() ? state : Eigen::VectorXd::Zero(1));
    Eigen::VectorXd b = spiked.probe().value(t, state.size() ? state : Eigen::VectorXd::Zero(1));
    if ((a - b).lpNorm<Eigen::Infinity>() > 0.0) return rho;
  }
  return 0.0;
}

}  // namespace teugel
