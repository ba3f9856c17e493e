#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <vector>

#include "teugel/errors.hpp"
#include "teugel/levy_model.hpp"
#include "teugel/rng.hpp"

namespace teugel {

struct Jump {
  double time = 0.0;
  Eigen::VectorXd size;
};

/// One simulated Levy path over [0, T] on a uniform grid. Jumps are stored
/// explicitly; Brownian increments are regenerated on demand from the path
/// key, so a path is fully determined by (model, T, N_t, key).
struct JumpPath {
  double horizon = 0.0;
  int grid_cells = 0;
  std::uint64_t key = 0;          // per-path RNG key
  std::vector<Jump> jumps;        // sorted by time, all in (0, T]
  bool has_gaussian = false;

  double dt() const { return horizon / grid_cells; }

  /// Cell index containing time t under left-closed cells [t_i, t_{i+1}).
  int cell_of(double t) const {
    int c = static_cast<int>(t / dt());
    return std::min(std::max(c, 0), grid_cells - 1);
  }

  /// Standard-normal driver for Brownian axis `dim` over cell `cell`,
  /// counter-addressed so no storage is needed.
  double gaussian_unit(int cell, int dim) const {
    return rng::normal_at(rng::derive(key, rng::tag("bm"), static_cast<std::uint64_t>(dim)),
                          static_cast<std::uint64_t>(cell));
  }

  /// Jumps with time in (t_lo, t_hi]; returns [first, last) index range.
  std::pair<std::size_t, std::size_t> jumps_in(double t_lo, double t_hi) const {
    auto lo = std::upper_bound(jumps.begin(), jumps.end(), t_lo,
                               [](double t, const Jump& j) { return t < j.time; });
    auto hi = std::upper_bound(jumps.begin(), jumps.end(), t_hi,
                               [](double t, const Jump& j) { return t < j.time; });
    return {static_cast<std::size_t>(lo - jumps.begin()),
            static_cast<std::size_t>(hi - jumps.begin())};
  }

  std::size_t jump_count_up_to(double t) const {
    auto hi = std::upper_bound(jumps.begin(), jumps.end(), t,
                               [](double s, const Jump& j) { return s < j.time; });
    return static_cast<std::size_t>(hi - jumps.begin());
  }
};

namespace detail {

inline Eigen::VectorXd draw_jump_size(const LevyModel& model, rng::Stream& stream) {
  if (model.is_atomic()) {
    const auto& atoms = model.atoms().atoms;
    double u = stream.uniform() * model.intensity();
    for (const auto& a : atoms) {
      u -= a.rate;
      if (u <= 0.0) return a.point;
    }
    return atoms.back().point;
  }
  // Density: rejection against the constant envelope scanned at construction.
  const auto& d = model.density();
  const std::size_t n = model.dimension();
  const double fmax = model.density_envelope();
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  for (int attempt = 0; attempt < 100000; ++attempt) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& [lo, hi] = d.support[i];
      x(static_cast<Eigen::Index>(i)) = lo + (hi - lo) * stream.uniform();
    }
    if (stream.uniform() * fmax <= d.density(x)) return x;
  }
  throw NumericalError("draw_jump_size: rejection sampling failed to accept");
}

}  // namespace detail

/// Compound-Poisson path sampling: jump count ~ Poisson(intensity * T),
/// times i.i.d. uniform on (0, T], sizes from the normalized jump measure.
/// Bit-deterministic for a given (seed, path_index).
inline JumpPath sample_path(const LevyModel& model, double horizon, int grid_cells,
                            std::uint64_t seed, std::uint64_t path_index = 0) {
  if (!(horizon > 0.0)) throw ConfigError("sample_path: horizon must be > 0");
  if (grid_cells < 1) throw ConfigError("sample_path: grid_cells must be >= 1");
  JumpPath path;
  path.horizon = horizon;
  path.grid_cells = grid_cells;
  path.key = rng::derive(seed, rng::tag("path"), path_index);
  path.has_gaussian = model.has_gaussian_part();

  rng::Stream count_stream(rng::derive(path.key, rng::tag("count")));
  const int n_jumps = count_stream.poisson(model.intensity() * horizon);
  rng::Stream time_stream(rng::derive(path.key, rng::tag("times")));
  rng::Stream size_stream(rng::derive(path.key, rng::tag("sizes")));
  path.jumps.reserve(static_cast<std::size_t>(n_jumps));
  for (int j = 0; j < n_jumps; ++j) {
    Jump jump;
    jump.time = horizon * time_stream.uniform();
    jump.size = detail::draw_jump_size(model, size_stream);
    path.jumps.push_back(std::move(jump));
  }
  std::sort(path.jumps.begin(), path.jumps.end(),
            [](const Jump& a, const Jump& b) { return a.time < b.time; });
  return path;
}

}  // namespace teugel
