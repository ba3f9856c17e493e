#pragma once

#include <Eigen/Dense>

#include "teugel/levy_model.hpp"

namespace fixtures {

inline Eigen::VectorXd vec1(double a) {
  Eigen::VectorXd v(1);
  v << a;
  return v;
}

inline Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

/// Model A: single unit atom at +1, rate 1, no Gaussian part.
inline teugel::LevyModel model_a() {
  teugel::AtomList jumps;
  jumps.atoms.push_back({vec1(1.0), 1.0});
  return teugel::LevyModel(1, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 1), jumps);
}

/// Model B: symmetric pair of atoms at +-1, rate 1/2 each.
inline teugel::LevyModel model_b() {
  teugel::AtomList jumps;
  jumps.atoms.push_back({vec1(1.0), 0.5});
  jumps.atoms.push_back({vec1(-1.0), 0.5});
  return teugel::LevyModel(1, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 1), jumps);
}

/// Model C: 2-d atoms on the coordinate axes, rate 1 each.
inline teugel::LevyModel model_c() {
  teugel::AtomList jumps;
  jumps.atoms.push_back({vec2(1.0, 0.0), 1.0});
  jumps.atoms.push_back({vec2(0.0, 1.0), 1.0});
  return teugel::LevyModel(2, Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Zero(2, 2), jumps);
}

/// Mixed model: jumps on axis 1, unit Brownian motion on axis 2.
inline teugel::LevyModel model_mixed() {
  teugel::AtomList jumps;
  jumps.atoms.push_back({vec2(1.0, 0.0), 0.5});
  jumps.atoms.push_back({vec2(-1.0, 0.0), 0.5});
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
  cov(1, 1) = 1.0;
  return teugel::LevyModel(2, Eigen::VectorXd::Zero(2), cov, jumps);
}

/// Uniform jump density with constant value `level` on [-1, 1].
inline teugel::LevyModel model_uniform_density(double level = 1.0, int quad_order = 16) {
  teugel::DensitySpec d;
  d.support = {{-1.0, 1.0}};
  d.density = [level](const Eigen::VectorXd&) { return level; };
  d.quad_order = quad_order;
  d.density_degree = 0;
  d.kind = "uniform";
  return teugel::LevyModel(1, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 1), d);
}

}  // namespace fixtures
