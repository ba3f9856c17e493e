#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "teugel/constraint_geometry.hpp"
#include "teugel/control.hpp"
#include "teugel/errors.hpp"
#include "teugel/levy_model.hpp"
#include "teugel/multi_index.hpp"
#include "teugel/polynomials.hpp"

namespace teugel {

/// Controlled-system specification with polynomial coefficient tables.
/// Dynamics polynomials use variable groups (state, control); terminal
/// functions use (initial state, terminal state). All derivatives needed by
/// the variational and adjoint machinery are precomputed term tables.
class ProblemSpec {
public:
  ProblemSpec(std::size_t state_dim, std::size_t control_dim, double horizon,
              Eigen::VectorXd x0)
      : m_(state_dim), du_(control_dim), horizon_(horizon), x0_(std::move(x0)) {
    if (m_ < 1 || du_ < 1) throw ConfigError("ProblemSpec: dimensions must be >= 1");
    if (!(horizon_ > 0.0)) throw ConfigError("ProblemSpec: horizon must be > 0");
    if (static_cast<std::size_t>(x0_.size()) != m_)
      throw ConfigError("ProblemSpec: x0 dimension mismatch");
    drift_.assign(m_, Polynomial(m_, du_));
    running_cost_ = Polynomial(m_, du_);
    terminal_cost_ = Polynomial(m_, m_);
    domain_ = ControlDomain::box(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(du_), -1.0),
                                 Eigen::VectorXd::Constant(static_cast<Eigen::Index>(du_), 1.0));
    q_ = ConstraintSet::all(0);
  }

  std::size_t state_dim() const { return m_; }
  std::size_t control_dim() const { return du_; }
  double horizon() const { return horizon_; }
  const Eigen::VectorXd& x0() const { return x0_; }
  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }

  void set_drift(std::vector<Polynomial> g) {
    check_xv(g, "drift");
    drift_ = std::move(g);
  }
  void set_jump_coefficient(const MultiIndex& index, std::vector<Polynomial> gamma) {
    check_xv(gamma, "jump coefficient " + index.to_string());
    jump_coeffs_[index] = std::move(gamma);
  }
  void set_running_cost(Polynomial ell) {
    check_xv_one(ell, "running cost");
    running_cost_ = std::move(ell);
  }
  /// h(y, x): y = initial state, x = terminal state.
  void set_terminal_cost(Polynomial h) {
    check_yx_one(h, "terminal cost");
    terminal_cost_ = std::move(h);
  }
  void set_constraint(std::vector<Polynomial> g_components, ConstraintSet q) {
    for (const auto& g : g_components) check_yx_one(g, "constraint component");
    if (q.dimension() != g_components.size())
      throw ConfigError("ProblemSpec: constraint set dimension mismatch");
    constraint_ = std::move(g_components);
    q_ = std::move(q);
  }
  void set_control_domain(ControlDomain d) {
    if (d.dimension() != du_) throw ConfigError("ProblemSpec: control domain dimension");
    domain_ = std::move(d);
  }
  void set_free_initial_state(bool free_x0) { free_initial_state_ = free_x0; }

  const std::vector<Polynomial>& drift() const { return drift_; }
  const MultiIndexMap<std::vector<Polynomial>>& jump_coefficients() const {
    return jump_coeffs_;
  }
  const std::vector<Polynomial>* jump_coefficient(const MultiIndex& p) const {
    auto it = jump_coeffs_.find(p);
    return it == jump_coeffs_.end() ? nullptr : &it->second;
  }
  const Polynomial& running_cost() const { return running_cost_; }
  const Polynomial& terminal_cost() const { return terminal_cost_; }
  const std::vector<Polynomial>& constraint() const { return constraint_; }
  std::size_t constraint_dim() const { return constraint_.size(); }
  const ConstraintSet& target_set() const { return q_; }
  const ControlDomain& control_domain() const { return domain_; }
  bool free_initial_state() const { return free_initial_state_; }

private:
  void check_xv(const std::vector<Polynomial>& v, const std::string& what) const {
    if (v.size() != m_) throw ConfigError("ProblemSpec: " + what + " must have m components");
    for (const auto& p : v) check_xv_one(p, what);
  }
  void check_xv_one(const Polynomial& p, const std::string& what) const {
    if (p.a_dimension() != m_ || p.b_dimension() != du_)
      throw ConfigError("ProblemSpec: " + what + " must be a polynomial in (x, v)");
  }
  void check_yx_one(const Polynomial& p, const std::string& what) const {
    if (p.a_dimension() != m_ || p.b_dimension() != m_)
      throw ConfigError("ProblemSpec: " + what + " must be a polynomial in (y, x)");
  }

  std::size_t m_, du_;
  double horizon_;
  Eigen::VectorXd x0_;
  std::string name_ = "custom";
  std::vector<Polynomial> drift_;
  MultiIndexMap<std::vector<Polynomial>> jump_coeffs_;
  Polynomial running_cost_;
  Polynomial terminal_cost_;
  std::vector<Polynomial> constraint_;
  ConstraintSet q_ = ConstraintSet::all(0);
  ControlDomain domain_ = ControlDomain::box(Eigen::VectorXd::Constant(1, -1.0),
                                             Eigen::VectorXd::Constant(1, 1.0));
  bool free_initial_state_ = false;
};

/// First and second x-derivative tables of an R^m-valued coefficient.
struct CoefficientDerivatives {
  std::vector<Polynomial> value;                          // [i]
  std::vector<std::vector<Polynomial>> jac;               // [i][j] = d value_i / dx_j
  std::vector<std::vector<std::vector<Polynomial>>> hess; // [i][j][l]
};

inline CoefficientDerivatives differentiate_in_state(const std::vector<Polynomial>& value) {
  CoefficientDerivatives d;
  d.value = value;
  const std::size_t m_out = value.size();
  const std::size_t m_in = value.empty() ? 0 : value.front().a_dimension();
  d.jac.assign(m_out, std::vector<Polynomial>());
  d.hess.assign(m_out, {});
  for (std::size_t i = 0; i < m_out; ++i) {
    d.jac[i].reserve(m_in);
    for (std::size_t j = 0; j < m_in; ++j) d.jac[i].push_back(value[i].derivative_a(j));
    d.hess[i].assign(m_in, std::vector<Polynomial>());
    for (std::size_t j = 0; j < m_in; ++j) {
      d.hess[i][j].reserve(m_in);
      for (std::size_t l = 0; l < m_in; ++l)
        d.hess[i][j].push_back(d.jac[i][j].derivative_a(l));
    }
  }
  return d;
}

/// Model + basis degree + problem, as resolved from a config or the catalog.
struct ProblemBundle {
  LevyModel model;
  int basis_degree = 2;
  ProblemSpec problem;
};

namespace catalog {

inline LevyModel symmetric_two_atom_1d() {
  AtomList jumps;
  Eigen::VectorXd up(1), down(1);
  up << 1.0;
  down << -1.0;
  jumps.atoms.push_back({up, 0.5});
  jumps.atoms.push_back({down, 0.5});
  return LevyModel(1, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 1), jumps);
}

inline LevyModel axis_atoms_2d() {
  AtomList jumps;
  Eigen::VectorXd e1(2), e2(2);
  e1 << 1.0, 0.0;
  e2 << 0.0, 1.0;
  jumps.atoms.push_back({e1, 1.0});
  jumps.atoms.push_back({e2, 1.0});
  return LevyModel(2, Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Zero(2, 2), jumps);
}

inline LevyModel jump_brownian_2d() {
  AtomList jumps;
  Eigen::VectorXd up(2), down(2);
  up << 1.0, 0.0;
  down << -1.0, 0.0;
  jumps.atoms.push_back({up, 0.5});
  jumps.atoms.push_back({down, 0.5});
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
  cov(1, 1) = 1.0;
  return LevyModel(2, Eigen::VectorXd::Zero(2), cov, jumps);
}

/// Scalar linear-quadratic benchmark on the symmetric two-atom model:
/// dx = v dt + x dH^(1), running cost x^2 + v^2, terminal cost x^2,
/// unconstrained. The value function is the Riccati ODE
/// -P' = P + 1 - P^2, P(T) = 1 with optimal feedback u* = -P(t) x.
inline ProblemBundle lq_benchmark() {
  ProblemSpec spec(1, 1, 1.0, Eigen::VectorXd::Ones(1));
  spec.set_name("lq");
  std::vector<Polynomial> g{Polynomial(1, 1)};
  g[0].add_b_power(1.0, 0, 1);  // g = v
  spec.set_drift(std::move(g));
  std::vector<Polynomial> gamma{Polynomial(1, 1)};
  gamma[0].add_a_power(1.0, 0, 1);  // gamma^(1) = x
  spec.set_jump_coefficient(MultiIndex{1}, std::move(gamma));
  Polynomial ell(1, 1);
  ell.add_a_power(1.0, 0, 2).add_b_power(1.0, 0, 2);  // x^2 + v^2
  spec.set_running_cost(std::move(ell));
  Polynomial h(1, 1);
  h.add_b_power(1.0, 0, 2);  // h(y, x) = x^2
  spec.set_terminal_cost(std::move(h));
  Polynomial gx(1, 1);
  gx.add_b_power(1.0, 0, 1);  // G(y, x) = x
  spec.set_constraint({gx}, ConstraintSet::all(1));
  spec.set_control_domain(ControlDomain::box(Eigen::VectorXd::Constant(1, -6.0),
                                             Eigen::VectorXd::Constant(1, 6.0)));
  return {symmetric_two_atom_1d(), 2, std::move(spec)};
}

/// Linear demo problem: additive jump noise, linear drift and costs.
inline ProblemBundle linear_demo() {
  ProblemSpec spec(1, 1, 1.0, Eigen::VectorXd::Ones(1));
  spec.set_name("linear");
  std::vector<Polynomial> g{Polynomial(1, 1)};
  g[0].add_a_power(-0.5, 0, 1).add_b_power(1.0, 0, 1);  // g = -0.5 x + v
  spec.set_drift(std::move(g));
  std::vector<Polynomial> gamma{Polynomial::constant(1, 1, 0.3)};
  spec.set_jump_coefficient(MultiIndex{1}, std::move(gamma));
  Polynomial ell(1, 1);
  ell.add_a_power(1.0, 0, 1).add_b_power(0.5, 0, 1);  // x + v/2
  spec.set_running_cost(std::move(ell));
  Polynomial h(1, 1);
  h.add_b_power(1.0, 0, 1);  // h = x(T)
  spec.set_terminal_cost(std::move(h));
  Polynomial gx(1, 1);
  gx.add_b_power(1.0, 0, 1);
  spec.set_constraint({gx}, ConstraintSet::all(1));
  spec.set_control_domain(ControlDomain::box(Eigen::VectorXd::Constant(1, -2.0),
                                             Eigen::VectorXd::Constant(1, 2.0)));
  return {symmetric_two_atom_1d(), 2, std::move(spec)};
}

/// Quadratic demo problem with a mildly multiplicative jump coefficient.
inline ProblemBundle quadratic_demo() {
  ProblemSpec spec(1, 1, 1.0, Eigen::VectorXd::Ones(1));
  spec.set_name("quadratic");
  std::vector<Polynomial> g{Polynomial(1, 1)};
  g[0].add_a_power(-0.3, 0, 1).add_b_power(1.0, 0, 1);
  spec.set_drift(std::move(g));
  std::vector<Polynomial> gamma{Polynomial(1, 1)};
  gamma[0].add_a_power(0.4, 0, 1).add_term(0.1, {0}, {0});
  spec.set_jump_coefficient(MultiIndex{1}, std::move(gamma));
  Polynomial ell(1, 1);
  ell.add_a_power(1.0, 0, 2).add_b_power(0.5, 0, 2);
  spec.set_running_cost(std::move(ell));
  Polynomial h(1, 1);
  h.add_b_power(2.0, 0, 2);
  spec.set_terminal_cost(std::move(h));
  Polynomial gx(1, 1);
  gx.add_b_power(1.0, 0, 1);
  spec.set_constraint({gx}, ConstraintSet::all(1));
  spec.set_control_domain(ControlDomain::box(Eigen::VectorXd::Constant(1, -2.0),
                                             Eigen::VectorXd::Constant(1, 2.0)));
  return {symmetric_two_atom_1d(), 2, std::move(spec)};
}

/// Spike-rate benchmark: jumps ride axis 1, Brownian motion rides axis 2,
/// and the control enters the Brownian-carried coefficient only, so the
/// variational moment rates carry their full orders.
inline ProblemBundle rates_benchmark() {
  ProblemSpec spec(1, 1, 1.0, Eigen::VectorXd::Constant(1, 0.5));
  spec.set_name("rates-mixed");
  std::vector<Polynomial> g{Polynomial(1, 1)};
  g[0].add_b_power(1.0, 0, 1).add_a_power(0.2, 0, 2);  // g = v + 0.2 x^2
  spec.set_drift(std::move(g));
  std::vector<Polynomial> g_jump{Polynomial(1, 1)};
  g_jump[0].add_term(0.4, {0}, {0}).add_a_power(0.1, 0, 1);  // 0.4 + 0.1 x
  spec.set_jump_coefficient(MultiIndex{1, 0}, std::move(g_jump));
  std::vector<Polynomial> g_brown{Polynomial(1, 1)};
  g_brown[0].add_term(0.3, {0}, {0}).add_b_power(0.5, 0, 1);  // 0.3 + 0.5 v
  spec.set_jump_coefficient(MultiIndex{0, 1}, std::move(g_brown));
  Polynomial ell(1, 1);
  ell.add_a_power(1.0, 0, 2).add_b_power(1.0, 0, 2);
  spec.set_running_cost(std::move(ell));
  Polynomial h(1, 1);
  h.add_b_power(1.0, 0, 2);
  spec.set_terminal_cost(std::move(h));
  Polynomial gx(1, 1);
  gx.add_b_power(1.0, 0, 1);
  spec.set_constraint({gx}, ConstraintSet::all(1));
  spec.set_control_domain(ControlDomain::box(Eigen::VectorXd::Constant(1, -2.0),
                                             Eigen::VectorXd::Constant(1, 2.0)));
  return {jump_brownian_2d(), 2, std::move(spec)};
}

/// Discriminator for the two quadratic forms of the maximum condition:
/// both degree-1 coefficients are control-dependent, so the printed
/// sum-then-outer-product form and the bracket-weighted form differ.
inline ProblemBundle form_discriminator() {
  ProblemSpec spec(1, 1, 1.0, Eigen::VectorXd::Ones(1));
  spec.set_name("model-c-forms");
  // drift-free dynamics; all action in the jump coefficients
  std::vector<Polynomial> gamma1{Polynomial(1, 1)};
  gamma1[0].add_term(0.5, {0}, {0}).add_b_power(0.6, 0, 1);  // 0.5 + 0.6 v
  spec.set_jump_coefficient(MultiIndex{0, 1}, std::move(gamma1));
  std::vector<Polynomial> gamma2{Polynomial(1, 1)};
  gamma2[0].add_term(0.5, {0}, {0}).add_b_power(0.8, 0, 1);  // 0.5 + 0.8 v
  spec.set_jump_coefficient(MultiIndex{1, 0}, std::move(gamma2));
  Polynomial ell(1, 1);
  ell.add_b_power(1.0, 0, 2);  // v^2
  spec.set_running_cost(std::move(ell));
  Polynomial h(1, 1);
  h.add_b_power(1.0, 0, 2);  // x^2
  spec.set_terminal_cost(std::move(h));
  Polynomial gx(1, 1);
  gx.add_b_power(1.0, 0, 1);
  spec.set_constraint({gx}, ConstraintSet::all(1));
  spec.set_control_domain(ControlDomain::box(Eigen::VectorXd::Constant(1, -2.0),
                                             Eigen::VectorXd::Constant(1, 2.0)));
  return {axis_atoms_2d(), 2, std::move(spec)};
}

inline ProblemBundle by_name(const std::string& name) {
  if (name == "lq") return lq_benchmark();
  if (name == "linear") return linear_demo();
  if (name == "quadratic") return quadratic_demo();
  if (name == "rates-mixed") return rates_benchmark();
  if (name == "model-c-forms") return form_discriminator();
  throw ConfigError("catalog: unknown problem '" + name + "'");
}

}  // namespace catalog

}  // namespace teugel
