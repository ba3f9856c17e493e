#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "teugel/errors.hpp"

namespace teugel {

/// Polynomial in two variable groups (a, b) as a flat term table:
/// sum_t coeff_t * a^alpha_t * b^beta_t. Problem coefficients use
/// (a, b) = (state, control) for dynamics and (initial, terminal) for
/// terminal functions; derivatives are exact term manipulations.
class Polynomial {
public:
  struct Term {
    double coeff = 0.0;
    std::vector<int> a_exp;
    std::vector<int> b_exp;
  };

  Polynomial() = default;
  Polynomial(std::size_t a_dim, std::size_t b_dim) : a_dim_(a_dim), b_dim_(b_dim) {}

  static Polynomial constant(std::size_t a_dim, std::size_t b_dim, double value) {
    Polynomial p(a_dim, b_dim);
    if (value != 0.0)
      p.terms_.push_back({value, std::vector<int>(a_dim, 0), std::vector<int>(b_dim, 0)});
    return p;
  }

  std::size_t a_dimension() const { return a_dim_; }
  std::size_t b_dimension() const { return b_dim_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Polynomial& add_term(double coeff, std::vector<int> a_exp, std::vector<int> b_exp) {
    if (a_exp.size() != a_dim_ || b_exp.size() != b_dim_)
      throw ConfigError("Polynomial: exponent arity mismatch");
    for (int e : a_exp)
      if (e < 0) throw ConfigError("Polynomial: negative exponent");
    for (int e : b_exp)
      if (e < 0) throw ConfigError("Polynomial: negative exponent");
    if (coeff != 0.0) terms_.push_back({coeff, std::move(a_exp), std::move(b_exp)});
    return *this;
  }

  /// Convenience for monomials in a single variable of either group.
  Polynomial& add_a_power(double coeff, std::size_t axis, int power) {
    std::vector<int> a(a_dim_, 0), b(b_dim_, 0);
    a.at(axis) = power;
    return add_term(coeff, std::move(a), std::move(b));
  }
  Polynomial& add_b_power(double coeff, std::size_t axis, int power) {
    std::vector<int> a(a_dim_, 0), b(b_dim_, 0);
    b.at(axis) = power;
    return add_term(coeff, std::move(a), std::move(b));
  }

  double operator()(const double* a, const double* b) const {
    double sum = 0.0;
    for (const auto& t : terms_) {
      double v = t.coeff;
      for (std::size_t i = 0; i < a_dim_; ++i)
        for (int e = 0; e < t.a_exp[i]; ++e) v *= a[i];
      for (std::size_t i = 0; i < b_dim_; ++i)
        for (int e = 0; e < t.b_exp[i]; ++e) v *= b[i];
      sum += v;
    }
    return sum;
  }

  double operator()(const std::vector<double>& a, const std::vector<double>& b) const {
    return (*this)(a.data(), b.data());
  }

  /// Exact partial derivative in the axis-th variable of group a.
  Polynomial derivative_a(std::size_t axis) const {
    Polynomial out(a_dim_, b_dim_);
    for (const auto& t : terms_) {
      if (t.a_exp[axis] == 0) continue;
      Term d = t;
      d.coeff *= d.a_exp[axis];
      d.a_exp[axis] -= 1;
      out.terms_.push_back(std::move(d));
    }
    return out;
  }

  Polynomial derivative_b(std::size_t axis) const {
    Polynomial out(a_dim_, b_dim_);
    for (const auto& t : terms_) {
      if (t.b_exp[axis] == 0) continue;
      Term d = t;
      d.coeff *= d.b_exp[axis];
      d.b_exp[axis] -= 1;
      out.terms_.push_back(std::move(d));
    }
    return out;
  }

  int degree() const {
    int d = 0;
    for (const auto& t : terms_) {
      int td = 0;
      for (int e : t.a_exp) td += e;
      for (int e : t.b_exp) td += e;
      d = std::max(d, td);
    }
    return d;
  }

private:
  std::size_t a_dim_ = 0;
  std::size_t b_dim_ = 0;
  std::vector<Term> terms_;
};

}  // namespace teugel
