#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace teugel {

/// Exponent tuple p in N_0^n. Indexes power-jump processes, moments and
/// basis coefficients. Immutable after construction.
class MultiIndex {
public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents) : exps_(std::move(exponents)) {
    for (int e : exps_)
      if (e < 0) throw std::invalid_argument("MultiIndex: negative exponent");
  }
  MultiIndex(std::initializer_list<int> exponents)
      : MultiIndex(std::vector<int>(exponents)) {}

  /// Unit index e_i in dimension n.
  static MultiIndex unit(std::size_t n, std::size_t i) {
    std::vector<int> e(n, 0);
    e.at(i) = 1;
    return MultiIndex(std::move(e));
  }

  std::size_t dimension() const { return exps_.size(); }
  int operator[](std::size_t i) const { return exps_[i]; }
  const std::vector<int>& exponents() const { return exps_; }

  /// Total degree |p|.
  int degree() const { return std::accumulate(exps_.begin(), exps_.end(), 0); }

  bool is_unit() const { return degree() == 1; }
  /// Position of the single nonzero exponent; only valid when is_unit().
  std::size_t unit_axis() const {
    for (std::size_t i = 0; i < exps_.size(); ++i)
      if (exps_[i] == 1) return i;
    throw std::logic_error("unit_axis on non-unit index");
  }

  MultiIndex operator+(const MultiIndex& q) const {
    require_same_dimension(q);
    std::vector<int> r(exps_.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = exps_[i] + q.exps_[i];
    return MultiIndex(std::move(r));
  }

  bool operator==(const MultiIndex& q) const { return exps_ == q.exps_; }

  std::string to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < exps_.size(); ++i) {
      if (i) os << ',';
      os << exps_[i];
    }
    os << ')';
    return os.str();
  }

  void require_same_dimension(const MultiIndex& q) const {
    if (exps_.size() != q.exps_.size())
      throw std::invalid_argument("MultiIndex: dimension mismatch " +
                                  to_string() + " vs " + q.to_string());
  }

private:
  std::vector<int> exps_;
};

enum class Ordering { Less, Equal, Greater };

/// Strict total order: by total degree ascending, ties broken
/// lexicographically on the raw exponent tuple left-to-right.
inline Ordering graded_lex_compare(const MultiIndex& p, const MultiIndex& q) {
  p.require_same_dimension(q);
  const int dp = p.degree(), dq = q.degree();
  if (dp != dq) return dp < dq ? Ordering::Less : Ordering::Greater;
  for (std::size_t i = 0; i < p.dimension(); ++i) {
    if (p[i] != q[i]) return p[i] < q[i] ? Ordering::Less : Ordering::Greater;
  }
  return Ordering::Equal;
}

inline bool graded_lex_less(const MultiIndex& p, const MultiIndex& q) {
  return graded_lex_compare(p, q) == Ordering::Less;
}

struct GradedLexLess {
  bool operator()(const MultiIndex& p, const MultiIndex& q) const {
    return graded_lex_less(p, q);
  }
};

template <typename T>
using MultiIndexMap = std::map<MultiIndex, T, GradedLexLess>;

/// All p with 1 <= |p| <= max_degree in graded-lex order.
/// Count is C(n + max_degree, max_degree) - 1.
inline std::vector<MultiIndex> enumerate_multiindices(std::size_t n, int max_degree) {
  if (n < 1 || max_degree < 1)
    throw std::invalid_argument("enumerate_multiindices: need n >= 1, D >= 1");
  std::vector<MultiIndex> out;
  std::vector<int> current(n, 0);
  // Compositions of d into n parts, emitted in lexicographic order.
  auto emit = [&](auto&& self, std::size_t pos, int remaining) -> void {
    if (pos + 1 == n) {
      current[pos] = remaining;
      out.emplace_back(current);
      return;
    }
    for (int e = 0; e <= remaining; ++e) {
      current[pos] = e;
      self(self, pos + 1, remaining - e);
    }
  };
  for (int d = 1; d <= max_degree; ++d) emit(emit, 0, d);
  return out;
}

}  // namespace teugel
