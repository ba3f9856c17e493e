#include <catch2/catch_amalgamated.hpp>

#include "teugel/multi_index.hpp"
#include "teugel/rng.hpp"

using namespace teugel;

TEST_CASE("graded-lex compare on the documented cases") {
  CHECK(graded_lex_compare({1, 0}, {1, 0}) == Ordering::Equal);
  CHECK(graded_lex_compare({0, 1}, {1, 0}) == Ordering::Less);
  CHECK(graded_lex_compare({2, 0}, {0, 1}) == Ordering::Greater);
}

TEST_CASE("compare rejects dimension mismatch") {
  CHECK_THROWS_AS(graded_lex_compare(MultiIndex{1, 0}, MultiIndex{1}), std::invalid_argument);
}

TEST_CASE("enumeration in graded-lex order") {
  auto one_d = enumerate_multiindices(1, 3);
  REQUIRE(one_d.size() == 3);
  CHECK(one_d[0] == MultiIndex{1});
  CHECK(one_d[1] == MultiIndex{2});
  CHECK(one_d[2] == MultiIndex{3});

  auto two_d = enumerate_multiindices(2, 2);
  REQUIRE(two_d.size() == 5);  // C(4,2) - 1
  CHECK(two_d[0] == MultiIndex{0, 1});
  CHECK(two_d[1] == MultiIndex{1, 0});
  CHECK(two_d[2] == MultiIndex{0, 2});
  CHECK(two_d[3] == MultiIndex{1, 1});
  CHECK(two_d[4] == MultiIndex{2, 0});

  auto three_d = enumerate_multiindices(3, 1);
  REQUIRE(three_d.size() == 3);
  CHECK(three_d[0] == MultiIndex{0, 0, 1});
  CHECK(three_d[1] == MultiIndex{0, 1, 0});
  CHECK(three_d[2] == MultiIndex{1, 0, 0});
}

TEST_CASE("enumeration is strictly increasing") {
  for (std::size_t n : {1u, 2u, 3u}) {
    auto seq = enumerate_multiindices(n, 4);
    for (std::size_t i = 0; i + 1 < seq.size(); ++i)
      CHECK(graded_lex_compare(seq[i], seq[i + 1]) == Ordering::Less);
  }
}

namespace {

MultiIndex random_index(teugel::rng::Stream& s, std::size_t n, int max_exp) {
  std::vector<int> e(n);
  for (auto& v : e) v = static_cast<int>(s.uniform() * (max_exp + 1));
  return MultiIndex(std::move(e));
}

}  // namespace

TEST_CASE("ordering is a strict total order on random triples") {
  rng::Stream s(rng::derive(42, rng::tag("mi-prop")));
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(s.uniform() * 3);
    auto a = random_index(s, n, 3);
    auto b = random_index(s, n, 3);
    auto c = random_index(s, n, 3);

    // totality + antisymmetry
    const auto ab = graded_lex_compare(a, b);
    const auto ba = graded_lex_compare(b, a);
    if (ab == Ordering::Less) CHECK(ba == Ordering::Greater);
    if (ab == Ordering::Greater) CHECK(ba == Ordering::Less);
    if (ab == Ordering::Equal) {
      CHECK(ba == Ordering::Equal);
      CHECK(a == b);
    }

    // transitivity
    if (graded_lex_compare(a, b) != Ordering::Greater &&
        graded_lex_compare(b, c) != Ordering::Greater)
      CHECK(graded_lex_compare(a, c) != Ordering::Greater);
  }
}

TEST_CASE("addition and helpers") {
  MultiIndex p{1, 2}, q{0, 3};
  CHECK((p + q) == MultiIndex{1, 5});
  CHECK(p.degree() == 3);
  CHECK(MultiIndex::unit(3, 1) == MultiIndex{0, 1, 0});
  CHECK(MultiIndex{0, 1, 0}.unit_axis() == 1);
  CHECK(MultiIndex{1, 0}.to_string() == "(1,0)");
}
