#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "model_fixtures.hpp"
#include "teugel/levy_model.hpp"
#include "teugel/rng.hpp"

using namespace teugel;
using Catch::Approx;

TEST_CASE("construction validates inputs") {
  AtomList bad_rate;
  bad_rate.atoms.push_back({fixtures::vec1(1.0), 0.0});
  CHECK_THROWS_AS(LevyModel(1, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 1), bad_rate),
                  ConfigError);

  AtomList ok;
  ok.atoms.push_back({fixtures::vec1(1.0), 1.0});
  Eigen::MatrixXd negdef(1, 1);
  negdef << -0.5;
  CHECK_THROWS_AS(LevyModel(1, Eigen::VectorXd::Zero(1), negdef, ok), ConfigError);

  DensitySpec unbounded;
  unbounded.support = {{0.0, std::numeric_limits<double>::infinity()}};
  unbounded.density = [](const Eigen::VectorXd&) { return 1.0; };
  CHECK_THROWS_AS(LevyModel(1, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 1), unbounded),
                  ConfigError);
}

TEST_CASE("moments of atom measures are exact") {
  auto a = fixtures::model_a();
  CHECK(a.moment(MultiIndex{3}) == Approx(1.0));

  auto b = fixtures::model_b();
  CHECK(b.moment(MultiIndex{3}) == Approx(0.0).margin(1e-15));
  CHECK(b.moment(MultiIndex{2}) == Approx(1.0));
  CHECK(b.intensity() == Approx(1.0));
}

TEST_CASE("moments of a uniform density by quadrature") {
  auto u = fixtures::model_uniform_density();
  CHECK(u.moment(MultiIndex{2}) == Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(u.moment(MultiIndex{1}) == Approx(0.0).margin(1e-14));
  CHECK(u.intensity() == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("density moments beyond quadrature exactness are rejected") {
  auto u = fixtures::model_uniform_density(1.0, 2);  // exact through degree 3
  CHECK_NOTHROW(u.moment(MultiIndex{3}));
  CHECK_THROWS_AS(u.moment(MultiIndex{4}), ConfigError);
}

TEST_CASE("moment table covers requested degrees and intensity") {
  auto b = fixtures::model_b();
  MomentTable table(b, 4);
  CHECK(table.intensity() == Approx(1.0));
  CHECK(table.at(MultiIndex{4}) == Approx(1.0));
  CHECK_THROWS_AS(table.at(MultiIndex{5}), NumericalError);
}

TEST_CASE("product-split identity for random atom models") {
  rng::Stream s(rng::derive(7, rng::tag("moments")));
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(s.uniform() * 2);
    AtomList jumps;
    const int n_atoms = 1 + static_cast<int>(s.uniform() * 4);
    for (int j = 0; j < n_atoms; ++j) {
      Eigen::VectorXd pt(static_cast<Eigen::Index>(n));
      for (Eigen::Index i = 0; i < pt.size(); ++i) pt(i) = 2.0 * s.uniform() - 1.0;
      jumps.atoms.push_back({pt, 0.1 + s.uniform()});
    }
    LevyModel model(n, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)),
                    Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                          static_cast<Eigen::Index>(n)),
                    jumps);
    auto indices = enumerate_multiindices(n, 2);
    for (const auto& p : indices) {
      for (const auto& q : indices) {
        double split = 0.0;
        for (const auto& atom : jumps.atoms) {
          double mp = 1.0, mq = 1.0;
          for (std::size_t i = 0; i < n; ++i) {
            mp *= std::pow(atom.point(static_cast<Eigen::Index>(i)), p[i]);
            mq *= std::pow(atom.point(static_cast<Eigen::Index>(i)), q[i]);
          }
          split += atom.rate * mp * mq;
        }
        CHECK(model.moment(p + q) == Approx(split).margin(1e-13));
      }
    }
  }
}

TEST_CASE("symmetric atom pair has vanishing odd moments") {
  auto b = fixtures::model_b();
  MomentTable table(b, 7);
  for (int d = 1; d <= 7; d += 2)
    CHECK(table.at(MultiIndex{d}) == Approx(0.0).margin(1e-15));
}

TEST_CASE("exponential moment diagnostics") {
  auto a = fixtures::model_a();
  auto rep = validate_exponential_moment(a, 2.0, 0.1);
  CHECK(rep.finite);
  CHECK(rep.value == Approx(std::exp(2.0)));

  // Bounded uniform density with unit level: 2 * (e - sqrt(e)).
  auto u = fixtures::model_uniform_density(1.0, 48);
  auto urep = validate_exponential_moment(u, 1.0, 0.5);
  CHECK(urep.finite);
  CHECK(urep.value == Approx(2.0 * (std::exp(1.0) - std::exp(0.5))).epsilon(1e-10));

  // Large but finite sum; overflow is reported as +inf with a warning note.
  AtomList big;
  big.atoms.push_back({fixtures::vec1(5.0), 1.0});
  LevyModel far(1, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 1), big);
  auto frep = validate_exponential_moment(far, 10.0, 1.0);
  CHECK(frep.finite);
  CHECK(frep.value == Approx(std::exp(50.0)).epsilon(1e-12));

  auto orep = validate_exponential_moment(far, 200.0, 1.0);
  CHECK(orep.overflowed);
  CHECK(std::isinf(orep.value));
}
