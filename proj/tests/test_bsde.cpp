#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "model_fixtures.hpp"
#include "teugel/bsde.hpp"
#include "teugel/forward.hpp"

using namespace teugel;
using Catch::Approx;

namespace {

struct World {
  LevyModel model;
  MomentTable moments;
  TeugelBasis basis;
  BasisEvaluator eval;

  explicit World(LevyModel m, int degree = 2)
      : model(std::move(m)),
        moments(model, 2 * degree),
        basis(orthogonalize(gram_matrix(moments, model.gaussian_cov(),
                                        enumerate_multiindices(model.dimension(), degree)),
                            enumerate_multiindices(model.dimension(), degree))),
        eval(basis, moments, model) {}

  PathBundle bundle(std::size_t n, int grid, std::uint64_t seed) const {
    return levy_state_bundle(model, sample_paths(model, 1.0, grid, n, seed));
  }
};

BsdeProblem constant_terminal(double c) {
  BsdeProblem prob;
  prob.ydim = 1;
  prob.terminal = [c](const PathBundle&, std::size_t, double* out) { out[0] = c; };
  prob.driver = [](const PathBundle&, int, std::size_t, double, const double*, const double*,
                   double* out) { out[0] = 0.0; };
  prob.driver_uses_y = false;
  return prob;
}

double y0_mean(const BSDESolution& sol, const PathBundle& bundle, const FeatureBuilder& fb,
               const BsdeProblem& prob) {
  double sum = 0.0, y = 0.0;
  std::vector<double> z(sol.z_count());
  for (std::size_t p = 0; p < bundle.count; ++p) {
    sol.evaluate(bundle, fb, prob, 0, p, &y, z.data());
    sum += y;
  }
  return sum / static_cast<double>(bundle.count);
}

}  // namespace

TEST_CASE("constant terminal with zero driver is exact") {
  World w(fixtures::model_b());
  auto pb = w.bundle(2000, 50, 1);
  FeatureBuilder fb(FeatureSpec{}, pb.state_dim);
  auto prob = constant_terminal(3.5);
  auto sol = solve_bsde(pb, w.eval, fb, prob);

  double y;
  std::vector<double> z(sol.z_count());
  for (std::size_t p = 0; p < 200; ++p) {
    for (int step : {0, 10, 49}) {
      sol.evaluate(pb, fb, prob, step, p, &y, z.data());
      CHECK(y == Approx(3.5).margin(1e-12));
      for (double zv : z) CHECK(zv == Approx(0.0).margin(1e-12));
    }
  }

  auto rep = residual_check(sol, prob, pb, w.eval, fb);
  for (double r : rep.projected_rms) CHECK(r <= 1e-10);
  CHECK(rep.flagged_steps.empty());
}

TEST_CASE("linear decay driver reproduces the exponential") {
  World w(fixtures::model_b());
  auto pb = w.bundle(1000, 200, 2);
  FeatureBuilder fb(FeatureSpec{}, pb.state_dim);
  BsdeProblem prob = constant_terminal(1.0);
  prob.driver = [](const PathBundle&, int, std::size_t, double, const double* y, const double*,
                   double* out) { out[0] = -y[0]; };
  prob.driver_uses_y = true;
  prob.lipschitz = 1.0;
  auto sol = solve_bsde(pb, w.eval, fb, prob);
  CHECK(std::abs(y0_mean(sol, pb, fb, prob) - std::exp(-1.0)) < 1e-3);
}

TEST_CASE("grid refinement error decreases monotonically") {
  World w(fixtures::model_b());
  BsdeProblem prob = constant_terminal(1.0);
  prob.driver = [](const PathBundle&, int, std::size_t, double, const double* y, const double*,
                   double* out) { out[0] = -y[0]; };
  prob.driver_uses_y = true;
  prob.lipschitz = 1.0;
  double prev_err = 1.0;
  for (int grid : {25, 50, 100, 200, 400}) {
    auto pb = w.bundle(200, grid, 3);
    FeatureBuilder fb(FeatureSpec{}, pb.state_dim);
    auto sol = solve_bsde(pb, w.eval, fb, prob);
    const double err = std::abs(y0_mean(sol, pb, fb, prob) - std::exp(-1.0));
    CHECK(err < prev_err);
    prev_err = err;
  }
}

TEST_CASE("martingale representation of the terminal state") {
  World w(fixtures::model_b());
  auto pb = w.bundle(50000, 100, 4);
  FeatureBuilder fb(FeatureSpec{}, pb.state_dim);
  BsdeProblem prob;
  prob.ydim = 1;
  prob.terminal = [](const PathBundle& b, std::size_t p, double* out) {
    out[0] = b.state(p, b.grid)[0];
  };
  prob.driver = [](const PathBundle&, int, std::size_t, double, const double*, const double*,
                   double* out) { out[0] = 0.0; };
  prob.driver_uses_y = false;
  auto sol = solve_bsde(pb, w.eval, fb, prob);
  REQUIRE(sol.z_count() == 2);  // (1) and (2); (3) would be degenerate at D=3

  // Y(t) tracks X(t) and Z^(1) = 1, Z^(2) = 0 within regression noise.
  double y;
  std::vector<double> z(2);
  double mae1 = 0.0, mae2 = 0.0, maey = 0.0;
  const std::size_t n_probe = 2000;
  for (std::size_t p = 0; p < n_probe; ++p) {
    for (int step : {10, 50, 90}) {
      sol.evaluate(pb, fb, prob, step, p, &y, z.data());
      maey += std::abs(y - pb.state(p, step)[0]);
      mae1 += std::abs(z[0] - 1.0);
      mae2 += std::abs(z[1]);
    }
  }
  const double norm = static_cast<double>(3 * n_probe);
  CHECK(maey / norm < 0.05);
  CHECK(mae1 / norm < 0.1);
  CHECK(mae2 / norm < 0.1);

  auto rep = residual_check(sol, prob, pb, w.eval, fb);
  CHECK(rep.flagged_steps.empty());

  // negative control: corrupting Z must be flagged
  auto bad = residual_check(sol, prob, pb, w.eval, fb, 2.0);
  CHECK(bad.flagged_steps.size() > 50);
}

TEST_CASE("comparison sanity for ordered terminals") {
  World w(fixtures::model_b());
  auto pb = w.bundle(5000, 50, 5);
  FeatureBuilder fb(FeatureSpec{}, pb.state_dim);
  BsdeProblem lo;
  lo.ydim = 1;
  lo.terminal = [](const PathBundle& b, std::size_t p, double* out) {
    const double x = b.state(p, b.grid)[0];
    out[0] = x * x;
  };
  lo.driver = [](const PathBundle&, int, std::size_t, double, const double*, const double*,
                 double* out) { out[0] = 0.0; };
  lo.driver_uses_y = false;
  BsdeProblem hi = lo;
  hi.terminal = [](const PathBundle& b, std::size_t p, double* out) {
    const double x = b.state(p, b.grid)[0];
    out[0] = x * x + 0.3;
  };
  auto sol_lo = solve_bsde(pb, w.eval, fb, lo);
  auto sol_hi = solve_bsde(pb, w.eval, fb, hi);
  CHECK(y0_mean(sol_lo, pb, fb, lo) <= y0_mean(sol_hi, pb, fb, hi) + 1e-9);
}

TEST_CASE("linearity in terminal and driver for z-independent drivers") {
  World w(fixtures::model_b());
  auto pb = w.bundle(3000, 40, 6);
  FeatureBuilder fb(FeatureSpec{}, pb.state_dim);

  auto make = [&](double a, double b) {
    BsdeProblem prob;
    prob.ydim = 1;
    prob.terminal = [a](const PathBundle& bu, std::size_t p, double* out) {
      out[0] = a * bu.state(p, bu.grid)[0];
    };
    prob.driver = [b](const PathBundle&, int, std::size_t, double t, const double*,
                      const double*, double* out) { out[0] = b * (1.0 + t); };
    prob.driver_uses_y = false;
    return prob;
  };
  auto p1 = make(1.0, 0.0), p2 = make(0.0, 2.0), p12 = make(1.0, 2.0);
  auto s1 = solve_bsde(pb, w.eval, fb, p1);
  auto s2 = solve_bsde(pb, w.eval, fb, p2);
  auto s12 = solve_bsde(pb, w.eval, fb, p12);
  CHECK(y0_mean(s12, pb, fb, p12) ==
        Approx(y0_mean(s1, pb, fb, p1) + y0_mean(s2, pb, fb, p2)).margin(1e-9));
}

TEST_CASE("a-priori bound on randomized linear drivers") {
  World w(fixtures::model_b());
  auto pb = w.bundle(500, 100, 7);
  FeatureBuilder fb(FeatureSpec{}, pb.state_dim);
  rng::Stream s(rng::derive(9, rng::tag("apriori")));
  for (int trial = 0; trial < 10; ++trial) {
    const double a = 2.0 * (2.0 * s.uniform() - 1.0);  // |a| <= 2 = L
    const double b = 2.0 * (2.0 * s.uniform() - 1.0);
    const double xi = 3.0 * (2.0 * s.uniform() - 1.0);
    BsdeProblem prob = constant_terminal(xi);
    prob.driver = [a, b](const PathBundle&, int, std::size_t, double, const double* y,
                         const double*, double* out) { out[0] = a * y[0] + b; };
    prob.driver_uses_y = true;
    prob.lipschitz = 2.0;
    auto sol = solve_bsde(pb, w.eval, fb, prob);
    const double y0 = y0_mean(sol, pb, fb, prob);
    const double bound = std::exp(2.0 * 1.0) * (1.0 + 1.0) * (std::abs(xi) + std::abs(b));
    CHECK(std::abs(y0) <= bound + 1e-9);
  }
}
