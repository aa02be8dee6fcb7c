#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "forest/equilibria.hpp"
#include "forest/simulate.hpp"
#include "oracle.hpp"

using namespace forest;

namespace {

ModelParams bistable_model() {
  return ModelParams(1.0, 0.0, BetaFunction::nicholson(6.0), GrowthFunction::exp_decay(5.0));
}

}  // namespace

TEST_CASE("grid rounding") {
  auto g = Grid::create(0.05, 30.0, 200.0);
  CHECK(g.history_steps() == 600);
  CHECK(g.time_steps() == 4000);
  CHECK_FALSE(g.adjusted);
  auto g2 = Grid::create(0.07, 30.0, 200.0);
  CHECK(g2.adjusted);
  CHECK(g2.a_max == doctest::Approx(g2.history_steps() * 0.07).epsilon(1e-14));
  CHECK_THROWS(Grid::create(-0.1, 30.0, 200.0));
}

TEST_CASE("initial data variants and validation") {
  auto c = InitialData::constant(0.5);
  CHECK(c(-3.0) == 0.5);
  auto p = InitialData::periodic(0.475, 0.2, 30.0);
  CHECK(p(0.0) == doctest::Approx(0.475).epsilon(1e-14));
  CHECK(p(-1.0) == doctest::Approx(0.475 + 0.2 * std::sin(-30.0)).epsilon(1e-12));
  CHECK_THROWS(InitialData::constant(-0.1));
  CHECK_THROWS(InitialData::periodic(0.1, 0.2, 1.0));  // dips negative
  CHECK_THROWS(InitialData::tabulated({{-1.0, 0.5}, {0.5, 0.5}}));  // abscissa > 0
  CHECK_THROWS_AS(c(1.0), std::domain_error);
}

TEST_CASE("tail integrals match direct quadrature") {
  const double mu = 1.0;
  auto c = InitialData::constant(0.7);
  for (double a : {0.0, 2.0, 10.0}) {
    const double ref =
        oracle::romberg_to_infinity([&](double s) { return std::exp(-mu * s) * 0.7; }, a);
    CHECK(c.tail_integral(mu, 5.0, a) == doctest::Approx(ref).epsilon(1e-10));
  }
  auto p = InitialData::periodic(0.475, 0.2, 3.0);
  for (double t : {0.0, 1.7}) {
    for (double a : {std::max(t, 0.0), t + 4.0}) {
      // phi(t - s) for s >= a >= t lies in the history region.
      const double ref = oracle::romberg_to_infinity(
          [&](double s) { return std::exp(-mu * s) * p(t - s); }, a);
      CHECK(p.tail_integral(mu, t, a) == doctest::Approx(ref).epsilon(1e-9));
    }
  }
  auto tab = InitialData::tabulated({{-2.0, 0.5}, {0.0, 0.5}});
  CHECK(tab.tail_integral(mu, 0.0, 3.0) == 0.0);
}

TEST_CASE("tail integral profile against the analytic constant-history value") {
  auto m = bistable_model();
  const double b = 0.8, h = 0.01;
  std::vector<double> hist(3001, b);  // a_max = 30
  auto prof = tail_integral_profile(m, hist, h, InitialData::constant(b), 0.0);
  for (size_t k : {size_t{0}, size_t{100}, size_t{1500}, size_t{3000}}) {
    const double a = k * h;
    // Trapezoid accumulation carries an O(h^2 mu^2) relative error.
    CHECK(prof[k] == doctest::Approx(b * std::exp(-m.mu * a) / m.mu).epsilon(1e-4));
  }
}

TEST_CASE("height kernel reduces to height_at_age on constant histories") {
  auto m = bistable_model();
  const double b = 1.3;
  for (double a : {0.5, 3.0, 12.0}) {
    const double I_a = b * std::exp(-m.mu * a) / m.mu;
    CHECK(height_kernel(m, a, I_a) == doctest::Approx(height_at_age(m, b, a)).epsilon(1e-10));
  }
  CHECK(height_kernel(m, 0.0, 1.0) == m.x_m);
  CHECK(height_kernel(m, 2.0, 0.0) == doctest::Approx(m.x_m + m.g.at_zero() * 2.0).epsilon(1e-12));
  CHECK_THROWS_AS(height_kernel(m, -1.0, 0.1), std::domain_error);
}

TEST_CASE("the functional on a constant history reproduces the map F") {
  auto m = bistable_model();
  for (double c : {0.47, 1.0, 3.0}) {
    std::vector<double> hist(601, c);  // h = 0.05, a_max = 30
    const double got = apply_functional(m, hist, 0.05, InitialData::constant(c), 0.0);
    CHECK(got == doctest::Approx(map_F(m, c)).epsilon(2e-4));
  }
}

TEST_CASE("bistability: constant data 0.45 and 0.5 reach distinct equilibria") {
  auto m = bistable_model();
  auto grid = Grid::create(0.05, 30.0, 200.0);
  auto eq = find_equilibria(m, 10.0, 400);
  auto lo = run(m, grid, InitialData::constant(0.45));
  auto hi = run(m, grid, InitialData::constant(0.5));
  CHECK(lo.converged);
  CHECK(hi.converged);
  auto lo_match = detect_asymptote(lo, 10.0, 1e-6, eq.records);
  auto hi_match = detect_asymptote(hi, 10.0, 1e-6, eq.records);
  CHECK(lo_match.distance <= 5e-3);
  CHECK(hi_match.distance <= 5e-3);
  CHECK(lo_match.matched_b != hi_match.matched_b);
  CHECK(lo_match.matched_b == 0.0);
  CHECK(hi_match.matched_b == doctest::Approx(3.1922636986).epsilon(1e-6));
  for (double v : lo.values) CHECK(v >= 0.0);
  for (double v : hi.values) CHECK(v >= 0.0);
}

TEST_CASE("equilibrium start drifts by at most the discretization error") {
  auto m = bistable_model();
  auto eq = find_equilibria(m, 10.0, 400);
  const double b3 = eq.records[2].b;
  auto traj = run(m, Grid::create(0.05, 30.0, 100.0), InitialData::constant(b3));
  double drift = 0.0;
  for (double v : traj.values) drift = std::max(drift, std::fabs(v - b3));
  CHECK(drift <= 1e-3);
}

TEST_CASE("empirical order under grid halving is second order") {
  auto m = bistable_model();
  double end[3];
  const double hs[3] = {0.1, 0.05, 0.025};
  for (int i = 0; i < 3; ++i)
    end[i] = run(m, Grid::create(hs[i], 30.0, 100.0), InitialData::constant(0.5)).values.back();
  const double order = std::log2(std::fabs(end[0] - end[1]) / std::fabs(end[1] - end[2]));
  CHECK(order > 1.7);
  CHECK(order < 2.3);
}

TEST_CASE("truncation horizon robustness") {
  auto m = bistable_model();
  const double l30 = run(m, Grid::create(0.05, 30.0, 150.0), InitialData::constant(0.5)).limit;
  const double l35 = run(m, Grid::create(0.05, 35.0, 150.0), InitialData::constant(0.5)).limit;
  CHECK(l30 == doctest::Approx(l35).epsilon(1e-6));
  // A horizon violating e^{-mu a_max} <= tail_tol is rejected up front.
  CHECK_THROWS(run(m, Grid::create(0.05, 5.0, 50.0), InitialData::constant(0.5)));
}

TEST_CASE("tabulated initial data run (zero extension)") {
  auto m = bistable_model();
  auto init = InitialData::tabulated({{-30.0, 3.0}, {0.0, 3.2}});
  auto traj = run(m, Grid::create(0.05, 30.0, 120.0), init);
  CHECK(traj.converged);
  CHECK(traj.limit == doctest::Approx(3.1922636986).epsilon(1e-3));
}

TEST_CASE("detect_asymptote basics") {
  Trajectory flat;
  for (int i = 0; i <= 400; ++i) {
    flat.times.push_back(0.1 * i);
    flat.values.push_back(2.5);
  }
  auto res = detect_asymptote(flat, 10.0, 1e-6);
  CHECK(res.converged);
  CHECK(res.limit == doctest::Approx(2.5).epsilon(1e-14));

  Trajectory sine;
  for (int i = 0; i <= 400; ++i) {
    sine.times.push_back(0.1 * i);
    sine.values.push_back(2.0 + std::sin(0.1 * i));
  }
  CHECK_FALSE(detect_asymptote(sine, 10.0, 1e-6).converged);
  CHECK_THROWS(detect_asymptote(flat, 1000.0, 1e-6));  // window longer than data
}

TEST_CASE("functional endpoint guard rejects oversized steps") {
  // beta(x_m) > 0 via a table model; make (3h/8) beta(x_m) >= 1.
  ModelParams m(1.0, 0.0, BetaFunction::table({{0.0, 0.9}, {100.0, 0.9}}),
                GrowthFunction::exp_decay(1.0));
  std::vector<double> hist(11, 0.5);
  CHECK_THROWS_AS(apply_functional(m, hist, 3.0, InitialData::constant(0.5), 0.0),
                  std::invalid_argument);
}
