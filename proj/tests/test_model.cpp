#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "forest/model.hpp"
#include "forest/quadrature.hpp"
#include "forest/special.hpp"
#include "oracle.hpp"

using namespace forest;

TEST_CASE("exp_integral_e1 matches reference values") {
  // Abramowitz & Stegun 5.1; independent digits, not produced by this code.
  CHECK(exp_integral_e1(1.0) == doctest::Approx(0.2193839343955203).epsilon(1e-13));
  CHECK(exp_integral_e1(0.5) == doctest::Approx(0.5597735947761608).epsilon(1e-13));
  CHECK(exp_integral_e1(2.0) == doctest::Approx(0.04890051070806112).epsilon(1e-13));
  CHECK(exp_integral_e1(10.0) == doctest::Approx(4.156968929685325e-6).epsilon(1e-12));
}

TEST_CASE("exp_integral_e1 agrees with direct quadrature of e^{-t}/t") {
  for (double x : {0.1, 0.7, 1.0, 3.0, 8.0, 25.0}) {
    const double ref = oracle::romberg_to_infinity([](double t) { return std::exp(-t) / t; }, x);
    CHECK(exp_integral_e1(x) == doctest::Approx(ref).epsilon(1e-11));
  }
}

TEST_CASE("exp_integral_e1 domain and underflow edges") {
  CHECK_THROWS_AS(exp_integral_e1(0.0), std::domain_error);
  CHECK_THROWS_AS(exp_integral_e1(-1.0), std::domain_error);
  CHECK(exp_integral_e1(800.0) == 0.0);
}

TEST_CASE("composite_simpson is exact on cubics and converges on smooth f") {
  const double exact = 0.25 * std::pow(2.0, 4);  // \int_0^2 x^3
  CHECK(composite_simpson([](double x) { return x * x * x; }, 0.0, 2.0, 2) ==
        doctest::Approx(exact).epsilon(1e-14));
  const double ref = 1.0 - std::cos(1.0);
  CHECK(composite_simpson([](double x) { return std::sin(x); }, 0.0, 1.0, 64) ==
        doctest::Approx(ref).epsilon(1e-8));
}

TEST_CASE("adaptive_simpson resolves a boundary layer") {
  // \int_0^1 e^{-x/eps} dx = eps (1 - e^{-1/eps}); mass near 0.
  const double eps = 1e-3;
  const double ref = eps * (1.0 - std::exp(-1.0 / eps));
  const double got = adaptive_simpson([&](double x) { return std::exp(-x / eps); }, 0.0, 1.0, 1e-12);
  CHECK(got == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("nicholson beta: values, derivative, sup") {
  auto beta = BetaFunction::nicholson(6.0);
  CHECK(beta(0.0) == 0.0);
  CHECK(beta(1.0) == doctest::Approx(6.0 * std::exp(-1.0)).epsilon(1e-14));
  CHECK(beta.sup() == doctest::Approx(6.0 * std::exp(-1.0)).epsilon(1e-12));
  CHECK_FALSE(beta.nondecreasing());
  for (double x : {0.2, 1.0, 3.5}) {
    const double fd = (beta(x + 1e-6) - beta(x - 1e-6)) / 2e-6;
    CHECK(beta.derivative(x) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("saturating beta is nondecreasing and bounded by alpha") {
  auto beta = BetaFunction::nondecreasing_saturating(2.0, 1.5, 0.0);
  CHECK(beta(0.0) == 0.0);
  CHECK(beta.nondecreasing());
  CHECK(beta.sup() == doctest::Approx(2.0).epsilon(1e-12));
  double prev = -1.0;
  for (double x = 0.0; x <= 10.0; x += 0.25) {
    CHECK(beta(x) >= prev);
    prev = beta(x);
  }
}

TEST_CASE("table beta: interpolation, range policy") {
  auto beta = BetaFunction::table({{0.0, 0.0}, {1.0, 2.0}, {2.0, 1.0}});
  CHECK(beta(0.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(beta(1.5) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK_THROWS_AS(beta(-0.1), std::domain_error);
  // Beyond the range the last slope (-1) extrapolates, clamped at zero.
  CHECK(beta(2.5) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(beta(10.0) == 0.0);
  CHECK(beta.min_height() == 0.0);
}

TEST_CASE("table beta rejects malformed samples") {
  CHECK_THROWS(BetaFunction::table({{0.0, 1.0}}));
  CHECK_THROWS(BetaFunction::table({{1.0, 1.0}, {0.5, 1.0}}));
  CHECK_THROWS(BetaFunction::table({{0.0, -1.0}, {1.0, 1.0}}));
}

TEST_CASE("exp_decay growth: values and antiderivative against quadrature") {
  auto g = GrowthFunction::exp_decay(5.0);
  CHECK(g(0.0) == 5.0);
  CHECK(g.at_zero() == 5.0);
  CHECK(g(2.0) == doctest::Approx(5.0 * std::exp(-2.0)).epsilon(1e-14));
  CHECK(g.derivative(1.0) == doctest::Approx(-5.0 * std::exp(-1.0)).epsilon(1e-12));
  for (auto [lo, hi] : std::array<std::array<double, 2>, 3>{{{0.01, 0.5}, {0.3, 3.0}, {1.0, 40.0}}}) {
    const double ref = oracle::romberg([&](double w) { return g(w) / w; }, lo, hi);
    CHECK(g.antiderivative(lo, hi) == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("table growth is exact on exponential samples") {
  // Samples of 3 e^{-0.7 x}; the log-linear fit must reproduce the function
  // and its antiderivative between and beyond the nodes.
  std::vector<TableSample> s;
  for (double x = 0.0; x <= 6.0; x += 0.5) s.push_back({x, 3.0 * std::exp(-0.7 * x)});
  auto g = GrowthFunction::table(s);
  for (double x : {0.25, 1.1, 3.33, 5.9, 7.5}) {
    CHECK(g(x) == doctest::Approx(3.0 * std::exp(-0.7 * x)).epsilon(1e-12));
  }
  auto exact = GrowthFunction::exp_decay(1.0);  // independent route via romberg instead
  for (auto [lo, hi] : std::array<std::array<double, 2>, 2>{{{0.1, 2.0}, {0.5, 5.5}}}) {
    const double ref = oracle::romberg([](double w) { return 3.0 * std::exp(-0.7 * w) / w; }, lo, hi);
    CHECK(g.antiderivative(lo, hi) == doctest::Approx(ref).epsilon(1e-10));
  }
  (void)exact;
}

TEST_CASE("model params enforce the standing assumptions") {
  auto beta = BetaFunction::nicholson(6.0);
  auto g = GrowthFunction::exp_decay(5.0);
  CHECK_THROWS(ModelParams(0.0, 0.0, beta, g));
  CHECK_THROWS(ModelParams(1.0, -1.0, beta, g));
  // beta(x_m) >= mu violates the survival assumption: nicholson at x_m = 1
  // gives 6/e > 1.
  CHECK_THROWS(ModelParams(1.0, 1.0, beta, g));
  ModelParams ok(1.0, 0.0, beta, g);
  CHECK(ok.beta_at_xm() == 0.0);
}

TEST_CASE("height_at_age matches an RK4 integration of the growth ODE") {
  ModelParams m(1.0, 0.0, BetaFunction::nicholson(6.0), GrowthFunction::exp_decay(5.0));
  for (double b : {0.1, 0.5, 3.2}) {
    for (double a : {0.3, 1.0, 4.0, 12.0}) {
      const double ref = oracle::rk4(
          [&](double tau, double) { return m.g(std::exp(-m.mu * tau) * b / m.mu); }, m.x_m, 0.0, a);
      CHECK(height_at_age(m, b, a) == doctest::Approx(ref).epsilon(1e-9));
    }
  }
}

TEST_CASE("height_at_age limits and monotonicity") {
  ModelParams m(1.0, 0.5, BetaFunction::nicholson(1.0), GrowthFunction::exp_decay(2.0));
  CHECK(height_at_age(m, 0.0, 3.0) == doctest::Approx(0.5 + 2.0 * 3.0).epsilon(1e-14));
  CHECK(height_at_age(m, 1.0, 0.0) == 0.5);
  double prev = m.x_m;
  for (double a = 0.25; a <= 20.0; a += 0.25) {
    const double x = height_at_age(m, 1.0, a);
    CHECK(x > prev);
    prev = x;
  }
  // Large ages approach the free-growth line from below.
  CHECK(height_at_age(m, 1.0, 50.0) < 0.5 + 2.0 * 50.0);
}

TEST_CASE("height_at_age decreases in b (denser population grows slower)") {
  ModelParams m(1.0, 0.0, BetaFunction::nicholson(6.0), GrowthFunction::exp_decay(5.0));
  for (double a : {1.0, 5.0}) {
    CHECK(height_at_age(m, 0.5, a) > height_at_age(m, 2.0, a));
    CHECK(height_at_age(m, 2.0, a) > height_at_age(m, 8.0, a));
  }
}

TEST_CASE("history validation") {
  CHECK_THROWS(History(0.05, 1.0, {0.1, 0.2}));  // too few samples for a_max/h
  CHECK_THROWS(History(0.5, 1.0, {0.1, -0.2, 0.3}));
  History ok(0.5, 1.0, {0.1, 0.2, 0.3});
  CHECK(ok.samples.size() == 3);
  CHECK_THROWS(History(0.5, 1.0, {0.1, 0.2, 0.3}, TailMode::periodic_extension, 0.0));
}
