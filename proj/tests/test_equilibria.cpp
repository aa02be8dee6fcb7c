#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "forest/equilibria.hpp"
#include "oracle.hpp"

using namespace forest;

namespace {

ModelParams nicholson_model(double alpha, double p, double mu = 1.0, double x_m = 0.0) {
  return ModelParams(mu, x_m, BetaFunction::nicholson(alpha), GrowthFunction::exp_decay(p));
}

}  // namespace

TEST_CASE("R(0) closed form alpha p / (1+p)^2") {
  // At b = 0 trees grow freely at speed p (for g = p e^{-x} with x_m = 0 and
  // mu = 1 the lifetime reproduction integral has the stated closed form).
  CHECK(reproduction_R(nicholson_model(6.0, 1.0), 0.0) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(reproduction_R(nicholson_model(6.0, 5.0), 0.0) ==
        doctest::Approx(5.0 / 6.0).epsilon(1e-9));
}

TEST_CASE("R(b) agrees with an independent Romberg evaluation") {
  auto m = nicholson_model(6.0, 5.0);
  for (double b : {0.0, 0.3, 1.0, 4.0}) {
    const double ref = oracle::romberg_to_infinity(
        [&](double a) { return m.beta(height_at_age(m, b, a)) * std::exp(-m.mu * a); }, 0.0);
    CHECK(reproduction_R(m, b) == doctest::Approx(ref).epsilon(1e-8));
  }
}

TEST_CASE("bistable equilibrium set at alpha=6, p=5") {
  auto m = nicholson_model(6.0, 5.0);
  auto res = find_equilibria(m, 10.0, 400);
  REQUIRE(res.records.size() == 3);
  CHECK_FALSE(res.boundary_warning);
  CHECK(res.records[0].b == 0.0);
  CHECK(res.records[0].verdict == Stability::stable);
  CHECK(res.records[1].b > 0.45);
  CHECK(res.records[1].b < 0.49);
  CHECK(res.records[1].verdict == Stability::unstable);
  CHECK(res.records[2].b > 3.1);
  CHECK(res.records[2].b < 3.3);
  CHECK(res.records[2].verdict == Stability::stable);
  for (const auto& r : res.records) {
    if (r.b > 0.0) CHECK(r.residual <= 1e-8);
  }
  // Pinned regression values, cross-checked against the Romberg oracle above.
  CHECK(res.records[1].b == doctest::Approx(0.4783277035).epsilon(1e-6));
  CHECK(res.records[2].b == doctest::Approx(3.1922636986).epsilon(1e-6));
}

TEST_CASE("single positive equilibrium at alpha=6, p=1") {
  auto m = nicholson_model(6.0, 1.0);
  auto res = find_equilibria(m, 10.0, 400);
  REQUIRE(res.records.size() == 2);
  CHECK(res.records[0].verdict == Stability::unstable);  // R(0) = 1.5 > 1
  CHECK(res.records[1].verdict == Stability::stable);
}

TEST_CASE("boundary warning when the scan stops inside a supercritical region") {
  auto m = nicholson_model(6.0, 5.0);
  // R > 1 on (b2, b3); a scan capped at 1.0 ends there and must warn.
  auto res = find_equilibria(m, 1.0, 50);
  CHECK(res.boundary_warning);
}

TEST_CASE("map F is strictly increasing despite the unimodal beta") {
  for (double p : {1.0, 5.0}) {
    auto m = nicholson_model(6.0, p);
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
      const double f = map_F(m, 0.1 * i);
      CHECK(f > prev);
      prev = f;
    }
  }
}

TEST_CASE("change-of-variables route reproduces map F") {
  auto m = nicholson_model(6.0, 5.0);
  for (double b : {0.05, 0.47, 1.0, 3.2, 10.0}) {
    const double f = map_F(m, b);
    CHECK(map_F_change_of_variables(m, b) == doctest::Approx(f).epsilon(1e-7));
  }
}

TEST_CASE("cov_theta inverts height_at_age") {
  auto m = nicholson_model(6.0, 5.0);
  const double b = 2.0;
  for (double a : {0.1, 1.0, 6.0}) {
    const double u = height_at_age(m, b, a);
    CHECK(cov_theta(m, b, u) ==
          doctest::Approx(std::exp(-m.mu * a) * b / m.mu).epsilon(1e-8));
  }
  CHECK(cov_theta(m, b, m.x_m) == doctest::Approx(b / m.mu).epsilon(1e-14));
  CHECK_THROWS_AS(cov_theta(m, 0.0, 1.0), std::domain_error);
}

TEST_CASE("r_prime matches central finite differences of R") {
  auto m = nicholson_model(6.0, 5.0);
  for (double b : {0.2, 1.0, 3.0}) {
    const double step = 1e-4 * b;
    const double fd = (reproduction_R(m, b + step) - reproduction_R(m, b - step)) / (2.0 * step);
    CHECK(r_prime(m, b) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("f_prime matches central finite differences of map F") {
  auto m = nicholson_model(6.0, 5.0);
  for (double b : {0.3, 0.47, 2.0}) {
    const double step = 1e-4 * std::max(1.0, b);
    const double fd = (map_F(m, b + step) - map_F(m, b - step)) / (2.0 * step);
    CHECK(f_prime(m, b) == doctest::Approx(fd).epsilon(1e-5));
  }
  CHECK(f_prime(m, 0.0) == doctest::Approx(reproduction_R(m, 0.0)).epsilon(1e-12));
}

TEST_CASE("classification bands") {
  CHECK(classify(0.5) == Stability::stable);
  CHECK(classify(1.5) == Stability::unstable);
  CHECK(classify(1.0) == Stability::critical);
  CHECK(classify(1.0005) == Stability::critical);
  CHECK(classify(1.002) == Stability::unstable);
}

TEST_CASE("a tangency-like point classifies as critical") {
  // Between the unstable and stable equilibria F' crosses 1; root-find that
  // crossing and check the classifier flags it.
  auto m = nicholson_model(6.0, 5.0);
  double lo = 0.48, hi = 3.19;
  double f_lo = f_prime(m, lo) - 1.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f_prime(m, mid) - 1.0;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  const double b_c = 0.5 * (lo + hi);
  CHECK(classify(f_prime(m, b_c)) == Stability::critical);
}

TEST_CASE("find_equilibria input validation") {
  auto m = nicholson_model(6.0, 5.0);
  CHECK_THROWS_AS(find_equilibria(m, -1.0, 100), std::invalid_argument);
  CHECK_THROWS_AS(find_equilibria(m, 10.0, 1), std::invalid_argument);
  CHECK(default_scan_bound(m) > 0.0);
}

TEST_CASE("randomized admissible models keep F increasing") {
  std::mt19937 rng(20260824);
  std::uniform_real_distribution<double> ua(0.5, 12.0), up(0.3, 8.0);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = nicholson_model(ua(rng), up(rng));
    double prev = -1.0;
    for (int i = 0; i <= 40; ++i) {
      const double f = map_F(m, 0.25 * i);
      CHECK(f > prev);
      prev = f;
    }
  }
}
