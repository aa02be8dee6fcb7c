#pragma once

#include <vector>

#include "forest/model.hpp"
#include "forest/quadrature.hpp"

namespace forest {

enum class Stability { stable, unstable, critical };

const char* to_string(Stability s);

struct EquilibriumRecord {
  double b;         // equilibrium birth rate
  double r_value;   // R(b); 1 at positive equilibria, R(0) at b = 0
  double f_prime;   // F'(b)
  Stability verdict;
  double residual;  // |R(b) - 1| achieved by the refinement (0 definitionally at b = 0)
};

struct EquilibriaOptions {
  double tol_eq = 1e-8;    // target |R(b) - 1| at positive equilibria
  double tol_crit = 1e-3;  // band around F'(b) = 1 classified as critical
  QuadratureOptions quad;
};

// Expected lifetime reproduction R(b) at constant birth rate b, by composite
// Simpson on [0, A] with A chosen so the neglected tail is below tol_tail.
double reproduction_R(const ModelParams& params, double b, const QuadratureOptions& quad = {});

// The one-dimensional map F(b) = b R(b).
double map_F(const ModelParams& params, double b, const QuadratureOptions& quad = {});

// Solution theta = sigma(u, b) of u = height_at_age(b, A), obtained by
// bisection on the age A; theta = e^{-mu A} b / mu. Requires b > 0, u >= x_m.
double cov_theta(const ModelParams& params, double b, double u);

// F(b) through the change of variables of the monotonicity proof:
// mu * \int_{x_m}^{U} beta(u) theta(u)/g(theta(u)) du. Independent route used
// as an oracle for map_F; requires b > 0.
double map_F_change_of_variables(const ModelParams& params, double b,
                                 const QuadratureOptions& quad = {});

// R'(b) via
// -R(b)/b - g(b/mu)/(mu b) * \int_0^inf beta(x(a)) d/da[e^{-mu a}/g(e^{-mu a}b/mu)] da,
// valid for every b > 0 (the leading term reduces to -1/b at equilibria).
double r_prime(const ModelParams& params, double b, const QuadratureOptions& quad = {});

// F'(b) = R(b) + b R'(b); equals R(0) at b = 0.
double f_prime(const ModelParams& params, double b, const QuadratureOptions& quad = {});

Stability classify(double f_prime_value, double tol_crit = 1e-3);

struct EquilibriaResult {
  std::vector<EquilibriumRecord> records;  // ascending in b; always contains b = 0
  // R(b_max) > 1 implies a further crossing beyond the scan bound
  // (R(+inf) = beta(x_m)/mu < 1), so b_max may truncate the equilibrium set.
  bool boundary_warning = false;
};

// Scans R(b) - 1 for sign changes on an n_scan grid of (0, b_max] and refines
// each bracket by bisection.
EquilibriaResult find_equilibria(const ModelParams& params, double b_max, int n_scan,
                                 const EquilibriaOptions& opts = {});

// Default scan bound when the caller gives none: 20 * max(1, mu*x_m + sup beta).
double default_scan_bound(const ModelParams& params);

}  // namespace forest
