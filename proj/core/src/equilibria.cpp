#include "forest/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace forest {

namespace {

// Truncation horizon with sup(beta) e^{-mu A} / mu <= tol_tail.
double quad_horizon(const ModelParams& m, double tol_tail) {
  const double s = m.beta.sup();
  if (s <= 0.0) return 10.0 / m.mu;
  return std::max(10.0 / m.mu, std::log(s / (m.mu * tol_tail)) / m.mu);
}

}  // namespace

const char* to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    default: return "critical";
  }
}

double reproduction_R(const ModelParams& params, double b, const QuadratureOptions& quad) {
  if (b < 0.0) throw std::domain_error("reproduction_R: b must be nonnegative");
  const double a_quad = quad_horizon(params, quad.tol_tail);
  return composite_simpson(
      [&](double a) { return params.beta(height_at_age(params, b, a)) * std::exp(-params.mu * a); },
      0.0, a_quad, quad.panels);
}

double map_F(const ModelParams& params, double b, const QuadratureOptions& quad) {
  return b * reproduction_R(params, b, quad);
}

double cov_theta(const ModelParams& params, double b, double u) {
  if (!(b > 0.0)) throw std::domain_error("cov_theta: transform degenerates at b <= 0");
  if (u < params.x_m) throw std::domain_error("cov_theta: height below x_m");
  if (u == params.x_m) return b / params.mu;
  double lo = 0.0;
  double hi = 1.0 / params.mu;
  while (height_at_age(params, b, hi) < u) {
    hi *= 2.0;
    if (hi > 1e9 / params.mu) throw std::runtime_error("cov_theta: failed to bracket the age");
  }
  // height_at_age is strictly increasing in a, so bisection is certain.
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (height_at_age(params, b, mid) < u ? lo : hi) = mid;
  }
  return std::exp(-params.mu * 0.5 * (lo + hi)) * b / params.mu;
}

double map_F_change_of_variables(const ModelParams& params, double b,
                                 const QuadratureOptions& quad) {
  if (!(b > 0.0)) throw std::domain_error("map_F_change_of_variables: requires b > 0");
  const double mu = params.mu;
  // Horizon in age, then mapped to a height bound; the integrand tail equals
  // b e^{-mu A} beta(x(A)) dA, so reuse the R horizon with the extra b factor.
  const double a_tail =
      quad_horizon(params, quad.tol_tail) + std::max(0.0, std::log(std::max(1.0, b)) / mu) + 5.0 / mu;
  auto integrand = [&](double u) {
    const double theta = cov_theta(params, b, u);
    return mu * params.beta(u) * theta / params.g(theta);
  };
  // The u-measure concentrates near x_m when g(b/mu) is small (large b).
  // Breakpoints at geometrically spaced ages pin that layer down so the
  // adaptive quadrature cannot overlook it.
  std::vector<double> cuts{params.x_m};
  for (double a = a_tail; a > 0.25 / mu; a *= 0.5) cuts.push_back(height_at_age(params, b, a));
  std::sort(cuts.begin(), cuts.end());
  const double tol = 1e-9 * std::max(1.0, b) / static_cast<double>(cuts.size());
  double acc = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i)
    acc += adaptive_simpson(integrand, cuts[i], cuts[i + 1], tol, 50);
  return acc;
}

double r_prime(const ModelParams& params, double b, const QuadratureOptions& quad) {
  if (!(b > 0.0)) throw std::domain_error("r_prime: requires b > 0");
  const double mu = params.mu;
  const double a_quad = quad_horizon(params, quad.tol_tail);
  const double g_bm = params.g(b / mu);
  auto integrand = [&](double a) {
    const double w = std::max(5e-308, std::exp(-mu * a) * b / mu);
    const double gw = params.g(w);
    // d/da [ e^{-mu a} / g(e^{-mu a} b / mu) ]
    const double d = mu * std::exp(-mu * a) * (w * params.g.derivative(w) - gw) / (gw * gw);
    return params.beta(height_at_age(params, b, a)) * d;
  };
  const double integral = composite_simpson(integrand, 0.0, a_quad, quad.panels);
  // At an equilibrium R(b) = 1 and the leading term reduces to -1/b; using
  // -R(b)/b keeps the formula exact away from equilibria as well.
  return -reproduction_R(params, b, quad) / b - g_bm / (mu * b) * integral;
}

double f_prime(const ModelParams& params, double b, const QuadratureOptions& quad) {
  if (b < 0.0) throw std::domain_error("f_prime: b must be nonnegative");
  if (b == 0.0) return reproduction_R(params, 0.0, quad);
  return reproduction_R(params, b, quad) + b * r_prime(params, b, quad);
}

Stability classify(double f_prime_value, double tol_crit) {
  if (f_prime_value < 1.0 - tol_crit) return Stability::stable;
  if (f_prime_value > 1.0 + tol_crit) return Stability::unstable;
  return Stability::critical;
}

double default_scan_bound(const ModelParams& params) {
  return 20.0 * std::max(1.0, params.mu * params.x_m + params.beta.sup());
}

EquilibriaResult find_equilibria(const ModelParams& params, double b_max, int n_scan,
                                 const EquilibriaOptions& opts) {
  if (!(b_max > 0.0)) throw std::invalid_argument("find_equilibria: b_max must be positive");
  if (n_scan < 2) throw std::invalid_argument("find_equilibria: n_scan must be at least 2");

  auto residual = [&](double b) { return reproduction_R(params, b, opts.quad) - 1.0; };

  EquilibriaResult result;
  const double r0 = reproduction_R(params, 0.0, opts.quad);
  result.records.push_back({0.0, r0, r0, classify(r0, opts.tol_crit), 0.0});

  const double step = b_max / n_scan;
  double prev_b = 0.0;
  double prev_res = r0 - 1.0;
  double last_res = prev_res;
  for (int i = 1; i <= n_scan; ++i) {
    const double b = i * step;
    const double res = residual(b);
    last_res = res;
    if ((prev_res < 0.0) != (res < 0.0) || res == 0.0) {
      double lo = prev_b, hi = b;
      double f_lo = prev_res;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = residual(mid);
        if (std::fabs(f_mid) <= opts.tol_eq) {
          lo = hi = mid;
          break;
        }
        if ((f_lo < 0.0) == (f_mid < 0.0)) {
          lo = mid;
          f_lo = f_mid;
        } else {
          hi = mid;
        }
      }
      const double root = 0.5 * (lo + hi);
      const double r_root = reproduction_R(params, root, opts.quad);
      const double fp = f_prime(params, root, opts.quad);
      result.records.push_back({root, r_root, fp, classify(fp, opts.tol_crit),
                                std::fabs(r_root - 1.0)});
    }
    prev_b = b;
    prev_res = res;
  }
  // R(+inf) = beta(x_m)/mu < 1, so a positive residual at the boundary
  // guarantees an equilibrium beyond the scan window.
  result.boundary_warning = last_res > 0.0;
  std::sort(result.records.begin(), result.records.end(),
            [](const EquilibriumRecord& a, const EquilibriumRecord& c) { return a.b < c.b; });
  return result;
}

}  // namespace forest
