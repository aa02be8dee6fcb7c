#include "forest/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace forest {

namespace {

// Power series E1(x) = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k k!),
// rapidly convergent for x <= 1.
double e1_series(double x) {
  double sum = 0.0;
  double term = 1.0;  // x^k / k!
  for (int k = 1; k < 64; ++k) {
    term *= x / k;
    const double add = (k % 2 ? term : -term) / k;
    sum += add;
    if (std::fabs(add) < 1e-18 * (std::fabs(sum) + 1.0)) break;
  }
  return -euler_gamma - std::log(x) + sum;
}

// Continued fraction E1(x) = e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...))),
// evaluated by the modified Lentz algorithm; converges fast for x > 1.
double e1_continued_fraction(double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 200; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const double del = c * d;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x);
}

}  // namespace

double exp_integral_e1(double x) {
  if (!(x > 0.0)) throw std::domain_error("exp_integral_e1: argument must be positive");
  if (x > 700.0) return 0.0;  // e^{-x} underflows; truncating here is below any tolerance we use
  return x <= 1.0 ? e1_series(x) : e1_continued_fraction(x);
}

}  // namespace forest
