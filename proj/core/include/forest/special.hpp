#pragma once

namespace forest {

// Exponential integral E1(x) = \int_x^infty e^{-t}/t dt, x > 0.
// Relative error <= 1e-10 on (0, 700]; underflows to 0 for very large x.
double exp_integral_e1(double x);

// Euler-Mascheroni constant, used by the small-argument series of E1.
inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

}  // namespace forest
