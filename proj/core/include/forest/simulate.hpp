#pragma once

#include <span>
#include <vector>

#include "forest/equilibria.hpp"
#include "forest/model.hpp"

namespace forest {

// Discretization of the infinite-delay problem: a_max/h and t_end/h are
// rounded to integers at construction (adjusted flag set when rounding moved
// them).
struct Grid {
  static Grid create(double h, double a_max, double t_end);

  double h;
  double a_max;
  double t_end;
  bool adjusted = false;

  int history_steps() const;  // a_max / h
  int time_steps() const;     // t_end / h
};

// Initial data phi(a), a <= 0, from the cone of nonnegative functions.
// Constant and periodic variants extend analytically beyond the truncation
// horizon; tabulated data are extended by zero.
class InitialData {
 public:
  static InitialData constant(double c);
  static InitialData periodic(double b_star, double eps, double omega);
  static InitialData tabulated(std::vector<TableSample> samples);

  double operator()(double s) const;  // phi(s), s <= 0
  // \int_{a_from}^infty e^{-mu a} phi(t - a) da using the analytic extension
  // (zero for tabulated data).
  double tail_integral(double mu, double t, double a_from) const;
  bool is_tabulated() const;
  const std::vector<TableSample>& samples() const;

 private:
  enum class Kind { constant, periodic, tabulated } kind_;
  double c_ = 0, b_star_ = 0, eps_ = 0, omega_ = 0;
  std::vector<TableSample> samples_;
};

struct SimOptions {
  double conv_tol = 1e-6;       // relative oscillation over the trailing window
  double conv_window = 10.0;    // window width in units of 1/mu
  double tail_tol = 1e-12;      // required e^{-mu a_max} bound
};

struct Trajectory {
  std::vector<double> times;   // t >= 0 samples
  std::vector<double> values;  // b(t), nonnegative
  bool converged = false;
  double limit = 0.0;          // trailing mean when converged
};

// I(a_k) = \int_{a_k}^infty e^{-mu s} b(t - s) ds by backward trapezoid over
// the stored history plus the initial-data tail. hist[k] = b(t - k h).
std::vector<double> tail_integral_profile(const ModelParams& params, std::span<const double> hist,
                                          double h, const InitialData& init, double t);

// Height reached at age a given the tail integral I_a at that age, through
// the antiderivative collapse of the nested growth integral.
double height_kernel(const ModelParams& params, double a, double I_a);

// One application of the renewal functional: returns b(t) given the history
// hist[k] = b(t - k h), k = 1..K (hist[0] is the unknown slot and is not
// read; the a = 0 trapezoid endpoint is solved for implicitly).
double apply_functional(const ModelParams& params, std::span<const double> hist, double h,
                        const InitialData& init, double t);

Trajectory run(const ModelParams& params, const Grid& grid, const InitialData& init,
               const SimOptions& opts = {});

struct AsymptoteResult {
  bool converged = false;
  double limit = 0.0;
  double matched_b = 0.0;   // nearest equilibrium (when any were supplied)
  double distance = 0.0;
  bool has_match = false;
};

AsymptoteResult detect_asymptote(const Trajectory& traj, double window, double conv_tol,
                                 std::span<const EquilibriumRecord> equilibria = {});

}  // namespace forest
