#pragma once

#include <variant>
#include <vector>

namespace forest {

struct TableSample {
  double x;
  double y;
};

// Per capita reproduction rate beta(x) as a function of tree height.
// Families: the unimodal Nicholson-type alpha*x*e^{-x}, a nondecreasing
// saturating family alpha*(1 - e^{-k(x-x0)}), and piecewise-linear tables.
class BetaFunction {
 public:
  static BetaFunction nicholson(double alpha);
  static BetaFunction nondecreasing_saturating(double alpha, double k, double x0 = 0.0);
  // Table samples must have strictly increasing x and nonnegative values.
  // Queries below the table range are rejected; beyond the range the last
  // slope is extrapolated and clamped at zero (beta is a rate).
  static BetaFunction table(std::vector<TableSample> samples, double fd_step = 1e-5);

  double operator()(double x) const;
  double derivative(double x) const;

  // Upper bound on beta over reachable heights, used to truncate quadratures.
  double sup() const;
  double sup_derivative_abs() const;
  // Smallest admissible height query (table lower end; 0 for closed forms).
  double min_height() const;
  bool nondecreasing() const;

 private:
  struct Nicholson {
    double alpha;
  };
  struct Saturating {
    double alpha, k, x0;
  };
  struct Table {
    std::vector<TableSample> s;
    double fd_step;
    double tail_slope;
  };
  std::variant<Nicholson, Saturating, Table> f_;
  BetaFunction() = default;
};

// Individual growth rate g(x): strictly decreasing, positive, g(+inf) = 0.
// Table variant interpolates log-linearly (exact on exponentials) and extends
// both ends by the exponential fit of the nearest two samples.
class GrowthFunction {
 public:
  static GrowthFunction exp_decay(double p);
  static GrowthFunction table(std::vector<TableSample> samples);

  double operator()(double x) const;
  double derivative(double x) const;
  double at_zero() const;

  // growth_antiderivative_G: \int_{x_lo}^{x_hi} g(w)/w dw, 0 < x_lo <= x_hi.
  // Closed form via E1 for exp_decay and per-segment exponential fits.
  double antiderivative(double x_lo, double x_hi) const;

 private:
  struct ExpDecay {
    double p;
  };
  struct Table {
    std::vector<TableSample> s;
    std::vector<double> seg_k;  // per-segment decay rates of the fit A e^{-k x}
    std::vector<double> seg_a;  // per-segment amplitudes
  };
  std::variant<ExpDecay, Table> f_;
  GrowthFunction() = default;

  struct Segment {
    double a, k;
  };
  Segment segment_at(double x) const;
};

// Model instance (mu, x_m, beta, g). Construction enforces the standing
// assumptions mu > 0, x_m >= 0 and beta(x_m) < mu.
struct ModelParams {
  ModelParams(double mu, double x_m, BetaFunction beta, GrowthFunction g);

  double mu;
  double x_m;
  BetaFunction beta;
  GrowthFunction g;

  double beta_at_xm() const { return beta(x_m); }
};

// Height at age a of an individual born into a population at constant birth
// rate b: x_m + \int_0^a g(e^{-mu tau} b / mu) dtau, collapsed through the
// antiderivative of g(w)/w. The b = 0 branch uses the analytic limit g(0)*a.
double height_at_age(const ModelParams& params, double b, double a);

enum class TailMode { zero, constant_last, periodic_extension };

// Discretized birth-rate history b(-k h), k = 0..a_max/h, all samples >= 0.
struct History {
  History(double h, double a_max, std::vector<double> samples,
          TailMode tail_mode = TailMode::zero, double period = 0.0);

  double h;
  double a_max;
  std::vector<double> samples;
  TailMode tail_mode;
  double period;
};

}  // namespace forest
