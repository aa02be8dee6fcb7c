#include "forest/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace forest {

// ---------------------------------------------------------------------------
// Grid

Grid Grid::create(double h, double a_max, double t_end) {
  if (!(h > 0.0) || !(a_max > 0.0) || !(t_end > 0.0))
    throw std::invalid_argument("Grid: h, a_max and t_end must be positive");
  Grid g;
  g.h = h;
  const long k = std::llround(a_max / h);
  const long n = std::llround(t_end / h);
  if (k < 1 || n < 1) throw std::invalid_argument("Grid: a_max and t_end must cover at least one step");
  g.a_max = k * h;
  g.t_end = n * h;
  g.adjusted = std::fabs(g.a_max - a_max) > 1e-12 * a_max || std::fabs(g.t_end - t_end) > 1e-12 * t_end;
  return g;
}

int Grid::history_steps() const { return static_cast<int>(std::llround(a_max / h)); }
int Grid::time_steps() const { return static_cast<int>(std::llround(t_end / h)); }

// ---------------------------------------------------------------------------
// InitialData

InitialData InitialData::constant(double c) {
  if (!(c >= 0.0)) throw std::invalid_argument("InitialData: constant value must be nonnegative");
  InitialData d;
  d.kind_ = Kind::constant;
  d.c_ = c;
  return d;
}

InitialData InitialData::periodic(double b_star, double eps, double omega) {
  if (!(b_star - std::fabs(eps) >= 0.0))
    throw std::invalid_argument("InitialData: periodic data must stay nonnegative (b_star >= |eps|)");
  InitialData d;
  d.kind_ = Kind::periodic;
  d.b_star_ = b_star;
  d.eps_ = eps;
  d.omega_ = omega;
  return d;
}

InitialData InitialData::tabulated(std::vector<TableSample> samples) {
  if (samples.size() < 2) throw std::invalid_argument("InitialData: table needs at least two samples");
  for (size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].x > 0.0) throw std::invalid_argument("InitialData: table abscissae must be <= 0");
    if (!(samples[i].y >= 0.0)) throw std::invalid_argument("InitialData: table values must be nonnegative");
    if (i > 0 && !(samples[i].x > samples[i - 1].x))
      throw std::invalid_argument("InitialData: table abscissae must be strictly increasing");
  }
  InitialData d;
  d.kind_ = Kind::tabulated;
  d.samples_ = std::move(samples);
  return d;
}

double InitialData::operator()(double s) const {
  if (s > 1e-12) throw std::domain_error("InitialData: history argument must be <= 0");
  switch (kind_) {
    case Kind::constant: return c_;
    case Kind::periodic: return b_star_ + eps_ * std::sin(omega_ * s);
    case Kind::tabulated: {
      if (s < samples_.front().x || s > samples_.back().x) return 0.0;
      auto it = std::upper_bound(samples_.begin(), samples_.end(), s,
                                 [](double v, const TableSample& p) { return v < p.x; });
      if (it == samples_.end()) return samples_.back().y;
      if (it == samples_.begin()) return samples_.front().y;
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double w = (s - lo.x) / (hi.x - lo.x);
      return lo.y + w * (hi.y - lo.y);
    }
  }
  return 0.0;
}

double InitialData::tail_integral(double mu, double t, double a_from) const {
  switch (kind_) {
    case Kind::constant:
      return c_ * std::exp(-mu * a_from) / mu;
    case Kind::periodic: {
      // \int_a^inf e^{-mu s} sin(omega (t - s)) ds = Im[e^{i omega t} e^{-(mu + i omega) a} / (mu + i omega)]
      const std::complex<double> rate(mu, omega_);
      const std::complex<double> osc =
          std::exp(std::complex<double>(0.0, omega_ * t)) * std::exp(-rate * a_from) / rate;
      return std::max(0.0, b_star_ * std::exp(-mu * a_from) / mu + eps_ * osc.imag());
    }
    case Kind::tabulated:
      return 0.0;  // zero extension beyond the stored window
  }
  return 0.0;
}

bool InitialData::is_tabulated() const { return kind_ == Kind::tabulated; }
const std::vector<TableSample>& InitialData::samples() const { return samples_; }

// ---------------------------------------------------------------------------
// Renewal step

std::vector<double> tail_integral_profile(const ModelParams& params, std::span<const double> hist,
                                          double h, const InitialData& init, double t) {
  if (hist.size() < 2) throw std::invalid_argument("tail_integral_profile: history too short");
  const double mu = params.mu;
  const size_t k_max = hist.size() - 1;
  std::vector<double> profile(hist.size());
  profile[k_max] = init.tail_integral(mu, t, k_max * h);
  for (size_t k = k_max; k-- > 0;) {
    const double a0 = k * h, a1 = (k + 1) * h;
    const double panel = 0.5 * h * (std::exp(-mu * a0) * hist[k] + std::exp(-mu * a1) * hist[k + 1]);
    profile[k] = std::max(0.0, profile[k + 1] + panel);
  }
  return profile;
}

double height_kernel(const ModelParams& params, double a, double I_a) {
  if (a < 0.0) throw std::domain_error("height_kernel: age must be nonnegative");
  if (I_a < 0.0) throw std::domain_error("height_kernel: tail integral must be nonnegative");
  if (a == 0.0) return params.x_m;
  if (I_a == 0.0) return params.x_m + params.g.at_zero() * a;
  return params.x_m + params.g.antiderivative(I_a, std::exp(params.mu * a) * I_a) / params.mu;
}

double apply_functional(const ModelParams& params, std::span<const double> hist, double h,
                        const InitialData& init, double t) {
  if (hist.size() < 2) throw std::invalid_argument("apply_functional: history too short");
  const double mu = params.mu;
  const double beta_xm = params.beta_at_xm();
  const size_t k_max = hist.size() - 1;
  // Gregory end weights (3/8, 7/6, 23/24) at a = 0 remove the trapezoid's
  // leading Euler-Maclaurin endpoint error; the far end keeps the plain 1/2
  // weight because e^{-mu a_max} already damps it below the tail tolerance.
  const bool gregory = k_max >= 4;
  const double endpoint = (gregory ? 3.0 / 8.0 : 0.5) * h * beta_xm;
  if (endpoint >= 1.0)
    throw std::invalid_argument("apply_functional: step too large (endpoint weight * beta(x_m) >= 1)");

  const std::vector<double> profile = tail_integral_profile(params, hist, h, init, t);

  double s = 0.0;
  double x_last = params.x_m;
  for (size_t k = 1; k <= k_max; ++k) {
    const double a = k * h;
    const double x = height_kernel(params, a, profile[k]);
    double w = (k == k_max) ? 0.5 * h : h;
    if (gregory) {
      if (k == 1) w = 7.0 / 6.0 * h;
      else if (k == 2) w = 23.0 / 24.0 * h;
    }
    s += w * params.beta(x) * std::exp(-mu * a) * hist[k];
    x_last = x;
  }
  // Beyond a_max the initial data keep contributing; beta is frozen at the
  // horizon height, where the factor e^{-mu a_max} already makes the term
  // negligible.
  s += params.beta(x_last) * init.tail_integral(mu, t, k_max * h);
  return s / (1.0 - endpoint);
}

Trajectory run(const ModelParams& params, const Grid& grid, const InitialData& init,
               const SimOptions& opts) {
  const double mu = params.mu;
  if (std::exp(-mu * grid.a_max) > opts.tail_tol)
    throw std::invalid_argument("run: a_max too short for the requested tail tolerance");
  const int k_hist = grid.history_steps();
  const int n_steps = grid.time_steps();
  const double h = grid.h;

  std::vector<double> values;  // values[i] = b((i - k_hist) h)
  values.reserve(k_hist + 1 + n_steps);
  for (int k = 0; k <= k_hist; ++k) {
    const double v = init(-(k_hist - k) * h);
    if (!(v >= 0.0)) throw std::invalid_argument("run: initial data must be nonnegative");
    values.push_back(v);
  }

  std::vector<double> scratch(k_hist + 1);
  for (int n = 1; n <= n_steps; ++n) {
    const double t = n * h;
    scratch[0] = values.back();  // unknown slot, not read
    for (int k = 1; k <= k_hist; ++k) scratch[k] = values[k_hist + n - k];
    const double bt = apply_functional(params, scratch, h, init, t);
    if (!std::isfinite(bt))
      throw std::runtime_error("run: non-finite birth rate at t = " + std::to_string(t));
    values.push_back(bt);
  }

  Trajectory traj;
  traj.times.reserve(n_steps + 1);
  traj.values.reserve(n_steps + 1);
  for (int n = 0; n <= n_steps; ++n) {
    traj.times.push_back(n * h);
    traj.values.push_back(values[k_hist + n]);
  }
  const AsymptoteResult conv = detect_asymptote(traj, opts.conv_window / mu, opts.conv_tol);
  traj.converged = conv.converged;
  traj.limit = conv.limit;
  return traj;
}

AsymptoteResult detect_asymptote(const Trajectory& traj, double window, double conv_tol,
                                 std::span<const EquilibriumRecord> equilibria) {
  if (traj.times.size() < 2) throw std::invalid_argument("detect_asymptote: trajectory too short");
  const double t_end = traj.times.back();
  if (!(t_end - traj.times.front() > window))
    throw std::invalid_argument("detect_asymptote: trajectory shorter than the window");

  double mn = traj.values.back(), mx = mn, sum = 0.0;
  size_t count = 0;
  for (size_t i = traj.times.size(); i-- > 0;) {
    if (traj.times[i] < t_end - window) break;
    mn = std::min(mn, traj.values[i]);
    mx = std::max(mx, traj.values[i]);
    sum += traj.values[i];
    ++count;
  }
  const double mean = sum / count;

  AsymptoteResult res;
  res.converged = (mx - mn) / std::max(1.0, mean) <= conv_tol;
  res.limit = mean;
  if (!equilibria.empty()) {
    res.has_match = true;
    res.matched_b = equilibria.front().b;
    res.distance = std::fabs(mean - equilibria.front().b);
    for (const auto& rec : equilibria) {
      const double d = std::fabs(mean - rec.b);
      if (d < res.distance) {
        res.distance = d;
        res.matched_b = rec.b;
      }
    }
  }
  return res;
}

}  // namespace forest
