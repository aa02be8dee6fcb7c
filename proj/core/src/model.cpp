#include "forest/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "forest/special.hpp"

namespace forest {

namespace {

void check_height(double x) {
  if (x < 0.0 || !std::isfinite(x)) throw std::domain_error("beta: height must be nonnegative and finite");
}

}  // namespace

// ---------------------------------------------------------------------------
// BetaFunction

BetaFunction BetaFunction::nicholson(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("nicholson beta: alpha must be positive");
  BetaFunction b;
  b.f_ = Nicholson{alpha};
  return b;
}

BetaFunction BetaFunction::nondecreasing_saturating(double alpha, double k, double x0) {
  if (!(alpha > 0.0) || !(k > 0.0) || x0 < 0.0)
    throw std::invalid_argument("saturating beta: need alpha > 0, k > 0, x0 >= 0");
  BetaFunction b;
  b.f_ = Saturating{alpha, k, x0};
  return b;
}

BetaFunction BetaFunction::table(std::vector<TableSample> samples, double fd_step) {
  if (samples.size() < 2) throw std::invalid_argument("beta table: need at least two samples");
  if (!(fd_step > 0.0)) throw std::invalid_argument("beta table: fd_step must be positive");
  for (size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].y < 0.0) throw std::invalid_argument("beta table: values must be nonnegative");
    if (i > 0 && !(samples[i].x > samples[i - 1].x))
      throw std::invalid_argument("beta table: x values must be strictly increasing");
  }
  const auto& a = samples[samples.size() - 2];
  const auto& z = samples.back();
  BetaFunction b;
  b.f_ = Table{std::move(samples), fd_step, (z.y - a.y) / (z.x - a.x)};
  return b;
}

double BetaFunction::operator()(double x) const {
  check_height(x);
  if (const auto* n = std::get_if<Nicholson>(&f_)) return n->alpha * x * std::exp(-x);
  if (const auto* s = std::get_if<Saturating>(&f_))
    return x <= s->x0 ? 0.0 : s->alpha * (1.0 - std::exp(-s->k * (x - s->x0)));
  const auto& t = std::get<Table>(f_);
  const auto& s = t.s;
  if (x < s.front().x) throw std::domain_error("beta table: query below table range");
  if (x >= s.back().x) return std::max(0.0, s.back().y + t.tail_slope * (x - s.back().x));
  auto it = std::upper_bound(s.begin(), s.end(), x,
                             [](double v, const TableSample& p) { return v < p.x; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (x - lo.x) / (hi.x - lo.x);
  return lo.y + w * (hi.y - lo.y);
}

double BetaFunction::derivative(double x) const {
  check_height(x);
  if (const auto* n = std::get_if<Nicholson>(&f_)) return n->alpha * std::exp(-x) * (1.0 - x);
  if (const auto* s = std::get_if<Saturating>(&f_))
    return x <= s->x0 ? 0.0 : s->alpha * s->k * std::exp(-s->k * (x - s->x0));
  const auto& t = std::get<Table>(f_);
  const double lo = t.s.front().x;
  double h = t.fd_step;
  if (x - h < lo) return ((*this)(x + h) - (*this)(x)) / h;  // one-sided at the table edge
  return ((*this)(x + h) - (*this)(x - h)) / (2.0 * h);
}

double BetaFunction::sup() const {
  if (const auto* n = std::get_if<Nicholson>(&f_)) return n->alpha * std::exp(-1.0);
  if (const auto* s = std::get_if<Saturating>(&f_)) return s->alpha;
  const auto& t = std::get<Table>(f_);
  double m = 0.0;
  for (const auto& p : t.s) m = std::max(m, p.y);
  // Growing extrapolation tails are unbounded; cover the height range any
  // admissible quadrature horizon can reach.
  if (t.tail_slope > 0.0) m = std::max(m, t.s.back().y + t.tail_slope * 500.0);
  return m;
}

double BetaFunction::sup_derivative_abs() const {
  if (const auto* n = std::get_if<Nicholson>(&f_)) return n->alpha;
  if (const auto* s = std::get_if<Saturating>(&f_)) return s->alpha * s->k;
  const auto& t = std::get<Table>(f_);
  double m = std::fabs(t.tail_slope);
  for (size_t i = 1; i < t.s.size(); ++i)
    m = std::max(m, std::fabs((t.s[i].y - t.s[i - 1].y) / (t.s[i].x - t.s[i - 1].x)));
  return m;
}

double BetaFunction::min_height() const {
  if (const auto* t = std::get_if<Table>(&f_)) return t->s.front().x;
  return 0.0;
}

bool BetaFunction::nondecreasing() const {
  if (std::holds_alternative<Nicholson>(f_)) return false;
  if (std::holds_alternative<Saturating>(f_)) return true;
  const auto& t = std::get<Table>(f_);
  for (size_t i = 1; i < t.s.size(); ++i)
    if (t.s[i].y < t.s[i - 1].y) return false;
  return t.tail_slope >= 0.0;
}

// ---------------------------------------------------------------------------
// GrowthFunction

GrowthFunction GrowthFunction::exp_decay(double p) {
  if (!(p > 0.0)) throw std::invalid_argument("exp_decay g: p must be positive");
  GrowthFunction g;
  g.f_ = ExpDecay{p};
  return g;
}

GrowthFunction GrowthFunction::table(std::vector<TableSample> samples) {
  if (samples.size() < 2) throw std::invalid_argument("g table: need at least two samples");
  for (size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i].y > 0.0)) throw std::invalid_argument("g table: values must be strictly positive");
    if (i > 0) {
      if (!(samples[i].x > samples[i - 1].x))
        throw std::invalid_argument("g table: x values must be strictly increasing");
      if (!(samples[i].y < samples[i - 1].y))
        throw std::invalid_argument("g table: values must be strictly decreasing");
    }
  }
  Table t;
  t.s = std::move(samples);
  t.seg_k.resize(t.s.size() - 1);
  t.seg_a.resize(t.s.size() - 1);
  for (size_t i = 0; i + 1 < t.s.size(); ++i) {
    const double k = (std::log(t.s[i].y) - std::log(t.s[i + 1].y)) / (t.s[i + 1].x - t.s[i].x);
    t.seg_k[i] = k;
    t.seg_a[i] = t.s[i].y * std::exp(k * t.s[i].x);
  }
  GrowthFunction g;
  g.f_ = std::move(t);
  return g;
}

GrowthFunction::Segment GrowthFunction::segment_at(double x) const {
  const auto& t = std::get<Table>(f_);
  if (x <= t.s.front().x) return {t.seg_a.front(), t.seg_k.front()};
  if (x >= t.s.back().x) return {t.seg_a.back(), t.seg_k.back()};
  auto it = std::upper_bound(t.s.begin(), t.s.end(), x,
                             [](double v, const TableSample& p) { return v < p.x; });
  const size_t i = static_cast<size_t>(it - t.s.begin()) - 1;
  return {t.seg_a[i], t.seg_k[i]};
}

double GrowthFunction::operator()(double x) const {
  if (x < 0.0 || !std::isfinite(x)) throw std::domain_error("g: argument must be nonnegative and finite");
  if (const auto* e = std::get_if<ExpDecay>(&f_)) return e->p * std::exp(-x);
  const Segment s = segment_at(x);
  return s.a * std::exp(-s.k * x);
}

double GrowthFunction::derivative(double x) const {
  if (x < 0.0 || !std::isfinite(x)) throw std::domain_error("g: argument must be nonnegative and finite");
  if (const auto* e = std::get_if<ExpDecay>(&f_)) return -e->p * std::exp(-x);
  const Segment s = segment_at(x);
  return -s.k * s.a * std::exp(-s.k * x);
}

double GrowthFunction::at_zero() const { return (*this)(0.0); }

double GrowthFunction::antiderivative(double x_lo, double x_hi) const {
  if (!(x_lo > 0.0)) throw std::domain_error("growth antiderivative: lower endpoint must be positive");
  if (!(x_hi >= x_lo)) throw std::domain_error("growth antiderivative: endpoints out of order");
  if (x_lo == x_hi) return 0.0;

  // \int A e^{-k w} / w dw = A (E1(k lo) - E1(k hi)) for k > 0.
  auto piece = [](double a, double k, double lo, double hi) {
    if (k <= 0.0) return a * std::log(hi / lo);  // not reachable for valid tables, kept for safety
    return a * (exp_integral_e1(k * lo) - exp_integral_e1(k * hi));
  };

  if (const auto* e = std::get_if<ExpDecay>(&f_)) return piece(e->p, 1.0, x_lo, x_hi);

  const auto& t = std::get<Table>(f_);
  double acc = 0.0;
  double lo = x_lo;
  // Walk the sample boundaries that fall inside (x_lo, x_hi).
  for (size_t i = 0; i + 1 < t.s.size() && lo < x_hi; ++i) {
    const double edge = t.s[i + 1].x;
    if (edge <= lo) continue;
    const double hi = std::min(edge, x_hi);
    const Segment s = segment_at(0.5 * (lo + hi));
    acc += piece(s.a, s.k, lo, hi);
    lo = hi;
  }
  if (lo < x_hi) {  // tail beyond the last sample
    acc += piece(t.seg_a.back(), t.seg_k.back(), lo, x_hi);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// ModelParams / height_at_age / History

ModelParams::ModelParams(double mu_, double x_m_, BetaFunction beta_, GrowthFunction g_)
    : mu(mu_), x_m(x_m_), beta(std::move(beta_)), g(std::move(g_)) {
  if (!(mu > 0.0)) throw std::invalid_argument("ModelParams: mu must be positive");
  if (!(x_m >= 0.0)) throw std::invalid_argument("ModelParams: x_m must be nonnegative");
  if (beta.min_height() > x_m)
    throw std::invalid_argument("ModelParams: beta table does not cover the newborn height x_m");
  if (!(beta(x_m) < mu))
    throw std::invalid_argument("ModelParams: standing assumption beta(x_m) < mu violated");
}

double height_at_age(const ModelParams& params, double b, double a) {
  if (b < 0.0) throw std::domain_error("height_at_age: b must be nonnegative");
  if (a < 0.0) throw std::domain_error("height_at_age: age must be nonnegative");
  if (a == 0.0) return params.x_m;
  if (b == 0.0) return params.x_m + params.g.at_zero() * a;
  const double w_hi = b / params.mu;
  double w_lo = w_hi * std::exp(-params.mu * a);
  if (w_lo <= 0.0) w_lo = 5e-308;  // exp underflow at extreme ages
  return params.x_m + params.g.antiderivative(w_lo, w_hi) / params.mu;
}

History::History(double h_, double a_max_, std::vector<double> samples_, TailMode tail_mode_,
                 double period_)
    : h(h_), a_max(a_max_), samples(std::move(samples_)), tail_mode(tail_mode_), period(period_) {
  if (!(h > 0.0) || !(a_max > 0.0)) throw std::invalid_argument("History: h and a_max must be positive");
  const auto expected = static_cast<size_t>(std::llround(a_max / h)) + 1;
  if (samples.size() != expected)
    throw std::invalid_argument("History: sample count does not match a_max/h + 1");
  for (double v : samples)
    if (!(v >= 0.0)) throw std::invalid_argument("History: samples must be nonnegative");
  if (tail_mode == TailMode::periodic_extension && !(period > 0.0))
    throw std::invalid_argument("History: periodic extension needs a positive period");
}

}  // namespace forest
