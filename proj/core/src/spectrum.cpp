#include "forest/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace forest {

namespace {

constexpr double pi = std::numbers::pi;

// Internal signal: a contour sample landed on (or too close to) a root.
struct RootOnContour {};

}  // namespace

CharacteristicEvaluator::CharacteristicEvaluator(const ModelParams& params, double b,
                                                 SpectrumOptions opts)
    : params_(&params), b_(b), opts_(opts) {
  if (b < 0.0) throw std::domain_error("CharacteristicEvaluator: b must be nonnegative");
  gbm_ = b > 0.0 ? params.g(b / params.mu) : params.g.at_zero();
  nodes_per_block_ = opts_.panels_per_block;
  if (nodes_per_block_ % 2) ++nodes_per_block_;
  step_ = opts_.block_len / (params.mu * nodes_per_block_);
  ensure_blocks(1);
}

void CharacteristicEvaluator::ensure_blocks(int n) const {
  const size_t want = static_cast<size_t>(n) * nodes_per_block_ + 1;
  if (nodes_.size() >= want) return;
  nodes_.reserve(want);
  const ModelParams& m = *params_;
  for (size_t i = nodes_.size(); i < want; ++i) {
    const double a = i * step_;
    const double x = height_at_age(m, b_, a);
    double w = b_ > 0.0 ? std::exp(-m.mu * a) * b_ / m.mu : 0.0;
    Node nd;
    nd.beta_x = m.beta(x);
    nd.beta_prime_x = m.beta.derivative(x);
    nd.g_w = m.g(w);
    nd.gp_w = m.g.derivative(w);
    nd.w = w;
    nodes_.push_back(nd);
  }
}

template <class Kernel>
std::complex<double> CharacteristicEvaluator::integrate(std::complex<double> lambda,
                                                        double sup_kernel, Kernel&& kernel) const {
  const double mu = params_->mu;
  const double sigma = mu + lambda.real();  // > 0 by the domain check of the callers
  const std::complex<double> decay = std::exp(-(mu + lambda) * step_);
  std::complex<double> acc = 0.0;
  int small_blocks = 0;
  for (int blk = 0; blk < opts_.max_blocks; ++blk) {
    ensure_blocks(blk + 1);
    const int i0 = blk * nodes_per_block_;
    std::complex<double> e = std::exp(-(mu + lambda) * (i0 * step_));
    std::complex<double> s = kernel(nodes_[i0]) * e;
    for (int j = 1; j < nodes_per_block_; ++j) {
      e *= decay;
      s += kernel(nodes_[i0 + j]) * e * (j % 2 ? 4.0 : 2.0);
    }
    e *= decay;
    s += kernel(nodes_[i0 + nodes_per_block_]) * e;
    s *= step_ / 3.0;
    acc += s;

    const double scale = opts_.tol_tail * (1.0 + std::abs(acc));
    const double a_end = (i0 + nodes_per_block_) * step_;
    if (sup_kernel * std::exp(-sigma * a_end) / sigma <= scale) break;
    small_blocks = std::abs(s) <= scale ? small_blocks + 1 : 0;
    if (small_blocks >= 2) break;
  }
  return acc;
}

std::complex<double> CharacteristicEvaluator::chi(std::complex<double> lambda) const {
  const double mu = params_->mu;
  if (!(lambda.real() >= -mu + opts_.delta_frac * mu))
    throw std::domain_error("chi: Re lambda too close to the convergence boundary -mu");
  const double sup_k = gbm_ * params_->beta.sup_derivative_abs();
  return gbm_ * integrate(lambda, sup_k,
                          [](const Node& n) { return std::complex<double>(n.beta_prime_x); });
}

std::complex<double> CharacteristicEvaluator::xi(std::complex<double> lambda) const {
  const double mu = params_->mu;
  if (!(lambda.real() >= -mu + opts_.delta_frac * mu))
    throw std::domain_error("xi: Re lambda too close to the convergence boundary -mu");
  const std::complex<double> mul = mu + lambda;
  // 1/g(w) <= 1/g(b/mu); a crude sup over the bracket term suffices for the
  // tail bound (the block-contribution stop does the fine work).
  const double sup_k = params_->beta.sup() / gbm_ * (1.0 + 5.0 * b_ / std::abs(mul));
  auto kernel = [&](const Node& n) {
    const std::complex<double> bracket = 1.0 - mu * n.w * n.gp_w / (mul * n.g_w);
    return n.beta_x / n.g_w * bracket;
  };
  return gbm_ * integrate(lambda, sup_k, kernel);
}

std::complex<double> CharacteristicEvaluator::delta(std::complex<double> z) const {
  return z + params_->mu - params_->beta_at_xm() - chi(z);
}

double CharacteristicEvaluator::dominant_real_root() const {
  const double mu = params_->mu;
  const double delta_off = opts_.delta_frac * mu;
  auto xi_real = [&](double l) { return xi(std::complex<double>(l, 0.0)).real(); };

  double lo = -mu + delta_off;
  // When beta(x_m) = 0, xi can stay below 1 on the whole admissible
  // half-line; the characteristic equation then has no root with
  // Re z > -mu and the spectral bound is the essential one at -mu.
  if (!(xi_real(lo) > 1.0)) return lo;
  double hi = mu;
  while (xi_real(hi) >= 1.0) {
    hi = 2.0 * hi + mu;
    if (hi > 1e7 * mu) throw std::runtime_error("dominant_real_root: failed to bracket from above");
  }
  double best = 0.5 * (lo + hi);
  double best_res = std::fabs(xi_real(best) - 1.0);
  while (hi - lo > 1e-15 * std::max(1.0, std::fabs(hi))) {
    const double mid = 0.5 * (lo + hi);
    const double v = xi_real(mid);
    const double res = std::fabs(v - 1.0);
    if (res < best_res) {
      best = mid;
      best_res = res;
    }
    if (res <= opts_.root_tol) break;
    (v > 1.0 ? lo : hi) = mid;  // xi is strictly decreasing
  }
  return best;
}

int CharacteristicEvaluator::winding(double re_lo, double re_hi, double im_lo,
                                     double im_hi) const {
  using C = std::complex<double>;
  int budget = opts_.max_contour_points;
  auto eval = [&](C z) {
    if (--budget < 0) throw InconclusiveCount("contour refinement exceeded max_contour_points");
    const C f = delta(z);
    if (std::abs(f) < opts_.contour_floor * (1.0 + std::abs(z))) throw RootOnContour{};
    return f;
  };

  double total = 0.0;
  // Argument increment along [z1, z2], refining until each step's phase change
  // is below pi/2 so the winding cannot alias.
  auto segment = [&](auto&& self, C z1, C z2, C f1, C f2, int depth) -> double {
    const double dphi = std::arg(f2 / f1);
    if (std::fabs(dphi) < 0.5 * pi && depth <= 0) return dphi;
    // A segment that refuses to settle is a zero sitting on (or hugging) the
    // contour: the phase flips by ~pi across it at every scale.
    if (depth <= -48) throw RootOnContour{};
    const C zm = 0.5 * (z1 + z2);
    const C fm = eval(zm);
    return self(self, z1, zm, f1, fm, depth - 1) + self(self, zm, z2, fm, f2, depth - 1);
  };
  auto edge = [&](C z1, C z2) {
    const int n0 = 16;  // guard against aliasing on long, quiet edges
    C prev_z = z1;
    C prev_f = eval(z1);
    for (int i = 1; i <= n0; ++i) {
      const C z = z1 + (z2 - z1) * (static_cast<double>(i) / n0);
      const C f = eval(z);
      total += segment(segment, prev_z, z, prev_f, f, 0);
      prev_z = z;
      prev_f = f;
    }
  };

  const C c0(re_lo, im_lo), c1(re_hi, im_lo), c2(re_hi, im_hi), c3(re_lo, im_hi);
  edge(c0, c1);
  edge(c1, c2);
  edge(c2, c3);
  edge(c3, c0);

  const double w = total / (2.0 * pi);
  const long n = std::lround(w);
  if (std::fabs(w - n) > 0.25)
    throw InconclusiveCount("winding number did not settle to an integer");
  return static_cast<int>(n);
}

int CharacteristicEvaluator::count_roots(const Rectangle& rect) const {
  const double mu = params_->mu;
  if (!(rect.re_min > -mu + opts_.delta_frac * mu))
    throw std::domain_error("count_roots: rectangle reaches the convergence boundary");
  if (!(rect.re_max > rect.re_min) || !(rect.im_max > 0.0))
    throw std::invalid_argument("count_roots: degenerate rectangle");
  double re_lo = rect.re_min, re_hi = rect.re_max, im = rect.im_max;
  for (int attempt = 0; attempt < 6; ++attempt) {
    try {
      return winding(re_lo, re_hi, -im, im);
    } catch (const RootOnContour&) {
      // A root sits on the contour; inflate by 1% and retry.
      const double w = re_hi - re_lo;
      re_lo = std::max(re_lo - 0.01 * w, -mu + 2.0 * opts_.delta_frac * mu);
      re_hi += 0.01 * w;
      im *= 1.01;
    }
  }
  throw InconclusiveCount("count_roots: persistent root on the contour");
}

void CharacteristicEvaluator::locate_rec(double re_lo, double re_hi, double im_lo, double im_hi,
                                         int count, double tol,
                                         std::vector<std::complex<double>>& out) const {
  if (count == 0) return;
  const double w = re_hi - re_lo, h = im_hi - im_lo;
  if (std::max(w, h) < tol) {
    out.insert(out.end(), count, {0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi)});
    return;
  }
  const bool split_re = w >= h;
  for (double frac : {0.5, 0.47, 0.53, 0.44, 0.56}) {
    const double cut = split_re ? re_lo + frac * w : im_lo + frac * h;
    try {
      int c1, c2;
      if (split_re) {
        c1 = winding(re_lo, cut, im_lo, im_hi);
        c2 = winding(cut, re_hi, im_lo, im_hi);
      } else {
        c1 = winding(re_lo, re_hi, im_lo, cut);
        c2 = winding(re_lo, re_hi, cut, im_hi);
      }
      if (c1 + c2 != count) throw InconclusiveCount("locate_roots: counts did not add up");
      if (split_re) {
        locate_rec(re_lo, cut, im_lo, im_hi, c1, tol, out);
        locate_rec(cut, re_hi, im_lo, im_hi, c2, tol, out);
      } else {
        locate_rec(re_lo, re_hi, im_lo, cut, c1, tol, out);
        locate_rec(re_lo, re_hi, cut, im_hi, c2, tol, out);
      }
      return;
    } catch (const RootOnContour&) {
      continue;  // the cut grazed a root; jitter the split
    }
  }
  throw InconclusiveCount("locate_roots: could not find a clean cut");
}

std::vector<std::complex<double>> CharacteristicEvaluator::locate_roots(const Rectangle& rect,
                                                                        double tol) const {
  using C = std::complex<double>;
  const int n = count_roots(rect);
  std::vector<C> boxes;
  locate_rec(rect.re_min, rect.re_max, -rect.im_max, rect.im_max, n, std::max(tol, 0.05), boxes);

  // Newton polish with a numerical derivative of Delta.
  std::vector<C> roots;
  for (C z : boxes) {
    for (int it = 0; it < 60; ++it) {
      const C f = delta(z);
      if (std::abs(f) < 1e-12 * (1.0 + std::abs(z))) break;
      const double e = 1e-6;
      const C df = (delta(z + e) - delta(z - e)) / (2.0 * e);
      const C stepz = f / df;
      z -= stepz;
      if (z.real() < rect.re_min) z.real(rect.re_min);  // keep inside the admissible half-plane
      if (std::abs(stepz) < 1e-13 * (1.0 + std::abs(z))) break;
    }
    bool dup = false;
    for (C r : roots)
      if (std::abs(r - z) < 1e-6 * (1.0 + std::abs(z))) dup = true;
    if (!dup) roots.push_back(z);
  }
  return roots;
}

std::complex<double> chi(const ModelParams& params, double b, std::complex<double> lambda,
                         const SpectrumOptions& opts) {
  return CharacteristicEvaluator(params, b, opts).chi(lambda);
}

std::complex<double> xi(const ModelParams& params, double b, std::complex<double> lambda,
                        const SpectrumOptions& opts) {
  return CharacteristicEvaluator(params, b, opts).xi(lambda);
}

double dominant_real_root(const ModelParams& params, double b, const SpectrumOptions& opts) {
  return CharacteristicEvaluator(params, b, opts).dominant_real_root();
}

int count_roots_argument_principle(const ModelParams& params, double b, const Rectangle& rect,
                                   const SpectrumOptions& opts) {
  return CharacteristicEvaluator(params, b, opts).count_roots(rect);
}

SpectrumReport stability_report(const ModelParams& params, double b, const SpectrumOptions& opts) {
  CharacteristicEvaluator ev(params, b, opts);
  SpectrumReport rep;
  rep.b = b;
  rep.lambda0 = ev.dominant_real_root();
  rep.xi_at_zero = ev.xi(0.0).real();
  rep.rectangle = Rectangle{-1e-6 * params.mu,
                            std::max(5.0 * params.mu, 2.0 * rep.lambda0 + 1.0),
                            50.0 * params.mu};
  rep.unstable_count = ev.count_roots(rep.rectangle);
  rep.verdict = classify(rep.xi_at_zero, opts.tol_crit);
  return rep;
}

}  // namespace forest
