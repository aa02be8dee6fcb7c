#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "forest/equilibria.hpp"
#include "forest/model.hpp"

namespace forest {

// Conjugate-closed search rectangle [re_min, re_max] x [-im_max, im_max].
struct Rectangle {
  double re_min;
  double re_max;
  double im_max;
};

struct SpectrumOptions {
  double delta_frac = 1e-6;      // offset of the admissible domain from Re lambda = -mu
  double root_tol = 1e-10;       // |xi(lambda0) - 1| at the reported dominant root
  double tol_crit = 1e-3;        // critical band around F'(b) = 1 for the verdict
  double tol_tail = 1e-10;       // truncation bound for the characteristic integrals
  double block_len = 8.0;        // integration block length in units of 1/mu
  int panels_per_block = 4096;   // Simpson panels per block
  int max_blocks = 50;           // hard truncation at max_blocks * block_len / mu
  int max_contour_points = 200000;
  double contour_floor = 1e-9;   // |Delta| below this (relative) flags a root on the contour
};

struct SpectrumReport {
  double b;
  double lambda0;       // dominant real characteristic root
  double xi_at_zero;    // xi_b(0) = F'(b)
  int unstable_count;   // certified roots with Re >= rectangle.re_min
  Rectangle rectangle;
  Stability verdict;
};

// Raised when adaptive contour refinement exceeds its point budget; the count
// is then unknown rather than silently wrong.
struct InconclusiveCount : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluates both forms of the characteristic equation at the equilibrium b.
// The integral kernels depend only on (params, b) and are cached on a fixed
// age grid; instances are cheap to evaluate but not safe to share across
// threads (use one evaluator per thread).
class CharacteristicEvaluator {
 public:
  CharacteristicEvaluator(const ModelParams& params, double b, SpectrumOptions opts = {});

  // chi_b(lambda) = g(b/mu) \int_0^inf beta'(x(a)) e^{-(mu+lambda)a} da.
  std::complex<double> chi(std::complex<double> lambda) const;

  // Equivalent form xi_b(lambda) = (chi_b(lambda) + beta(x_m)) / (mu+lambda),
  // evaluated through its own displayed integral, not through chi.
  std::complex<double> xi(std::complex<double> lambda) const;

  // Delta(z) = z + mu - beta(x_m) - chi_b(z); zeros are characteristic roots.
  std::complex<double> delta(std::complex<double> z) const;

  // Unique real root of xi_b(lambda) = 1 in (-mu, +inf), by bisection on the
  // strictly decreasing real restriction of xi. When xi never reaches 1
  // (possible for beta(x_m) = 0), no root exists right of -mu and the
  // essential bound -mu + delta is returned instead.
  double dominant_real_root() const;

  // Winding number of Delta around 0 along the rectangle boundary.
  int count_roots(const Rectangle& rect) const;

  // Root locations inside the rectangle, found by recursive subdivision of
  // the argument-principle count and Newton polishing.
  std::vector<std::complex<double>> locate_roots(const Rectangle& rect, double tol = 1e-8) const;

  double b() const { return b_; }
  const SpectrumOptions& options() const { return opts_; }

 private:
  struct Node {
    double beta_x;       // beta(x(a))
    double beta_prime_x; // beta'(x(a))
    double g_w;          // g(e^{-mu a} b / mu)
    double gp_w;         // g'(e^{-mu a} b / mu)
    double w;            // e^{-mu a} b / mu
  };

  void ensure_blocks(int n) const;
  template <class Kernel>
  std::complex<double> integrate(std::complex<double> lambda, double sup_kernel, Kernel&& k) const;
  int winding(double re_lo, double re_hi, double im_lo, double im_hi) const;
  void locate_rec(double re_lo, double re_hi, double im_lo, double im_hi, int count, double tol,
                  std::vector<std::complex<double>>& out) const;

  const ModelParams* params_;
  double b_;
  SpectrumOptions opts_;
  double gbm_;    // g(b/mu), or g(0) in the b -> 0 limit
  double step_;   // node spacing
  int nodes_per_block_;
  mutable std::vector<Node> nodes_;
};

// Free wrappers matching the evaluator members.
std::complex<double> chi(const ModelParams& params, double b, std::complex<double> lambda,
                         const SpectrumOptions& opts = {});
std::complex<double> xi(const ModelParams& params, double b, std::complex<double> lambda,
                        const SpectrumOptions& opts = {});
double dominant_real_root(const ModelParams& params, double b, const SpectrumOptions& opts = {});
int count_roots_argument_principle(const ModelParams& params, double b, const Rectangle& rect,
                                   const SpectrumOptions& opts = {});

SpectrumReport stability_report(const ModelParams& params, double b,
                                const SpectrumOptions& opts = {});

}  // namespace forest
