#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "slev/errors.hpp"

namespace slev {

struct QuadConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_depth = 50;
  // A tail panel contributing less than this fraction of the running total
  // terminates a semi-infinite integral.
  double tail_cutoff_ratio = 1e-12;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
      throw ConfigError("QuadConfig tolerances must be positive");
    if (max_depth < 1) throw ConfigError("QuadConfig max_depth must be >= 1");
    if (!(tail_cutoff_ratio > 0.0))
      throw ConfigError("QuadConfig tail_cutoff_ratio must be positive");
  }
};

namespace detail {

inline double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

// Adaptive Simpson with Richardson correction. Accepts a subinterval when
// the two-panel refinement moves the estimate by <= 15 * tol, which bounds
// the local error by tol.
template <class F>
double simpson_recurse(F& f, double a, double fa, double b, double fb, double m, double fm,
                       double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  if (!std::isfinite(flm) || !std::isfinite(frm))
    throw DomainError("adaptive_quad: integrand is not finite inside the interval");
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0)
    throw QuadratureError("adaptive_quad: max_depth exceeded without convergence",
                          left + right + delta / 15.0, std::abs(delta) / 15.0);
  return simpson_recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Integral of f over [a, b] with estimated error below
// max(abs_tol, rel_tol * |result|).
template <class F>
double adaptive_quad(F&& f, double a, double b, const QuadConfig& cfg = {}) {
  cfg.validate();
  if (!(a < b)) throw DomainError("adaptive_quad requires a < b");
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm))
    throw DomainError("adaptive_quad: integrand is not finite at the initial nodes");
  const double whole = detail::simpson(a, fa, b, fb, fm);
  // The relative tolerance is anchored on the coarse Simpson estimate; when
  // that estimate turns out to be badly inflated (spiky integrand on a long
  // interval) one re-anchored pass restores the promised accuracy.
  double anchor = std::abs(whole);
  for (int pass = 0;; ++pass) {
    const double tol = std::max(cfg.abs_tol, cfg.rel_tol * anchor);
    const double result = detail::simpson_recurse(f, a, fa, b, fb, m, fm, whole, tol, cfg.max_depth);
    if (pass == 1 || std::abs(result) >= 0.25 * anchor) return result;
    anchor = std::abs(result);
  }
}

// Integral of f over [0, inf) for integrands that decay to zero. Panels
// [0,w], [w,2w], [2w,4w], ... are integrated with adaptive_quad until a
// panel contributes less than tail_cutoff_ratio of the running total.
// Contributions that stop shrinking after 60 doublings raise
// DivergenceError.
template <class F>
double semi_infinite_quad(F&& f, const QuadConfig& cfg = {}, double initial_panel = 1.0) {
  cfg.validate();
  if (!(initial_panel > 0.0)) throw ConfigError("semi_infinite_quad: initial panel must be > 0");
  constexpr int kDivergenceCheckAfter = 60;
  constexpr int kMaxPanels = 120;
  double total = 0.0;
  double lo = 0.0;
  double width = initial_panel;
  double prev = std::numeric_limits<double>::infinity();
  for (int panel = 0; panel < kMaxPanels; ++panel) {
    const double contribution = adaptive_quad(f, lo, lo + width, cfg);
    total += contribution;
    if (std::abs(contribution) < std::max(cfg.abs_tol, cfg.tail_cutoff_ratio * std::abs(total)))
      return total;
    if (panel >= kDivergenceCheckAfter && std::abs(contribution) >= std::abs(prev))
      throw DivergenceError("semi_infinite_quad: tail contributions are not shrinking");
    prev = contribution;
    lo += width;
    width *= 2.0;
  }
  throw QuadratureError("semi_infinite_quad: tail cutoff not reached within panel budget", total,
                        std::abs(prev));
}

// Closed form of the integral over [0, inf) of dx / (1 + x^a) for a > 1:
// (pi/a) / sin(pi/a). Used by the Matern closed form and as a quadrature
// self-test.
inline double power_law_identity(double a) {
  if (!(a > 1.0)) throw DomainError("power_law_identity requires a > 1 (integral diverges)");
  const double pi_over_a = std::numbers::pi / a;
  return pi_over_a / std::sin(pi_over_a);
}

}  // namespace slev
