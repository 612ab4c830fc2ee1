#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "slev/errors.hpp"
#include "slev/kernels.hpp"
#include "slev/parallel.hpp"
#include "slev/quadrature.hpp"

namespace slev {

enum class LeverageMethod { Exact, SpectralClosedForm, SpectralQuadrature, Uniform };

inline const char* to_string(LeverageMethod m) {
  switch (m) {
    case LeverageMethod::Exact: return "exact";
    case LeverageMethod::SpectralClosedForm: return "spectral-closed-form";
    case LeverageMethod::SpectralQuadrature: return "spectral-quadrature";
    case LeverageMethod::Uniform: return "uniform";
  }
  return "unknown";
}

// Per-point rescaled leverage values, i.e. approximations (or exact values)
// of G_lambda(x_i, x_i) = n * ell_i.
struct LeverageVector {
  std::vector<double> values;
  LeverageMethod method = LeverageMethod::Uniform;

  void validate() const {
    if (values.empty()) throw DomainError("LeverageVector is empty");
    for (double v : values)
      if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError("LeverageVector values must be positive and finite");
  }
};

// Normalized sampling probabilities over the design points.
struct SamplingDistribution {
  std::vector<double> q;
};

enum class LeveragePath { ClosedForm, Quadrature };

// Surface area of the unit (d-1)-sphere, 2 pi^(d/2) / Gamma(d/2);
// S_{d-1}(r) = sphere_surface_coeff(d) * r^(d-1).
inline double sphere_surface_coeff(int dim) {
  if (dim < 1) throw DomainError("sphere_surface_coeff requires dim >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

// The equivalent-kernel diagonal
//   integral over R^d of ds / (p + lambda / m(||s||))
// reduced to polar coordinates and evaluated with semi-infinite quadrature.
inline double leverage_integral_quadrature(double p, double lambda, const KernelSpec& spec,
                                           const QuadConfig& cfg = {}) {
  if (!(p > 0.0)) throw DomainError("leverage integral requires density p > 0");
  if (!(lambda > 0.0)) throw DomainError("leverage integral requires lambda > 0");
  spec.validate();
  const double coeff = sphere_surface_coeff(spec.dim);
  const int d = spec.dim;
  auto integrand = [&](double r) {
    // m underflows to 0 far in the tail; lambda/0 = inf makes the integrand
    // a clean 0 there.
    const double m = spectral_density(spec, r);
    return coeff * std::pow(r, d - 1) / (p + lambda / m);
  };
  return semi_infinite_quad(integrand, cfg);
}

// Drop-the-offset closed form for the Matern leverage integral,
//   S_{d-1} * p^(d/(2a)-1) * lambda^(-d/(2a)) * (1/d) * (pi/a') / sin(pi/a')
// with a' = 2 alpha / d. Relative error is O(lambda^(1/alpha)).
inline double matern_closed_form(double p, double lambda, double alpha, int d) {
  if (!(p > 0.0) || !(lambda > 0.0))
    throw DomainError("matern_closed_form requires p > 0 and lambda > 0");
  if (d < 1) throw DomainError("matern_closed_form requires d >= 1");
  if (!(2.0 * alpha > d))
    throw DomainError("matern_closed_form requires 2*alpha > d (integral diverges)");
  const double exponent = d / (2.0 * alpha);
  return sphere_surface_coeff(d) * std::pow(p, exponent - 1.0) * std::pow(lambda, -exponent) *
         (1.0 / d) * power_law_identity(2.0 * alpha / d);
}

// Li_s(-x) for s > 0, x > 0 through the Fermi-Dirac integral
//   Li_s(-x) = -(1/Gamma(s)) * integral of t^(s-1) / (e^t / x + 1) dt.
// The substitution t = u^2 removes the endpoint singularity; for
// half-integer s the substituted integrand is u^(2s-1) times a smooth
// factor.
inline double polylog_neg(double s, double x, const QuadConfig& cfg = {}) {
  if (!(s > 0.0)) throw DomainError("polylog_neg requires order s > 0");
  if (!(x > 0.0)) throw DomainError("polylog_neg requires x > 0");
  const double log_x = std::log(x);
  const double power = 2.0 * s - 1.0;
  auto integrand = [&](double u) {
    return 2.0 * std::pow(u, power) / (std::exp(u * u - log_x) + 1.0);
  };
  return -semi_infinite_quad(integrand, cfg) / std::tgamma(s);
}

// Gaussian leverage integral in closed form. With c depending on the
// spectral convention this is exact, not an approximation:
//   Simplified:    c = p sigma^d,              value = -pi^(d/2) Li_{d/2}(-c/lambda) / c
//   FullConstants: c = p (2 pi sigma^2)^(d/2), value = -Li_{d/2}(-c/lambda) / c
// The pi^(d/2) factor comes from equating the appendix form with the polar
// S_{d-1} normalization used by leverage_integral_quadrature.
inline double gaussian_polylog_form(double p, double lambda, double sigma, int d,
                                    SpectralConvention conv = SpectralConvention::Simplified,
                                    const QuadConfig& cfg = {}) {
  if (!(p > 0.0) || !(lambda > 0.0) || !(sigma > 0.0))
    throw DomainError("gaussian_polylog_form requires positive arguments");
  if (d < 1) throw DomainError("gaussian_polylog_form requires d >= 1");
  const double pi = std::numbers::pi;
  if (conv == SpectralConvention::Simplified) {
    const double c = p * std::pow(sigma, d);
    return -std::pow(pi, 0.5 * d) * polylog_neg(0.5 * d, c / lambda, cfg) / c;
  }
  const double c = p * std::pow(2.0 * pi * sigma * sigma, 0.5 * d);
  return -polylog_neg(0.5 * d, c / lambda, cfg) / c;
}

// Rule of thumb for how the leverage score scales with the local density:
// ell_i proportional to min{1, (lambda/p)^(1 - d/(2 alpha))}.
inline double rule_of_thumb(double p, double lambda, double alpha, int d) {
  if (!(p > 0.0) || !(lambda > 0.0))
    throw DomainError("rule_of_thumb requires p > 0 and lambda > 0");
  if (!(2.0 * alpha > d)) throw DomainError("rule_of_thumb requires 2*alpha > d");
  return std::min(1.0, std::pow(lambda / p, 1.0 - d / (2.0 * alpha)));
}

// Per-point leverage approximations from precomputed densities. The
// formula depends on x_i only through p(x_i), so this is O(n) closed-form
// evaluations (or O(n) univariate quadratures).
//
// With proportional_only the Matern closed form drops its constant factor
// and returns the bare power p^(d/(2 alpha) - 1); the normalized sampling
// distribution is unchanged.
inline LeverageVector approximate_leverages(const std::vector<double>& densities,
                                            const KernelSpec& spec, double lambda,
                                            LeveragePath path, bool proportional_only = false,
                                            const QuadConfig& cfg = {}) {
  spec.validate();
  if (densities.empty()) throw DomainError("approximate_leverages: no densities given");
  if (!(lambda > 0.0)) throw DomainError("approximate_leverages requires lambda > 0");
  for (double p : densities)
    if (!(p > 0.0) || !std::isfinite(p))
      throw DomainError("approximate_leverages: densities must be positive and finite");

  LeverageVector out;
  out.values.assign(densities.size(), 0.0);
  out.method = path == LeveragePath::ClosedForm ? LeverageMethod::SpectralClosedForm
                                                : LeverageMethod::SpectralQuadrature;
  const int d = spec.dim;
  const double alpha = spec.alpha();

  if (path == LeveragePath::Quadrature) {
    parallel_for(densities.size(), [&](std::size_t i) {
      out.values[i] = leverage_integral_quadrature(densities[i], lambda, spec, cfg);
    });
    return out;
  }

  if (spec.family == KernelFamily::Matern) {
    // The FullConstants density D (a^2 + s^2)^(-alpha) maps onto the
    // simplified closed form with lambda -> lambda / D; dropping the a^2
    // offset is the same O(lambda^(1/alpha)) approximation.
    const double lambda_eff = spec.convention == SpectralConvention::Simplified
                                  ? lambda
                                  : lambda / detail::matern_full_constant(alpha, spec.scale_a(), d);
    const double exponent = d / (2.0 * alpha) - 1.0;
    if (proportional_only) {
      parallel_for(densities.size(),
                   [&](std::size_t i) { out.values[i] = std::pow(densities[i], exponent); });
    } else {
      parallel_for(densities.size(), [&](std::size_t i) {
        out.values[i] = matern_closed_form(densities[i], lambda_eff, alpha, d);
      });
    }
    return out;
  }

  parallel_for(densities.size(), [&](std::size_t i) {
    out.values[i] =
        gaussian_polylog_form(densities[i], lambda, spec.sigma, d, spec.convention, cfg);
  });
  return out;
}

inline LeverageVector uniform_leverages(std::size_t n) {
  if (n == 0) throw DomainError("uniform_leverages requires n >= 1");
  return LeverageVector{std::vector<double>(n, 1.0), LeverageMethod::Uniform};
}

// Normalize leverage values into sampling probabilities, q_i = v_i / sum(v).
inline SamplingDistribution to_sampling_distribution(const LeverageVector& lv) {
  lv.validate();
  double total = 0.0;
  for (double v : lv.values) total += v;
  SamplingDistribution q;
  q.q.reserve(lv.values.size());
  for (double v : lv.values) q.q.push_back(v / total);
  return q;
}

namespace detail {

// Iterated averaging of the trailing partial sums (Euler transformation).
// For a tail that alternates around its limit this upgrades the slow
// panel-by-panel convergence to something close to geometric.
inline double euler_average(const std::vector<double>& partials, std::size_t window) {
  const std::size_t take = std::min(window, partials.size());
  std::vector<double> row(partials.end() - static_cast<std::ptrdiff_t>(take), partials.end());
  while (row.size() > 1) {
    for (std::size_t i = 0; i + 1 < row.size(); ++i) row[i] = 0.5 * (row[i] + row[i + 1]);
    row.pop_back();
  }
  return row.front();
}

}  // namespace detail

// Off-diagonal equivalent kernel in one dimension,
//   2 * integral over [0, inf) of cos(2 pi s (x - t)) / (p_t + lambda/m(s)) ds.
// Panels follow the cosine's half-periods (dyadic growth while the
// oscillation is slower than the envelope); the alternating tail is summed
// with Euler averaging of the partial sums.
inline double equivalent_kernel_1d(double x, double t, double p_t, double lambda,
                                   const KernelSpec& spec, const QuadConfig& cfg = {}) {
  if (spec.dim != 1) throw ConfigError("equivalent_kernel_1d requires a d = 1 kernel spec");
  if (!(p_t > 0.0) || !(lambda > 0.0))
    throw DomainError("equivalent_kernel_1d requires p_t > 0 and lambda > 0");
  spec.validate();
  const double u = std::abs(x - t);
  auto envelope = [&](double s) { return 1.0 / (p_t + lambda / spectral_density(spec, s)); };
  if (u == 0.0) return 2.0 * semi_infinite_quad(envelope, cfg);

  const double two_pi_u = 2.0 * std::numbers::pi * u;
  auto integrand = [&](double s) { return std::cos(two_pi_u * s) * envelope(s); };
  const double half_period = 0.5 / u;

  constexpr int kMaxPanels = 20000;
  constexpr std::size_t kWindow = 32;
  std::vector<double> partials;
  partials.reserve(256);
  double total = 0.0;
  double lo = 0.0;
  double dyadic = 1.0;
  double prev_accel = std::numeric_limits<double>::infinity();
  int envelope_streak = 0;
  int stable_streak = 0;
  for (int panel = 0; panel < kMaxPanels; ++panel) {
    const double hi = lo + std::min(dyadic, half_period);
    if (dyadic < half_period) dyadic *= 2.0;
    const double contribution = adaptive_quad(integrand, lo, hi, cfg);
    total += contribution;
    partials.push_back(total);
    lo = hi;

    // Envelope already exhausted (small u: the kernel mass sits before the
    // first oscillation).
    if (std::abs(contribution) < std::max(cfg.abs_tol, cfg.tail_cutoff_ratio * std::abs(total))) {
      if (++envelope_streak >= 2) return 2.0 * total;
    } else {
      envelope_streak = 0;
    }

    if (partials.size() >= 6) {
      const double accel = detail::euler_average(partials, kWindow);
      if (std::abs(accel - prev_accel) <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(accel))) {
        if (++stable_streak >= 2) return 2.0 * accel;
      } else {
        stable_streak = 0;
      }
      prev_accel = accel;
    }
  }
  throw QuadratureError("equivalent_kernel_1d: cosine tail did not converge",
                        2.0 * detail::euler_average(partials, kWindow), 0.0);
}

}  // namespace slev
