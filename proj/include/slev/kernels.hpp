#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "slev/design_set.hpp"
#include "slev/errors.hpp"
#include "slev/parallel.hpp"

namespace slev {

enum class KernelFamily { Matern, Gaussian };

// Normalization of the spectral density. Simplified drops all constants
// (sampling probabilities are normalized downstream, so they cancel);
// FullConstants carries the explicit Fourier-pair constants and exists for
// consistency checks against the kernel itself.
enum class SpectralConvention { Simplified, FullConstants };

struct KernelSpec {
  KernelFamily family = KernelFamily::Matern;
  double nu = 1.5;      // Matern smoothness, one of {0.5, 1.5, 2.5}
  double sigma = 1.0;   // Gaussian bandwidth
  int dim = 1;
  SpectralConvention convention = SpectralConvention::Simplified;

  static KernelSpec matern(double nu, int dim,
                           SpectralConvention conv = SpectralConvention::Simplified) {
    KernelSpec s;
    s.family = KernelFamily::Matern;
    s.nu = nu;
    s.dim = dim;
    s.convention = conv;
    s.validate();
    return s;
  }

  static KernelSpec gaussian(double sigma, int dim,
                             SpectralConvention conv = SpectralConvention::Simplified) {
    KernelSpec s;
    s.family = KernelFamily::Gaussian;
    s.sigma = sigma;
    s.dim = dim;
    s.convention = conv;
    s.validate();
    return s;
  }

  void validate() const {
    if (dim < 1) throw ConfigError("kernel dimension must be >= 1");
    if (family == KernelFamily::Matern) {
      if (nu != 0.5 && nu != 1.5 && nu != 2.5)
        throw ConfigError("Matern nu must be one of {0.5, 1.5, 2.5}");
    } else {
      if (!(sigma > 0.0)) throw ConfigError("Gaussian sigma must be positive");
    }
  }

  // Smoothness of the associated Sobolev space, alpha = nu + d/2.
  double alpha() const { return nu + 0.5 * dim; }

  // Matern scale, a = sqrt(2 nu).
  double scale_a() const { return std::sqrt(2.0 * nu); }

  // Effective bandwidth of the regularized problem, h = lambda^(1/(2 alpha)).
  double effective_bandwidth(double lambda) const {
    return std::pow(lambda, 1.0 / (2.0 * alpha()));
  }
};

// K(r) for the distance r = ||x - y||. Unit value at r = 0, strictly
// decreasing. Matern uses the half-integer closed forms with a = sqrt(2 nu):
//   nu = 1/2: exp(-a r)
//   nu = 3/2: (1 + a r) exp(-a r)
//   nu = 5/2: (1 + a r + a^2 r^2 / 3) exp(-a r)
inline double kernel_eval(const KernelSpec& spec, double r) {
  if (!(r >= 0.0)) throw DomainError("kernel_eval requires r >= 0");
  if (spec.family == KernelFamily::Gaussian) {
    return std::exp(-r * r / (2.0 * spec.sigma * spec.sigma));
  }
  const double ar = spec.scale_a() * r;
  if (spec.nu == 0.5) return std::exp(-ar);
  if (spec.nu == 1.5) return (1.0 + ar) * std::exp(-ar);
  if (spec.nu == 2.5) return (1.0 + ar + ar * ar / 3.0) * std::exp(-ar);
  throw ConfigError("unsupported Matern nu");
}

namespace detail {

// Main-text Matern spectral constant D_alpha = Gamma(a) a^(2a-1) pi^(-d/2) / Gamma(2a-1).
inline double matern_full_constant(double alpha, double a, int dim) {
  return std::tgamma(alpha) * std::pow(a, 2.0 * alpha - 1.0) *
         std::pow(std::numbers::pi, -0.5 * dim) / std::tgamma(2.0 * alpha - 1.0);
}

}  // namespace detail

// Isotropic spectral density m(||s||) of the kernel.
//   Matern    Simplified:    (1 + s^2)^(-alpha)
//             FullConstants: D_alpha (a^2 + s^2)^(-alpha)
//   Gaussian  Simplified:    sigma^d exp(-(sigma s)^2)
//             FullConstants: (2 pi sigma^2)^(d/2) exp(-2 pi^2 sigma^2 s^2)
// Only the Gaussian FullConstants form is an exact Fourier pair of
// kernel_eval under the e^{-2 pi i <x,s>} transform.
inline double spectral_density(const KernelSpec& spec, double s_norm) {
  if (!(s_norm >= 0.0)) throw DomainError("spectral_density requires s_norm >= 0");
  const double s2 = s_norm * s_norm;
  if (spec.family == KernelFamily::Matern) {
    const double alpha = spec.alpha();
    if (spec.convention == SpectralConvention::Simplified)
      return std::pow(1.0 + s2, -alpha);
    const double a = spec.scale_a();
    return detail::matern_full_constant(alpha, a, spec.dim) * std::pow(a * a + s2, -alpha);
  }
  const double sg = spec.sigma;
  if (spec.convention == SpectralConvention::Simplified)
    return std::pow(sg, spec.dim) * std::exp(-sg * sg * s2);
  const double pi = std::numbers::pi;
  return std::pow(2.0 * pi * sg * sg, 0.5 * spec.dim) * std::exp(-2.0 * pi * pi * sg * sg * s2);
}

// Dense empirical kernel matrix, entry (i,j) = K(||x_i - x_j||). The upper
// triangle is computed and mirrored, so the result is symmetric to the bit.
// Sizes above max_dense_n are refused; callers should switch to the
// analytic path instead of building an n^2 matrix.
inline Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const DesignSet& X,
                                     Eigen::Index max_dense_n = 20000) {
  X.validate();
  const Eigen::Index n = X.size();
  if (n > max_dense_n)
    throw CapacityError("kernel_matrix: n = " + std::to_string(n) + " exceeds dense cap " +
                        std::to_string(max_dense_n));
  Eigen::MatrixXd K(n, n);
  const auto& pts = X.points;
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i_) {
    const auto i = static_cast<Eigen::Index>(i_);
    K(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j)
      K(i, j) = kernel_eval(spec, (pts.row(i) - pts.row(j)).norm());
  });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) K(i, j) = K(j, i);
  return K;
}

}  // namespace slev
