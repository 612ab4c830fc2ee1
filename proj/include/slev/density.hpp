#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <vector>

#include "slev/design_set.hpp"
#include "slev/errors.hpp"
#include "slev/parallel.hpp"
#include "slev/rng.hpp"

namespace slev {

struct KdeConfig {
  enum class Kernel { Gaussian };

  double bandwidth = 0.1;
  Kernel kernel = Kernel::Gaussian;
  // Densities below this threshold are pulled up by floor_adjust; 0 disables.
  double floor_threshold = 0.0;
  // Evaluate against a uniform subsample of this size instead of all n
  // points; 0 means the full reference set.
  int reference_subsample = 0;
  std::uint64_t subsample_seed = 0;

  void validate() const {
    if (!(bandwidth > 0.0)) throw ConfigError("KdeConfig bandwidth must be positive");
    if (floor_threshold < 0.0) throw ConfigError("KdeConfig floor threshold must be >= 0");
    if (reference_subsample < 0) throw ConfigError("KdeConfig subsample size must be >= 0");
  }
};

// Low-density stabilization: densities below the threshold h are replaced
// by the weighted average (0.5 h + p) / 1.5, so the output is always
// >= h/3 > 0.
inline double floor_adjust(double p, double h) {
  if (!(h > 0.0)) throw DomainError("floor_adjust requires threshold h > 0");
  return p < h ? (0.5 * h + p) / 1.5 : p;
}

// Gaussian KDE evaluated at the design points themselves (self-term
// included):
//   p_hat(x_i) = 1/(m (2 pi)^(d/2) bw^d) * sum_{j in ref} exp(-||x_i-x_j||^2 / (2 bw^2))
// where ref is all n points or a seeded uniform subsample of size m.
// Direct O(n m) evaluation.
inline std::vector<double> kde_at_samples(const DesignSet& X, const KdeConfig& cfg) {
  cfg.validate();
  X.validate();
  const Eigen::Index n = X.size();
  if (n < 2) throw DomainError("kde_at_samples requires n >= 2");
  const int d = X.dim();

  std::vector<Eigen::Index> ref(static_cast<std::size_t>(n));
  std::iota(ref.begin(), ref.end(), Eigen::Index{0});
  if (cfg.reference_subsample > 0 && cfg.reference_subsample < n) {
    // Partial Fisher-Yates; the order of the kept prefix is seed-determined.
    Rng rng(cfg.subsample_seed);
    const auto m = static_cast<std::size_t>(cfg.reference_subsample);
    for (std::size_t i = 0; i < m; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.uniform() * double(ref.size() - i));
      std::swap(ref[i], ref[j]);
    }
    ref.resize(m);
  } else if (cfg.reference_subsample > n) {
    throw ConfigError("KdeConfig reference subsample exceeds n");
  }

  const double bw = cfg.bandwidth;
  const double norm =
      1.0 / (double(ref.size()) * std::pow(2.0 * std::numbers::pi, 0.5 * d) * std::pow(bw, d));
  const double inv_two_bw2 = 1.0 / (2.0 * bw * bw);

  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  const auto& pts = X.points;
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    double acc = 0.0;
    const auto xi = pts.row(static_cast<Eigen::Index>(i));
    for (const Eigen::Index j : ref) acc += std::exp(-(xi - pts.row(j)).squaredNorm() * inv_two_bw2);
    out[i] = acc * norm;
  });

  if (cfg.floor_threshold > 0.0)
    for (double& p : out) p = floor_adjust(p, cfg.floor_threshold);
  return out;
}

}  // namespace slev
