#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "slev/design_set.hpp"
#include "slev/errors.hpp"
#include "slev/rng.hpp"

namespace slev {

// Synthetic design distributions used by the benchmark harness. The bimodal
// families mix a uniform block with a small far-away mode whose weight
// n^gamma / (n + n^gamma) shrinks with the sample size.
enum class GeneratorKind { Uniform01d, Beta15_2, Bimodal1d, Bimodal3d };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Uniform01d;
  int n = 1;
  int dim = 1;           // Uniform01d only; the other kinds fix their dimension
  double gamma = 0.6;    // bimodal mixing exponent, in (0, 1)
  std::uint64_t seed = 0;

  int effective_dim() const {
    switch (kind) {
      case GeneratorKind::Uniform01d: return dim;
      case GeneratorKind::Beta15_2: return 1;
      case GeneratorKind::Bimodal1d: return 1;
      case GeneratorKind::Bimodal3d: return 3;
    }
    return 1;
  }

  void validate() const {
    if (n < 1) throw ConfigError("GeneratorSpec n must be >= 1");
    if (kind == GeneratorKind::Uniform01d && dim < 1)
      throw ConfigError("GeneratorSpec dim must be >= 1");
    if ((kind == GeneratorKind::Bimodal1d || kind == GeneratorKind::Bimodal3d) &&
        !(gamma > 0.0 && gamma < 1.0))
      throw ConfigError("GeneratorSpec gamma must lie in (0, 1)");
  }

  // Weight of the second (small) mode at the realized sample size.
  double second_mode_weight() const {
    const double ng = std::pow(double(n), gamma);
    return ng / (double(n) + ng);
  }
};

inline const char* to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::Uniform01d: return "uniform";
    case GeneratorKind::Beta15_2: return "beta";
    case GeneratorKind::Bimodal1d: return "bimodal1d";
    case GeneratorKind::Bimodal3d: return "bimodal3d";
  }
  return "unknown";
}

namespace detail {

// Triangular second modes: pdf (3 - 2x) on [1, 1.5] and, per coordinate,
// (5 - 2x) on [2, 2.5]. Both integrate to 1/4 over their supports, so the
// normalized densities carry a factor 4. Inverse CDFs solve the resulting
// quadratics.
inline double sample_mode2_1d(double u) { return 0.5 * (3.0 - std::sqrt(1.0 - u)); }
inline double sample_mode2_3d_coord(double u) { return 0.5 * (5.0 - std::sqrt(1.0 - u)); }

inline double mode2_density_1d(double x) {
  return (x >= 1.0 && x <= 1.5) ? 4.0 * (3.0 - 2.0 * x) : 0.0;
}
inline double mode2_density_3d_coord(double x) {
  return (x >= 2.0 && x <= 2.5) ? 4.0 * (5.0 - 2.0 * x) : 0.0;
}

}  // namespace detail

// Mixture density of the generator at an arbitrary point, using spec.n for
// the mode weight. Beta(15,2) density is x^14 (1-x) / B(15,2) with
// B(15,2) = 1/240.
inline double generator_density(const GeneratorSpec& spec, const Eigen::VectorXd& x) {
  spec.validate();
  switch (spec.kind) {
    case GeneratorKind::Uniform01d: {
      for (Eigen::Index j = 0; j < x.size(); ++j)
        if (x(j) < 0.0 || x(j) > 1.0) return 0.0;
      return 1.0;
    }
    case GeneratorKind::Beta15_2: {
      const double v = x(0);
      if (v <= 0.0 || v >= 1.0) return 0.0;
      return 240.0 * std::pow(v, 14) * (1.0 - v);
    }
    case GeneratorKind::Bimodal1d: {
      const double w2 = spec.second_mode_weight();
      const double v = x(0);
      if (v >= 0.0 && v <= 0.5) return (1.0 - w2) * 2.0;
      return w2 * detail::mode2_density_1d(v);
    }
    case GeneratorKind::Bimodal3d: {
      const double w2 = spec.second_mode_weight();
      bool in_first = true, in_second = true;
      for (int j = 0; j < 3; ++j) {
        if (x(j) < 0.0 || x(j) > 1.0) in_first = false;
        if (x(j) < 2.0 || x(j) > 2.5) in_second = false;
      }
      if (in_first) return 1.0 - w2;
      if (!in_second) return 0.0;
      double prod = 1.0;
      for (int j = 0; j < 3; ++j) prod *= detail::mode2_density_3d_coord(x(j));
      return w2 * prod;
    }
  }
  throw ConfigError("unknown generator kind");
}

// Draws n design points with the seeded generator and attaches the exact
// mixture density at each point, so experiments can separate leverage
// error from KDE error.
inline DesignSet generate(const GeneratorSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const int d = spec.effective_dim();
  DesignSet out;
  out.points.resize(spec.n, d);
  out.densities.resize(spec.n);

  for (int i = 0; i < spec.n; ++i) {
    switch (spec.kind) {
      case GeneratorKind::Uniform01d:
        for (int j = 0; j < d; ++j) out.points(i, j) = rng.uniform();
        break;
      case GeneratorKind::Beta15_2:
        out.points(i, 0) = rng.beta(15.0, 2.0);
        break;
      case GeneratorKind::Bimodal1d: {
        const bool second = rng.uniform() < spec.second_mode_weight();
        const double u = rng.uniform();
        out.points(i, 0) = second ? detail::sample_mode2_1d(u) : 0.5 * u;
        break;
      }
      case GeneratorKind::Bimodal3d: {
        const bool second = rng.uniform() < spec.second_mode_weight();
        for (int j = 0; j < 3; ++j) {
          const double u = rng.uniform();
          out.points(i, j) = second ? detail::sample_mode2_3d_coord(u) : u;
        }
        break;
      }
    }
    out.densities(i) = generator_density(spec, out.points.row(i).transpose());
  }
  return out;
}

// Benchmark target: f*(x) = g(||x||_2 / d) with
// g(x) = 1.6 |(x - 0.4)(x - 0.6)| - x (x - 1)(x - 2) - 0.5.
inline double target_g(double x) {
  return 1.6 * std::abs((x - 0.4) * (x - 0.6)) - x * (x - 1.0) * (x - 2.0) - 0.5;
}

inline double target_f_star(const Eigen::VectorXd& x) {
  return target_g(x.norm() / double(x.size()));
}

inline Eigen::VectorXd target_f_star_all(const Eigen::MatrixXd& points) {
  Eigen::VectorXd out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    out(i) = target_f_star(points.row(i).transpose());
  return out;
}

// Adds i.i.d. N(0, sigma^2) noise with a seeded generator.
inline Eigen::VectorXd add_noise(const Eigen::VectorXd& values, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ConfigError("add_noise requires sigma >= 0");
  Rng rng(seed);
  Eigen::VectorXd out(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) out(i) = values(i) + sigma * rng.normal();
  return out;
}

}  // namespace slev
