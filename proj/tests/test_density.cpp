#include <cmath>
#include <numbers>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "slev/density.hpp"
#include "slev/leverage.hpp"
#include "slev/synth.hpp"

using namespace slev;
using Catch::Matchers::WithinAbs;

namespace {

// The KDE definition, restated independently for grid points.
double kde_manual(const Eigen::MatrixXd& samples, const Eigen::VectorXd& x, double bw) {
  const auto n = samples.rows();
  const int d = static_cast<int>(samples.cols());
  double acc = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    acc += std::exp(-(samples.row(j).transpose() - x).squaredNorm() / (2.0 * bw * bw));
  return acc / (double(n) * std::pow(2.0 * std::numbers::pi, 0.5 * d) * std::pow(bw, d));
}

}  // namespace

TEST_CASE("kde at two coincident points") {
  DesignSet X;
  X.points = Eigen::MatrixXd::Zero(2, 1);
  KdeConfig cfg;
  cfg.bandwidth = 1.0;
  const auto p = kde_at_samples(X, cfg);
  // Average of two standard-normal kernels evaluated at their center.
  CHECK_THAT(p[0], WithinAbs(1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-12));
  CHECK_THAT(p[1], WithinAbs(p[0], 1e-15));
}

TEST_CASE("kde is translation invariant") {
  GeneratorSpec g{GeneratorKind::Uniform01d, 50, 2, 0.6, 11};
  auto X = generate(g);
  KdeConfig cfg;
  cfg.bandwidth = 0.25;
  const auto p0 = kde_at_samples(X, cfg);
  X.points.col(0).array() += 3.7;
  X.points.col(1).array() -= 1.2;
  X.densities.resize(0);
  const auto p1 = kde_at_samples(X, cfg);
  for (std::size_t i = 0; i < p0.size(); ++i) CHECK_THAT(p1[i], WithinAbs(p0[i], 1e-12));
}

TEST_CASE("an outlier has lower density than a tight cluster") {
  DesignSet X;
  X.points.resize(21, 1);
  for (int i = 0; i < 20; ++i) X.points(i, 0) = 0.0005 * i;
  X.points(20, 0) = 10.0;
  KdeConfig cfg;
  cfg.bandwidth = 0.05;
  const auto p = kde_at_samples(X, cfg);
  for (int i = 0; i < 20; ++i) CHECK(p[20] < p[i]);
}

TEST_CASE("kde input validation") {
  DesignSet X;
  X.points = Eigen::MatrixXd::Zero(1, 1);
  KdeConfig cfg;
  cfg.bandwidth = 1.0;
  CHECK_THROWS_AS(kde_at_samples(X, cfg), DomainError);
  X.points = Eigen::MatrixXd::Zero(3, 1);
  cfg.bandwidth = 0.0;
  CHECK_THROWS_AS(kde_at_samples(X, cfg), ConfigError);
  cfg.bandwidth = 1.0;
  cfg.reference_subsample = 4;
  CHECK_THROWS_AS(kde_at_samples(X, cfg), ConfigError);
}

TEST_CASE("floor_adjust") {
  CHECK_THAT(floor_adjust(0.0, 0.3), WithinAbs(0.1, 1e-15));
  CHECK(floor_adjust(0.3, 0.3) == 0.3);  // boundary: strict <
  CHECK(floor_adjust(0.6, 0.3) == 0.6);
  for (double p : {0.0, 1e-8, 0.1, 0.29})
    CHECK(floor_adjust(p, 0.3) >= 0.1 * (1.0 - 1e-12));  // >= h/3 up to roundoff
  CHECK_THROWS_AS(floor_adjust(0.5, 0.0), DomainError);
}

TEST_CASE("kde matches its definition and integrates to one") {
  GeneratorSpec g{GeneratorKind::Uniform01d, 2000, 1, 0.6, 5};
  const auto X = generate(g);
  KdeConfig cfg;
  cfg.bandwidth = 1.0 * std::pow(2000.0, -0.2);
  const auto p = kde_at_samples(X, cfg);

  // Spot-check kde_at_samples against the restated definition.
  for (Eigen::Index i : {0, 500, 1999})
    CHECK_THAT(p[static_cast<std::size_t>(i)],
               WithinAbs(kde_manual(X.points, X.points.row(i).transpose(), cfg.bandwidth), 1e-12));

  // Trapezoid integration of the same estimator over [-3bw, 1+3bw].
  const double lo = -3.0 * cfg.bandwidth, hi = 1.0 + 3.0 * cfg.bandwidth;
  const int grid = 4000;
  double integral = 0.0;
  Eigen::VectorXd x(1);
  double prev = 0.0;
  for (int k = 0; k <= grid; ++k) {
    x(0) = lo + (hi - lo) * k / grid;
    const double val = kde_manual(X.points, x, cfg.bandwidth);
    if (k > 0) integral += 0.5 * (val + prev) * (hi - lo) / grid;
    prev = val;
  }
  CHECK_THAT(integral, WithinAbs(1.0, 0.02));
}

TEST_CASE("subsampled-reference kde stays close to the full kde") {
  GeneratorSpec g{GeneratorKind::Uniform01d, 4000, 1, 0.6, 17};
  const auto X = generate(g);
  KdeConfig full;
  full.bandwidth = 1.0 * std::pow(4000.0, -0.2);
  const auto p_full = kde_at_samples(X, full);

  KdeConfig sub = full;
  sub.reference_subsample = 1000;  // m = n/4
  sub.subsample_seed = 99;
  const auto p_sub = kde_at_samples(X, sub);

  double worst = 0.0;
  for (std::size_t i = 0; i < p_full.size(); ++i)
    worst = std::max(worst, std::abs(p_sub[i] - p_full[i]) / p_full[i]);
  CHECK(worst <= 0.15);
}

TEST_CASE("density perturbations move the closed-form leverage boundedly") {
  // Finite-difference form of the density-error lemma: a delta change of
  // one density moves that point's leverage by at most
  // C * lambda^(-d/(2 alpha)) * delta / p_min, here with C = 3 for the
  // tested grid (derived from the power-law derivative at p_min = 0.5).
  const double delta = 1e-6;
  const double p_min = 0.5;
  for (double alpha : {1.0, 2.0}) {
    const int d = 1;
    for (double lambda : {1e-2, 1e-4}) {
      for (double p = p_min; p <= 5.0; p += 0.45) {
        const double base = matern_closed_form(p, lambda, alpha, d);
        const double moved = matern_closed_form(p + delta, lambda, alpha, d);
        const double bound = 3.0 * std::pow(lambda, -d / (2.0 * alpha)) * delta / p_min;
        INFO("alpha = " << alpha << ", lambda = " << lambda << ", p = " << p);
        CHECK(std::abs(moved - base) <= bound);
      }
    }
  }
}
