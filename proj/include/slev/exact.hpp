#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slev/design_set.hpp"
#include "slev/errors.hpp"
#include "slev/kernels.hpp"
#include "slev/leverage.hpp"
#include "slev/rng.hpp"

namespace slev {

// Hard cap for the dense ground-truth paths. The exact oracle exists for
// verification, not production.
inline constexpr Eigen::Index kDefaultDenseCap = 20000;

namespace detail {

inline Eigen::LLT<Eigen::MatrixXd> regularized_factorization(const Eigen::MatrixXd& K,
                                                             double lambda) {
  if (K.rows() != K.cols()) throw ConfigError("kernel matrix must be square");
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  const Eigen::Index n = K.rows();
  Eigen::MatrixXd A = K;
  A.diagonal().array() += double(n) * lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success)
    throw LinalgError("factorization of (K + n*lambda*I) failed; input not PSD?");
  return llt;
}

}  // namespace detail

// Exact rescaled leverage scores, values[i] = n * [K (K + n lambda I)^{-1}]_{ii},
// through a Cholesky factorization of A = K + n lambda I:
//   [K A^{-1}]_{ii} = 1 - n lambda [A^{-1}]_{ii}.
inline LeverageVector exact_rescaled_leverage(const Eigen::MatrixXd& K, double lambda) {
  const Eigen::Index n = K.rows();
  auto llt = detail::regularized_factorization(K, lambda);
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  LeverageVector lv;
  lv.method = LeverageMethod::Exact;
  lv.values.resize(static_cast<std::size_t>(n));
  const double nlam = double(n) * lambda;
  for (Eigen::Index i = 0; i < n; ++i)
    lv.values[static_cast<std::size_t>(i)] = double(n) * (1.0 - nlam * inv(i, i));
  return lv;
}

// Statistical dimension Tr(K (K + n lambda I)^{-1}), the effective rank of
// the regularized kernel matrix. Equals sum_i ell_i = (1/n) sum of the
// rescaled leverage values.
inline double statistical_dimension(const Eigen::MatrixXd& K, double lambda) {
  const Eigen::Index n = K.rows();
  auto llt = detail::regularized_factorization(K, lambda);
  const double trace_inv = llt.solve(Eigen::MatrixXd::Identity(n, n)).trace();
  return double(n) - double(n) * lambda * trace_inv;
}

// Full kernel ridge regression model: weights omega = (K + n lambda I)^{-1} Y.
struct KrrModel {
  Eigen::MatrixXd points;  // training design, n x d
  Eigen::VectorXd weights;
  KernelSpec spec;
  double lambda = 0.0;
};

inline KrrModel krr_fit(const DesignSet& X, const KernelSpec& spec, double lambda,
                        Eigen::Index max_dense_n = kDefaultDenseCap) {
  X.validate();
  if (!X.has_responses()) throw ConfigError("krr_fit requires responses");
  const Eigen::MatrixXd K = kernel_matrix(spec, X, max_dense_n);
  auto llt = detail::regularized_factorization(K, lambda);
  KrrModel model;
  model.points = X.points;
  model.weights = llt.solve(X.responses);
  if (!model.weights.allFinite()) throw LinalgError("krr_fit produced non-finite weights");
  model.spec = spec;
  model.lambda = lambda;
  return model;
}

inline double krr_predict(const KrrModel& model, const Eigen::VectorXd& x) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < model.points.rows(); ++j)
    acc += kernel_eval(model.spec, (model.points.row(j).transpose() - x).norm()) *
           model.weights(j);
  return acc;
}

inline Eigen::VectorXd krr_predict_all(const KrrModel& model, const Eigen::MatrixXd& pts) {
  Eigen::VectorXd out(pts.rows());
  parallel_for(static_cast<std::size_t>(pts.rows()), [&](std::size_t i) {
    out(static_cast<Eigen::Index>(i)) = krr_predict(model, pts.row(static_cast<Eigen::Index>(i)));
  });
  return out;
}

// Nystrom-approximate KRR fitted on sampled landmark columns. Solves the
// m x m system
//   (C^T C + n lambda W) beta = C^T Y,   C = K(X, X_m), W = K(X_m, X_m),
// which reproduces the L_n = K_n S (S^T K_n S)^+ S^T K_n replacement
// in-sample without materializing L_n. W gets a 1e-10 jitter so that
// with-replacement duplicate landmarks stay solvable.
struct NystromModel {
  std::vector<int> landmark_indices;
  Eigen::MatrixXd landmarks;  // m x d
  Eigen::VectorXd weights;    // beta
  KernelSpec spec;
  double lambda = 0.0;
};

inline NystromModel nystrom_fit(const DesignSet& X, const KernelSpec& spec, double lambda,
                                const std::vector<int>& landmark_indices) {
  X.validate();
  if (!X.has_responses()) throw ConfigError("nystrom_fit requires responses");
  if (!(lambda > 0.0)) throw DomainError("nystrom_fit requires lambda > 0");
  if (landmark_indices.empty()) throw ConfigError("nystrom_fit requires at least one landmark");
  const Eigen::Index n = X.size();
  const auto m = static_cast<Eigen::Index>(landmark_indices.size());
  for (int idx : landmark_indices)
    if (idx < 0 || idx >= n) throw ConfigError("landmark index out of range");

  Eigen::MatrixXd Xm(m, X.dim());
  for (Eigen::Index j = 0; j < m; ++j)
    Xm.row(j) = X.points.row(landmark_indices[static_cast<std::size_t>(j)]);

  Eigen::MatrixXd C(n, m);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i_) {
    const auto i = static_cast<Eigen::Index>(i_);
    for (Eigen::Index j = 0; j < m; ++j)
      C(i, j) = kernel_eval(spec, (X.points.row(i) - Xm.row(j)).norm());
  });
  Eigen::MatrixXd W(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      W(i, j) = i == j ? 1.0 : kernel_eval(spec, (Xm.row(i) - Xm.row(j)).norm());
  W.diagonal().array() += 1e-10;

  const Eigen::MatrixXd A = C.transpose() * C + double(n) * lambda * W;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    throw LinalgError("nystrom_fit: reduced system factorization failed");
  NystromModel model;
  model.weights = ldlt.solve(C.transpose() * X.responses);
  if (!model.weights.allFinite())
    throw LinalgError("nystrom_fit: reduced system is singular after regularization");
  model.landmark_indices = landmark_indices;
  model.landmarks = std::move(Xm);
  model.spec = spec;
  model.lambda = lambda;
  return model;
}

inline double nystrom_predict(const NystromModel& model, const Eigen::VectorXd& x) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < model.landmarks.rows(); ++j)
    acc += kernel_eval(model.spec, (model.landmarks.row(j).transpose() - x).norm()) *
           model.weights(j);
  return acc;
}

inline Eigen::VectorXd nystrom_predict_all(const NystromModel& model, const Eigen::MatrixXd& pts) {
  Eigen::VectorXd out(pts.rows());
  parallel_for(static_cast<std::size_t>(pts.rows()), [&](std::size_t i) {
    out(static_cast<Eigen::Index>(i)) =
        nystrom_predict(model, pts.row(static_cast<Eigen::Index>(i)));
  });
  return out;
}

// d_sub i.i.d. draws from q (with replacement) by inverse CDF over the
// cumulative sums. Identical seeds give identical index sequences.
inline std::vector<int> nystrom_sample(const SamplingDistribution& q, int d_sub,
                                       std::uint64_t seed) {
  if (d_sub < 1) throw DomainError("nystrom_sample requires d_sub >= 1");
  if (q.q.empty()) throw DomainError("nystrom_sample requires a nonempty distribution");
  std::vector<double> cdf(q.q.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < q.q.size(); ++i) {
    if (!(q.q[i] > 0.0)) throw DomainError("nystrom_sample requires strictly positive q");
    acc += q.q[i];
    cdf[i] = acc;
  }
  if (std::abs(acc - 1.0) > 1e-9) throw DomainError("nystrom_sample: q does not sum to 1");
  cdf.back() = 1.0;

  Rng rng(seed);
  std::vector<int> idx(static_cast<std::size_t>(d_sub));
  for (auto& k : idx) {
    const double u = rng.uniform();
    k = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  }
  return idx;
}

// In-sample prediction risk R_n(f) = (1/n) sum (f(x_i) - f*(x_i))^2.
inline double in_sample_risk(const Eigen::VectorXd& predictions, const Eigen::VectorXd& f_star) {
  if (predictions.size() != f_star.size() || predictions.size() == 0)
    throw ConfigError("in_sample_risk requires matching nonempty vectors");
  return (predictions - f_star).squaredNorm() / double(predictions.size());
}

// Accuracy of an approximate sampling distribution against the exact one,
// summarized by the mean and the 5th/95th percentiles of the per-point
// ratios r_i = q_approx_i / q_exact_i.
struct RaccSummary {
  double mean = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
};

namespace detail {

// Linearly interpolated quantile of a sorted sample.
inline double quantile_sorted(const std::vector<double>& sorted, double prob) {
  const double pos = prob * double(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - double(lo);
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

}  // namespace detail

inline RaccSummary r_acc(const SamplingDistribution& q_approx,
                         const SamplingDistribution& q_exact) {
  if (q_approx.q.size() != q_exact.q.size() || q_approx.q.empty())
    throw ConfigError("r_acc requires matching nonempty distributions");
  std::vector<double> r(q_approx.q.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(q_exact.q[i] > 0.0)) throw DomainError("r_acc: exact probabilities must be positive");
    r[i] = q_approx.q[i] / q_exact.q[i];
    mean += r[i];
  }
  mean /= double(r.size());
  std::sort(r.begin(), r.end());
  return RaccSummary{mean, detail::quantile_sorted(r, 0.05), detail::quantile_sorted(r, 0.95)};
}

}  // namespace slev
