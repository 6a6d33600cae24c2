#ifndef SURPRISE_DIST_HPP_
#define SURPRISE_DIST_HPP_

#include <cstddef>
#include <vector>

#include "surprise/mlp.hpp"
#include "surprise/rng.hpp"
#include "surprise/tensor.hpp"

namespace surprise {

// Default clamp for log standard deviations. Deterministic environments push
// sigma to zero under NLL fitting; the floor bounds surprisal and keeps the
// optimizer well-posed. Exposed through the dynamics/policy configs.
inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

// Fully-factored Gaussian over n dimensions, one row per batch element.
struct DiagGaussianParams {
  Tensor mean;     // [batch, n]
  Tensor log_std;  // [batch, n]

  std::size_t batch() const { return mean.rows(); }
  std::size_t dim() const { return mean.cols(); }
  void clamp_log_std(double lo = kLogStdMin, double hi = kLogStdMax);
};

struct CategoricalParams {
  Tensor logits;  // [batch, m]

  std::size_t batch() const { return logits.rows(); }
  std::size_t dim() const { return logits.cols(); }
};

// Per-row sum_i [ -(x_i-mu_i)^2/(2 sigma_i^2) - log sigma_i ] - (n/2) log 2pi
Tensor gaussian_log_prob(const DiagGaussianParams& p, const Tensor& x);
Tensor gaussian_kl(const DiagGaussianParams& p, const DiagGaussianParams& q);
Tensor gaussian_entropy(const DiagGaussianParams& p);
// One sample per row.
Tensor gaussian_sample(const DiagGaussianParams& p, Rng& rng);

Tensor categorical_log_prob(const CategoricalParams& p,
                            const std::vector<int>& idx);
Tensor categorical_kl(const CategoricalParams& p, const CategoricalParams& q);
Tensor categorical_entropy(const CategoricalParams& p);
// Row-wise softmax probabilities.
Tensor categorical_probs(const CategoricalParams& p);
int categorical_sample_row(const CategoricalParams& p, std::size_t row,
                           Rng& rng);

// Fisher information of the distribution with respect to its parameters,
// i.e. the curvature of KL(p_old || p_theta) at theta = theta_old.
// Gaussian: diagonal (1/sigma^2, 2) blocks over (mean, log_std) outputs.
// Categorical: dense diag(p) - p p^T over logits.
Metric fisher_metric(const DiagGaussianParams& p);
Metric fisher_metric(const CategoricalParams& p);

}  // namespace surprise

#endif  // SURPRISE_DIST_HPP_
