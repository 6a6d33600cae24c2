#ifndef SURPRISE_POLICY_HPP_
#define SURPRISE_POLICY_HPP_

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "surprise/dist.hpp"
#include "surprise/mlp.hpp"
#include "surprise/normalizer.hpp"

namespace surprise {

struct PolicySpec {
  enum class Kind { kGaussian, kCategorical };
  Kind kind = Kind::kGaussian;
  std::size_t obs_dim = 1;
  std::size_t act_dim = 1;
  std::vector<std::size_t> hidden = {32};
  std::uint64_t seed = 0;
  double init_log_std = 0.0;  // Gaussian only; the vector is trainable
  double log_std_min = kLogStdMin;
  double log_std_max = kLogStdMax;
};

using PolicyDist = std::variant<DiagGaussianParams, CategoricalParams>;

// Stochastic policy over a tanh network. Gaussian policies produce action
// means from the network with a separate trainable log_std vector;
// categorical policies produce logits. Observations are whitened with
// running statistics frozen once per iteration.
class Policy {
 public:
  explicit Policy(PolicySpec spec);

  const PolicySpec& spec() const { return spec_; }
  const MlpSpec& net_spec() const { return net_spec_; }
  const ParamVector& params() const { return params_; }
  void set_params(ParamVector params);

  const Normalizer& obs_normalizer() const { return obs_norm_; }
  void observe(const Tensor& states);
  void freeze_obs_normalizer() { obs_norm_.freeze(); }
  void restore_obs_normalizer_state(std::span<const double> state) {
    obs_norm_.restore(spec_.obs_dim, state);
  }

  Tensor whiten(const Tensor& states) const;

  PolicyDist dist(const Tensor& states_w, const ParamVector& params) const;
  PolicyDist dist(const Tensor& states_w) const;

  struct ActionSample {
    std::vector<double> raw;   // Gaussian sample, or one-hot for categorical
    std::vector<double> exec;  // clipped to env bounds / one-hot
    int index = -1;            // categorical only
  };
  ActionSample act(std::span<const double> obs,
                   std::span<const double> action_low,
                   std::span<const double> action_high, Rng& rng) const;

  // Log-probability of stored actions (raw samples; one-hot for categorical).
  Tensor log_probs(const Tensor& states_w, const Tensor& actions,
                   const ParamVector& params) const;
  double mean_kl(const Tensor& states_w, const ParamVector& old_params,
                 const ParamVector& new_params) const;

  // (1/B) sum_r coeff_r * grad log pi(a_r|s_r), at the given parameters.
  ParamVector weighted_score_gradient(const Tensor& states_w,
                                      const Tensor& actions,
                                      std::span<const double> coeff,
                                      const ParamVector& params) const;

  // Fisher-vector product of the mean KL constraint at `params`.
  ParamVector fisher_vector_product(const Tensor& states_w,
                                    const ParamVector& params,
                                    const ParamVector& v) const;

 private:
  ParamVector net_part(const ParamVector& full) const;
  void add_net_part(const ParamVector& net, ParamVector& full) const;

  PolicySpec spec_;
  MlpSpec net_spec_;
  ParamVector params_;  // network segments plus "log_std" for Gaussian
  Normalizer obs_norm_;
};

// State-value estimator.
class NeuralValueFn {
 public:
  NeuralValueFn(std::size_t obs_dim, std::vector<std::size_t> hidden,
                std::uint64_t seed);

  const MlpSpec& net_spec() const { return net_spec_; }
  const ParamVector& params() const { return params_; }
  void set_params(ParamVector params) { params_ = std::move(params); }

  // Update running whitening statistics for observations and return targets.
  void observe(const Tensor& states, std::span<const double> returns);
  void freeze();

  Tensor whiten(const Tensor& states) const;
  // Whitened-space predictions f_theta(s_w) for given params.
  Tensor predict_whitened(const Tensor& states_w,
                          const ParamVector& params) const;
  // Predictions in return space.
  std::vector<double> predict(const Tensor& states) const;

  double target_mean() const;
  double target_scale() const;

 private:
  MlpSpec net_spec_;
  ParamVector params_;
  Normalizer obs_norm_;
  Normalizer ret_norm_;  // 1-dim
};

// Time-varying linear baseline: least squares of returns on
// [s, s^2, t/T, (t/T)^2, (t/T)^3, 1] with a small ridge term.
class LinearTVValueFn {
 public:
  LinearTVValueFn(std::size_t obs_dim, std::size_t horizon);

  std::size_t feature_dim() const { return 2 * obs_dim_ + 4; }
  void set_coefficients(std::vector<double> coef);
  const std::vector<double>& coefficients() const { return coef_; }

  void features(std::span<const double> state, std::size_t t,
                std::span<double> out) const;
  double predict(std::span<const double> state, std::size_t t) const;

  std::size_t obs_dim() const { return obs_dim_; }
  std::size_t horizon() const { return horizon_; }

 private:
  std::size_t obs_dim_;
  std::size_t horizon_;
  std::vector<double> coef_;
};

}  // namespace surprise

#endif  // SURPRISE_POLICY_HPP_
