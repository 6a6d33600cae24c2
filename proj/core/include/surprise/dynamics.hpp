#ifndef SURPRISE_DYNAMICS_HPP_
#define SURPRISE_DYNAMICS_HPP_

#include <cstdint>
#include <deque>
#include <span>
#include <utility>
#include <vector>

#include "surprise/dist.hpp"
#include "surprise/mlp.hpp"
#include "surprise/normalizer.hpp"
#include "surprise/replay.hpp"
#include "surprise/trust_region.hpp"

namespace surprise {

// Ring of past dynamics-model parameter vectors; entry k counts updates back
// from the most recent one.
class SnapshotRing {
 public:
  explicit SnapshotRing(std::size_t k_max);

  std::size_t k_max() const { return k_max_; }
  std::size_t size() const { return ring_.size(); }
  void push(ParamVector phi);
  // Parameters from k updates ago (k >= 1); returns the oldest available
  // snapshot when fewer than k exist. Throws std::runtime_error when empty.
  const ParamVector& get(std::size_t k) const;

 private:
  std::size_t k_max_;
  std::uint64_t next_index_ = 0;
  std::deque<std::pair<std::uint64_t, ParamVector>> ring_;
};

struct DynamicsModelConfig {
  std::size_t state_dim = 1;
  std::size_t action_dim = 1;
  std::vector<std::size_t> hidden = {32};
  std::uint64_t seed = 0;
  double log_std_min = kLogStdMin;
  double log_std_max = kLogStdMax;
};

// Learned transition model P_phi(s'|s,a): a factored Gaussian over the next
// state, parametrized as mean and log-std heads of one network. The network
// operates on whitened inputs and predicts whitened state deltas; densities
// are mapped back to the original state space through the whitening Jacobian.
class DynamicsModel {
 public:
  explicit DynamicsModel(DynamicsModelConfig cfg);

  const DynamicsModelConfig& config() const { return cfg_; }
  const MlpSpec& net_spec() const { return net_spec_; }
  const ParamVector& params() const { return phi_; }
  void set_params(ParamVector phi);

  const Normalizer& input_normalizer() const { return in_norm_; }
  const Normalizer& target_normalizer() const { return target_norm_; }
  void restore_normalizer_state(std::span<const double> in_state,
                                std::span<const double> target_state);

  // Accumulate running whitening statistics; does not touch the frozen
  // transform used for evaluation.
  void observe(std::span<const TransitionTuple> tuples);
  void freeze_normalizers();

  // Matrices for a batch of transitions under the frozen whitening.
  struct Batch {
    Tensor inputs_w;   // [B, state+action]
    Tensor targets_w;  // [B, state] whitened deltas s' - s
    Tensor s;          // [B, state] original
    Tensor s_next;     // [B, state] original
    std::size_t size() const { return inputs_w.rows(); }
  };
  Batch prepare(std::span<const TransitionTuple> tuples) const;

  DiagGaussianParams predict_whitened(const Tensor& inputs_w) const;
  DiagGaussianParams predict_whitened(const Tensor& inputs_w,
                                      const ParamVector& phi) const;

  // Per-row log P_phi(s'|s,a). Whitened variant is the density the training
  // objective sees; the original-space variant adds the log-Jacobian of the
  // whitening so values are comparable across state scalings. Target
  // dimensions with degenerate variance contribute zero.
  Tensor log_prob_whitened(const Batch& batch, const ParamVector& phi) const;
  Tensor log_prob_original(const Batch& batch, const ParamVector& phi) const;
  Tensor log_prob_whitened(const Batch& batch) const;
  Tensor log_prob_original(const Batch& batch) const;

  // Predicted next-state mean in original space (s + unwhitened mean delta).
  Tensor predicted_next_mean(const Batch& batch, const ParamVector& phi) const;
  Tensor predicted_next_mean(const Batch& batch) const;

  // Mean negative log-likelihood over the batch (whitened space; this is the
  // fitting objective's data term).
  double nll(const Batch& batch, const ParamVector& phi) const;
  double nll(const Batch& batch) const;
  // Reported in original state space.
  double nll_original(const Batch& batch, const ParamVector& phi) const;
  double nll_original(const Batch& batch) const;

  // -sum_active log scale_i: log |dz/dx| of the target whitening.
  double target_log_jacobian() const;

 private:
  DynamicsModelConfig cfg_;
  MlpSpec net_spec_;
  ParamVector phi_;
  Normalizer in_norm_;
  Normalizer target_norm_;
};

struct ModelUpdateConfig {
  std::size_t batch_size = 5000;
  double kappa = 0.001;  // KL trust region for the model step
  double alpha = 1.0;    // L2 regularization coefficient (weights only)
  SolveStepConfig tr;
  std::uint64_t seed = 0;  // drives batch sampling and curvature subsampling
};

// One KL-constrained second-order step on the NLL + L2 objective over a batch
// sampled from the replay memory. The pre-update parameters are pushed onto
// the snapshot ring. When the memory holds fewer than batch_size transitions
// the update (and the snapshot) is skipped and the report says so.
StepReport model_update(DynamicsModel& model, const ReplayMemory& memory,
                        SnapshotRing& ring, const ModelUpdateConfig& cfg);

}  // namespace surprise

#endif  // SURPRISE_DYNAMICS_HPP_
