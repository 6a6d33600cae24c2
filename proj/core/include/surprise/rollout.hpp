#ifndef SURPRISE_ROLLOUT_HPP_
#define SURPRISE_ROLLOUT_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "surprise/envs.hpp"
#include "surprise/policy.hpp"
#include "surprise/replay.hpp"
#include "surprise/tensor.hpp"

namespace surprise {

struct Episode {
  std::vector<std::vector<double>> states;        // length T+1 (includes final)
  std::vector<std::vector<double>> actions;       // policy samples, length T
  std::vector<std::vector<double>> actions_exec;  // executed (clipped), length T
  std::vector<double> r_ext;                      // length T
  bool terminated = false;  // env signaled done (vs truncation at max_len)

  std::size_t length() const { return r_ext.size(); }
  double total_reward() const;
};

struct GaeConfig {
  double gamma = 0.995;
  double lambda = 0.95;
};

// One iteration's worth of experience plus the derived learning signals.
// Flattened arrays are ordered episode by episode, step by step.
struct TrajectoryBatch {
  std::vector<Episode> episodes;
  std::size_t total_steps = 0;

  std::vector<double> r_shaped;        // training rewards (length total_steps)
  std::vector<double> values;          // V(s_t),  length total_steps
  std::vector<double> bootstrap;       // per episode: V(s_T) or 0 on done
  std::vector<double> advantages_raw;  // GAE sums before standardization
  std::vector<double> advantages;      // standardized
  std::vector<double> returns;         // advantages_raw + values

  Tensor states_matrix() const;        // [total_steps, obs]
  Tensor actions_matrix() const;       // [total_steps, act] policy samples
  Tensor exec_actions_matrix() const;  // executed actions
  std::vector<double> rewards_ext_flat() const;
  std::vector<std::size_t> time_indices() const;
  std::vector<TransitionTuple> to_transitions() const;  // executed actions

  double ret_ext_mean() const;            // mean episode extrinsic return
  double ret_ext_median_episode() const;  // median episode extrinsic return
};

// Collect whole episodes until at least batch_size steps; the final episode
// runs to termination or max_len. Deterministic under seed.
TrajectoryBatch collect_rollouts(
    const std::function<std::unique_ptr<Env>()>& env_factory,
    const Policy& policy, std::size_t batch_size, std::size_t max_len,
    std::uint64_t seed);

// delta_t = r_t + gamma V(s_{t+1}) - V(s_t); A_t = sum_l (gamma lambda)^l
// delta_{t+l} within the episode. Fills advantages_raw, advantages
// (standardized across the batch) and returns. Requires r_shaped, values and
// bootstrap to be set.
void gae_advantages(TrajectoryBatch& batch, const GaeConfig& cfg);

}  // namespace surprise

#endif  // SURPRISE_ROLLOUT_HPP_
