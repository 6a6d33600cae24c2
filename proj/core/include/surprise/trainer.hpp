#ifndef SURPRISE_TRAINER_HPP_
#define SURPRISE_TRAINER_HPP_

#include <filesystem>
#include <limits>
#include <vector>

#include "surprise/config.hpp"

namespace surprise {

struct TrainResult {
  std::filesystem::path csv_path;
  std::filesystem::path checkpoint_path;
  std::vector<double> ret_ext_mean;  // one entry per iteration
  double final_ret_ext_mean = 0.0;
  bool reached_goal = false;  // any positive extrinsic reward observed
  std::size_t first_reward_iteration = std::numeric_limits<std::size_t>::max();
  std::size_t iterations_completed = 0;
};

// Runs the full training loop for one seed: collect rollouts, push them into
// the replay memory, reshape rewards with the iteration-start model state,
// renormalize eta, take the policy step, then update the dynamics model.
// Writes one CSV row per iteration to <out_dir>/seed_<seed>.csv plus periodic
// and final checkpoints. Deterministic given the config (including seed).
TrainResult train(const RunConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace surprise

#endif  // SURPRISE_TRAINER_HPP_
