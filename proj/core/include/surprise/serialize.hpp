#ifndef SURPRISE_SERIALIZE_HPP_
#define SURPRISE_SERIALIZE_HPP_

#include <filesystem>

#include "surprise/dynamics.hpp"
#include "surprise/policy.hpp"

namespace surprise {

// Binary checkpoint format, little-endian with a version header:
//   magic "SRLM", u32 version,
//   model dims and clamp bounds,
//   layout descriptor (name, shape per segment),
//   flat float64 parameter array,
//   input/target normalizer statistics.
void save_dynamics_model(const DynamicsModel& model,
                         const std::filesystem::path& path);
DynamicsModel load_dynamics_model(const std::filesystem::path& path);

// Full training checkpoint: policy (+obs normalizer) and, when present, the
// dynamics model, sharing the container above ("SRLC").
struct Checkpoint {
  std::uint64_t iteration = 0;
  PolicySpec policy_spec;
  ParamVector policy_params;
  std::vector<double> policy_obs_norm_state;
  bool has_model = false;
  DynamicsModelConfig model_config;
  ParamVector model_params;
  std::vector<double> model_in_norm_state;
  std::vector<double> model_target_norm_state;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace surprise

#endif  // SURPRISE_SERIALIZE_HPP_
