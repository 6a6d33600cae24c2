#ifndef SURPRISE_ENVS_HPP_
#define SURPRISE_ENVS_HPP_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "surprise/rng.hpp"

namespace surprise {

struct EnvSpec {
  std::string name;
  std::size_t obs_dim = 0;
  bool discrete = false;
  // Continuous: action vector dimension; discrete: number of choices.
  std::size_t action_dim = 0;
  std::vector<double> action_low;   // continuous only
  std::vector<double> action_high;  // continuous only
  std::size_t max_episode_len = 500;
};

struct StepResult {
  std::vector<double> obs;
  double reward = 0.0;
  bool done = false;
};

// Environments are exactly reproducible from (reset seed, action sequence);
// each instance owns its RNG and is single-threaded.
class Env {
 public:
  virtual ~Env() = default;
  virtual const EnvSpec& spec() const = 0;
  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  // Continuous action; forces outside the documented bounds are clipped.
  virtual StepResult step(std::span<const double> action);
  virtual StepResult step_discrete(int action);
  // Force the physical state from an observation vector (testing hook).
  virtual void set_state(std::span<const double> obs) = 0;
};

// Registry: "sparse-mountaincar", "sparse-cartpole-swingup", "noisy-chain".
std::unique_ptr<Env> make_env(const std::string& name);
std::vector<std::string> env_names();

}  // namespace surprise

#endif  // SURPRISE_ENVS_HPP_
