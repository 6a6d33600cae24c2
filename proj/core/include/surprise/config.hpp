#ifndef SURPRISE_CONFIG_HPP_
#define SURPRISE_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "surprise/bonus.hpp"

namespace surprise {

// Every field has a documented default (see README); parse_config rejects
// unknown keys and reports all invalid values at once.
struct RunConfig {
  // run
  std::string env = "sparse-mountaincar";
  std::size_t iterations = 150;
  std::uint64_t seed = 0;
  std::size_t checkpoint_every = 50;  // 0 disables periodic checkpoints
  bool deterministic_timing = false;  // write 0 for wall-clock columns

  // bonus
  BonusConfig bonus;
  enum class ShiftMode { kAuto, kOn, kOff };
  // kAuto enables the nonnegative translation only in environments where the
  // agent can die (noisy-chain).
  ShiftMode shift_mode = ShiftMode::kAuto;

  // policy
  std::vector<std::size_t> policy_hidden = {32};
  double policy_init_log_std = 0.0;

  // value function
  enum class ValueKind { kNeural, kLinear };
  ValueKind value_kind = ValueKind::kNeural;
  std::vector<std::size_t> value_hidden = {32};
  double value_delta = 0.01;

  // dynamics model
  std::vector<std::size_t> dynamics_hidden = {32};
  double kappa = 0.001;
  double alpha = 1.0;
  std::size_t dynamics_batch_size = 5000;
  std::size_t replay_capacity = 200000;
  std::size_t model_updates_per_iteration = 1;
  double log_std_min = -5.0;
  double log_std_max = 2.0;

  // trpo
  double delta_kl = 0.01;
  std::size_t batch_size = 5000;
  std::size_t max_len = 500;
  double gamma = 0.995;
  double lambda = 0.95;
  int cg_iters = 10;
  double damping = 1e-5;
  double backtrack_ratio = 0.8;
  int max_backtracks = 15;
  double subsample_fraction = 1.0;
  bool strict_appendix_a = false;

  // Resolved value of the nonnegative shift for this env.
  bool nonnegative_shift_resolved() const;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// JSON text with one flat object per section; empty input yields defaults.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::filesystem::path& path);

// Range/consistency checks; throws ConfigError listing every problem.
void validate_config(const RunConfig& cfg);
std::vector<std::string> validation_issues(const RunConfig& cfg);

// Resolved configuration as JSON (round-trips through parse_config).
std::string config_to_json(const RunConfig& cfg);

// Apply a "--scheme NAME[:k]" override.
void apply_scheme_override(RunConfig& cfg, const std::string& scheme_spec);

}  // namespace surprise

#endif  // SURPRISE_CONFIG_HPP_
