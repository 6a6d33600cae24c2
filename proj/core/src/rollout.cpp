#include "surprise/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "surprise/rng.hpp"

namespace surprise {

double Episode::total_reward() const {
  double acc = 0.0;
  for (double r : r_ext) acc += r;
  return acc;
}

Tensor TrajectoryBatch::states_matrix() const {
  require(!episodes.empty(), "TrajectoryBatch: no episodes");
  const std::size_t obs = episodes[0].states[0].size();
  Tensor out = Tensor::zeros({total_steps, obs});
  std::size_t r = 0;
  for (const auto& ep : episodes) {
    for (std::size_t t = 0; t < ep.length(); ++t, ++r) {
      std::copy(ep.states[t].begin(), ep.states[t].end(),
                out.data.begin() + r * obs);
    }
  }
  return out;
}

namespace {
Tensor actions_like(const std::vector<Episode>& episodes,
                    std::size_t total_steps, bool exec) {
  const std::size_t act = episodes[0].actions[0].size();
  Tensor out = Tensor::zeros({total_steps, act});
  std::size_t r = 0;
  for (const auto& ep : episodes) {
    const auto& rows = exec ? ep.actions_exec : ep.actions;
    for (std::size_t t = 0; t < ep.length(); ++t, ++r) {
      std::copy(rows[t].begin(), rows[t].end(), out.data.begin() + r * act);
    }
  }
  return out;
}
}  // namespace

Tensor TrajectoryBatch::actions_matrix() const {
  require(!episodes.empty(), "TrajectoryBatch: no episodes");
  return actions_like(episodes, total_steps, /*exec=*/false);
}

Tensor TrajectoryBatch::exec_actions_matrix() const {
  require(!episodes.empty(), "TrajectoryBatch: no episodes");
  return actions_like(episodes, total_steps, /*exec=*/true);
}

std::vector<double> TrajectoryBatch::rewards_ext_flat() const {
  std::vector<double> out;
  out.reserve(total_steps);
  for (const auto& ep : episodes) {
    out.insert(out.end(), ep.r_ext.begin(), ep.r_ext.end());
  }
  return out;
}

std::vector<std::size_t> TrajectoryBatch::time_indices() const {
  std::vector<std::size_t> out;
  out.reserve(total_steps);
  for (const auto& ep : episodes) {
    for (std::size_t t = 0; t < ep.length(); ++t) out.push_back(t);
  }
  return out;
}

std::vector<TransitionTuple> TrajectoryBatch::to_transitions() const {
  std::vector<TransitionTuple> out;
  out.reserve(total_steps);
  for (const auto& ep : episodes) {
    for (std::size_t t = 0; t < ep.length(); ++t) {
      TransitionTuple tt;
      tt.s = ep.states[t];
      tt.a = ep.actions_exec[t];
      tt.s_next = ep.states[t + 1];
      tt.r_ext = ep.r_ext[t];
      tt.done = ep.terminated && t + 1 == ep.length();
      out.push_back(std::move(tt));
    }
  }
  return out;
}

double TrajectoryBatch::ret_ext_mean() const {
  double acc = 0.0;
  for (const auto& ep : episodes) acc += ep.total_reward();
  return acc / static_cast<double>(episodes.size());
}

double TrajectoryBatch::ret_ext_median_episode() const {
  std::vector<double> totals;
  totals.reserve(episodes.size());
  for (const auto& ep : episodes) totals.push_back(ep.total_reward());
  std::sort(totals.begin(), totals.end());
  const std::size_t n = totals.size();
  return n % 2 == 1 ? totals[n / 2]
                    : 0.5 * (totals[n / 2 - 1] + totals[n / 2]);
}

TrajectoryBatch collect_rollouts(
    const std::function<std::unique_ptr<Env>()>& env_factory,
    const Policy& policy, std::size_t batch_size, std::size_t max_len,
    std::uint64_t seed) {
  require(batch_size >= 1, "collect_rollouts: batch_size must be >= 1");
  require(max_len >= 1, "collect_rollouts: max_len must be >= 1");
  TrajectoryBatch batch;
  auto env = env_factory();
  const EnvSpec& spec = env->spec();
  Rng action_rng(derive_seed(seed, 11));

  std::size_t episode_index = 0;
  while (batch.total_steps < batch_size) {
    Episode ep;
    std::vector<double> obs = env->reset(derive_seed(seed, 12, episode_index));
    ep.states.push_back(obs);
    for (std::size_t t = 0; t < max_len; ++t) {
      const Policy::ActionSample a =
          policy.act(obs, spec.action_low, spec.action_high, action_rng);
      StepResult sr = spec.discrete ? env->step_discrete(a.index)
                                    : env->step(a.exec);
      ep.actions.push_back(a.raw);
      ep.actions_exec.push_back(a.exec);
      ep.r_ext.push_back(sr.reward);
      ep.states.push_back(sr.obs);
      obs = std::move(sr.obs);
      if (sr.done) {
        ep.terminated = true;
        break;
      }
    }
    batch.total_steps += ep.length();
    batch.episodes.push_back(std::move(ep));
    ++episode_index;
  }
  return batch;
}

void gae_advantages(TrajectoryBatch& batch, const GaeConfig& cfg) {
  require(batch.r_shaped.size() == batch.total_steps,
          "gae_advantages: r_shaped not set");
  require(batch.values.size() == batch.total_steps,
          "gae_advantages: values not set");
  require(batch.bootstrap.size() == batch.episodes.size(),
          "gae_advantages: bootstrap not set");

  batch.advantages_raw.assign(batch.total_steps, 0.0);
  batch.returns.assign(batch.total_steps, 0.0);

  std::size_t offset = 0;
  for (std::size_t e = 0; e < batch.episodes.size(); ++e) {
    const std::size_t len = batch.episodes[e].length();
    double next_adv = 0.0;
    for (std::size_t i = len; i-- > 0;) {
      const std::size_t t = offset + i;
      const double v_next =
          (i + 1 < len) ? batch.values[t + 1] : batch.bootstrap[e];
      const double delta =
          batch.r_shaped[t] + cfg.gamma * v_next - batch.values[t];
      next_adv = delta + cfg.gamma * cfg.lambda * next_adv;
      batch.advantages_raw[t] = next_adv;
      batch.returns[t] = next_adv + batch.values[t];
    }
    offset += len;
  }

  // Standardize across the batch; a flat advantage signal yields zeros.
  double mean = 0.0;
  for (double a : batch.advantages_raw) mean += a;
  mean /= static_cast<double>(batch.total_steps);
  double var = 0.0;
  for (double a : batch.advantages_raw) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / static_cast<double>(batch.total_steps));
  batch.advantages.assign(batch.total_steps, 0.0);
  if (sd > 1e-12) {
    for (std::size_t t = 0; t < batch.total_steps; ++t) {
      batch.advantages[t] = (batch.advantages_raw[t] - mean) / sd;
    }
  }
}

}  // namespace surprise
