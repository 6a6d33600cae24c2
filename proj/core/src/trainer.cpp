#include "surprise/trainer.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <optional>

#include "surprise/csv.hpp"
#include "surprise/dynamics.hpp"
#include "surprise/envs.hpp"
#include "surprise/rollout.hpp"
#include "surprise/serialize.hpp"
#include "surprise/trust_region.hpp"
#include "surprise/updates.hpp"

namespace surprise {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

bool scheme_uses_model(BonusScheme s) {
  return s != BonusScheme::kNone;
}

bool scheme_trains_model(BonusScheme s) {
  return s == BonusScheme::kSurprisal || s == BonusScheme::kLearningProgress ||
         s == BonusScheme::kPredError;
}

SolveStepConfig tr_config_from(const RunConfig& cfg) {
  SolveStepConfig tr;
  tr.cg_iters = cfg.cg_iters;
  tr.damping = cfg.damping;
  tr.backtrack_ratio = cfg.backtrack_ratio;
  tr.max_backtracks = cfg.max_backtracks;
  tr.subsample_fraction = cfg.subsample_fraction;
  tr.strict_appendix_a = cfg.strict_appendix_a;
  return tr;
}

}  // namespace

TrainResult train(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  validate_config(cfg);
  std::filesystem::create_directories(out_dir);

  const auto probe_env = make_env(cfg.env);
  const EnvSpec env_spec = probe_env->spec();
  const bool shift = cfg.nonnegative_shift_resolved();

  PolicySpec pspec;
  pspec.kind = env_spec.discrete ? PolicySpec::Kind::kCategorical
                                 : PolicySpec::Kind::kGaussian;
  pspec.obs_dim = env_spec.obs_dim;
  pspec.act_dim = env_spec.action_dim;
  pspec.hidden = cfg.policy_hidden;
  pspec.seed = derive_seed(cfg.seed, 1);
  pspec.init_log_std = cfg.policy_init_log_std;
  Policy policy(pspec);

  std::optional<NeuralValueFn> vf_nn;
  std::optional<LinearTVValueFn> vf_lin;
  if (cfg.value_kind == RunConfig::ValueKind::kNeural) {
    vf_nn.emplace(env_spec.obs_dim, cfg.value_hidden, derive_seed(cfg.seed, 2));
  } else {
    vf_lin.emplace(env_spec.obs_dim, cfg.max_len);
  }

  const bool uses_model = scheme_uses_model(cfg.bonus.scheme);
  const bool trains_model = scheme_trains_model(cfg.bonus.scheme);
  std::optional<DynamicsModel> model;
  std::optional<SnapshotRing> ring;
  if (uses_model) {
    DynamicsModelConfig mcfg;
    mcfg.state_dim = env_spec.obs_dim;
    mcfg.action_dim = env_spec.action_dim;
    mcfg.hidden = cfg.dynamics_hidden;
    mcfg.seed = derive_seed(cfg.seed, 3);
    mcfg.log_std_min = cfg.log_std_min;
    mcfg.log_std_max = cfg.log_std_max;
    model.emplace(mcfg);
    ring.emplace(cfg.bonus.k + 1);
    ring->push(model->params());  // phi_0 backs the warm-up fallback
  }

  ReplayMemory replay(cfg.replay_capacity);
  CsvWriter csv(out_dir / ("seed_" + std::to_string(cfg.seed) + ".csv"));

  TrainResult result;
  result.csv_path = csv.path();
  std::size_t steps_total = 0;

  for (std::size_t iter = 0; iter < cfg.iterations; ++iter) {
    try {
    const auto t_iter = Clock::now();

    // Model state from the start of the iteration; bonuses never see the
    // post-update parameters.
    std::optional<DynamicsModel> bonus_model;
    if (uses_model && trains_model) bonus_model = *model;

    TrajectoryBatch batch = collect_rollouts(
        [&] { return make_env(cfg.env); }, policy, cfg.batch_size, cfg.max_len,
        derive_seed(cfg.seed, 20, iter));
    steps_total += batch.total_steps;

    const auto transitions = batch.to_transitions();
    if (uses_model && trains_model) {
      replay.insert(transitions);
      model->observe(transitions);
    }

    // Reshaped rewards r' = r + eta * (raw + shift).
    const auto t_bonus = Clock::now();
    const std::vector<double> r_ext = batch.rewards_ext_flat();
    BonusReport brep;
    if (cfg.bonus.scheme == BonusScheme::kNone) {
      batch.r_shaped = r_ext;
    } else {
      const DynamicsModel& m = trains_model ? *bonus_model : *model;
      const DynamicsModel::Batch dbatch = m.prepare(transitions);
      std::vector<double> raw;
      switch (cfg.bonus.scheme) {
        case BonusScheme::kSurprisal:
          raw = surprisal_bonus(m, dbatch);
          break;
        case BonusScheme::kLearningProgress:
          raw = learning_progress_bonus(m, m.params(), ring->get(cfg.bonus.k),
                                        dbatch);
          break;
        case BonusScheme::kPredError:
          raw = pred_error_bonus(m, dbatch);
          break;
        case BonusScheme::kRandomSurprisal:
          raw = random_surprisal_bonus(m, dbatch);
          break;
        case BonusScheme::kNone:
          break;
      }
      brep = make_bonus_report(raw, cfg.bonus.eta0, shift);
      if (brep.dispersion_warning) {
        std::cerr << "[surprise-rl] warning: bonus dispersion is large "
                     "relative to its mean (iteration "
                  << iter << ")\n";
      }
      batch.r_shaped = apply_bonus(r_ext, raw, brep.eta, shift, nullptr);
    }
    const double bonus_ms = ms_since(t_bonus);

    // Value predictions with the pre-update function, then GAE.
    const Tensor states = batch.states_matrix();
    policy.observe(states);
    policy.freeze_obs_normalizer();

    batch.values.assign(batch.total_steps, 0.0);
    batch.bootstrap.assign(batch.episodes.size(), 0.0);
    {
      std::size_t t = 0;
      for (std::size_t e = 0; e < batch.episodes.size(); ++e) {
        const Episode& ep = batch.episodes[e];
        for (std::size_t i = 0; i < ep.length(); ++i, ++t) {
          batch.values[t] =
              vf_nn ? 0.0 : vf_lin->predict(ep.states[i], i);
        }
        if (!ep.terminated) {
          batch.bootstrap[e] =
              vf_nn ? 0.0 : vf_lin->predict(ep.states.back(), ep.length());
        }
      }
      if (vf_nn) {
        // Batched prediction for the neural baseline.
        const std::vector<double> v = vf_nn->predict(states);
        std::copy(v.begin(), v.end(), batch.values.begin());
        std::size_t e = 0;
        for (const Episode& ep : batch.episodes) {
          if (!ep.terminated) {
            Tensor last({1, env_spec.obs_dim}, ep.states.back());
            batch.bootstrap[e] = vf_nn->predict(last)[0];
          }
          ++e;
        }
      }
    }
    gae_advantages(batch, GaeConfig{cfg.gamma, cfg.lambda});

    TrpoConfig tcfg;
    tcfg.delta_kl = cfg.delta_kl;
    tcfg.tr = tr_config_from(cfg);
    tcfg.seed = derive_seed(cfg.seed, 21, iter);
    const StepReport policy_report = trpo_step(policy, batch, tcfg);

    if (vf_nn) {
      ValueFitConfig vcfg;
      vcfg.delta = cfg.value_delta;
      vcfg.tr = tr_config_from(cfg);
      vcfg.seed = derive_seed(cfg.seed, 22, iter);
      fit_value_nn(*vf_nn, batch, vcfg);
    } else {
      fit_value_linear_timevarying(*vf_lin, batch);
    }

    const auto t_model = Clock::now();
    StepReport model_report;
    double model_nll_now = std::nan("");
    if (uses_model && trains_model) {
      ModelUpdateConfig mcfg;
      mcfg.batch_size = cfg.dynamics_batch_size;
      mcfg.kappa = cfg.kappa;
      mcfg.alpha = cfg.alpha;
      mcfg.tr = tr_config_from(cfg);
      for (std::size_t u = 0; u < cfg.model_updates_per_iteration; ++u) {
        mcfg.seed = derive_seed(cfg.seed, 23, iter * 131 + u);
        model_report = model_update(*model, replay, *ring, mcfg);
      }
      const DynamicsModel::Batch dbatch = model->prepare(transitions);
      model_nll_now = model->nll_original(dbatch);
    } else if (uses_model) {
      const DynamicsModel::Batch dbatch = model->prepare(transitions);
      model_nll_now = model->nll_original(dbatch);
    }
    const double model_ms = ms_since(t_model);

    const double ret_mean = batch.ret_ext_mean();
    result.ret_ext_mean.push_back(ret_mean);
    bool saw_reward = false;
    for (const auto& ep : batch.episodes) {
      if (ep.total_reward() > 0.0) saw_reward = true;
    }
    if (saw_reward && !result.reached_goal) {
      result.reached_goal = true;
      result.first_reward_iteration = iter;
    }

    const double wall_ms = ms_since(t_iter);
    const bool dt = cfg.deterministic_timing;
    csv.append({static_cast<double>(iter), static_cast<double>(steps_total),
                ret_mean, batch.ret_ext_median_episode(), brep.mean_raw,
                brep.eta,
                policy_report.accepted ? policy_report.constraint_after : 0.0,
                model_nll_now,
                model_report.accepted ? model_report.constraint_after : 0.0,
                dt ? 0.0 : wall_ms, brep.std_raw, brep.min_raw, brep.max_raw,
                brep.shift, dt ? 0.0 : bonus_ms, dt ? 0.0 : model_ms});

    if (cfg.checkpoint_every > 0 && (iter + 1) % cfg.checkpoint_every == 0) {
      Checkpoint ckpt;
      ckpt.iteration = iter + 1;
      ckpt.policy_spec = pspec;
      ckpt.policy_params = policy.params();
      ckpt.policy_obs_norm_state = policy.obs_normalizer().state();
      if (uses_model) {
        ckpt.has_model = true;
        ckpt.model_config = model->config();
        ckpt.model_params = model->params();
        ckpt.model_in_norm_state = model->input_normalizer().state();
        ckpt.model_target_norm_state = model->target_normalizer().state();
      }
      save_checkpoint(ckpt, out_dir / ("checkpoint_seed" +
                                       std::to_string(cfg.seed) + "_iter" +
                                       std::to_string(iter + 1) + ".bin"));
    }
    result.iterations_completed = iter + 1;
    } catch (const std::exception& e) {
      throw std::runtime_error("training aborted at iteration " +
                               std::to_string(iter) + ": " + e.what());
    }
  }

  Checkpoint final_ckpt;
  final_ckpt.iteration = cfg.iterations;
  final_ckpt.policy_spec = pspec;
  final_ckpt.policy_params = policy.params();
  final_ckpt.policy_obs_norm_state = policy.obs_normalizer().state();
  if (uses_model) {
    final_ckpt.has_model = true;
    final_ckpt.model_config = model->config();
    final_ckpt.model_params = model->params();
    final_ckpt.model_in_norm_state = model->input_normalizer().state();
    final_ckpt.model_target_norm_state = model->target_normalizer().state();
  }
  result.checkpoint_path =
      out_dir / ("checkpoint_seed" + std::to_string(cfg.seed) + "_final.bin");
  save_checkpoint(final_ckpt, result.checkpoint_path);

  result.final_ret_ext_mean =
      result.ret_ext_mean.empty() ? 0.0 : result.ret_ext_mean.back();
  return result;
}

}  // namespace surprise
