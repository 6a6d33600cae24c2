#include "surprise/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "surprise/rng.hpp"

namespace surprise {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

SnapshotRing::SnapshotRing(std::size_t k_max) : k_max_(k_max) {
  if (k_max == 0) {
    throw std::invalid_argument("SnapshotRing: k_max must be >= 1");
  }
}

void SnapshotRing::push(ParamVector phi) {
  if (ring_.size() == k_max_) ring_.pop_front();
  ring_.emplace_back(next_index_++, std::move(phi));
}

const ParamVector& SnapshotRing::get(std::size_t k) const {
  if (ring_.empty()) {
    throw std::runtime_error("SnapshotRing::get: ring is empty");
  }
  require(k >= 1, "SnapshotRing::get: k must be >= 1");
  const std::size_t back = std::min(k, ring_.size());
  return ring_[ring_.size() - back].second;
}

DynamicsModel::DynamicsModel(DynamicsModelConfig cfg)
    : cfg_(std::move(cfg)),
      in_norm_(cfg_.state_dim + cfg_.action_dim),
      target_norm_(cfg_.state_dim) {
  require(cfg_.state_dim >= 1 && cfg_.action_dim >= 1,
          "DynamicsModel: dims must be >= 1");
  net_spec_.input_dim = cfg_.state_dim + cfg_.action_dim;
  net_spec_.hidden = cfg_.hidden;
  net_spec_.output_dim = 2 * cfg_.state_dim;  // mean and log_std heads
  net_spec_.seed = cfg_.seed;
  phi_ = mlp_init(net_spec_);
}

void DynamicsModel::set_params(ParamVector phi) {
  require(phi.size() == phi_.size(), "DynamicsModel::set_params: size mismatch");
  phi_ = std::move(phi);
}

void DynamicsModel::observe(std::span<const TransitionTuple> tuples) {
  std::vector<double> input(cfg_.state_dim + cfg_.action_dim);
  std::vector<double> delta(cfg_.state_dim);
  for (const auto& t : tuples) {
    require(t.s.size() == cfg_.state_dim && t.a.size() == cfg_.action_dim &&
                t.s_next.size() == cfg_.state_dim,
            "DynamicsModel::observe: transition dims mismatch");
    std::copy(t.s.begin(), t.s.end(), input.begin());
    std::copy(t.a.begin(), t.a.end(), input.begin() + cfg_.state_dim);
    for (std::size_t i = 0; i < cfg_.state_dim; ++i) {
      delta[i] = t.s_next[i] - t.s[i];
    }
    in_norm_.observe(input);
    target_norm_.observe(delta);
  }
}

void DynamicsModel::freeze_normalizers() {
  in_norm_.freeze();
  target_norm_.freeze();
}

void DynamicsModel::restore_normalizer_state(
    std::span<const double> in_state, std::span<const double> target_state) {
  in_norm_.restore(cfg_.state_dim + cfg_.action_dim, in_state);
  target_norm_.restore(cfg_.state_dim, target_state);
}

DynamicsModel::Batch DynamicsModel::prepare(
    std::span<const TransitionTuple> tuples) const {
  const std::size_t n = tuples.size();
  require(n >= 1, "DynamicsModel::prepare: empty batch");
  const std::size_t sd = cfg_.state_dim;
  const std::size_t ad = cfg_.action_dim;
  Batch batch;
  batch.inputs_w = Tensor::zeros({n, sd + ad});
  batch.targets_w = Tensor::zeros({n, sd});
  batch.s = Tensor::zeros({n, sd});
  batch.s_next = Tensor::zeros({n, sd});
  std::vector<double> raw_in(sd + ad), raw_delta(sd);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& t = tuples[r];
    std::copy(t.s.begin(), t.s.end(), raw_in.begin());
    std::copy(t.a.begin(), t.a.end(), raw_in.begin() + sd);
    for (std::size_t i = 0; i < sd; ++i) raw_delta[i] = t.s_next[i] - t.s[i];
    in_norm_.apply(raw_in, {batch.inputs_w.data.data() + r * (sd + ad), sd + ad});
    target_norm_.apply(raw_delta, {batch.targets_w.data.data() + r * sd, sd});
    std::copy(t.s.begin(), t.s.end(), batch.s.data.begin() + r * sd);
    std::copy(t.s_next.begin(), t.s_next.end(),
              batch.s_next.data.begin() + r * sd);
  }
  return batch;
}

DiagGaussianParams DynamicsModel::predict_whitened(
    const Tensor& inputs_w) const {
  return predict_whitened(inputs_w, phi_);
}

DiagGaussianParams DynamicsModel::predict_whitened(
    const Tensor& inputs_w, const ParamVector& phi) const {
  const Tensor out = mlp_forward(phi, net_spec_, inputs_w);
  const std::size_t n = cfg_.state_dim;
  const std::size_t batch = out.rows();
  DiagGaussianParams p;
  p.mean = Tensor::zeros({batch, n});
  p.log_std = Tensor::zeros({batch, n});
  for (std::size_t r = 0; r < batch; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      p.mean.at(r, i) = out.at(r, i);
      p.log_std.at(r, i) = out.at(r, n + i);
    }
  }
  p.clamp_log_std(cfg_.log_std_min, cfg_.log_std_max);
  return p;
}

Tensor DynamicsModel::log_prob_whitened(const Batch& batch,
                                        const ParamVector& phi) const {
  const DiagGaussianParams p = predict_whitened(batch.inputs_w, phi);
  const std::size_t n = cfg_.state_dim;
  const std::size_t rows = batch.size();
  Tensor out = Tensor::zeros({rows});
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    std::size_t active = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!target_norm_.active(i)) continue;  // deterministic coordinate
      ++active;
      const double ls = p.log_std.at(r, i);
      const double sigma = std::exp(ls);
      const double d = batch.targets_w.at(r, i) - p.mean.at(r, i);
      acc += -d * d / (2.0 * sigma * sigma) - ls;
    }
    out.data[r] = acc - 0.5 * static_cast<double>(active) * kLog2Pi;
  }
  return out;
}

Tensor DynamicsModel::log_prob_original(const Batch& batch,
                                        const ParamVector& phi) const {
  Tensor out = log_prob_whitened(batch, phi);
  const double lj = target_log_jacobian();
  for (double& v : out.data) v += lj;
  return out;
}

Tensor DynamicsModel::log_prob_whitened(const Batch& batch) const {
  return log_prob_whitened(batch, phi_);
}

Tensor DynamicsModel::log_prob_original(const Batch& batch) const {
  return log_prob_original(batch, phi_);
}

Tensor DynamicsModel::predicted_next_mean(const Batch& batch,
                                          const ParamVector& phi) const {
  const DiagGaussianParams p = predict_whitened(batch.inputs_w, phi);
  const std::size_t n = cfg_.state_dim;
  const std::size_t rows = batch.size();
  Tensor out = Tensor::zeros({rows, n});
  std::vector<double> delta(n);
  for (std::size_t r = 0; r < rows; ++r) {
    target_norm_.invert({p.mean.data.data() + r * n, n}, delta);
    for (std::size_t i = 0; i < n; ++i) {
      out.at(r, i) = batch.s.at(r, i) + delta[i];
    }
  }
  return out;
}

Tensor DynamicsModel::predicted_next_mean(const Batch& batch) const {
  return predicted_next_mean(batch, phi_);
}

double DynamicsModel::nll(const Batch& batch, const ParamVector& phi) const {
  const Tensor lp = log_prob_whitened(batch, phi);
  double acc = 0.0;
  for (double v : lp.data) acc -= v;
  return acc / static_cast<double>(lp.numel());
}

double DynamicsModel::nll(const Batch& batch) const { return nll(batch, phi_); }

double DynamicsModel::nll_original(const Batch& batch,
                                   const ParamVector& phi) const {
  return nll(batch, phi) - target_log_jacobian();
}

double DynamicsModel::nll_original(const Batch& batch) const {
  return nll_original(batch, phi_);
}

double DynamicsModel::target_log_jacobian() const {
  double acc = 0.0;
  const auto scale = target_norm_.scale();
  for (std::size_t i = 0; i < target_norm_.dim(); ++i) {
    if (target_norm_.active(i)) acc -= std::log(scale[i]);
  }
  return acc;
}

namespace {

struct ModelStepWorkspace {
  DynamicsModel::Batch batch;
  DiagGaussianParams old_pred;
  Tensor clamp_gate;  // [B, state_dim] 1 where log_std output is inside clamp
};

// d/d(outputs) of the per-row whitened NLL at prediction p for target z.
Tensor nll_output_grad(const DynamicsModel& model,
                       const ModelStepWorkspace& ws,
                       const DiagGaussianParams& p) {
  const std::size_t n = model.config().state_dim;
  const std::size_t rows = ws.batch.size();
  Tensor grad = Tensor::zeros({rows, 2 * n});
  const auto& tn = model.target_normalizer();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!tn.active(i)) continue;
      const double sigma = std::exp(p.log_std.at(r, i));
      const double d = ws.batch.targets_w.at(r, i) - p.mean.at(r, i);
      grad.at(r, i) = -d / (sigma * sigma);
      grad.at(r, n + i) =
          (1.0 - d * d / (sigma * sigma)) * ws.clamp_gate.at(r, i);
    }
  }
  return grad;
}

double l2_weight_norm(const ParamVector& phi) {
  double acc = 0.0;
  for (const auto& seg : phi.layout()) {
    if (seg.name.empty() || seg.name[0] != 'W') continue;
    auto w = phi.segment(seg.name);
    for (double v : w) acc += v * v;
  }
  return acc;
}

}  // namespace

StepReport model_update(DynamicsModel& model, const ReplayMemory& memory,
                        SnapshotRing& ring, const ModelUpdateConfig& cfg) {
  StepReport report;
  if (memory.size() < cfg.batch_size) {
    report.skipped = true;
    return report;
  }
  ring.push(model.params());
  model.freeze_normalizers();

  const auto tuples = memory.sample(cfg.batch_size, derive_seed(cfg.seed, 101));
  ModelStepWorkspace ws;
  ws.batch = model.prepare(tuples);
  const std::size_t rows = ws.batch.size();
  const std::size_t n = model.config().state_dim;

  // Clamp gate from the raw (pre-clamp) log_std outputs at theta_old.
  const Tensor raw_out = mlp_forward(model.params(), model.net_spec(),
                                     ws.batch.inputs_w);
  ws.clamp_gate = Tensor::zeros({rows, n});
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      const double raw = raw_out.at(r, n + i);
      ws.clamp_gate.at(r, i) =
          (raw > model.config().log_std_min && raw < model.config().log_std_max)
              ? 1.0
              : 0.0;
    }
  }
  ws.old_pred = model.predict_whitened(ws.batch.inputs_w);

  // Fisher metric of the old prediction over (mean, log_std) heads; inactive
  // target dims are excluded from the constraint.
  Tensor metric_diag = Tensor::zeros({rows, 2 * n});
  const auto& tn = model.target_normalizer();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!tn.active(i)) continue;
      const double sigma = std::exp(ws.old_pred.log_std.at(r, i));
      metric_diag.at(r, i) = 1.0 / (sigma * sigma);
      metric_diag.at(r, n + i) = 2.0;
    }
  }

  const double alpha = cfg.alpha;
  auto objective = [&](const ParamVector& phi) {
    return -(model.nll(ws.batch, phi) + alpha * l2_weight_norm(phi));
  };

  TrustRegionProblem problem;
  problem.theta_old = model.params();
  problem.delta = cfg.kappa;
  problem.dataset_size = rows;
  problem.gradient = [&]() {
    const DiagGaussianParams p = model.predict_whitened(ws.batch.inputs_w);
    Tensor g_out = nll_output_grad(model, ws, p);
    const double inv_rows = -1.0 / static_cast<double>(rows);
    for (double& v : g_out.data) v *= inv_rows;  // maximize -mean(nll)
    ParamVector grad = mlp_backward(model.params(), model.net_spec(),
                                    ws.batch.inputs_w, g_out)
                           .grad_params;
    // d/dW of -alpha * ||W||^2
    for (const auto& seg : grad.layout()) {
      if (seg.name[0] != 'W') continue;
      auto gw = grad.segment(seg.name);
      auto w = model.params().segment(seg.name);
      for (std::size_t i = 0; i < gw.size(); ++i) gw[i] -= 2.0 * alpha * w[i];
    }
    return grad;
  };
  problem.curvature_vp = [&](std::span<const std::size_t> rows_sel,
                             const ParamVector& v) {
    const std::size_t m = rows_sel.size();
    Tensor x_sub = Tensor::zeros({m, ws.batch.inputs_w.cols()});
    Tensor metric_sub = Tensor::zeros({m, 2 * n});
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t r = rows_sel[j];
      std::copy(ws.batch.inputs_w.data.begin() + r * ws.batch.inputs_w.cols(),
                ws.batch.inputs_w.data.begin() + (r + 1) * ws.batch.inputs_w.cols(),
                x_sub.data.begin() + j * ws.batch.inputs_w.cols());
      std::copy(metric_diag.data.begin() + r * 2 * n,
                metric_diag.data.begin() + (r + 1) * 2 * n,
                metric_sub.data.begin() + j * 2 * n);
    }
    return gauss_newton_vector_product(model.params(), model.net_spec(), x_sub,
                                       Metric::diagonal(std::move(metric_sub)),
                                       v);
  };
  problem.evaluate = [&](const ParamVector& phi) {
    EvalResult ev;
    ev.objective = objective(phi);
    const DiagGaussianParams p = model.predict_whitened(ws.batch.inputs_w, phi);
    // Average KL of the candidate model from the old one, active dims only.
    double kl_acc = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!tn.active(i)) continue;
        const double lsp = p.log_std.at(r, i);
        const double lsq = ws.old_pred.log_std.at(r, i);
        const double vp = std::exp(2.0 * lsp);
        const double vq = std::exp(2.0 * lsq);
        const double dmu = p.mean.at(r, i) - ws.old_pred.mean.at(r, i);
        kl_acc += lsq - lsp + (vp + dmu * dmu) / (2.0 * vq) - 0.5;
      }
    }
    ev.constraint = kl_acc / static_cast<double>(rows);
    return ev;
  };

  SolveStepConfig tr = cfg.tr;
  tr.subsample_seed = derive_seed(cfg.seed, 102);
  auto [phi_new, step_report] = solve_step(problem, tr);
  if (step_report.accepted) model.set_params(std::move(phi_new));
  return step_report;
}

}  // namespace surprise
