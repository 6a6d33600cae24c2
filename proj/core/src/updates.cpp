#include "surprise/updates.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "surprise/rng.hpp"

namespace surprise {

StepReport trpo_step(Policy& policy, const TrajectoryBatch& batch,
                     const TrpoConfig& cfg) {
  require(batch.advantages.size() == batch.total_steps,
          "trpo_step: advantages not computed");
  const Tensor states_w = policy.whiten(batch.states_matrix());
  const Tensor actions = batch.actions_matrix();
  const ParamVector theta_old = policy.params();
  const Tensor lp_old = policy.log_probs(states_w, actions, theta_old);
  const std::size_t n = batch.total_steps;

  TrustRegionProblem problem;
  problem.theta_old = theta_old;
  problem.delta = cfg.delta_kl;
  problem.dataset_size = n;
  problem.gradient = [&]() {
    // At theta_old the likelihood ratio is 1, so the gradient reduces to the
    // advantage-weighted score function.
    return policy.weighted_score_gradient(states_w, actions, batch.advantages,
                                          theta_old);
  };
  problem.curvature_vp = [&](std::span<const std::size_t> rows,
                             const ParamVector& v) {
    if (rows.size() == n) {
      return policy.fisher_vector_product(states_w, theta_old, v);
    }
    const std::size_t obs = states_w.cols();
    Tensor sub = Tensor::zeros({rows.size(), obs});
    for (std::size_t j = 0; j < rows.size(); ++j) {
      std::copy(states_w.data.begin() + rows[j] * obs,
                states_w.data.begin() + (rows[j] + 1) * obs,
                sub.data.begin() + j * obs);
    }
    return policy.fisher_vector_product(sub, theta_old, v);
  };
  problem.evaluate = [&](const ParamVector& theta) {
    const Tensor lp_new = policy.log_probs(states_w, actions, theta);
    double obj = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      obj += std::exp(lp_new.data[r] - lp_old.data[r]) * batch.advantages[r];
    }
    EvalResult ev;
    ev.objective = obj / static_cast<double>(n);
    ev.constraint = policy.mean_kl(states_w, theta_old, theta);
    return ev;
  };

  SolveStepConfig tr = cfg.tr;
  tr.subsample_seed = derive_seed(cfg.seed, 31);
  auto [theta_new, report] = solve_step(problem, tr);
  if (report.accepted) policy.set_params(std::move(theta_new));
  return report;
}

StepReport fit_value_nn(NeuralValueFn& vf, const TrajectoryBatch& batch,
                        const ValueFitConfig& cfg) {
  require(batch.total_steps >= 1, "fit_value_nn: empty batch");
  require(batch.returns.size() == batch.total_steps,
          "fit_value_nn: returns not computed");
  const Tensor states = batch.states_matrix();
  vf.observe(states, batch.returns);
  vf.freeze();
  const Tensor states_w = vf.whiten(states);
  const std::size_t n = batch.total_steps;

  // Whitened regression targets.
  const double m = vf.target_mean();
  const double s = vf.target_scale();
  std::vector<double> z(n);
  for (std::size_t r = 0; r < n; ++r) z[r] = (batch.returns[r] - m) / s;

  const ParamVector theta_old = vf.params();
  const Tensor v_old = vf.predict_whitened(states_w, theta_old);

  auto mse_half = [&](const Tensor& v) {
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      acc += 0.5 * (v.data[r] - z[r]) * (v.data[r] - z[r]);
    }
    return acc / static_cast<double>(n);
  };

  TrustRegionProblem problem;
  problem.theta_old = theta_old;
  problem.delta = cfg.delta;
  problem.dataset_size = n;
  problem.gradient = [&]() {
    Tensor g_out = Tensor::zeros({n, 1});
    for (std::size_t r = 0; r < n; ++r) {
      g_out.data[r] = -(v_old.data[r] - z[r]) / static_cast<double>(n);
    }
    return mlp_backward(theta_old, vf.net_spec(), states_w, g_out).grad_params;
  };
  problem.curvature_vp = [&](std::span<const std::size_t> rows,
                             const ParamVector& v) {
    const std::size_t obs = states_w.cols();
    Tensor sub = Tensor::zeros({rows.size(), obs});
    for (std::size_t j = 0; j < rows.size(); ++j) {
      std::copy(states_w.data.begin() + rows[j] * obs,
                states_w.data.begin() + (rows[j] + 1) * obs,
                sub.data.begin() + j * obs);
    }
    return gauss_newton_vector_product(
        theta_old, vf.net_spec(), sub,
        Metric::identity(rows.size(), 1), v);
  };
  problem.evaluate = [&](const ParamVector& theta) {
    const Tensor v = vf.predict_whitened(states_w, theta);
    EvalResult ev;
    ev.objective = -mse_half(v);
    double drift = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      drift += 0.5 * (v.data[r] - v_old.data[r]) * (v.data[r] - v_old.data[r]);
    }
    ev.constraint = drift / static_cast<double>(n);
    return ev;
  };

  SolveStepConfig tr = cfg.tr;
  tr.subsample_seed = derive_seed(cfg.seed, 32);
  auto [theta_new, report] = solve_step(problem, tr);
  if (report.accepted) vf.set_params(std::move(theta_new));
  return report;
}

void fit_value_linear_timevarying(LinearTVValueFn& vf,
                                  const TrajectoryBatch& batch) {
  require(batch.total_steps >= 1, "fit_value_linear_timevarying: empty batch");
  require(batch.returns.size() == batch.total_steps,
          "fit_value_linear_timevarying: returns not computed");
  const std::size_t d = vf.feature_dim();
  const std::size_t n = batch.total_steps;
  Eigen::MatrixXd F(n, d);
  Eigen::VectorXd y(n);
  std::vector<double> row(d);
  std::size_t r = 0;
  for (const auto& ep : batch.episodes) {
    for (std::size_t t = 0; t < ep.length(); ++t, ++r) {
      vf.features(ep.states[t], t, row);
      for (std::size_t j = 0; j < d; ++j) F(r, j) = row[j];
      y(r) = batch.returns[r];
    }
  }
  Eigen::MatrixXd gram = F.transpose() * F;
  gram.diagonal().array() += 1e-8;  // ridge against rank deficiency
  const Eigen::VectorXd beta = gram.ldlt().solve(F.transpose() * y);
  std::vector<double> coef(d);
  for (std::size_t j = 0; j < d; ++j) coef[j] = beta(j);
  vf.set_coefficients(std::move(coef));
}

}  // namespace surprise
