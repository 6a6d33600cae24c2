#include "surprise/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace surprise {

namespace {
std::vector<ParamSegment> policy_layout(const PolicySpec& spec,
                                        const MlpSpec& net_spec) {
  auto layout = mlp_layout(net_spec);
  if (spec.kind == PolicySpec::Kind::kGaussian) {
    layout.push_back({"log_std", {spec.act_dim}, 0, 0});
  }
  return layout;
}
}  // namespace

Policy::Policy(PolicySpec spec) : spec_(std::move(spec)), obs_norm_(spec_.obs_dim) {
  require(spec_.obs_dim >= 1 && spec_.act_dim >= 1, "PolicySpec: bad dims");
  net_spec_.input_dim = spec_.obs_dim;
  net_spec_.hidden = spec_.hidden;
  net_spec_.output_dim = spec_.act_dim;
  net_spec_.seed = spec_.seed;

  ParamVector net_init = mlp_init(net_spec_);
  // Zero the output layer: the initial policy is pure exploration noise
  // (N(0, sigma) or uniform logits), not a random function of the state.
  const std::size_t last = net_spec_.layer_count() - 1;
  for (double& w : net_init.segment("W" + std::to_string(last))) w = 0.0;
  params_ = ParamVector{policy_layout(spec_, net_spec_)};
  add_net_part(net_init, params_);
  if (spec_.kind == PolicySpec::Kind::kGaussian) {
    auto ls = params_.segment("log_std");
    for (double& v : ls) v = spec_.init_log_std;
  }
}

void Policy::set_params(ParamVector params) {
  require(params.size() == params_.size(), "Policy::set_params: size mismatch");
  params_ = std::move(params);
}

void Policy::observe(const Tensor& states) {
  const std::size_t n = states.rows();
  for (std::size_t r = 0; r < n; ++r) {
    obs_norm_.observe({states.data.data() + r * spec_.obs_dim, spec_.obs_dim});
  }
}

Tensor Policy::whiten(const Tensor& states) const {
  const std::size_t n = states.rows();
  Tensor out = Tensor::zeros({n, spec_.obs_dim});
  for (std::size_t r = 0; r < n; ++r) {
    obs_norm_.apply({states.data.data() + r * spec_.obs_dim, spec_.obs_dim},
                    {out.data.data() + r * spec_.obs_dim, spec_.obs_dim});
  }
  return out;
}

PolicyDist Policy::dist(const Tensor& states_w,
                        const ParamVector& params) const {
  Tensor out = mlp_forward(params, net_spec_, states_w);
  if (spec_.kind == PolicySpec::Kind::kCategorical) {
    return CategoricalParams{std::move(out)};
  }
  const std::size_t n = states_w.rows();
  DiagGaussianParams p;
  p.mean = std::move(out);
  p.log_std = Tensor::zeros({n, spec_.act_dim});
  auto ls = params.segment("log_std");
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < spec_.act_dim; ++i) {
      p.log_std.at(r, i) = ls[i];
    }
  }
  p.clamp_log_std(spec_.log_std_min, spec_.log_std_max);
  return p;
}

PolicyDist Policy::dist(const Tensor& states_w) const {
  return dist(states_w, params_);
}

Policy::ActionSample Policy::act(std::span<const double> obs,
                                 std::span<const double> action_low,
                                 std::span<const double> action_high,
                                 Rng& rng) const {
  Tensor s({1, spec_.obs_dim},
           std::vector<double>(obs.begin(), obs.end()));
  const Tensor sw = whiten(s);
  const PolicyDist d = dist(sw);
  ActionSample out;
  if (spec_.kind == PolicySpec::Kind::kCategorical) {
    const auto& cat = std::get<CategoricalParams>(d);
    out.index = categorical_sample_row(cat, 0, rng);
    out.raw.assign(spec_.act_dim, 0.0);
    out.raw[out.index] = 1.0;
    out.exec = out.raw;
  } else {
    const auto& g = std::get<DiagGaussianParams>(d);
    out.raw.resize(spec_.act_dim);
    out.exec.resize(spec_.act_dim);
    for (std::size_t i = 0; i < spec_.act_dim; ++i) {
      out.raw[i] = g.mean.at(0, i) + std::exp(g.log_std.at(0, i)) * rng.normal();
      out.exec[i] = std::clamp(out.raw[i], action_low[i], action_high[i]);
    }
  }
  return out;
}

namespace {
std::vector<int> onehot_to_indices(const Tensor& actions) {
  const std::size_t n = actions.rows();
  const std::size_t m = actions.cols();
  std::vector<int> idx(n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < m; ++i) {
      if (actions.at(r, i) > actions.at(r, best)) best = i;
    }
    idx[r] = static_cast<int>(best);
  }
  return idx;
}
}  // namespace

Tensor Policy::log_probs(const Tensor& states_w, const Tensor& actions,
                         const ParamVector& params) const {
  const PolicyDist d = dist(states_w, params);
  if (spec_.kind == PolicySpec::Kind::kCategorical) {
    return categorical_log_prob(std::get<CategoricalParams>(d),
                                onehot_to_indices(actions));
  }
  return gaussian_log_prob(std::get<DiagGaussianParams>(d), actions);
}

double Policy::mean_kl(const Tensor& states_w, const ParamVector& old_params,
                       const ParamVector& new_params) const {
  const PolicyDist d_old = dist(states_w, old_params);
  const PolicyDist d_new = dist(states_w, new_params);
  Tensor kl;
  if (spec_.kind == PolicySpec::Kind::kCategorical) {
    kl = categorical_kl(std::get<CategoricalParams>(d_old),
                        std::get<CategoricalParams>(d_new));
  } else {
    kl = gaussian_kl(std::get<DiagGaussianParams>(d_old),
                     std::get<DiagGaussianParams>(d_new));
  }
  double acc = 0.0;
  for (double v : kl.data) acc += v;
  return acc / static_cast<double>(kl.numel());
}

ParamVector Policy::net_part(const ParamVector& full) const {
  ParamVector net{mlp_layout(net_spec_)};
  for (const auto& seg : net.layout()) {
    auto dst = net.segment(seg.name);
    auto src = full.segment(seg.name);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return net;
}

void Policy::add_net_part(const ParamVector& net, ParamVector& full) const {
  for (const auto& seg : net.layout()) {
    auto src = net.segment(seg.name);
    auto dst = full.segment(seg.name);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
  }
}

ParamVector Policy::weighted_score_gradient(const Tensor& states_w,
                                            const Tensor& actions,
                                            std::span<const double> coeff,
                                            const ParamVector& params) const {
  const std::size_t n = states_w.rows();
  require(coeff.size() == n, "weighted_score_gradient: coeff length mismatch");
  const double inv_n = 1.0 / static_cast<double>(n);
  const PolicyDist d = dist(states_w, params);
  ParamVector grad = ParamVector::zeros_like(params_);

  Tensor g_out = Tensor::zeros({n, spec_.act_dim});
  if (spec_.kind == PolicySpec::Kind::kCategorical) {
    const auto& cat = std::get<CategoricalParams>(d);
    const Tensor probs = categorical_probs(cat);
    const auto idx = onehot_to_indices(actions);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t i = 0; i < spec_.act_dim; ++i) {
        const double onehot = (static_cast<int>(i) == idx[r]) ? 1.0 : 0.0;
        g_out.at(r, i) = coeff[r] * (onehot - probs.at(r, i)) * inv_n;
      }
    }
  } else {
    const auto& g = std::get<DiagGaussianParams>(d);
    auto gls = grad.segment("log_std");
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t i = 0; i < spec_.act_dim; ++i) {
        const double sigma = std::exp(g.log_std.at(r, i));
        const double dlt = actions.at(r, i) - g.mean.at(r, i);
        g_out.at(r, i) = coeff[r] * dlt / (sigma * sigma) * inv_n;
        gls[i] += coeff[r] * (dlt * dlt / (sigma * sigma) - 1.0) * inv_n;
      }
    }
  }
  const ParamVector net_grad =
      mlp_backward(params, net_spec_, states_w, g_out).grad_params;
  add_net_part(net_grad, grad);
  return grad;
}

ParamVector Policy::fisher_vector_product(const Tensor& states_w,
                                          const ParamVector& params,
                                          const ParamVector& v) const {
  const PolicyDist d = dist(states_w, params);
  ParamVector out = ParamVector::zeros_like(params_);
  const ParamVector v_net = net_part(v);
  if (spec_.kind == PolicySpec::Kind::kCategorical) {
    const Metric metric = fisher_metric(std::get<CategoricalParams>(d));
    const ParamVector av = gauss_newton_vector_product(
        net_part(params), net_spec_, states_w, metric, v_net);
    add_net_part(av, out);
    return out;
  }
  const auto& g = std::get<DiagGaussianParams>(d);
  const std::size_t n = states_w.rows();
  Tensor diag = Tensor::zeros({n, spec_.act_dim});
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < spec_.act_dim; ++i) {
      const double sigma = std::exp(g.log_std.at(r, i));
      diag.at(r, i) = 1.0 / (sigma * sigma);
    }
  }
  const ParamVector av = gauss_newton_vector_product(
      net_part(params), net_spec_, states_w, Metric::diagonal(std::move(diag)),
      v_net);
  add_net_part(av, out);
  // log_std block of the Gaussian KL Hessian is 2*I per row.
  auto vls = v.segment("log_std");
  auto ols = out.segment("log_std");
  for (std::size_t i = 0; i < spec_.act_dim; ++i) ols[i] = 2.0 * vls[i];
  return out;
}

NeuralValueFn::NeuralValueFn(std::size_t obs_dim,
                             std::vector<std::size_t> hidden,
                             std::uint64_t seed)
    : obs_norm_(obs_dim), ret_norm_(1) {
  net_spec_.input_dim = obs_dim;
  net_spec_.hidden = std::move(hidden);
  net_spec_.output_dim = 1;
  net_spec_.seed = seed;
  params_ = mlp_init(net_spec_);
  // Zero the output layer so predictions start at exactly zero. A fresh value
  // net must not inject advantage noise into reward-free batches; with it,
  // "no bonus, no reward" means a zero gradient and a genuinely idle policy.
  const std::size_t last = net_spec_.layer_count() - 1;
  for (double& w : params_.segment("W" + std::to_string(last))) w = 0.0;
}

void NeuralValueFn::observe(const Tensor& states,
                            std::span<const double> returns) {
  const std::size_t n = states.rows();
  for (std::size_t r = 0; r < n; ++r) {
    obs_norm_.observe(
        {states.data.data() + r * net_spec_.input_dim, net_spec_.input_dim});
  }
  for (double v : returns) ret_norm_.observe({&v, 1});
}

void NeuralValueFn::freeze() {
  obs_norm_.freeze();
  ret_norm_.freeze();
}

Tensor NeuralValueFn::whiten(const Tensor& states) const {
  const std::size_t n = states.rows();
  const std::size_t d = net_spec_.input_dim;
  Tensor out = Tensor::zeros({n, d});
  for (std::size_t r = 0; r < n; ++r) {
    obs_norm_.apply({states.data.data() + r * d, d},
                    {out.data.data() + r * d, d});
  }
  return out;
}

Tensor NeuralValueFn::predict_whitened(const Tensor& states_w,
                                       const ParamVector& params) const {
  return mlp_forward(params, net_spec_, states_w);
}

std::vector<double> NeuralValueFn::predict(const Tensor& states) const {
  const Tensor vw = predict_whitened(whiten(states), params_);
  std::vector<double> out(vw.numel());
  const double m = target_mean();
  const double s = target_scale();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = m + s * vw.data[i];
  return out;
}

double NeuralValueFn::target_mean() const { return ret_norm_.mean()[0]; }
double NeuralValueFn::target_scale() const { return ret_norm_.scale()[0]; }

LinearTVValueFn::LinearTVValueFn(std::size_t obs_dim, std::size_t horizon)
    : obs_dim_(obs_dim), horizon_(horizon == 0 ? 1 : horizon) {
  coef_.assign(feature_dim(), 0.0);
}

void LinearTVValueFn::set_coefficients(std::vector<double> coef) {
  require(coef.size() == feature_dim(),
          "LinearTVValueFn: coefficient length mismatch");
  coef_ = std::move(coef);
}

void LinearTVValueFn::features(std::span<const double> state, std::size_t t,
                               std::span<double> out) const {
  const double u = static_cast<double>(t) / static_cast<double>(horizon_);
  std::size_t j = 0;
  for (std::size_t i = 0; i < obs_dim_; ++i) out[j++] = state[i];
  for (std::size_t i = 0; i < obs_dim_; ++i) out[j++] = state[i] * state[i];
  out[j++] = u;
  out[j++] = u * u;
  out[j++] = u * u * u;
  out[j++] = 1.0;
}

double LinearTVValueFn::predict(std::span<const double> state,
                                std::size_t t) const {
  std::vector<double> f(feature_dim());
  features(state, t, f);
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += coef_[i] * f[i];
  return acc;
}

}  // namespace surprise
