#include "surprise/mlp.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "surprise/rng.hpp"

namespace surprise {

namespace {

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;
using ConstMapVec = Eigen::Map<const Eigen::VectorXd>;

std::vector<std::size_t> layer_dims(const MlpSpec& spec) {
  std::vector<std::size_t> dims;
  dims.push_back(spec.input_dim);
  for (std::size_t h : spec.hidden) dims.push_back(h);
  dims.push_back(spec.output_dim);
  return dims;
}

void check_spec(const MlpSpec& spec) {
  require(spec.input_dim >= 1 && spec.output_dim >= 1,
          "MlpSpec: dims must be >= 1");
  for (std::size_t h : spec.hidden)
    require(h >= 1, "MlpSpec: hidden sizes must be >= 1");
}

}  // namespace

Metric Metric::diagonal(Tensor values) {
  Metric m;
  m.kind = Kind::kDiagonal;
  m.out_dim = values.cols();
  m.values = std::move(values);
  return m;
}

Metric Metric::dense(Tensor values, std::size_t out_dim) {
  require(values.cols() == out_dim * out_dim,
          "Metric::dense: expected out_dim^2 columns");
  Metric m;
  m.kind = Kind::kDense;
  m.out_dim = out_dim;
  m.values = std::move(values);
  return m;
}

Metric Metric::identity(std::size_t batch, std::size_t out_dim) {
  return diagonal(Tensor::full({batch, out_dim}, 1.0));
}

void Metric::apply_row(std::size_t r, const double* in, double* out) const {
  const std::size_t n = out_dim;
  if (kind == Kind::kDiagonal) {
    const double* d = values.data.data() + r * n;
    for (std::size_t i = 0; i < n; ++i) out[i] = d[i] * in[i];
  } else {
    const double* m = values.data.data() + r * n * n;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += m[i * n + j] * in[j];
      out[i] = acc;
    }
  }
}

std::vector<ParamSegment> mlp_layout(const MlpSpec& spec) {
  check_spec(spec);
  const auto dims = layer_dims(spec);
  std::vector<ParamSegment> layout;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    layout.push_back({"W" + std::to_string(l), {dims[l + 1], dims[l]}, 0, 0});
    layout.push_back({"b" + std::to_string(l), {dims[l + 1]}, 0, 0});
  }
  return layout;
}

ParamVector mlp_init(const MlpSpec& spec) {
  ParamVector params{mlp_layout(spec)};
  const auto dims = layer_dims(spec);
  Rng rng(spec.seed);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const double fan_in = static_cast<double>(dims[l]);
    const double fan_out = static_cast<double>(dims[l + 1]);
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    auto w = params.segment("W" + std::to_string(l));
    for (double& v : w) v = rng.uniform(-bound, bound);
    // biases stay zero
  }
  return params;
}

Tensor mlp_forward(const ParamVector& params, const MlpSpec& spec,
                   const Tensor& x, MlpActivations* cache) {
  check_spec(spec);
  require(x.rank() == 2 && x.cols() == spec.input_dim,
          "mlp_forward: input shape mismatch");
  const auto dims = layer_dims(spec);
  const std::size_t batch = x.rows();
  const std::size_t layers = spec.layer_count();

  if (cache) {
    cache->h.clear();
    cache->h.push_back(x);
  }

  Tensor h = x;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in_d = dims[l];
    const std::size_t out_d = dims[l + 1];
    auto w = params.segment("W" + std::to_string(l));
    auto b = params.segment("b" + std::to_string(l));
    Tensor z = Tensor::zeros({batch, out_d});
    ConstMapMat H(h.data.data(), batch, in_d);
    ConstMapMat W(w.data(), out_d, in_d);
    ConstMapVec B(b.data(), out_d);
    MapMat Z(z.data.data(), batch, out_d);
    Z.noalias() = H * W.transpose();
    Z.rowwise() += B.transpose();
    if (l + 1 < layers) {
      Z = Z.array().tanh();
    }
    h = std::move(z);
    if (cache) cache->h.push_back(h);
  }
  return h;
}

MlpGradients mlp_backward(const ParamVector& params, const MlpSpec& spec,
                          const Tensor& x, const Tensor& grad_output) {
  MlpActivations cache;
  mlp_forward(params, spec, x, &cache);
  return mlp_backward(params, spec, cache, grad_output);
}

MlpGradients mlp_backward(const ParamVector& params, const MlpSpec& spec,
                          const MlpActivations& cache,
                          const Tensor& grad_output, bool want_grad_x) {
  const auto dims = layer_dims(spec);
  const std::size_t layers = spec.layer_count();
  const std::size_t batch = cache.h.front().rows();
  require(grad_output.rank() == 2 && grad_output.rows() == batch &&
              grad_output.cols() == spec.output_dim,
          "mlp_backward: grad_output shape mismatch");

  MlpGradients out;
  out.grad_params = ParamVector{mlp_layout(spec)};

  // G holds dLoss/d(pre-activation of layer l) while walking backwards.
  RowMat G = ConstMapMat(grad_output.data.data(), batch, spec.output_dim);
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t in_d = dims[l];
    const std::size_t out_d = dims[l + 1];
    auto w = params.segment("W" + std::to_string(l));
    ConstMapMat W(w.data(), out_d, in_d);
    ConstMapMat Hprev(cache.h[l].data.data(), batch, in_d);

    auto gw = out.grad_params.segment("W" + std::to_string(l));
    auto gb = out.grad_params.segment("b" + std::to_string(l));
    MapMat GW(gw.data(), out_d, in_d);
    Eigen::Map<Eigen::VectorXd> GB(gb.data(), out_d);
    GW.noalias() = G.transpose() * Hprev;
    GB = G.colwise().sum().transpose();

    if (l > 0) {
      // h[l] is the post-tanh activation feeding this layer; tanh' = 1 - h^2.
      RowMat Gin = G * W;
      ConstMapMat Hact(cache.h[l].data.data(), batch, dims[l]);
      G = Gin.cwiseProduct((1.0 - Hact.array().square()).matrix());
    } else if (want_grad_x) {
      out.grad_x = Tensor::zeros({batch, spec.input_dim});
      MapMat GX(out.grad_x.data.data(), batch, spec.input_dim);
      GX.noalias() = G * W;
    }
  }
  if (!want_grad_x && out.grad_x.numel() == 0) {
    out.grad_x = Tensor::zeros({0, 0});
  }
  return out;
}

Tensor mlp_jvp(const ParamVector& params, const MlpSpec& spec,
               const MlpActivations& cache, const ParamVector& v) {
  const auto dims = layer_dims(spec);
  const std::size_t layers = spec.layer_count();
  const std::size_t batch = cache.h.front().rows();

  RowMat T = RowMat::Zero(batch, dims[0]);  // tangent of h[0] (input fixed)
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in_d = dims[l];
    const std::size_t out_d = dims[l + 1];
    ConstMapMat W(params.segment("W" + std::to_string(l)).data(), out_d, in_d);
    ConstMapMat dW(v.segment("W" + std::to_string(l)).data(), out_d, in_d);
    ConstMapVec dB(v.segment("b" + std::to_string(l)).data(), out_d);
    ConstMapMat Hprev(cache.h[l].data.data(), batch, in_d);

    RowMat Tz = T * W.transpose() + Hprev * dW.transpose();
    Tz.rowwise() += dB.transpose();
    if (l + 1 < layers) {
      ConstMapMat Hact(cache.h[l + 1].data.data(), batch, out_d);
      T = Tz.cwiseProduct((1.0 - Hact.array().square()).matrix());
    } else {
      T = std::move(Tz);
    }
  }

  Tensor out = Tensor::zeros({batch, spec.output_dim});
  MapMat(out.data.data(), batch, spec.output_dim) = T;
  return out;
}

ParamVector gauss_newton_vector_product(const ParamVector& params,
                                        const MlpSpec& spec, const Tensor& x,
                                        const Metric& metric,
                                        const ParamVector& v) {
  require(v.size() == params.size(), "gnvp: tangent layout mismatch");
  const std::size_t batch = x.rows();
  require(metric.out_dim == spec.output_dim &&
              metric.values.rows() == batch,
          "gnvp: metric shape mismatch");

  MlpActivations cache;
  mlp_forward(params, spec, x, &cache);
  Tensor u = mlp_jvp(params, spec, cache, v);

  Tensor w = Tensor::zeros({batch, spec.output_dim});
  for (std::size_t r = 0; r < batch; ++r) {
    metric.apply_row(r, u.data.data() + r * spec.output_dim,
                     w.data.data() + r * spec.output_dim);
  }
  const double inv_batch = 1.0 / static_cast<double>(batch);
  for (double& val : w.data) val *= inv_batch;

  return mlp_backward(params, spec, cache, w, /*want_grad_x=*/false)
      .grad_params;
}

}  // namespace surprise
