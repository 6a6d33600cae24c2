#ifndef SURPRISE_MLP_HPP_
#define SURPRISE_MLP_HPP_

#include <cstdint>
#include <vector>

#include "surprise/param_vector.hpp"
#include "surprise/tensor.hpp"

namespace surprise {

// Feed-forward fully-connected network with tanh hidden units and a linear
// output layer. hidden may be empty (pure linear model).
struct MlpSpec {
  std::size_t input_dim = 1;
  std::vector<std::size_t> hidden;
  std::size_t output_dim = 1;
  std::uint64_t seed = 0;

  std::size_t layer_count() const { return hidden.size() + 1; }
};

// Per-row PSD metric in network output space. Diagonal form stores one row of
// diagonal entries per batch row; dense form stores a full out x out matrix
// per batch row.
struct Metric {
  enum class Kind { kDiagonal, kDense };
  Kind kind = Kind::kDiagonal;
  Tensor values;  // diagonal: [batch, out]; dense: [batch, out*out] row-major

  static Metric diagonal(Tensor values);
  static Metric dense(Tensor values, std::size_t out_dim);
  static Metric identity(std::size_t batch, std::size_t out_dim);

  std::size_t out_dim = 0;
  // out_row = M_r * in_row
  void apply_row(std::size_t r, const double* in, double* out) const;
};

std::vector<ParamSegment> mlp_layout(const MlpSpec& spec);

// Glorot-uniform weights, zero biases; deterministic given spec.seed.
ParamVector mlp_init(const MlpSpec& spec);

// Post-activation values per layer; h[0] is the input, h[L] the output.
struct MlpActivations {
  std::vector<Tensor> h;
};

Tensor mlp_forward(const ParamVector& params, const MlpSpec& spec,
                   const Tensor& x, MlpActivations* cache = nullptr);

struct MlpGradients {
  ParamVector grad_params;
  Tensor grad_x;
};

// Exact reverse-mode gradient of sum(grad_output .* forward(x)).
MlpGradients mlp_backward(const ParamVector& params, const MlpSpec& spec,
                          const Tensor& x, const Tensor& grad_output);
// Variant reusing activations from a prior forward pass over the same x.
MlpGradients mlp_backward(const ParamVector& params, const MlpSpec& spec,
                          const MlpActivations& cache,
                          const Tensor& grad_output, bool want_grad_x = true);

// Forward-mode directional derivative of the outputs along a parameter
// tangent v: returns J*v per row.
Tensor mlp_jvp(const ParamVector& params, const MlpSpec& spec,
               const MlpActivations& cache, const ParamVector& v);

// (1/batch) * sum_rows J_r^T M_r J_r v. Exact curvature for KL-style
// constraints at the expansion point; PSD by construction.
ParamVector gauss_newton_vector_product(const ParamVector& params,
                                        const MlpSpec& spec, const Tensor& x,
                                        const Metric& metric,
                                        const ParamVector& v);

}  // namespace surprise

#endif  // SURPRISE_MLP_HPP_
