#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "surprise/mlp.hpp"
#include "surprise/rng.hpp"

using namespace surprise;

namespace {

Tensor random_tensor(std::size_t rows, std::size_t cols, Rng& rng,
                     double scale = 1.0) {
  Tensor t = Tensor::zeros({rows, cols});
  for (double& v : t.data) v = scale * rng.normal();
  return t;
}

ParamVector random_like(const ParamVector& like, Rng& rng, double scale = 1.0) {
  ParamVector v = ParamVector::zeros_like(like);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = scale * rng.normal();
  return v;
}

}  // namespace

TEST_CASE("tensor shape/data invariant") {
  CHECK_THROWS(Tensor({2, 3}, std::vector<double>(5, 0.0)));
  const Tensor t = Tensor::zeros({2, 3});
  CHECK(t.numel() == 6);
  CHECK(t.all_finite());
}

TEST_CASE("param vector pack/unpack round trip is exact") {
  MlpSpec spec{3, {4}, 2, 7};
  ParamVector params = mlp_init(spec);
  Rng rng(1);
  for (std::size_t i = 0; i < params.size(); ++i) params[i] = rng.normal();
  const auto tensors = params.unpack();
  const ParamVector back = ParamVector::pack(params.layout(), tensors);
  REQUIRE(back.size() == params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    CHECK(back[i] == params[i]);  // bitwise
  }
}

TEST_CASE("mlp_init: parameter count, determinism, zero biases") {
  MlpSpec spec{2, {}, 3, 42};
  const ParamVector a = mlp_init(spec);
  CHECK(a.size() == 9);  // 6 weights + 3 biases

  const ParamVector b = mlp_init(spec);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

  MlpSpec deep{5, {7, 3}, 2, 11};
  const ParamVector p = mlp_init(deep);
  for (const auto& seg : p.layout()) {
    if (seg.name[0] == 'b') {
      for (double v : p.segment(seg.name)) CHECK(v == 0.0);
    }
  }
  // Glorot bound per layer
  const double bound0 = std::sqrt(6.0 / (5 + 7));
  for (double v : p.segment("W0")) CHECK(std::abs(v) <= bound0);
}

TEST_CASE("mlp_forward: zero params, identity, row independence") {
  MlpSpec spec{3, {4}, 2, 0};
  ParamVector zero{mlp_layout(spec)};
  Rng rng(3);
  const Tensor x = random_tensor(5, 3, rng);
  const Tensor y = mlp_forward(zero, spec, x);
  for (double v : y.data) CHECK(v == 0.0);

  MlpSpec lin{3, {}, 3, 0};
  ParamVector ident{mlp_layout(lin)};
  for (std::size_t i = 0; i < 3; ++i) ident.segment("W0")[i * 3 + i] = 1.0;
  const Tensor y2 = mlp_forward(ident, lin, x);
  for (std::size_t i = 0; i < x.numel(); ++i) {
    CHECK(y2.data[i] == doctest::Approx(x.data[i]).epsilon(1e-15));
  }

  // duplicated input row -> duplicated output row
  MlpSpec rspec{3, {6}, 2, 9};
  const ParamVector params = mlp_init(rspec);
  Tensor xx = Tensor::zeros({2, 3});
  for (std::size_t c = 0; c < 3; ++c) {
    xx.at(0, c) = x.at(0, c);
    xx.at(1, c) = x.at(0, c);
  }
  const Tensor yy = mlp_forward(params, rspec, xx);
  for (std::size_t c = 0; c < 2; ++c) CHECK(yy.at(0, c) == yy.at(1, c));
}

TEST_CASE("mlp_forward is invariant to batch splitting") {
  MlpSpec spec{3, {7}, 2, 31};
  const ParamVector params = mlp_init(spec);
  Rng rng(12);
  const Tensor x = random_tensor(9, 3, rng);
  const Tensor full = mlp_forward(params, spec, x);
  for (std::size_t r = 0; r < 9; ++r) {
    Tensor row = Tensor::zeros({1, 3});
    for (std::size_t c = 0; c < 3; ++c) row.at(0, c) = x.at(r, c);
    const Tensor y = mlp_forward(params, spec, row);
    for (std::size_t c = 0; c < 2; ++c) CHECK(y.at(0, c) == full.at(r, c));
  }
}

TEST_CASE("mlp_forward rejects shape mismatch") {
  MlpSpec spec{3, {4}, 2, 0};
  const ParamVector params = mlp_init(spec);
  CHECK_THROWS(mlp_forward(params, spec, Tensor::zeros({2, 4})));
}

TEST_CASE("mlp_backward: zero grad_output and scalar chain rule") {
  MlpSpec spec{2, {3}, 2, 5};
  const ParamVector params = mlp_init(spec);
  Rng rng(4);
  const Tensor x = random_tensor(3, 2, rng);
  const auto grads = mlp_backward(params, spec, x, Tensor::zeros({3, 2}));
  for (double v : grads.grad_params.data()) CHECK(v == 0.0);
  for (double v : grads.grad_x.data) CHECK(v == 0.0);

  // y = w x, grad_output = 1 -> grad_w = x
  MlpSpec scalar{1, {}, 1, 0};
  ParamVector w{mlp_layout(scalar)};
  w.segment("W0")[0] = 0.7;
  Tensor xs({1, 1}, {1.37});
  const auto g = mlp_backward(w, scalar, xs, Tensor::full({1, 1}, 1.0));
  CHECK(g.grad_params.segment("W0")[0] == doctest::Approx(1.37));
  CHECK(g.grad_params.segment("b0")[0] == doctest::Approx(1.0));
  CHECK(g.grad_x.data[0] == doctest::Approx(0.7));
}

TEST_CASE("mlp_backward matches central finite differences") {
  MlpSpec spec{3, {5, 4}, 2, 21};
  ParamVector params = mlp_init(spec);
  Rng rng(6);
  const Tensor x = random_tensor(4, 3, rng);
  const Tensor gout = random_tensor(4, 2, rng);

  auto loss = [&](const ParamVector& p) {
    const Tensor y = mlp_forward(p, spec, x);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.numel(); ++i) acc += gout.data[i] * y.data[i];
    return acc;
  };
  const ParamVector analytic = mlp_backward(params, spec, x, gout).grad_params;
  const ParamVector fd = oracles::fd_gradient(loss, params);
  CHECK(oracles::max_rel_err(analytic, fd, 1e-6) < 1e-5);
}

TEST_CASE("gradient correctness across random nets") {
  Rng rng(77);
  for (int trial = 0; trial < 8; ++trial) {
    MlpSpec spec;
    spec.input_dim = 1 + rng.below(4);
    spec.output_dim = 1 + rng.below(3);
    if (rng.uniform() < 0.7) spec.hidden = {1 + rng.below(8)};
    if (rng.uniform() < 0.3) spec.hidden.push_back(1 + rng.below(5));
    spec.seed = rng.u64();
    ParamVector params = mlp_init(spec);
    REQUIRE(params.size() <= 200);
    const std::size_t batch = 1 + rng.below(5);
    const Tensor x = random_tensor(batch, spec.input_dim, rng);
    const Tensor gout = random_tensor(batch, spec.output_dim, rng);
    auto loss = [&](const ParamVector& p) {
      const Tensor y = mlp_forward(p, spec, x);
      double acc = 0.0;
      for (std::size_t i = 0; i < y.numel(); ++i) {
        acc += gout.data[i] * y.data[i];
      }
      return acc;
    };
    const ParamVector analytic = mlp_backward(params, spec, x, gout).grad_params;
    const ParamVector fd = oracles::fd_gradient(loss, params);
    CHECK(oracles::max_rel_err(analytic, fd, 1e-6) < 1e-4);
  }
}

TEST_CASE("gnvp: zero tangent, explicit matrix oracle, symmetry, PSD") {
  Rng rng(8);

  SUBCASE("v = 0 -> 0") {
    MlpSpec spec{2, {3}, 2, 1};
    const ParamVector params = mlp_init(spec);
    const Tensor x = random_tensor(4, 2, rng);
    const Metric m = Metric::identity(4, 2);
    const ParamVector out = gauss_newton_vector_product(
        params, spec, x, m, ParamVector::zeros_like(params));
    for (double v : out.data()) CHECK(v == 0.0);
  }

  SUBCASE("linear 5-parameter net vs explicitly built J^T M J") {
    MlpSpec spec{4, {}, 1, 2};  // 4 weights + 1 bias
    ParamVector params = mlp_init(spec);
    const std::size_t batch = 6;
    const Tensor x = random_tensor(batch, 4, rng);
    const Metric m = Metric::identity(batch, 1);

    // Build J by finite differences of the outputs w.r.t. the parameters.
    Eigen::MatrixXd J(batch, params.size());
    for (std::size_t j = 0; j < params.size(); ++j) {
      const double h = 1e-6 * (1.0 + std::abs(params[j]));
      ParamVector p = params;
      p[j] += h;
      const Tensor yp = mlp_forward(p, spec, x);
      p[j] = params[j] - h;
      const Tensor ym = mlp_forward(p, spec, x);
      for (std::size_t r = 0; r < batch; ++r) {
        J(r, j) = (yp.data[r] - ym.data[r]) / (2.0 * h);
      }
    }
    const Eigen::MatrixXd A = J.transpose() * J / static_cast<double>(batch);
    const ParamVector v = random_like(params, rng);
    Eigen::VectorXd ve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) ve(i) = v[i];
    const Eigen::VectorXd expected = A * ve;
    const ParamVector got = gauss_newton_vector_product(params, spec, x, m, v);
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i] == doctest::Approx(expected(i)).epsilon(1e-5));
    }
  }

  SUBCASE("operator symmetry and positive semidefiniteness") {
    MlpSpec spec{3, {6}, 2, 13};
    const ParamVector params = mlp_init(spec);
    const std::size_t batch = 5;
    const Tensor x = random_tensor(batch, 3, rng);
    Tensor diag = Tensor::zeros({batch, 2});
    for (double& v : diag.data) v = 0.1 + rng.uniform();
    const Metric m = Metric::diagonal(std::move(diag));
    auto av = [&](const ParamVector& t) {
      return gauss_newton_vector_product(params, spec, x, m, t);
    };
    for (int t = 0; t < 10; ++t) {
      const ParamVector u = random_like(params, rng);
      const ParamVector v = random_like(params, rng);
      CHECK(dot(u, av(v)) == doctest::Approx(dot(v, av(u))).epsilon(1e-8));
    }
    for (int t = 0; t < 100; ++t) {
      const ParamVector v = random_like(params, rng);
      CHECK(dot(v, av(v)) >= -1e-10);
    }
  }
}
