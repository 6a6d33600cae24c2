#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "surprise/dist.hpp"

using namespace surprise;

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;

DiagGaussianParams random_gaussian(std::size_t batch, std::size_t n, Rng& rng) {
  DiagGaussianParams p;
  p.mean = Tensor::zeros({batch, n});
  p.log_std = Tensor::zeros({batch, n});
  for (double& v : p.mean.data) v = rng.normal();
  for (double& v : p.log_std.data) v = rng.uniform(-1.5, 0.8);
  return p;
}
}  // namespace

TEST_CASE("gaussian_log_prob closed-form values") {
  DiagGaussianParams p;
  p.mean = Tensor::zeros({1, 1});
  p.log_std = Tensor::zeros({1, 1});
  const Tensor lp = gaussian_log_prob(p, Tensor::zeros({1, 1}));
  CHECK(lp.data[0] == doctest::Approx(-0.5 * kLog2Pi).epsilon(1e-12));
  CHECK(lp.data[0] == doctest::Approx(-0.9189385332046727).epsilon(1e-12));

  // x = mu with arbitrary sigma: -sum log sigma - (n/2) log 2pi
  Rng rng(2);
  const std::size_t n = 4;
  DiagGaussianParams q = random_gaussian(3, n, rng);
  const Tensor lp2 = gaussian_log_prob(q, q.mean);
  for (std::size_t r = 0; r < 3; ++r) {
    double expect = -0.5 * n * kLog2Pi;
    for (std::size_t i = 0; i < n; ++i) expect -= q.log_std.at(r, i);
    CHECK(lp2.data[r] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("surprisal expansion identity") {
  Rng rng(3);
  const std::size_t batch = 16, n = 5;
  const DiagGaussianParams p = random_gaussian(batch, n, rng);
  Tensor x = Tensor::zeros({batch, n});
  for (double& v : x.data) v = rng.normal(0.0, 2.0);
  const Tensor lp = gaussian_log_prob(p, x);
  for (std::size_t r = 0; r < batch; ++r) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sigma = std::exp(p.log_std.at(r, i));
      const double d = x.at(r, i) - p.mean.at(r, i);
      sum += d * d / (2.0 * sigma * sigma) + p.log_std.at(r, i);
    }
    // -log p(x) - sum_i [...] == (n/2) log 2pi
    CHECK(-lp.data[r] - sum ==
          doctest::Approx(0.5 * n * kLog2Pi).epsilon(1e-10));
  }
}

TEST_CASE("gaussian_kl: zero, unit-shift, Monte-Carlo oracle") {
  DiagGaussianParams p;
  p.mean = Tensor({1, 1}, {1.0});
  p.log_std = Tensor::zeros({1, 1});
  DiagGaussianParams q;
  q.mean = Tensor::zeros({1, 1});
  q.log_std = Tensor::zeros({1, 1});
  CHECK(gaussian_kl(p, p).data[0] == doctest::Approx(0.0));
  CHECK(gaussian_kl(p, q).data[0] == doctest::Approx(0.5).epsilon(1e-12));

  Rng rng(11);
  for (int trial = 0; trial < 4; ++trial) {
    const std::size_t n = 1 + rng.below(3);
    const DiagGaussianParams a = random_gaussian(1, n, rng);
    const DiagGaussianParams b = random_gaussian(1, n, rng);
    const double closed = gaussian_kl(a, b).data[0];
    auto draw = [&](Rng& r) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double sa = std::exp(a.log_std.at(0, i));
        const double sb = std::exp(b.log_std.at(0, i));
        const double x = a.mean.at(0, i) + sa * r.normal();
        const double da = (x - a.mean.at(0, i)) / sa;
        const double db = (x - b.mean.at(0, i)) / sb;
        acc += (-0.5 * da * da - a.log_std.at(0, i)) -
               (-0.5 * db * db - b.log_std.at(0, i));
      }
      return acc;
    };
    const auto mc = oracles::monte_carlo(draw, 1000000, 1234 + trial);
    CHECK(std::abs(mc.mean - closed) <= 3.0 * mc.std_err);
  }
}

TEST_CASE("entropies and categorical basics") {
  CategoricalParams u;
  u.logits = Tensor::zeros({1, 7});
  CHECK(categorical_entropy(u).data[0] ==
        doctest::Approx(std::log(7.0)).epsilon(1e-12));
  CHECK(categorical_kl(u, u).data[0] == doctest::Approx(0.0));

  DiagGaussianParams g;
  g.mean = Tensor::zeros({1, 1});
  g.log_std = Tensor::zeros({1, 1});
  CHECK(gaussian_entropy(g).data[0] ==
        doctest::Approx(0.5 * std::log(2.0 * M_PI * M_E)).epsilon(1e-12));
  CHECK(gaussian_entropy(g).data[0] == doctest::Approx(1.4189385332046727));

  // probabilities sum to one
  Rng rng(5);
  CategoricalParams c;
  c.logits = Tensor::zeros({4, 5});
  for (double& v : c.logits.data) v = rng.normal(0.0, 3.0);
  const Tensor probs = categorical_probs(c);
  for (std::size_t r = 0; r < 4; ++r) {
    double sum = 0.0;
    for (std::size_t i = 0; i < 5; ++i) sum += probs.at(r, i);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }

  // categorical log-prob is the log-softmax entry
  std::vector<int> idx = {0, 3, 2, 4};
  const Tensor lp = categorical_log_prob(c, idx);
  for (std::size_t r = 0; r < 4; ++r) {
    CHECK(lp.data[r] ==
          doctest::Approx(std::log(probs.at(r, idx[r]))).epsilon(1e-10));
  }
}

TEST_CASE("cross-entropy decomposition (Monte Carlo)") {
  Rng rng(9);
  const std::size_t n = 3;
  const DiagGaussianParams p = random_gaussian(1, n, rng);
  const DiagGaussianParams q = random_gaussian(1, n, rng);
  const double kl = gaussian_kl(p, q).data[0];
  const double h = gaussian_entropy(p).data[0];
  auto draw = [&](Rng& r) {
    Tensor x = Tensor::zeros({1, n});
    for (std::size_t i = 0; i < n; ++i) {
      x.at(0, i) = p.mean.at(0, i) + std::exp(p.log_std.at(0, i)) * r.normal();
    }
    return -gaussian_log_prob(q, x).data[0];
  };
  const auto mc = oracles::monte_carlo(draw, 400000, 99);
  CHECK(std::abs(mc.mean - (kl + h)) <= 3.0 * mc.std_err);
}

TEST_CASE("KL nonnegativity and equality case") {
  Rng rng(13);
  for (int t = 0; t < 50; ++t) {
    const DiagGaussianParams a = random_gaussian(1, 2, rng);
    const DiagGaussianParams b = random_gaussian(1, 2, rng);
    CHECK(gaussian_kl(a, b).data[0] >= 0.0);
  }
  const DiagGaussianParams a = random_gaussian(1, 2, rng);
  CHECK(gaussian_kl(a, a).data[0] == doctest::Approx(0.0));
}

TEST_CASE("log_prob invariant to batch permutation") {
  Rng rng(17);
  const std::size_t batch = 6, n = 3;
  DiagGaussianParams p = random_gaussian(batch, n, rng);
  Tensor x = Tensor::zeros({batch, n});
  for (double& v : x.data) v = rng.normal();
  const Tensor lp = gaussian_log_prob(p, x);
  // reverse the batch
  DiagGaussianParams pr = p;
  Tensor xr = x;
  for (std::size_t r = 0; r < batch; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      pr.mean.at(r, i) = p.mean.at(batch - 1 - r, i);
      pr.log_std.at(r, i) = p.log_std.at(batch - 1 - r, i);
      xr.at(r, i) = x.at(batch - 1 - r, i);
    }
  }
  const Tensor lpr = gaussian_log_prob(pr, xr);
  for (std::size_t r = 0; r < batch; ++r) {
    CHECK(lpr.data[r] == lp.data[batch - 1 - r]);
  }
}

TEST_CASE("fisher metric forms") {
  SUBCASE("gaussian: sigma = 1 mean block is identity") {
    DiagGaussianParams p;
    p.mean = Tensor::zeros({2, 3});
    p.log_std = Tensor::zeros({2, 3});
    const Metric m = fisher_metric(p);
    REQUIRE(m.kind == Metric::Kind::kDiagonal);
    for (std::size_t r = 0; r < 2; ++r) {
      for (std::size_t i = 0; i < 3; ++i) {
        CHECK(m.values.at(r, i) == doctest::Approx(1.0));
        CHECK(m.values.at(r, 3 + i) == doctest::Approx(2.0));
      }
    }
  }

  SUBCASE("categorical: near-one-hot logits give a near-zero metric") {
    CategoricalParams c;
    c.logits = Tensor({1, 3}, {30.0, 0.0, 0.0});
    const Metric m = fisher_metric(c);
    REQUIRE(m.kind == Metric::Kind::kDense);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        CHECK(std::abs(m.values.data[i * 3 + j]) < 1e-10);
      }
    }
  }

  SUBCASE("quadratic form matches second directional derivative of KL") {
    Rng rng(23);
    // Gaussian: parameters are (mean, log_std) rows.
    const DiagGaussianParams p = random_gaussian(1, 2, rng);
    const Metric mg = fisher_metric(p);
    for (int t = 0; t < 5; ++t) {
      std::vector<double> v(4);
      for (double& x : v) x = rng.normal();
      auto kl_along = [&](double s) {
        DiagGaussianParams q = p;
        q.mean.at(0, 0) += s * v[0];
        q.mean.at(0, 1) += s * v[1];
        q.log_std.at(0, 0) += s * v[2];
        q.log_std.at(0, 1) += s * v[3];
        return gaussian_kl(p, q).data[0];
      };
      const double h = 1e-4;
      const double fd = (kl_along(h) - 2.0 * kl_along(0.0) + kl_along(-h)) /
                        (h * h);
      double quad = 0.0;
      for (std::size_t i = 0; i < 4; ++i) {
        quad += mg.values.data[i] * v[i] * v[i];
      }
      CHECK(quad == doctest::Approx(fd).epsilon(1e-5));
    }

    // Categorical over logits.
    CategoricalParams c;
    c.logits = Tensor({1, 3}, {0.3, -0.2, 0.9});
    const Metric mc = fisher_metric(c);
    for (int t = 0; t < 5; ++t) {
      std::vector<double> v(3);
      for (double& x : v) x = rng.normal();
      auto kl_along = [&](double s) {
        CategoricalParams q = c;
        for (std::size_t i = 0; i < 3; ++i) q.logits.at(0, i) += s * v[i];
        return categorical_kl(c, q).data[0];
      };
      const double h = 1e-4;
      const double fd = (kl_along(h) - 2.0 * kl_along(0.0) + kl_along(-h)) /
                        (h * h);
      double quad = 0.0;
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
          quad += v[i] * mc.values.data[i * 3 + j] * v[j];
        }
      }
      CHECK(quad == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}
