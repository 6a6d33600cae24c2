#include "surprise/dist.hpp"

#include <algorithm>
#include <cmath>

namespace surprise {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)

void check_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  require(a.shape == b.shape, std::string(what) + ": shape mismatch");
}
}  // namespace

void DiagGaussianParams::clamp_log_std(double lo, double hi) {
  for (double& v : log_std.data) v = std::clamp(v, lo, hi);
}

Tensor gaussian_log_prob(const DiagGaussianParams& p, const Tensor& x) {
  check_same_shape(p.mean, x, "gaussian_log_prob");
  check_same_shape(p.mean, p.log_std, "gaussian_log_prob");
  const std::size_t batch = p.batch();
  const std::size_t n = p.dim();
  Tensor out = Tensor::zeros({batch});
  for (std::size_t r = 0; r < batch; ++r) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ls = p.log_std.at(r, i);
      const double sigma = std::exp(ls);
      const double d = x.at(r, i) - p.mean.at(r, i);
      acc += -d * d / (2.0 * sigma * sigma) - ls;
    }
    out.data[r] = acc - 0.5 * static_cast<double>(n) * kLog2Pi;
  }
  return out;
}

Tensor gaussian_kl(const DiagGaussianParams& p, const DiagGaussianParams& q) {
  check_same_shape(p.mean, q.mean, "gaussian_kl");
  const std::size_t batch = p.batch();
  const std::size_t n = p.dim();
  Tensor out = Tensor::zeros({batch});
  for (std::size_t r = 0; r < batch; ++r) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double lsp = p.log_std.at(r, i);
      const double lsq = q.log_std.at(r, i);
      const double vp = std::exp(2.0 * lsp);
      const double vq = std::exp(2.0 * lsq);
      const double dmu = p.mean.at(r, i) - q.mean.at(r, i);
      acc += lsq - lsp + (vp + dmu * dmu) / (2.0 * vq) - 0.5;
    }
    out.data[r] = acc;
  }
  return out;
}

Tensor gaussian_entropy(const DiagGaussianParams& p) {
  const std::size_t batch = p.batch();
  const std::size_t n = p.dim();
  Tensor out = Tensor::zeros({batch});
  for (std::size_t r = 0; r < batch; ++r) {
    double acc = 0.5 * static_cast<double>(n) * (kLog2Pi + 1.0);
    for (std::size_t i = 0; i < n; ++i) acc += p.log_std.at(r, i);
    out.data[r] = acc;
  }
  return out;
}

Tensor gaussian_sample(const DiagGaussianParams& p, Rng& rng) {
  const std::size_t batch = p.batch();
  const std::size_t n = p.dim();
  Tensor out = Tensor::zeros({batch, n});
  for (std::size_t r = 0; r < batch; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      out.at(r, i) =
          p.mean.at(r, i) + std::exp(p.log_std.at(r, i)) * rng.normal();
    }
  }
  return out;
}

namespace {
// Row-stable log softmax into `out` (length m).
void log_softmax_row(const double* logits, std::size_t m, double* out) {
  double mx = logits[0];
  for (std::size_t i = 1; i < m; ++i) mx = std::max(mx, logits[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) sum += std::exp(logits[i] - mx);
  const double lse = mx + std::log(sum);
  for (std::size_t i = 0; i < m; ++i) out[i] = logits[i] - lse;
}
}  // namespace

Tensor categorical_probs(const CategoricalParams& p) {
  const std::size_t batch = p.batch();
  const std::size_t m = p.dim();
  Tensor out = Tensor::zeros({batch, m});
  std::vector<double> lp(m);
  for (std::size_t r = 0; r < batch; ++r) {
    log_softmax_row(p.logits.data.data() + r * m, m, lp.data());
    for (std::size_t i = 0; i < m; ++i) out.at(r, i) = std::exp(lp[i]);
  }
  return out;
}

Tensor categorical_log_prob(const CategoricalParams& p,
                            const std::vector<int>& idx) {
  const std::size_t batch = p.batch();
  const std::size_t m = p.dim();
  require(idx.size() == batch, "categorical_log_prob: index count mismatch");
  Tensor out = Tensor::zeros({batch});
  std::vector<double> lp(m);
  for (std::size_t r = 0; r < batch; ++r) {
    require(idx[r] >= 0 && static_cast<std::size_t>(idx[r]) < m,
            "categorical_log_prob: index out of range");
    log_softmax_row(p.logits.data.data() + r * m, m, lp.data());
    out.data[r] = lp[idx[r]];
  }
  return out;
}

Tensor categorical_kl(const CategoricalParams& p, const CategoricalParams& q) {
  check_same_shape(p.logits, q.logits, "categorical_kl");
  const std::size_t batch = p.batch();
  const std::size_t m = p.dim();
  Tensor out = Tensor::zeros({batch});
  std::vector<double> lp(m), lq(m);
  for (std::size_t r = 0; r < batch; ++r) {
    log_softmax_row(p.logits.data.data() + r * m, m, lp.data());
    log_softmax_row(q.logits.data.data() + r * m, m, lq.data());
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += std::exp(lp[i]) * (lp[i] - lq[i]);
    out.data[r] = acc;
  }
  return out;
}

Tensor categorical_entropy(const CategoricalParams& p) {
  const std::size_t batch = p.batch();
  const std::size_t m = p.dim();
  Tensor out = Tensor::zeros({batch});
  std::vector<double> lp(m);
  for (std::size_t r = 0; r < batch; ++r) {
    log_softmax_row(p.logits.data.data() + r * m, m, lp.data());
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc -= std::exp(lp[i]) * lp[i];
    out.data[r] = acc;
  }
  return out;
}

int categorical_sample_row(const CategoricalParams& p, std::size_t row,
                           Rng& rng) {
  const std::size_t m = p.dim();
  std::vector<double> lp(m);
  log_softmax_row(p.logits.data.data() + row * m, m, lp.data());
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    acc += std::exp(lp[i]);
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(m - 1);
}

Metric fisher_metric(const DiagGaussianParams& p) {
  const std::size_t batch = p.batch();
  const std::size_t n = p.dim();
  Tensor diag = Tensor::zeros({batch, 2 * n});
  for (std::size_t r = 0; r < batch; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      const double sigma = std::exp(p.log_std.at(r, i));
      diag.at(r, i) = 1.0 / (sigma * sigma);
      diag.at(r, n + i) = 2.0;
    }
  }
  return Metric::diagonal(std::move(diag));
}

Metric fisher_metric(const CategoricalParams& p) {
  const std::size_t batch = p.batch();
  const std::size_t m = p.dim();
  Tensor probs = categorical_probs(p);
  Tensor dense = Tensor::zeros({batch, m * m});
  for (std::size_t r = 0; r < batch; ++r) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const double pi = probs.at(r, i);
        const double pj = probs.at(r, j);
        dense.data[r * m * m + i * m + j] = (i == j ? pi : 0.0) - pi * pj;
      }
    }
  }
  return Metric::dense(std::move(dense), m);
}

}  // namespace surprise
