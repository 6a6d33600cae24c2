#include "surprise/normalizer.hpp"

#include <cmath>
#include <stdexcept>

namespace surprise {

namespace {
constexpr double kDegenerateStd = 1e-8;
}

Normalizer::Normalizer(std::size_t dim)
    : dim_(dim),
      run_mean_(dim, 0.0),
      run_m2_(dim, 0.0),
      frozen_mean_(dim, 0.0),
      frozen_scale_(dim, 1.0),
      active_(dim, true) {}

void Normalizer::observe(std::span<const double> row) {
  if (row.size() != dim_) {
    throw std::invalid_argument("Normalizer::observe: dimension mismatch");
  }
  count_ += 1.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    const double d = row[i] - run_mean_[i];
    run_mean_[i] += d / count_;
    run_m2_[i] += d * (row[i] - run_mean_[i]);
  }
}

void Normalizer::freeze() {
  if (count_ < 2.0) return;  // keep identity until there is data
  for (std::size_t i = 0; i < dim_; ++i) {
    const double var = run_m2_[i] / count_;
    const double sd = std::sqrt(var > 0.0 ? var : 0.0);
    frozen_mean_[i] = run_mean_[i];
    if (sd < kDegenerateStd) {
      frozen_scale_[i] = 1.0;
      active_[i] = false;
    } else {
      frozen_scale_[i] = sd;
      active_[i] = true;
    }
  }
}

std::size_t Normalizer::active_count() const {
  std::size_t n = 0;
  for (bool a : active_) n += a ? 1 : 0;
  return n;
}

void Normalizer::apply(std::span<const double> in,
                       std::span<double> out) const {
  for (std::size_t i = 0; i < dim_; ++i) {
    out[i] = (in[i] - frozen_mean_[i]) / frozen_scale_[i];
  }
}

void Normalizer::invert(std::span<const double> in,
                        std::span<double> out) const {
  for (std::size_t i = 0; i < dim_; ++i) {
    out[i] = frozen_mean_[i] + frozen_scale_[i] * in[i];
  }
}

std::vector<double> Normalizer::state() const {
  std::vector<double> s;
  s.push_back(count_);
  for (std::size_t i = 0; i < dim_; ++i) {
    s.push_back(run_mean_[i]);
    s.push_back(run_m2_[i]);
    s.push_back(frozen_mean_[i]);
    s.push_back(frozen_scale_[i]);
    s.push_back(active_[i] ? 1.0 : 0.0);
  }
  return s;
}

void Normalizer::restore(std::size_t dim, std::span<const double> state) {
  if (state.size() != 1 + dim * 5) {
    throw std::invalid_argument("Normalizer::restore: bad state length");
  }
  *this = Normalizer(dim);
  count_ = state[0];
  for (std::size_t i = 0; i < dim; ++i) {
    run_mean_[i] = state[1 + i * 5 + 0];
    run_m2_[i] = state[1 + i * 5 + 1];
    frozen_mean_[i] = state[1 + i * 5 + 2];
    frozen_scale_[i] = state[1 + i * 5 + 3];
    active_[i] = state[1 + i * 5 + 4] != 0.0;
  }
}

}  // namespace surprise
