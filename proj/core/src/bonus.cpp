#include "surprise/bonus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace surprise {

std::string to_string(BonusScheme scheme) {
  switch (scheme) {
    case BonusScheme::kNone: return "none";
    case BonusScheme::kSurprisal: return "surprisal";
    case BonusScheme::kLearningProgress: return "learning_progress";
    case BonusScheme::kPredError: return "pred_error";
    case BonusScheme::kRandomSurprisal: return "random_surprisal";
  }
  return "unknown";
}

BonusScheme bonus_scheme_from_string(const std::string& name) {
  if (name == "none") return BonusScheme::kNone;
  if (name == "surprisal") return BonusScheme::kSurprisal;
  if (name == "learning_progress") return BonusScheme::kLearningProgress;
  if (name == "pred_error") return BonusScheme::kPredError;
  if (name == "random_surprisal") return BonusScheme::kRandomSurprisal;
  throw std::invalid_argument("unknown bonus scheme: " + name);
}

std::vector<double> surprisal_bonus(const DynamicsModel& model,
                                    const DynamicsModel::Batch& batch) {
  const Tensor lp = model.log_prob_original(batch);
  std::vector<double> raw(lp.numel());
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = -lp.data[i];
  return raw;
}

std::vector<double> learning_progress_bonus(
    const DynamicsModel& model, const ParamVector& phi_now,
    const ParamVector& phi_past, const DynamicsModel::Batch& batch) {
  require(phi_now.size() == phi_past.size(),
          "learning_progress_bonus: parameter vectors must share the spec");
  // The whitening Jacobian cancels in the difference, so the whitened
  // densities give the same value as the original-space ones.
  const Tensor lp_now = model.log_prob_whitened(batch, phi_now);
  const Tensor lp_past = model.log_prob_whitened(batch, phi_past);
  std::vector<double> raw(lp_now.numel());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = lp_now.data[i] - lp_past.data[i];
  }
  return raw;
}

std::vector<double> pred_error_bonus(const DynamicsModel& model,
                                     const DynamicsModel::Batch& batch) {
  const Tensor mu = model.predicted_next_mean(batch);
  const std::size_t rows = batch.size();
  const std::size_t n = mu.cols();
  std::vector<double> raw(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = batch.s_next.at(r, i) - mu.at(r, i);
      acc += d * d;
    }
    raw[r] = std::sqrt(acc);
  }
  return raw;
}

std::vector<double> random_surprisal_bonus(const DynamicsModel& frozen_model,
                                           const DynamicsModel::Batch& batch) {
  return surprisal_bonus(frozen_model, batch);
}

namespace {
double mean_of(std::span<const double> xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}
}  // namespace

double normalize_eta(std::span<const double> raw, double eta0) {
  require(!raw.empty(), "normalize_eta: empty batch");
  const double m = std::abs(mean_of(raw));
  return eta0 / std::max(1.0, m);
}

std::vector<double> apply_bonus(std::span<const double> rewards_ext,
                                std::span<const double> raw, double eta,
                                bool nonnegative_shift, double* shift_out) {
  require(rewards_ext.size() == raw.size(), "apply_bonus: length mismatch");
  double shift = 0.0;
  if (nonnegative_shift) {
    shift = std::max(0.0, -mean_of(raw));
  }
  if (shift_out) *shift_out = shift;
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = rewards_ext[i] + eta * (raw[i] + shift);
  }
  return out;
}

BonusReport make_bonus_report(std::span<const double> raw, double eta0,
                              bool nonnegative_shift) {
  require(!raw.empty(), "make_bonus_report: empty batch");
  BonusReport rep;
  rep.raw.assign(raw.begin(), raw.end());
  rep.mean_raw = mean_of(raw);
  double var = 0.0;
  rep.min_raw = raw[0];
  rep.max_raw = raw[0];
  for (double x : raw) {
    var += (x - rep.mean_raw) * (x - rep.mean_raw);
    rep.min_raw = std::min(rep.min_raw, x);
    rep.max_raw = std::max(rep.max_raw, x);
  }
  rep.std_raw = std::sqrt(var / static_cast<double>(raw.size()));
  rep.eta = normalize_eta(raw, eta0);
  rep.shift = nonnegative_shift ? std::max(0.0, -rep.mean_raw) : 0.0;
  rep.dispersion_warning =
      rep.std_raw / (std::abs(rep.mean_raw) + 1.0) > 100.0;
  return rep;
}

}  // namespace surprise
