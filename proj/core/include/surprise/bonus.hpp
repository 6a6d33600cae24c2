#ifndef SURPRISE_BONUS_HPP_
#define SURPRISE_BONUS_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "surprise/dynamics.hpp"

namespace surprise {

enum class BonusScheme {
  kNone,
  kSurprisal,         // -log P_phi(s'|s,a)
  kLearningProgress,  // log P_phi_t - log P_phi_{t-k}
  kPredError,         // ||s' - mu_phi(s,a)||_2
  kRandomSurprisal,   // surprisal under frozen initial parameters
};

std::string to_string(BonusScheme scheme);
BonusScheme bonus_scheme_from_string(const std::string& name);

struct BonusConfig {
  BonusScheme scheme = BonusScheme::kSurprisal;
  std::size_t k = 1;  // snapshot lag for learning progress
  double eta0 = 0.001;
  bool nonnegative_shift = false;
};

struct BonusReport {
  std::vector<double> raw;  // per transition
  double eta = 0.0;
  double shift = 0.0;
  double mean_raw = 0.0;
  double std_raw = 0.0;
  double min_raw = 0.0;
  double max_raw = 0.0;
  // Set when the raw bonuses are wildly dispersed relative to their mean, a
  // regime where the eta formula stops bounding individual bonuses.
  bool dispersion_warning = false;
};

// Raw intrinsic rewards, evaluated in the original state space.
std::vector<double> surprisal_bonus(const DynamicsModel& model,
                                    const DynamicsModel::Batch& batch);
std::vector<double> learning_progress_bonus(const DynamicsModel& model,
                                            const ParamVector& phi_now,
                                            const ParamVector& phi_past,
                                            const DynamicsModel::Batch& batch);
std::vector<double> pred_error_bonus(const DynamicsModel& model,
                                     const DynamicsModel::Batch& batch);
std::vector<double> random_surprisal_bonus(const DynamicsModel& frozen_model,
                                           const DynamicsModel::Batch& batch);

// eta = eta0 / max(1, |mean(raw)|); the absolute value wraps the batch mean.
double normalize_eta(std::span<const double> raw, double eta0);

// shift = max(0, -mean(raw)) when nonnegative_shift, else 0;
// r'_i = r_ext_i + eta * (raw_i + shift).
std::vector<double> apply_bonus(std::span<const double> rewards_ext,
                                std::span<const double> raw, double eta,
                                bool nonnegative_shift, double* shift_out);

// Full pipeline over one policy batch: raw stats + eta + shift.
BonusReport make_bonus_report(std::span<const double> raw, double eta0,
                              bool nonnegative_shift);

}  // namespace surprise

#endif  // SURPRISE_BONUS_HPP_
