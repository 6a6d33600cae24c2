#ifndef SURPRISE_UPDATES_HPP_
#define SURPRISE_UPDATES_HPP_

#include <cstdint>

#include "surprise/policy.hpp"
#include "surprise/rollout.hpp"
#include "surprise/trust_region.hpp"

namespace surprise {

struct TrpoConfig {
  double delta_kl = 0.01;
  SolveStepConfig tr;
  std::uint64_t seed = 0;
};

// One KL-constrained second-order step on the likelihood-ratio objective
// mean[ exp(log pi_theta - log pi_old) * advantage ] with the batch-mean
// KL(pi_old || pi_theta) constraint. Requires standardized advantages.
StepReport trpo_step(Policy& policy, const TrajectoryBatch& batch,
                     const TrpoConfig& cfg);

struct ValueFitConfig {
  double delta = 0.01;  // mean-squared value-drift trust region
  SolveStepConfig tr;
  std::uint64_t seed = 0;
};

// One second-order step on the mean-squared-error objective against the
// batch returns (unit-sigma Gaussian interpretation of the drift constraint).
StepReport fit_value_nn(NeuralValueFn& vf, const TrajectoryBatch& batch,
                        const ValueFitConfig& cfg);

// Exact ridge least squares of returns on [s, s^2, t/T, (t/T)^2, (t/T)^3, 1].
void fit_value_linear_timevarying(LinearTVValueFn& vf,
                                  const TrajectoryBatch& batch);

}  // namespace surprise

#endif  // SURPRISE_UPDATES_HPP_
