#ifndef SURPRISE_TRUST_REGION_HPP_
#define SURPRISE_TRUST_REGION_HPP_

#include <cstdint>
#include <functional>
#include <span>

#include "surprise/param_vector.hpp"

namespace surprise {

// max_theta L(theta) : D(theta) <= delta, approximated by one second-order
// step plus a backtracking line search. Requires D(theta_old) = 0,
// grad D(theta_old) = 0 and PSD constraint curvature at theta_old.
struct EvalResult {
  double objective = 0.0;
  double constraint = 0.0;
};

struct TrustRegionProblem {
  // Gradient of the objective over the full dataset.
  std::function<ParamVector()> gradient;
  // Constraint-curvature product A*v estimated on the given row subset.
  std::function<ParamVector(std::span<const std::size_t>, const ParamVector&)>
      curvature_vp;
  // Exact (full-data) objective and constraint at theta.
  std::function<EvalResult(const ParamVector&)> evaluate;
  ParamVector theta_old;
  double delta = 0.01;
  std::size_t dataset_size = 1;
};

struct StepReport {
  bool accepted = false;
  bool skipped = false;  // no solve attempted (flat gradient or no data)
  int backtracks_used = 0;
  double step_norm = 0.0;
  double objective_before = 0.0;
  double objective_after = 0.0;
  double constraint_after = 0.0;
  double cg_residual = 0.0;
};

struct SolveStepConfig {
  int cg_iters = 10;
  double damping = 1e-5;
  double backtrack_ratio = 0.8;
  int max_backtracks = 15;
  double subsample_fraction = 1.0;
  // When true the line search starts at k=1 (first shrunk step); default also
  // tests the unshrunk analytic step at k=0 first.
  bool strict_appendix_a = false;
  std::uint64_t subsample_seed = 0;
};

struct CgResult {
  ParamVector x;
  double residual_norm = 0.0;
  int iters_used = 0;
};

// Approximately solve (A + damping*I) x = g. avp must be symmetric PSD up to
// damping. Throws std::runtime_error on non-finite intermediate values.
CgResult conjugate_gradient(
    const std::function<ParamVector(const ParamVector&)>& avp,
    const ParamVector& g, int iters, double damping);

// Full-step displacement sqrt(2*delta / g^T x) * x with x = A^{-1} g.
// Throws std::domain_error when g^T x <= 1e-12.
ParamVector analytic_step(const ParamVector& g, const ParamVector& x,
                          double delta);

std::pair<ParamVector, StepReport> solve_step(const TrustRegionProblem& problem,
                                              const SolveStepConfig& config);

}  // namespace surprise

#endif  // SURPRISE_TRUST_REGION_HPP_
