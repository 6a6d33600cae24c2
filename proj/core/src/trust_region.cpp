#include "surprise/trust_region.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "surprise/rng.hpp"

namespace surprise {

namespace {
// Accepted candidates may overshoot delta by conjugate-gradient round-off
// when the quadratic model is exact. For the delta values used in training
// (<= 0.05) this matches the +1e-10 slack the KL invariants allow.
double constraint_slack(double delta) {
  return std::max(1e-12, 1e-8 * delta);
}

std::vector<std::size_t> draw_subsample(std::size_t n, double fraction,
                                        std::uint64_t seed) {
  std::size_t m = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(n)));
  m = std::clamp<std::size_t>(m, 1, n);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (m == n) return idx;
  Rng rng(seed);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + rng.below(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return idx;
}
}  // namespace

CgResult conjugate_gradient(
    const std::function<ParamVector(const ParamVector&)>& avp,
    const ParamVector& g, int iters, double damping) {
  require(iters >= 1, "conjugate_gradient: iters must be >= 1");
  CgResult res;
  res.x = ParamVector::zeros_like(g);
  ParamVector r = g;
  ParamVector p = g;
  double rr = dot(r, r);
  if (rr == 0.0) {
    res.residual_norm = 0.0;
    return res;
  }
  for (int it = 0; it < iters; ++it) {
    ParamVector ap = avp(p);
    if (damping != 0.0) axpy(damping, p, ap);
    if (!ap.all_finite()) {
      throw std::runtime_error(
          "conjugate_gradient: non-finite curvature product at iteration " +
          std::to_string(it));
    }
    const double pap = dot(p, ap);
    if (pap <= 0.0 || !std::isfinite(pap)) break;  // lost positive-definiteness
    const double alpha = rr / pap;
    axpy(alpha, p, res.x);
    axpy(-alpha, ap, r);
    const double rr_new = dot(r, r);
    res.iters_used = it + 1;
    if (rr_new < 1e-24) {
      rr = rr_new;
      break;
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    ParamVector p_next = r;
    axpy(beta, p, p_next);
    p = std::move(p_next);
  }
  if (!res.x.all_finite()) {
    throw std::runtime_error("conjugate_gradient: non-finite solution");
  }
  res.residual_norm = std::sqrt(rr);
  return res;
}

ParamVector analytic_step(const ParamVector& g, const ParamVector& x,
                          double delta) {
  const double q = dot(g, x);
  if (q <= 1e-12) {
    throw std::domain_error("analytic_step: degenerate direction (g^T x <= 1e-12)");
  }
  return scaled(x, std::sqrt(2.0 * delta / q));
}

std::pair<ParamVector, StepReport> solve_step(const TrustRegionProblem& problem,
                                              const SolveStepConfig& config) {
  StepReport report;
  const EvalResult base = problem.evaluate(problem.theta_old);
  report.objective_before = base.objective;
  report.objective_after = base.objective;
  if (std::abs(base.constraint) > 1e-10) {
    throw std::invalid_argument(
        "solve_step: constraint must vanish at theta_old");
  }

  ParamVector g = problem.gradient();
  if (!g.all_finite()) {
    throw std::runtime_error("solve_step: non-finite gradient");
  }
  if (dot(g, g) == 0.0) {
    report.skipped = true;
    return {problem.theta_old, report};
  }

  const auto rows = draw_subsample(problem.dataset_size,
                                   config.subsample_fraction,
                                   config.subsample_seed);
  auto avp = [&](const ParamVector& v) {
    return problem.curvature_vp(std::span<const std::size_t>(rows), v);
  };
  CgResult cg = conjugate_gradient(avp, g, config.cg_iters, config.damping);
  report.cg_residual = cg.residual_norm;

  const double q = dot(g, cg.x);
  if (q <= 1e-12) {
    // No informative search direction; matches the no-update branch.
    report.skipped = true;
    return {problem.theta_old, report};
  }
  const ParamVector full = analytic_step(g, cg.x, problem.delta);

  const int k_first = config.strict_appendix_a ? 1 : 0;
  for (int k = k_first; k <= config.max_backtracks; ++k) {
    const double scale = std::pow(config.backtrack_ratio, k);
    ParamVector theta = problem.theta_old;
    axpy(scale, full, theta);
    EvalResult ev;
    try {
      ev = problem.evaluate(theta);
    } catch (const std::exception&) {
      continue;  // reject candidate, keep backtracking
    }
    if (!std::isfinite(ev.objective) || !std::isfinite(ev.constraint)) continue;
    if (ev.objective >= base.objective &&
        ev.constraint <= problem.delta + constraint_slack(problem.delta)) {
      report.accepted = true;
      report.backtracks_used = k;
      report.step_norm = scale * norm(full);
      report.objective_after = ev.objective;
      report.constraint_after = ev.constraint;
      return {std::move(theta), report};
    }
  }
  report.accepted = false;
  report.backtracks_used = config.max_backtracks;
  return {problem.theta_old, report};
}

}  // namespace surprise
