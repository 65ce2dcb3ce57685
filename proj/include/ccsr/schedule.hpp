#pragma once

#include "ccsr/common.hpp"

namespace ccsr {

// Linear-beta diffusion noise schedule. betas/alphas are indexed t = 1..T via
// the accessors; alpha_bars additionally defines alpha_bar(0) = 1.
struct NoiseSchedule {
  int T = 0;
  Vec betas;       // length T, betas[i] is beta_{i+1}
  Vec alphas;      // length T
  Vec alpha_bars;  // length T+1, alpha_bars[t] is cumulative product up to t

  double beta(int t) const;
  double alpha(int t) const;
  double alpha_bar(int t) const;  // accepts t in [0, T]
};

// Inference/training timestep plan: a jump from T to t_max, then a uniform
// descent to t_min where the chain is truncated.
struct TimestepPlan {
  int t_start = 0;  // always equals schedule T
  int t_max = 0;
  int t_min = 0;
  std::vector<int> steps;  // strictly decreasing, steps[0]=T, steps[1]=t_max, back()=t_min
  int total_evals = 0;     // steps.size() after duplicate merging
};

NoiseSchedule build_linear_schedule(int T, double beta_start, double beta_end);

// Default beta range scaled by 1000/T so a short schedule lands near the same
// terminal alpha_bar as the common 1000-step convention. Scaled endpoints are
// clipped into (0, 1).
NoiseSchedule build_default_schedule(int T);

TimestepPlan build_nonuniform_plan(const NoiseSchedule& schedule, double t_max_frac,
                                   double t_min_frac, int total_evals);

// Full-range comparison plan: total_evals timesteps uniformly spaced from T
// down to 1. Used by the baseline sampler so eval counts match the truncated
// plan.
std::vector<int> build_uniform_steps(const NoiseSchedule& schedule, int total_evals);

}  // namespace ccsr
