#pragma once

#include <functional>

#include "ccsr/nn.hpp"
#include "ccsr/schedule.hpp"

namespace ccsr {

struct LatentState {
  Vec values;
  int t = 0;
  Shape shape;
};

struct EstimatedClean {
  Vec values;
  int source_t = 0;
};

// Validates finiteness and shape/length consistency. An empty shape defaults
// to {len}.
LatentState make_state(Vec values, int t, Shape shape = {});

// Forward noising per the closed form: sqrt(ab_t) x0 + sqrt(1 - ab_t) eps.
LatentState q_sample(const LatentState& x0, int t, const Vec& eps, const NoiseSchedule& schedule);

// Clean-sample estimate implied by a noise prediction at x_t's timestep.
EstimatedClean estimate_x0(const LatentState& x_t, const Vec& eps_hat,
                           const NoiseSchedule& schedule);

// One reverse posterior step from t to s (default s = t-1). Skipping steps
// substitutes alpha_bar(s) for alpha_bar(t-1) in both the mean and the
// variance; beta_t is unchanged. The noise term vanishes when s = 0 reached
// from t = 1, making the chain end deterministic.
LatentState posterior_step(const LatentState& x_t, const EstimatedClean& x0_hat,
                           const NoiseSchedule& schedule, const Vec& noise, int s = -1);

// Noise-prediction callback: (x_t, t) -> eps_hat. Lets the analytic oracle
// stand in for a trained net in the samplers.
using EpsFn = std::function<Vec(const Vec&, int)>;

enum class TransitionRule {
  kRenoise,    // estimate x0, re-noise to the next level with fresh eps
  kPosterior,  // generalized posterior step toward the next level
};

// Shared reverse-sampling loop: starts from standard-normal x at steps[0],
// evaluates eps_fn at every step, transitions between consecutive steps by
// the given rule, and returns the clean estimate at the final step.
EstimatedClean run_reverse(const EpsFn& eps_fn, int dim, const std::vector<int>& steps,
                           const NoiseSchedule& schedule, Rng& rng, TransitionRule rule);

// Truncated non-uniform sampler: the plan's jump + descent with the re-noising
// transition; output is the clean estimate at t_min, not a further chain step.
EstimatedClean sample_truncated(const DenoiserNet& denoiser, const LatentState& condition,
                                const TimestepPlan& plan, const NoiseSchedule& schedule, Rng& rng);

// Full-range baseline at matched eval count: uniform steps from T to 1 with
// posterior transitions.
EstimatedClean sample_uniform_baseline(const DenoiserNet& denoiser, const LatentState& condition,
                                       int total_evals, const NoiseSchedule& schedule, Rng& rng);

}  // namespace ccsr
