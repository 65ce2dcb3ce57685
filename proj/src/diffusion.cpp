#include "ccsr/diffusion.hpp"

#include <cmath>

namespace ccsr {

LatentState make_state(Vec values, int t, Shape shape) {
  require_finite(values, "LatentState values");
  if (t < 0) throw TimestepRangeError("make_state: negative timestep");
  if (shape.empty()) shape = {static_cast<int>(values.size())};
  if (shape_numel(shape) != static_cast<std::int64_t>(values.size()))
    throw ShapeMismatchError("make_state: shape product != value count");
  LatentState s;
  s.values = std::move(values);
  s.t = t;
  s.shape = std::move(shape);
  return s;
}

LatentState q_sample(const LatentState& x0, int t, const Vec& eps, const NoiseSchedule& schedule) {
  if (x0.t != 0) throw TimestepRangeError("q_sample: input must be tagged t = 0");
  if (t < 1 || t > schedule.T) throw TimestepRangeError("q_sample: t outside [1, T]");
  if (eps.size() != x0.values.size()) throw ShapeMismatchError("q_sample: eps shape mismatch");
  const double ab = schedule.alpha_bar(t);
  const double a = std::sqrt(ab);
  const double b = std::sqrt(1.0 - ab);
  LatentState out = x0;
  out.t = t;
  for (size_t i = 0; i < out.values.size(); ++i) out.values[i] = a * x0.values[i] + b * eps[i];
  return out;
}

EstimatedClean estimate_x0(const LatentState& x_t, const Vec& eps_hat,
                           const NoiseSchedule& schedule) {
  const int t = x_t.t;
  if (t < 1 || t > schedule.T) throw TimestepRangeError("estimate_x0: t outside [1, T]");
  if (eps_hat.size() != x_t.values.size())
    throw ShapeMismatchError("estimate_x0: eps_hat shape mismatch");
  const double ab = schedule.alpha_bar(t);
  const double a = std::sqrt(ab);
  const double b = std::sqrt(1.0 - ab);
  EstimatedClean out;
  out.source_t = t;
  out.values.resize(x_t.values.size());
  for (size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = (x_t.values[i] - b * eps_hat[i]) / a;
  return out;
}

LatentState posterior_step(const LatentState& x_t, const EstimatedClean& x0_hat,
                           const NoiseSchedule& schedule, const Vec& noise, int s) {
  const int t = x_t.t;
  if (t < 1 || t > schedule.T) throw TimestepRangeError("posterior_step: t outside [1, T]");
  if (s < 0) s = t - 1;
  if (s >= t) throw TimestepRangeError("posterior_step: target step must be below t");
  if (x0_hat.values.size() != x_t.values.size())
    throw ShapeMismatchError("posterior_step: x0_hat shape mismatch");

  const double ab_t = schedule.alpha_bar(t);
  const double ab_s = schedule.alpha_bar(s);
  const double beta_t = schedule.beta(t);
  const double alpha_t = schedule.alpha(t);
  const double denom = 1.0 - ab_t;
  const double c0 = std::sqrt(ab_s) * beta_t / denom;
  const double ct = std::sqrt(alpha_t) * (1.0 - ab_s) / denom;
  const double sigma2 = (1.0 - ab_s) / denom * beta_t;
  const double sigma = std::sqrt(std::max(sigma2, 0.0));

  const bool noiseless = sigma == 0.0;
  if (!noiseless && noise.size() != x_t.values.size())
    throw ShapeMismatchError("posterior_step: noise shape mismatch");

  LatentState out = x_t;
  out.t = s;
  for (size_t i = 0; i < out.values.size(); ++i) {
    double v = c0 * x0_hat.values[i] + ct * x_t.values[i];
    if (!noiseless) v += sigma * noise[i];
    out.values[i] = v;
  }
  return out;
}

EstimatedClean run_reverse(const EpsFn& eps_fn, int dim, const std::vector<int>& steps,
                           const NoiseSchedule& schedule, Rng& rng, TransitionRule rule) {
  if (steps.empty()) throw PlanDegenerateError("run_reverse: empty step list");
  if (steps.front() != schedule.T)
    throw TimestepRangeError("run_reverse: step list must start at schedule T");
  for (size_t i = 1; i < steps.size(); ++i)
    if (steps[i] >= steps[i - 1] || steps[i] < 1)
      throw TimestepRangeError("run_reverse: steps must be strictly decreasing within [1, T]");

  LatentState x = make_state(rng.normal_vec(dim), schedule.T);
  EstimatedClean x0_hat;
  for (size_t i = 0; i < steps.size(); ++i) {
    const int t = steps[i];
    x.t = t;
    const Vec eps_hat = eps_fn(x.values, t);
    if (eps_hat.size() != x.values.size())
      throw ShapeMismatchError("run_reverse: eps_fn output shape mismatch");
    x0_hat = estimate_x0(x, eps_hat, schedule);
    require_finite(x0_hat.values, "reverse-chain clean estimate");
    if (i + 1 == steps.size()) break;
    const int s = steps[i + 1];
    if (rule == TransitionRule::kRenoise) {
      LatentState clean = make_state(x0_hat.values, 0, x.shape);
      x = q_sample(clean, s, rng.normal_vec(dim), schedule);
    } else {
      x = posterior_step(x, x0_hat, schedule, rng.normal_vec(dim), s);
    }
    require_finite(x.values, "reverse-chain state");
  }
  return x0_hat;
}

namespace {

EpsFn bind_denoiser(const DenoiserNet& denoiser, const LatentState& condition) {
  if (static_cast<int>(condition.values.size()) != denoiser.cond_dim)
    throw DimensionMismatchError("sampler: condition size does not match denoiser");
  return [&denoiser, cond = condition.values](const Vec& x, int t) {
    return denoiser_forward(denoiser, x, t, cond);
  };
}

}  // namespace

EstimatedClean sample_truncated(const DenoiserNet& denoiser, const LatentState& condition,
                                const TimestepPlan& plan, const NoiseSchedule& schedule,
                                Rng& rng) {
  if (plan.t_start != schedule.T)
    throw TimestepRangeError("sample_truncated: plan was built for a different schedule");
  return run_reverse(bind_denoiser(denoiser, condition), denoiser.x_dim, plan.steps, schedule,
                     rng, TransitionRule::kRenoise);
}

EstimatedClean sample_uniform_baseline(const DenoiserNet& denoiser, const LatentState& condition,
                                       int total_evals, const NoiseSchedule& schedule, Rng& rng) {
  const std::vector<int> steps = build_uniform_steps(schedule, total_evals);
  return run_reverse(bind_denoiser(denoiser, condition), denoiser.x_dim, steps, schedule, rng,
                     TransitionRule::kPosterior);
}

}  // namespace ccsr
