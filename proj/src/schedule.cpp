#include "ccsr/schedule.hpp"

#include <algorithm>
#include <cmath>

namespace ccsr {

namespace {

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

void check_t(int t, int T, int lo, const char* op) {
  if (t < lo || t > T)
    throw TimestepRangeError(std::string(op) + ": timestep " + std::to_string(t) +
                             " outside [" + std::to_string(lo) + ", " + std::to_string(T) + "]");
}

}  // namespace

double NoiseSchedule::beta(int t) const {
  check_t(t, T, 1, "beta");
  return betas[t - 1];
}

double NoiseSchedule::alpha(int t) const {
  check_t(t, T, 1, "alpha");
  return alphas[t - 1];
}

double NoiseSchedule::alpha_bar(int t) const {
  check_t(t, T, 0, "alpha_bar");
  return alpha_bars[t];
}

NoiseSchedule build_linear_schedule(int T, double beta_start, double beta_end) {
  if (T < 2) throw InvalidRangeError("build_linear_schedule: T must be >= 2");
  if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0))
    throw InvalidRangeError("build_linear_schedule: need 0 < beta_start <= beta_end < 1");

  NoiseSchedule s;
  s.T = T;
  s.betas.resize(T);
  s.alphas.resize(T);
  s.alpha_bars.assign(T + 1, 1.0);
  for (int i = 0; i < T; ++i) {
    s.betas[i] = beta_start + (beta_end - beta_start) * static_cast<double>(i) / (T - 1);
    s.alphas[i] = 1.0 - s.betas[i];
    s.alpha_bars[i + 1] = s.alpha_bars[i] * s.alphas[i];
  }
  if (!(s.alpha_bars[T] > 0.0))
    throw InvalidRangeError("build_linear_schedule: alpha_bar underflowed to zero");
  return s;
}

NoiseSchedule build_default_schedule(int T) {
  const double scale = 1000.0 / T;
  const auto clip = [](double b) { return std::min(std::max(b, 1e-12), 0.999); };
  double bs = clip(1e-4 * scale);
  double be = clip(0.02 * scale);
  return build_linear_schedule(T, bs, std::max(bs, be));
}

TimestepPlan build_nonuniform_plan(const NoiseSchedule& schedule, double t_max_frac,
                                   double t_min_frac, int total_evals) {
  if (!(t_min_frac > 0.0 && t_min_frac < t_max_frac && t_max_frac < 1.0))
    throw InvalidRangeError("build_nonuniform_plan: need 0 < t_min_frac < t_max_frac < 1");
  if (total_evals < 3) throw InvalidRangeError("build_nonuniform_plan: total_evals must be >= 3");

  const int T = schedule.T;
  const int t_max = round_half_up(t_max_frac * T);
  const int t_min = round_half_up(t_min_frac * T);
  if (!(1 <= t_min && t_min < t_max && t_max < T))
    throw PlanDegenerateError("build_nonuniform_plan: rounded bounds collapsed (t_min=" +
                              std::to_string(t_min) + ", t_max=" + std::to_string(t_max) +
                              ", T=" + std::to_string(T) + ")");

  std::vector<int> steps;
  steps.push_back(T);
  const int m = total_evals - 1;  // entries from t_max down to t_min inclusive
  for (int k = 0; k < m; ++k) {
    const double v = t_max + (t_min - t_max) * static_cast<double>(k) / (m - 1);
    const int tv = round_half_up(v);
    if (steps.back() != tv) steps.push_back(tv);
  }
  if (static_cast<int>(steps.size()) < 3)
    throw PlanDegenerateError("build_nonuniform_plan: fewer than 3 steps after merging");

  TimestepPlan plan;
  plan.t_start = T;
  plan.t_max = t_max;
  plan.t_min = t_min;
  plan.steps = std::move(steps);
  plan.total_evals = static_cast<int>(plan.steps.size());
  return plan;
}

std::vector<int> build_uniform_steps(const NoiseSchedule& schedule, int total_evals) {
  if (total_evals < 2) throw InvalidRangeError("build_uniform_steps: total_evals must be >= 2");
  const int T = schedule.T;
  std::vector<int> steps;
  for (int k = 0; k < total_evals; ++k) {
    const double v = T + (1.0 - T) * static_cast<double>(k) / (total_evals - 1);
    const int tv = round_half_up(v);
    if (steps.empty() || steps.back() != tv) steps.push_back(tv);
  }
  return steps;
}

}  // namespace ccsr
