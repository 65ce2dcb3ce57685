#include "ccsr/oracle.hpp"

#include <cmath>

namespace ccsr {

GaussianPrior make_scalar_prior(double mean, double var, int dim) {
  if (dim < 1) throw InvalidRangeError("make_scalar_prior: dim must be >= 1");
  if (!(var > 0.0)) throw InvalidRangeError("make_scalar_prior: variance must be positive");
  GaussianPrior p;
  p.mean.assign(dim, mean);
  p.var.assign(dim, var);
  return p;
}

Vec oracle_posterior_mean(const GaussianPrior& prior, const Vec& x_t, int t,
                          const NoiseSchedule& schedule) {
  if (prior.mean.size() != x_t.size() || prior.var.size() != x_t.size())
    throw ShapeMismatchError("oracle_posterior_mean: prior/state shape mismatch");
  const double ab = schedule.alpha_bar(t);
  const double sab = std::sqrt(ab);
  Vec out(x_t.size());
  for (size_t i = 0; i < x_t.size(); ++i) {
    const double v0 = prior.var[i];
    out[i] = (sab * v0 * x_t[i] + (1.0 - ab) * prior.mean[i]) / (ab * v0 + 1.0 - ab);
  }
  return out;
}

Vec oracle_eps(const GaussianPrior& prior, const Vec& x_t, int t, const NoiseSchedule& schedule) {
  if (t < 1 || t > schedule.T) throw TimestepRangeError("oracle_eps: t outside [1, T]");
  const double ab = schedule.alpha_bar(t);
  const double sab = std::sqrt(ab);
  const double sb = std::sqrt(1.0 - ab);
  const Vec x0_mean = oracle_posterior_mean(prior, x_t, t, schedule);
  Vec eps(x_t.size());
  for (size_t i = 0; i < x_t.size(); ++i) eps[i] = (x_t[i] - sab * x0_mean[i]) / sb;
  return eps;
}

EpsFn oracle_eps_fn(const GaussianPrior& prior, const NoiseSchedule& schedule) {
  return [&prior, &schedule](const Vec& x, int t) { return oracle_eps(prior, x, t, schedule); };
}

MomentReport oracle_full_chain_check(const GaussianPrior& prior, const NoiseSchedule& schedule,
                                     long n_samples, Rng& rng) {
  if (n_samples < 10000)
    throw InvalidRangeError("oracle_full_chain_check: need at least 1e4 samples");
  if (prior.mean.size() != 1)
    throw InvalidRangeError("oracle_full_chain_check: scalar prior expected");

  Vec outputs;
  outputs.reserve(n_samples);
  for (long k = 0; k < n_samples; ++k) {
    LatentState x = make_state({rng.normal()}, schedule.T);
    for (int t = schedule.T; t >= 1; --t) {
      x.t = t;
      const Vec eps_hat = oracle_eps(prior, x.values, t, schedule);
      const EstimatedClean x0_hat = estimate_x0(x, eps_hat, schedule);
      x = posterior_step(x, x0_hat, schedule, {rng.normal()});
    }
    outputs.push_back(x.values[0]);
  }

  MomentReport r;
  r.n = n_samples;
  r.prior_mean = prior.mean[0];
  r.prior_var = prior.var[0];
  r.sample_mean = mean_of(outputs);
  r.sample_var = variance_of(outputs);
  return r;
}

double brute_force_g_std(const MetricMatrix& matrix) {
  if (matrix.n_runs < 2) throw InsufficientRunsError("brute_force_g_std: need at least 2 runs");
  double sum_over_images = 0.0;
  for (int j = 0; j < matrix.n_images; ++j) {
    double row_sum = 0.0;
    for (int i = 0; i < matrix.n_runs; ++i) row_sum = row_sum + matrix.values[j * matrix.n_runs + i];
    const double row_mean = row_sum / matrix.n_runs;
    double dev_sq_sum = 0.0;
    for (int i = 0; i < matrix.n_runs; ++i) {
      const double dev = matrix.values[j * matrix.n_runs + i] - row_mean;
      dev_sq_sum = dev_sq_sum + dev * dev;
    }
    sum_over_images = sum_over_images + std::sqrt(dev_sq_sum / matrix.n_runs);
  }
  return sum_over_images / matrix.n_images;
}

double brute_force_l_std(const RunStack& stack) {
  const int n = static_cast<int>(stack.runs.size());
  if (n < 2) throw InsufficientRunsError("brute_force_l_std: need at least 2 runs");
  const int total_pixels = stack.h * stack.w;
  for (const auto& run : stack.runs)
    if (static_cast<int>(run.size()) != total_pixels)
      throw ShapeMismatchError("brute_force_l_std: run size mismatch");
  double pixel_std_sum = 0.0;
  for (int row = 0; row < stack.h; ++row) {
    for (int col = 0; col < stack.w; ++col) {
      const int idx = row * stack.w + col;
      double value_sum = 0.0;
      for (int i = 0; i < n; ++i) value_sum = value_sum + stack.runs[i][idx];
      const double pixel_mean = value_sum / n;
      double dev_sq_sum = 0.0;
      for (int i = 0; i < n; ++i) {
        const double dev = stack.runs[i][idx] - pixel_mean;
        dev_sq_sum = dev_sq_sum + dev * dev;
      }
      pixel_std_sum = pixel_std_sum + std::sqrt(dev_sq_sum / n);
    }
  }
  return pixel_std_sum / total_pixels;
}

}  // namespace ccsr
