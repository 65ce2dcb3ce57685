#pragma once

#include "ccsr/diffusion.hpp"
#include "ccsr/metrics.hpp"
#include "ccsr/schedule.hpp"

namespace ccsr {

// Diagonal Gaussian prior over x0. Under the forward process the posterior
// mean E[x0 | x_t] has a closed form, which makes the Bayes-optimal noise
// prediction computable without any training.
struct GaussianPrior {
  Vec mean;
  Vec var;
};

GaussianPrior make_scalar_prior(double mean, double var, int dim = 1);

// E[x0 | x_t] = (sqrt(ab) var x_t + (1 - ab) mean) / (ab var + 1 - ab), per
// coordinate.
Vec oracle_posterior_mean(const GaussianPrior& prior, const Vec& x_t, int t,
                          const NoiseSchedule& schedule);

// The eps prediction whose estimate_x0 equals the posterior mean.
Vec oracle_eps(const GaussianPrior& prior, const Vec& x_t, int t, const NoiseSchedule& schedule);

// Callback adapter for the reverse samplers.
EpsFn oracle_eps_fn(const GaussianPrior& prior, const NoiseSchedule& schedule);

struct MomentReport {
  double sample_mean = 0.0;
  double sample_var = 0.0;
  double prior_mean = 0.0;
  double prior_var = 0.0;
  long n = 0;
};

// Runs the full stepwise reverse chain (posterior_step with the oracle clean
// estimate at every t) from standard-normal x_T, n times, and reports the
// output sample moments next to the prior's.
MomentReport oracle_full_chain_check(const GaussianPrior& prior, const NoiseSchedule& schedule,
                                     long n_samples, Rng& rng);

// Independent re-implementations of the stability metrics as naive loops.
// These exist solely to cross-check the metrics module and must stay textually
// independent of it.
double brute_force_g_std(const MetricMatrix& matrix);
double brute_force_l_std(const RunStack& stack);

}  // namespace ccsr
