#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "ccsr/nn.hpp"

namespace ccsr_test {

struct FdReport {
  double max_rel = 0.0;
  double max_abs = 0.0;
  size_t worst_index = 0;
};

// Central differences against an analytic gradient over the flattened
// parameter vector. loss must be a pure function of the parameters, so any
// randomness inside has to be re-seeded per call.
inline FdReport finite_diff_check(ccsr::Mlp& net,
                                  const std::function<double(const ccsr::Mlp&)>& loss,
                                  const ccsr::Vec& analytic) {
  ccsr::Vec theta = ccsr::flatten_params(net);
  if (analytic.size() != theta.size())
    throw std::runtime_error("analytic gradient length mismatch");

  FdReport rep;
  ccsr::Vec probe = theta;
  for (size_t i = 0; i < theta.size(); ++i) {
    const double h = 1e-5 * (1.0 + std::abs(theta[i]));
    probe[i] = theta[i] + h;
    ccsr::unflatten_params(net, probe);
    const double lp = loss(net);
    probe[i] = theta[i] - h;
    ccsr::unflatten_params(net, probe);
    const double lm = loss(net);
    probe[i] = theta[i];

    const double fd = (lp - lm) / (2.0 * h);
    const double denom = std::max({std::abs(fd), std::abs(analytic[i]), 1e-6});
    const double rel = std::abs(fd - analytic[i]) / denom;
    if (rel > rep.max_rel) {
      rep.max_rel = rel;
      rep.worst_index = i;
    }
    rep.max_abs = std::max(rep.max_abs, std::abs(fd - analytic[i]));
  }
  ccsr::unflatten_params(net, theta);
  return rep;
}

// Flattens a tape in the same layer order as flatten_params.
inline ccsr::Vec flatten_tape(const ccsr::GradientTape& tape) {
  ccsr::Vec flat;
  for (size_t l = 0; l < tape.d_weights.size(); ++l) {
    flat.insert(flat.end(), tape.d_weights[l].begin(), tape.d_weights[l].end());
    flat.insert(flat.end(), tape.d_bias[l].begin(), tape.d_bias[l].end());
  }
  return flat;
}

}  // namespace ccsr_test
