#include <cmath>
#include <vector>

#include "ccsr/diffusion.hpp"
#include "ccsr/nn.hpp"
#include "doctest.h"

using namespace ccsr;

namespace {

NoiseSchedule two_step() { return build_linear_schedule(2, 0.1, 0.2); }

}  // namespace

TEST_CASE("q_sample with zero noise scales by sqrt(alpha_bar)") {
  NoiseSchedule s = two_step();
  LatentState x0 = make_state({1.0, -2.0, 0.5}, 0);
  Vec zero(3, 0.0);
  LatentState x1 = q_sample(x0, 1, zero, s);
  for (int i = 0; i < 3; ++i)
    CHECK(x1.values[i] == doctest::Approx(std::sqrt(0.9) * x0.values[i]).epsilon(1e-12));
  CHECK(x1.t == 1);
}

TEST_CASE("q_sample at the terminal step reproduces the closed form") {
  NoiseSchedule s = two_step();
  LatentState x0 = make_state({1.0}, 0);
  LatentState x2 = q_sample(x0, 2, {1.0}, s);
  CHECK(x2.values[0] == doctest::Approx(1.3776783996).epsilon(1e-9));
}

TEST_CASE("estimate_x0 inverts q_sample when given the true noise") {
  NoiseSchedule s = build_default_schedule(45);
  Rng rng(5);
  Vec x0v = rng.normal_vec(8);
  LatentState x0 = make_state(x0v, 0);
  for (int t : {1, 7, 20, 45}) {
    Vec eps = rng.normal_vec(8);
    LatentState xt = q_sample(x0, t, eps, s);
    EstimatedClean est = estimate_x0(xt, eps, s);
    CHECK(est.source_t == t);
    for (int i = 0; i < 8; ++i) CHECK(est.values[i] == doctest::Approx(x0v[i]).epsilon(1e-9));
  }
}

TEST_CASE("posterior variance at t=2 matches the hand-computed value") {
  NoiseSchedule s = two_step();
  // (1 - ab_1) / (1 - ab_2) * beta_2 = (0.1 / 0.28) * 0.2
  LatentState x2 = make_state({0.3}, 2);
  EstimatedClean x0{{0.0}, 2};
  LatentState a = posterior_step(x2, x0, s, {1.0});
  LatentState b = posterior_step(x2, x0, s, {0.0});
  const double sigma = a.values[0] - b.values[0];
  CHECK(sigma * sigma == doctest::Approx(0.1 / 0.28 * 0.2).epsilon(1e-12));
  CHECK(a.t == 1);
}

TEST_CASE("posterior coefficients agree with a direct transcription") {
  NoiseSchedule s = build_default_schedule(30);
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    int t = static_cast<int>(rng.uniform_int(2, 30));
    int target = static_cast<int>(rng.uniform_int(1, t - 1));
    Vec xt{rng.normal()}, x0v{rng.normal()}, noise{rng.normal()};

    LatentState state = make_state(xt, t);
    EstimatedClean est{x0v, t};
    LatentState out = posterior_step(state, est, s, noise, target);

    const double ab_t = s.alpha_bar(t);
    const double ab_s = s.alpha_bar(target);
    const double beta_t = s.beta(t);
    const double alpha_t = 1.0 - beta_t;
    const double c0 = std::sqrt(ab_s) * beta_t / (1.0 - ab_t);
    const double ct = std::sqrt(alpha_t) * (1.0 - ab_s) / (1.0 - ab_t);
    const double var = (1.0 - ab_s) * beta_t / (1.0 - ab_t);
    const double expect = c0 * x0v[0] + ct * xt[0] + std::sqrt(var) * noise[0];
    CHECK(out.values[0] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(out.t == target);
  }
}

TEST_CASE("the final posterior step is deterministic and returns the clean estimate") {
  NoiseSchedule s = two_step();
  LatentState x1 = make_state({0.7}, 1);
  EstimatedClean x0{{0.25}, 1};
  LatentState a = posterior_step(x1, x0, s, {5.0});
  LatentState b = posterior_step(x1, x0, s, {-5.0});
  CHECK(a.values[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(a.values[0] == b.values[0]);
  CHECK(a.t == 0);
}

TEST_CASE("forward noising of unit-variance data keeps unit variance") {
  NoiseSchedule s = build_default_schedule(45);
  Rng rng(21);
  const int n = 50000;
  for (int t : {10, 30, 45}) {
    Vec marginal(n);
    for (int i = 0; i < n; ++i) {
      LatentState x0 = make_state({rng.normal()}, 0);
      marginal[i] = q_sample(x0, t, {rng.normal()}, s).values[0];
    }
    CHECK(variance_of(marginal) == doctest::Approx(1.0).epsilon(0.03));
  }
}

TEST_CASE("run_reverse evaluates the predictor exactly at the plan steps") {
  NoiseSchedule s = build_default_schedule(45);
  TimestepPlan plan = build_nonuniform_plan(s, 2.0 / 3.0, 1.0 / 3.0, 15);
  std::vector<int> seen;
  EpsFn fn = [&](const Vec& x, int t) {
    seen.push_back(t);
    return Vec(x.size(), 0.0);
  };
  Rng rng(1);
  EstimatedClean out = run_reverse(fn, 3, plan.steps, s, rng, TransitionRule::kRenoise);
  CHECK(seen == plan.steps);
  CHECK(out.source_t == plan.t_min);
  CHECK(out.values.size() == 3);
}

TEST_CASE("run_reverse rejects sequences that do not descend from T") {
  NoiseSchedule s = build_default_schedule(10);
  EpsFn fn = [](const Vec& x, int) { return Vec(x.size(), 0.0); };
  Rng rng(2);
  CHECK_THROWS_AS(run_reverse(fn, 2, {9, 5, 1}, s, rng, TransitionRule::kPosterior),
                  TimestepRangeError);
  CHECK_THROWS_AS(run_reverse(fn, 2, {10, 5, 5, 1}, s, rng, TransitionRule::kPosterior),
                  TimestepRangeError);
  CHECK_THROWS_AS(run_reverse(fn, 2, {10, 5, 0}, s, rng, TransitionRule::kPosterior),
                  TimestepRangeError);
}

TEST_CASE("truncated sampling is bit-identical under the same seed") {
  NoiseSchedule s = build_default_schedule(45);
  TimestepPlan plan = build_nonuniform_plan(s, 2.0 / 3.0, 1.0 / 3.0, 15);
  Rng init(3);
  DenoiserNet net = make_denoiser(4, 4, 8, 16, 45, init);
  LatentState cond = make_state(Vec(4, 0.1), 0);

  Rng r1(77), r2(77), r3(78);
  EstimatedClean a = sample_truncated(net, cond, plan, s, r1);
  EstimatedClean b = sample_truncated(net, cond, plan, s, r2);
  EstimatedClean c = sample_truncated(net, cond, plan, s, r3);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  CHECK(a.source_t == plan.t_min);
}

TEST_CASE("the uniform baseline walks the full range down to t=1") {
  NoiseSchedule s = build_default_schedule(45);
  Rng init(4);
  DenoiserNet net = make_denoiser(2, 2, 8, 16, 45, init);
  LatentState cond = make_state(Vec(2, 0.0), 0);
  Rng rng(5);
  EstimatedClean out = sample_uniform_baseline(net, cond, 15, s, rng);
  CHECK(out.source_t == 1);
  CHECK(out.values.size() == 2);
}

TEST_CASE("state construction rejects bad inputs") {
  CHECK_THROWS_AS(make_state({std::nan("")}, 0), NonFiniteError);
  CHECK_THROWS_AS(make_state({1.0, 2.0}, 0, {3}), ShapeMismatchError);

  NoiseSchedule s = two_step();
  LatentState x1 = make_state({1.0}, 1);
  CHECK_THROWS_AS(q_sample(x1, 2, {0.0}, s), TimestepRangeError);
  LatentState x0 = make_state({1.0}, 0);
  CHECK_THROWS_AS(q_sample(x0, 0, {0.0}, s), TimestepRangeError);
  CHECK_THROWS_AS(q_sample(x0, 3, {0.0}, s), TimestepRangeError);
  CHECK_THROWS_AS(q_sample(x0, 1, {0.0, 0.0}, s), ShapeMismatchError);
}

TEST_CASE("posterior_step refuses to move upward in time") {
  NoiseSchedule s = build_default_schedule(10);
  LatentState x5 = make_state({0.0}, 5);
  EstimatedClean x0{{0.0}, 5};
  CHECK_THROWS_AS(posterior_step(x5, x0, s, {0.0}, 7), TimestepRangeError);
  CHECK_THROWS_AS(posterior_step(x5, x0, s, {0.0}, 5), TimestepRangeError);
}
