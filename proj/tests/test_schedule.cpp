#include <vector>

#include "ccsr/schedule.hpp"
#include "doctest.h"

using namespace ccsr;

TEST_CASE("linear schedule reproduces the standard 1000-step terminal alpha_bar") {
  NoiseSchedule s = build_linear_schedule(1000, 1e-4, 0.02);
  CHECK(s.alpha_bar(0) == 1.0);
  CHECK(s.alpha_bar(1000) == doctest::Approx(4.0358297653756833e-5).epsilon(1e-10));
  CHECK(s.beta(1) == doctest::Approx(1e-4));
  CHECK(s.beta(1000) == doctest::Approx(0.02));
}

TEST_CASE("default schedule scales the standard beta range by 1000/T") {
  NoiseSchedule s = build_default_schedule(45);
  CHECK(s.T == 45);
  CHECK(s.beta(1) == doctest::Approx(1e-4 * 1000.0 / 45.0));
  CHECK(s.beta(45) == doctest::Approx(0.02 * 1000.0 / 45.0));
  CHECK(s.alpha_bar(45) == doctest::Approx(5.9876392611e-6).epsilon(1e-9));
  CHECK(s.alpha_bar(30) == doctest::Approx(0.00700376875792355).epsilon(1e-10));
  CHECK(s.alpha_bar(15) == doctest::Approx(0.317703550642889).epsilon(1e-10));
}

TEST_CASE("alpha_bar agrees with a direct product recomputation") {
  NoiseSchedule s = build_default_schedule(37);
  double prod = 1.0;
  for (int t = 1; t <= 37; ++t) {
    prod *= 1.0 - s.beta(t);
    CHECK(s.alpha_bar(t) == doctest::Approx(prod).epsilon(1e-12));
    CHECK(s.alpha(t) == doctest::Approx(1.0 - s.beta(t)).epsilon(1e-15));
  }
}

TEST_CASE("alpha_bar is strictly decreasing from one") {
  NoiseSchedule s = build_default_schedule(45);
  for (int t = 1; t <= 45; ++t) CHECK(s.alpha_bar(t) < s.alpha_bar(t - 1));
  CHECK(s.alpha_bar(0) == 1.0);
}

TEST_CASE("schedule accessors reject out-of-range timesteps") {
  NoiseSchedule s = build_default_schedule(10);
  CHECK_THROWS_AS(s.beta(0), TimestepRangeError);
  CHECK_THROWS_AS(s.beta(11), TimestepRangeError);
  CHECK_THROWS_AS(s.alpha_bar(-1), TimestepRangeError);
  CHECK_THROWS_AS(s.alpha_bar(11), TimestepRangeError);
}

TEST_CASE("schedule construction validates its numeric ranges") {
  CHECK_THROWS_AS(build_linear_schedule(1, 1e-4, 0.02), InvalidRangeError);
  CHECK_THROWS_AS(build_linear_schedule(10, 0.0, 0.02), InvalidRangeError);
  CHECK_THROWS_AS(build_linear_schedule(10, 0.03, 0.02), InvalidRangeError);
  CHECK_THROWS_AS(build_linear_schedule(10, 0.01, 1.0), InvalidRangeError);
}

TEST_CASE("the desk-scale plan matches its expected step sequence") {
  NoiseSchedule s = build_default_schedule(45);
  TimestepPlan p = build_nonuniform_plan(s, 2.0 / 3.0, 1.0 / 3.0, 15);
  CHECK(p.t_start == 45);
  CHECK(p.t_max == 30);
  CHECK(p.t_min == 15);
  CHECK(p.steps == std::vector<int>{45, 30, 29, 28, 27, 25, 24, 23, 22, 21, 20, 18, 17, 16, 15});
  CHECK(p.total_evals == 15);
}

TEST_CASE("a minimal three-eval plan still jumps then descends") {
  NoiseSchedule s = build_default_schedule(3);
  TimestepPlan p = build_nonuniform_plan(s, 2.0 / 3.0, 1.0 / 3.0, 3);
  CHECK(p.steps == std::vector<int>{3, 2, 1});
}

TEST_CASE("plan fractions move the working band as requested") {
  NoiseSchedule s = build_default_schedule(45);
  TimestepPlan p = build_nonuniform_plan(s, 4.0 / 5.0, 1.0 / 3.0, 21);
  CHECK(p.t_max == 36);
  CHECK(p.t_min == 15);
  CHECK(p.steps.size() == 21);
}

TEST_CASE("plan steps start at T, jump to t_max, and strictly decrease to t_min") {
  NoiseSchedule s = build_default_schedule(60);
  TimestepPlan p = build_nonuniform_plan(s, 0.7, 0.3, 12);
  REQUIRE(p.steps.size() >= 3);
  CHECK(p.steps.front() == 60);
  CHECK(p.steps[1] == p.t_max);
  CHECK(p.steps.back() == p.t_min);
  for (size_t i = 1; i < p.steps.size(); ++i) CHECK(p.steps[i] < p.steps[i - 1]);
  for (size_t i = 1; i < p.steps.size(); ++i) {
    CHECK(p.steps[i] >= p.t_min);
    CHECK(p.steps[i] <= p.t_max);
  }
}

TEST_CASE("plan construction rejects bad fractions and collapsed bands") {
  NoiseSchedule s = build_default_schedule(45);
  CHECK_THROWS_AS(build_nonuniform_plan(s, 1.0 / 3.0, 2.0 / 3.0, 15), InvalidRangeError);
  CHECK_THROWS_AS(build_nonuniform_plan(s, 2.0 / 3.0, 0.0, 15), InvalidRangeError);
  CHECK_THROWS_AS(build_nonuniform_plan(s, 1.1, 1.0 / 3.0, 15), InvalidRangeError);
  CHECK_THROWS_AS(build_nonuniform_plan(s, 2.0 / 3.0, 1.0 / 3.0, 2), InvalidRangeError);

  NoiseSchedule tiny = build_default_schedule(6);
  CHECK_THROWS_AS(build_nonuniform_plan(tiny, 0.4, 1.0 / 3.0, 5), PlanDegenerateError);
}

TEST_CASE("requesting more evals than distinct levels dedups instead of repeating") {
  NoiseSchedule s = build_default_schedule(12);
  TimestepPlan p = build_nonuniform_plan(s, 2.0 / 3.0, 1.0 / 3.0, 10);
  for (size_t i = 1; i < p.steps.size(); ++i) CHECK(p.steps[i] < p.steps[i - 1]);
  CHECK(p.steps.front() == 12);
  CHECK(p.steps[1] == 8);
  CHECK(p.steps.back() == 4);
  CHECK(p.steps.size() <= 10);
}

TEST_CASE("uniform baseline steps span the full range at the requested count") {
  NoiseSchedule s = build_default_schedule(45);
  std::vector<int> steps = build_uniform_steps(s, 15);
  CHECK(steps == std::vector<int>{45, 42, 39, 36, 32, 29, 26, 23, 20, 17, 14, 10, 7, 4, 1});
  CHECK(steps.front() == 45);
  CHECK(steps.back() == 1);
}
