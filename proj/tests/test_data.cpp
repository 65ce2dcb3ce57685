#include <cmath>

#include "ccsr/data.hpp"
#include "ccsr/metrics.hpp"
#include "doctest.h"

using namespace ccsr;

TEST_CASE("kind names round-trip and reject unknowns") {
  for (ToyKind k : {ToyKind::kSignals1d, ToyKind::kTextures2d, ToyKind::kGaussians})
    CHECK(toy_kind_from_name(toy_kind_name(k)) == k);
  CHECK_THROWS_AS(toy_kind_from_name("faces"), UnknownKindError);
  CHECK_THROWS_AS(toy_kind_from_name(""), UnknownKindError);
}

TEST_CASE("blur with non-positive sigma is the identity") {
  Image img(1, 8);
  for (int i = 0; i < 8; ++i) img.at(0, i) = 0.1 * i;
  const Image out = gaussian_blur(img, 0.0);
  CHECK(out.v == img.v);
}

TEST_CASE("blur preserves constants and normalizes an interior impulse") {
  Image flat(5, 7, 0.37);
  const Image bf = gaussian_blur(flat, 1.2);
  for (double v : bf.v) CHECK(v == doctest::Approx(0.37).epsilon(1e-12));

  Image imp(1, 33);
  imp.at(0, 16) = 1.0;
  const Image bi = gaussian_blur(imp, 1.0);
  double sum = 0.0;
  for (double v : bi.v) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bi.at(0, 16) > bi.at(0, 15));
  for (int i = 1; i <= 3; ++i)
    CHECK(bi.at(0, 16 - i) == doctest::Approx(bi.at(0, 16 + i)).epsilon(1e-12));
}

TEST_CASE("blur removes high-frequency energy") {
  Image img(16, 16);
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 16; ++c) img.at(r, c) = (r + c) % 2 ? 1.0 : 0.0;
  const Image smooth = gaussian_blur(img, 1.5);
  CHECK(band_energy(smooth) < 0.01 * band_energy(img));
}

TEST_CASE("average downsample matches hand values") {
  Image sig(1, 4);
  sig.v = {0.0, 1.0, 2.0, 3.0};
  const Image half = downsample_avg(sig, 2);
  CHECK(half.h == 1);
  CHECK(half.w == 2);
  CHECK(half.at(0, 0) == doctest::Approx(0.5));
  CHECK(half.at(0, 1) == doctest::Approx(2.5));

  Image img(4, 4);
  for (int i = 0; i < 16; ++i) img.v[i] = i;
  const Image q = downsample_avg(img, 2);
  CHECK(q.h == 2);
  CHECK(q.w == 2);
  CHECK(q.at(0, 0) == doctest::Approx((0 + 1 + 4 + 5) / 4.0));
  CHECK(q.at(1, 1) == doctest::Approx((10 + 11 + 14 + 15) / 4.0));
}

TEST_CASE("downsample validates its factor") {
  Image img(4, 6);
  CHECK_THROWS_AS(downsample_avg(img, 0), InvalidRangeError);
  CHECK_THROWS_AS(downsample_avg(img, 4), InvalidRangeError);  // 6 % 4 != 0
  Image odd(3, 4);
  CHECK_THROWS_AS(downsample_avg(odd, 2), InvalidRangeError);  // h not divisible
  CHECK(downsample_avg(img, 1).v == img.v);
}

TEST_CASE("nearest upsample repeats samples") {
  Image lr(1, 2);
  lr.v = {0.2, 0.8};
  const Image up = upsample_condition(lr, 2);
  CHECK(up.w == 4);
  CHECK(up.v == Vec{0.2, 0.2, 0.8, 0.8});

  Image sq(2, 2);
  sq.v = {1.0, 2.0, 3.0, 4.0};
  const Image up2 = upsample_condition(sq, 2);
  CHECK(up2.h == 4);
  CHECK(up2.w == 4);
  CHECK(up2.at(0, 0) == 1.0);
  CHECK(up2.at(1, 1) == 1.0);
  CHECK(up2.at(0, 2) == 2.0);
  CHECK(up2.at(3, 3) == 4.0);
  CHECK_THROWS_AS(upsample_condition(lr, 0), InvalidRangeError);
}

TEST_CASE("downsample inverts upsample on 1-D signals") {
  Rng rng(42);
  Image lr(1, 9);
  for (auto& v : lr.v) v = rng.uniform();
  const Image back = downsample_avg(upsample_condition(lr, 2), 2);
  CHECK(back.v == lr.v);  // (v + v) / 2 is exact
}

TEST_CASE("degrade with trivial parameters is the identity") {
  Rng rng(1);
  Image hr(1, 12);
  for (auto& v : hr.v) v = rng.uniform();
  DegradationParams p;  // all defaults: no blur, scale 1, no noise, no quant
  Rng drng(2);
  const Image lr = degrade(hr, p, drng);
  CHECK(lr.v == hr.v);
}

TEST_CASE("degrade noise has the configured variance") {
  Image hr(1, 4096, 0.5);
  DegradationParams p;
  p.noise_sigma_min = p.noise_sigma_max = 0.05;
  Rng rng(77);
  const Image lr = degrade(hr, p, rng);
  const double m = mean_of(lr.v);
  CHECK(std::abs(m - 0.5) < 0.004);
  CHECK(std::abs(variance_of(lr.v) - 0.0025) < 3e-4);
  for (double v : lr.v) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("degrade quantizes onto a uniform grid") {
  Rng rng(5);
  Image hr(1, 64);
  for (auto& v : hr.v) v = rng.uniform();
  DegradationParams p;
  p.quant_levels = 3;
  Rng drng(6);
  const Image lr = degrade(hr, p, drng);
  for (double v : lr.v) {
    const double lev = v * 2.0;
    CHECK(lev == doctest::Approx(std::round(lev)).epsilon(1e-12));
  }
}

TEST_CASE("degrade rejects bad parameter ranges") {
  Image hr(1, 8, 0.5);
  Rng rng(1);
  DegradationParams p;
  p.scale = 0;
  CHECK_THROWS_AS(degrade(hr, p, rng), InvalidRangeError);
  p = {};
  p.blur_sigma_min = 0.5;
  p.blur_sigma_max = 0.1;
  CHECK_THROWS_AS(degrade(hr, p, rng), InvalidRangeError);
  p = {};
  p.noise_sigma_min = -0.1;
  p.noise_sigma_max = 0.1;
  CHECK_THROWS_AS(degrade(hr, p, rng), InvalidRangeError);
}

TEST_CASE("toy dataset is deterministic and order-independent") {
  DegradationParams p;
  p.blur_sigma_min = 0.3;
  p.blur_sigma_max = 0.8;
  p.scale = 4;
  p.noise_sigma_min = 0.01;
  p.noise_sigma_max = 0.03;

  const auto a = make_toy_dataset(ToyKind::kSignals1d, 6, 32, p, 123);
  const auto b = make_toy_dataset(ToyKind::kSignals1d, 6, 32, p, 123);
  REQUIRE(a.size() == 6);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].hr.v == b[i].hr.v);
    CHECK(a[i].lr.v == b[i].lr.v);
    CHECK(a[i].id == b[i].id);
  }

  // Item i depends only on (seed, i), not on how many items were requested.
  const auto c = make_toy_dataset(ToyKind::kSignals1d, 3, 32, p, 123);
  for (size_t i = 0; i < c.size(); ++i) {
    CHECK(c[i].hr.v == a[i].hr.v);
    CHECK(c[i].lr.v == a[i].lr.v);
  }

  const auto d = make_toy_dataset(ToyKind::kSignals1d, 3, 32, p, 124);
  CHECK(d[0].hr.v != a[0].hr.v);
}

TEST_CASE("toy dataset shapes, ids, and value range") {
  DegradationParams p;
  p.scale = 4;
  p.noise_sigma_min = p.noise_sigma_max = 0.02;

  for (ToyKind kind : {ToyKind::kSignals1d, ToyKind::kTextures2d, ToyKind::kGaussians}) {
    const auto ds = make_toy_dataset(kind, 3, 32, p, 9);
    const bool flat = kind != ToyKind::kTextures2d;
    for (const auto& s : ds) {
      CHECK(s.hr.h == (flat ? 1 : 32));
      CHECK(s.hr.w == 32);
      CHECK(s.lr.h == (flat ? 1 : 8));
      CHECK(s.lr.w == 8);
      CHECK(s.scale == 4);
      for (double v : s.hr.v) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
      CHECK(!s.degradation.empty());
    }
    CHECK(ds[0].id == std::string(toy_kind_name(kind)) + "_0000");
    CHECK(ds[2].id == std::string(toy_kind_name(kind)) + "_0002");
  }

  CHECK_THROWS_AS(make_toy_dataset(ToyKind::kSignals1d, 0, 32, p, 1), InvalidRangeError);
  CHECK_THROWS_AS(make_toy_dataset(ToyKind::kSignals1d, 2, 3, p, 1), InvalidRangeError);
}
