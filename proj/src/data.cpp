#include "ccsr/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace ccsr {

ToyKind toy_kind_from_name(const std::string& name) {
  if (name == "signals1d") return ToyKind::kSignals1d;
  if (name == "textures2d") return ToyKind::kTextures2d;
  if (name == "gaussians") return ToyKind::kGaussians;
  throw UnknownKindError("unknown dataset kind: " + name);
}

const char* toy_kind_name(ToyKind kind) {
  switch (kind) {
    case ToyKind::kSignals1d: return "signals1d";
    case ToyKind::kTextures2d: return "textures2d";
    case ToyKind::kGaussians: return "gaussians";
  }
  throw UnknownKindError("unknown dataset kind enum");
}

namespace {

Vec gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  Vec k(2 * radius + 1);
  double norm = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    norm += k[i + radius];
  }
  for (auto& w : k) w /= norm;
  return k;
}

int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

}  // namespace

Image gaussian_blur(const Image& img, double sigma) {
  if (sigma <= 0.0) return img;
  const Vec k = gaussian_kernel(sigma);
  const int radius = (static_cast<int>(k.size()) - 1) / 2;

  Image tmp(img.h, img.w);
  for (int r = 0; r < img.h; ++r)
    for (int c = 0; c < img.w; ++c) {
      double s = 0.0;
      for (int i = -radius; i <= radius; ++i)
        s += k[i + radius] * img.at(r, clamp_index(c + i, img.w));
      tmp.at(r, c) = s;
    }
  if (img.h == 1) return tmp;

  Image out(img.h, img.w);
  for (int r = 0; r < img.h; ++r)
    for (int c = 0; c < img.w; ++c) {
      double s = 0.0;
      for (int i = -radius; i <= radius; ++i)
        s += k[i + radius] * tmp.at(clamp_index(r + i, img.h), c);
      out.at(r, c) = s;
    }
  return out;
}

Image downsample_avg(const Image& img, int factor) {
  if (factor < 1) throw InvalidRangeError("downsample_avg: factor must be >= 1");
  if (factor == 1) return img;
  if (img.w % factor != 0 || (img.h != 1 && img.h % factor != 0))
    throw InvalidRangeError("downsample_avg: dimensions not divisible by factor");
  const int oh = img.h == 1 ? 1 : img.h / factor;
  const int ow = img.w / factor;
  const int bh = img.h == 1 ? 1 : factor;
  Image out(oh, ow);
  for (int r = 0; r < oh; ++r)
    for (int c = 0; c < ow; ++c) {
      double s = 0.0;
      for (int i = 0; i < bh; ++i)
        for (int j = 0; j < factor; ++j) s += img.at(r * bh + i, c * factor + j);
      out.at(r, c) = s / (bh * factor);
    }
  return out;
}

Image upsample_condition(const Image& lr, int s) {
  if (s < 1) throw InvalidRangeError("upsample_condition: factor must be >= 1");
  if (s == 1) return lr;
  const int oh = lr.h == 1 ? 1 : lr.h * s;
  const int ow = lr.w * s;
  const int bh = lr.h == 1 ? 1 : s;
  Image out(oh, ow);
  for (int r = 0; r < oh; ++r)
    for (int c = 0; c < ow; ++c) out.at(r, c) = lr.at(r / bh, c / s);
  return out;
}

Image degrade(const Image& hr, const DegradationParams& params, Rng& rng) {
  if (params.scale < 1) throw InvalidRangeError("degrade: scale must be >= 1");
  if (params.blur_sigma_min < 0.0 || params.blur_sigma_max < params.blur_sigma_min)
    throw InvalidRangeError("degrade: bad blur sigma range");
  if (params.noise_sigma_min < 0.0 || params.noise_sigma_max < params.noise_sigma_min)
    throw InvalidRangeError("degrade: bad noise sigma range");

  const double blur_sigma = params.blur_sigma_max > 0.0
                                ? rng.uniform(params.blur_sigma_min, params.blur_sigma_max)
                                : 0.0;
  const double noise_sigma = params.noise_sigma_max > 0.0
                                 ? rng.uniform(params.noise_sigma_min, params.noise_sigma_max)
                                 : 0.0;

  Image out = gaussian_blur(hr, blur_sigma);
  out = downsample_avg(out, params.scale);
  if (noise_sigma > 0.0)
    for (auto& v : out.v) v += noise_sigma * rng.normal();
  clamp01_inplace(out.v);
  if (params.quant_levels > 1) {
    const double q = params.quant_levels - 1;
    for (auto& v : out.v) v = std::floor(v * q + 0.5) / q;
  }
  return out;
}

namespace {

Image gen_signal1d(int size, Rng& rng) {
  Image img(1, size);
  const int n_seg = static_cast<int>(rng.uniform_int(3, 8));

  // Random interior breakpoints, sorted, at least 2 samples apart.
  std::vector<int> bounds{0};
  for (int i = 1; i < n_seg; ++i)
    bounds.push_back(static_cast<int>(rng.uniform_int(2, size - 3)));
  bounds.push_back(size);
  std::sort(bounds.begin(), bounds.end());

  double level = rng.uniform(0.1, 0.9);
  for (int seg = 0; seg < static_cast<int>(bounds.size()) - 1; ++seg) {
    const int a = bounds[seg], b = bounds[seg + 1];
    const double next = rng.uniform(0.1, 0.9);
    const bool ramp = rng.uniform() < 0.5;
    for (int i = a; i < b; ++i) {
      const double frac = b > a + 1 ? static_cast<double>(i - a) / (b - a - 1) : 0.0;
      img.at(0, i) = ramp ? level + (next - level) * frac : level;
    }
    level = next;
  }

  // Small smooth ripple so the signal has fine structure beyond the steps.
  const double amp = rng.uniform(0.01, 0.05);
  const double cycles = rng.uniform(1.0, 4.0);
  const double phase = rng.uniform(0.0, 2.0 * M_PI);
  for (int i = 0; i < size; ++i)
    img.at(0, i) += amp * std::sin(2.0 * M_PI * cycles * i / size + phase);

  clamp01_inplace(img.v);
  return img;
}

Image gen_texture2d(int size, Rng& rng) {
  Image img(size, size, 0.5);

  // Oriented sinusoidal grating.
  const double theta = rng.uniform(0.0, M_PI);
  const double freq = rng.uniform(1.5, 5.0);
  const double phase = rng.uniform(0.0, 2.0 * M_PI);
  const double amp = rng.uniform(0.12, 0.28);
  const double fx = freq * std::cos(theta) / size;
  const double fy = freq * std::sin(theta) / size;
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c)
      img.at(r, c) += amp * std::sin(2.0 * M_PI * (fx * c + fy * r) + phase);

  // A few Gaussian blobs.
  const int n_blobs = static_cast<int>(rng.uniform_int(2, 4));
  for (int b = 0; b < n_blobs; ++b) {
    const double cr = rng.uniform(0.15, 0.85) * size;
    const double cc = rng.uniform(0.15, 0.85) * size;
    const double bs = rng.uniform(size / 16.0, size / 6.0);
    const double ba = rng.uniform(0.15, 0.35) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    for (int r = 0; r < size; ++r)
      for (int c = 0; c < size; ++c) {
        const double d2 = (r - cr) * (r - cr) + (c - cc) * (c - cc);
        img.at(r, c) += ba * std::exp(-0.5 * d2 / (bs * bs));
      }
  }

  // One straight step edge.
  const double et = rng.uniform(0.0, M_PI);
  const double nx = std::cos(et), ny = std::sin(et);
  const double off = rng.uniform(0.3, 0.7) * size * (nx + ny);
  const double step = rng.uniform(0.1, 0.2) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c)
      if (nx * c + ny * r > off) img.at(r, c) += step;

  clamp01_inplace(img.v);
  return img;
}

Image gen_gaussians(int size, Rng& rng) {
  const int k = static_cast<int>(rng.uniform_int(2, 3));
  Vec means(k), sigmas(k), weights(k);
  double wsum = 0.0;
  for (int i = 0; i < k; ++i) {
    means[i] = rng.uniform(0.25, 0.75);
    sigmas[i] = rng.uniform(0.03, 0.1);
    weights[i] = rng.uniform(0.2, 1.0);
    wsum += weights[i];
  }
  Image img(1, size);
  for (int i = 0; i < size; ++i) {
    double u = rng.uniform(0.0, wsum);
    int comp = 0;
    while (comp + 1 < k && u > weights[comp]) {
      u -= weights[comp];
      ++comp;
    }
    img.at(0, i) = clamp01(means[comp] + sigmas[comp] * rng.normal());
  }
  return img;
}

}  // namespace

std::vector<SignalPair> make_toy_dataset(ToyKind kind, int n, int size,
                                         const DegradationParams& params, std::uint64_t seed) {
  if (n < 1) throw InvalidRangeError("make_toy_dataset: n must be >= 1");
  if (size < 4) throw InvalidRangeError("make_toy_dataset: size must be >= 4");
  std::vector<SignalPair> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(i)));
    SignalPair p;
    char idbuf[64];
    std::snprintf(idbuf, sizeof(idbuf), "%s_%04d", toy_kind_name(kind), i);
    p.id = idbuf;
    switch (kind) {
      case ToyKind::kSignals1d: p.hr = gen_signal1d(size, rng); break;
      case ToyKind::kTextures2d: p.hr = gen_texture2d(size, rng); break;
      case ToyKind::kGaussians: p.hr = gen_gaussians(size, rng); break;
    }
    p.scale = params.scale;
    p.lr = degrade(p.hr, params, rng);
    char desc[128];
    std::snprintf(desc, sizeof(desc), "blur[%.3g,%.3g];scale=%d;noise[%.3g,%.3g];quant=%d",
                  params.blur_sigma_min, params.blur_sigma_max, params.scale,
                  params.noise_sigma_min, params.noise_sigma_max, params.quant_levels);
    p.degradation = desc;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace ccsr
