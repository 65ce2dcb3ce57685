#pragma once

#include <string>

#include "ccsr/common.hpp"

namespace ccsr {

enum class ToyKind { kSignals1d, kTextures2d, kGaussians };

ToyKind toy_kind_from_name(const std::string& name);
const char* toy_kind_name(ToyKind kind);

struct DegradationParams {
  double blur_sigma_min = 0.0;
  double blur_sigma_max = 0.0;
  int scale = 1;
  double noise_sigma_min = 0.0;
  double noise_sigma_max = 0.0;
  int quant_levels = 0;  // 0 disables quantization

  bool operator==(const DegradationParams&) const = default;
};

struct SignalPair {
  std::string id;
  Image hr;
  Image lr;
  int scale = 1;
  std::string degradation;  // human-readable record of the drawn parameters
};

// Separable Gaussian blur, truncated kernel radius ceil(3 sigma), edge
// replication. sigma <= 0 is the identity.
Image gaussian_blur(const Image& img, double sigma);

// Average-pool downsample; both dimensions (w only when h = 1) must divide by
// the factor.
Image downsample_avg(const Image& img, int factor);

// Nearest-neighbor upsample: 1-D repeat / 2-D block repeat.
Image upsample_condition(const Image& lr, int s);

// blur -> downsample -> additive Gaussian noise (clipped to [0,1]) ->
// optional uniform quantization. Blur and noise sigmas are drawn from the
// configured ranges.
Image degrade(const Image& hr, const DegradationParams& params, Rng& rng);

// Deterministic synthetic corpus; item i derives its own seed via
// Rng::mix(seed, i) so generation order is irrelevant.
std::vector<SignalPair> make_toy_dataset(ToyKind kind, int n, int size,
                                         const DegradationParams& params, std::uint64_t seed);

}  // namespace ccsr
