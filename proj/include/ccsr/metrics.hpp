#pragma once

#include <string>

#include "ccsr/common.hpp"

namespace ccsr {

// N stochastic restorations of one source image, all the same shape. h = 1
// holds flat signals.
struct RunStack {
  std::string image_id;
  int h = 0;
  int w = 0;
  std::vector<Vec> runs;

  int n_runs() const { return static_cast<int>(runs.size()); }
};

// Per-image, per-run values of one scalar metric: entry (image j, run i).
struct MetricMatrix {
  std::string metric;
  int n_images = 0;
  int n_runs = 0;
  std::vector<double> values;  // row-major [n_images][n_runs]

  double& at(int image, int run) { return values[static_cast<size_t>(image) * n_runs + run]; }
  double at(int image, int run) const { return values[static_cast<size_t>(image) * n_runs + run]; }
};

MetricMatrix make_metric_matrix(const std::string& metric, int n_images, int n_runs);

// 10 log10(peak^2 / MSE), clamped at ceiling_db when the images are identical
// so downstream aggregation stays finite.
double psnr(const Image& a, const Image& b, double peak = 1.0, double ceiling_db = 100.0);

// Mean local SSIM, 11x11 Gaussian window sigma 1.5, K1 = 0.01, K2 = 0.03,
// dynamic range 1. Windows are evaluated where fully inside the image.
double ssim(const Image& a, const Image& b);

// Global stability: population STD of the metric across runs, per image,
// averaged over images.
double g_std(const MetricMatrix& matrix);

// Local stability: population STD of each pixel across runs, averaged over
// pixels (and images via l_std_dataset).
double l_std(const RunStack& stack);
double l_std_dataset(const std::vector<RunStack>& stacks);

// Sharpness proxy: mean squared response of the 3x3 Laplacian. For h = 1
// inputs the second difference along the row is used instead.
double band_energy(const Image& image);

}  // namespace ccsr
