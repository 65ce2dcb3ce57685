#include "ccsr/metrics.hpp"

#include <cmath>

namespace ccsr {

namespace {

void check_same_shape(const Image& a, const Image& b, const char* op) {
  if (a.h != b.h || a.w != b.w)
    throw ShapeMismatchError(std::string(op) + ": image shapes disagree");
}

void check_stack(const RunStack& stack) {
  if (stack.n_runs() < 2) throw InsufficientRunsError("l_std: need at least 2 runs");
  const size_t len = static_cast<size_t>(stack.h) * stack.w;
  for (const auto& r : stack.runs)
    if (r.size() != len) throw ShapeMismatchError("l_std: run shape disagrees with stack shape");
}

}  // namespace

MetricMatrix make_metric_matrix(const std::string& metric, int n_images, int n_runs) {
  if (n_images < 1 || n_runs < 1)
    throw InvalidRangeError("make_metric_matrix: need at least one image and one run");
  MetricMatrix m;
  m.metric = metric;
  m.n_images = n_images;
  m.n_runs = n_runs;
  m.values.assign(static_cast<size_t>(n_images) * n_runs, 0.0);
  return m;
}

double psnr(const Image& a, const Image& b, double peak, double ceiling_db) {
  check_same_shape(a, b, "psnr");
  if (!(peak > 0.0)) throw InvalidRangeError("psnr: peak must be positive");
  if (a.v.empty()) throw InvalidRangeError("psnr: empty image");
  double mse = 0.0;
  for (size_t i = 0; i < a.v.size(); ++i) {
    const double d = a.v[i] - b.v[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.v.size());
  if (mse == 0.0) return ceiling_db;
  const double db = 10.0 * std::log10(peak * peak / mse);
  return std::min(db, ceiling_db);
}

double ssim(const Image& a, const Image& b) {
  check_same_shape(a, b, "ssim");
  constexpr int kWin = 11;
  constexpr double kSigma = 1.5;
  constexpr double kC1 = 0.01 * 0.01;  // (K1 L)^2, L = 1
  constexpr double kC2 = 0.03 * 0.03;
  if (a.h < kWin || a.w < kWin)
    throw TooSmallImageError("ssim: image smaller than the 11x11 window");

  double win[kWin][kWin];
  double wsum = 0.0;
  for (int r = 0; r < kWin; ++r)
    for (int c = 0; c < kWin; ++c) {
      const double dr = r - (kWin - 1) / 2.0;
      const double dc = c - (kWin - 1) / 2.0;
      win[r][c] = std::exp(-(dr * dr + dc * dc) / (2.0 * kSigma * kSigma));
      wsum += win[r][c];
    }
  for (int r = 0; r < kWin; ++r)
    for (int c = 0; c < kWin; ++c) win[r][c] /= wsum;

  double total = 0.0;
  long count = 0;
  for (int r0 = 0; r0 + kWin <= a.h; ++r0) {
    for (int c0 = 0; c0 + kWin <= a.w; ++c0) {
      double mu_a = 0.0, mu_b = 0.0;
      for (int r = 0; r < kWin; ++r)
        for (int c = 0; c < kWin; ++c) {
          mu_a += win[r][c] * a.at(r0 + r, c0 + c);
          mu_b += win[r][c] * b.at(r0 + r, c0 + c);
        }
      double var_a = 0.0, var_b = 0.0, cov = 0.0;
      for (int r = 0; r < kWin; ++r)
        for (int c = 0; c < kWin; ++c) {
          const double da = a.at(r0 + r, c0 + c) - mu_a;
          const double db = b.at(r0 + r, c0 + c) - mu_b;
          var_a += win[r][c] * da * da;
          var_b += win[r][c] * db * db;
          cov += win[r][c] * da * db;
        }
      const double num = (2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2);
      const double den = (mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2);
      total += num / den;
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

double g_std(const MetricMatrix& matrix) {
  if (matrix.n_runs < 2) throw InsufficientRunsError("g_std: need at least 2 runs");
  if (matrix.n_images < 1) throw InvalidRangeError("g_std: empty matrix");
  double acc = 0.0;
  for (int j = 0; j < matrix.n_images; ++j) {
    bool all_same = true;
    for (int i = 1; i < matrix.n_runs && all_same; ++i) all_same = matrix.at(j, i) == matrix.at(j, 0);
    if (all_same) continue;
    double mean = 0.0;
    for (int i = 0; i < matrix.n_runs; ++i) mean += matrix.at(j, i);
    mean /= matrix.n_runs;
    double ss = 0.0;
    for (int i = 0; i < matrix.n_runs; ++i) {
      const double d = matrix.at(j, i) - mean;
      ss += d * d;
    }
    acc += std::sqrt(ss / matrix.n_runs);
  }
  return acc / matrix.n_images;
}

double l_std(const RunStack& stack) {
  check_stack(stack);
  const size_t len = static_cast<size_t>(stack.h) * stack.w;
  const int n = stack.n_runs();
  double acc = 0.0;
  for (size_t p = 0; p < len; ++p) {
    // Identical values have zero spread exactly; the general path would leak
    // rounding noise from mean division.
    bool all_same = true;
    for (int i = 1; i < n && all_same; ++i) all_same = stack.runs[i][p] == stack.runs[0][p];
    if (all_same) continue;
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += stack.runs[i][p];
    mean /= n;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = stack.runs[i][p] - mean;
      ss += d * d;
    }
    acc += std::sqrt(ss / n);
  }
  return acc / static_cast<double>(len);
}

double l_std_dataset(const std::vector<RunStack>& stacks) {
  if (stacks.empty()) throw InvalidRangeError("l_std_dataset: no stacks");
  double acc = 0.0;
  for (const auto& s : stacks) acc += l_std(s);
  return acc / static_cast<double>(stacks.size());
}

double band_energy(const Image& image) {
  if (image.h == 1) {
    if (image.w < 3) throw TooSmallImageError("band_energy: signal shorter than 3");
    double acc = 0.0;
    for (int c = 1; c + 1 < image.w; ++c) {
      const double r = image.at(0, c - 1) - 2.0 * image.at(0, c) + image.at(0, c + 1);
      acc += r * r;
    }
    return acc / static_cast<double>(image.w - 2);
  }
  if (image.h < 3 || image.w < 3) throw TooSmallImageError("band_energy: image smaller than 3x3");
  double acc = 0.0;
  long count = 0;
  for (int r = 1; r + 1 < image.h; ++r) {
    for (int c = 1; c + 1 < image.w; ++c) {
      const double resp = image.at(r - 1, c) + image.at(r + 1, c) + image.at(r, c - 1) +
                          image.at(r, c + 1) - 4.0 * image.at(r, c);
      acc += resp * resp;
      ++count;
    }
  }
  return acc / static_cast<double>(count);
}

}  // namespace ccsr
