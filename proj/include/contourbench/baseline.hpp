#pragma once

#include <algorithm>
#include <cmath>

#include "contourbench/raster.hpp"

namespace contourbench {

// Training-free contour predictor configuration.
struct BaselineConfig {
  int blur_radius = 1;
  enum class Normalize { GlobalMax, Percentile } normalize = Normalize::GlobalMax;
  double percentile = 99.0;  // used when normalize == Percentile, in (50, 100]
};

namespace detail {

// Box blur via integral image; windows are clipped at the border and divided
// by their actual area.
inline Grid<double> box_blur(const Grid<float>& img, int radius) {
  const int w = img.width, h = img.height;
  Grid<double> out(w, h);
  if (radius <= 0) {
    for (size_t i = 0; i < img.size(); ++i) out.data[i] = img.data[i];
    return out;
  }
  std::vector<double> integral(static_cast<size_t>(w + 1) * (h + 1), 0.0);
  auto I = [&](int x, int y) -> double& { return integral[static_cast<size_t>(y) * (w + 1) + x]; };
  for (int y = 1; y <= h; ++y)
    for (int x = 1; x <= w; ++x)
      I(x, y) = img.at(x - 1, y - 1) + I(x - 1, y) + I(x, y - 1) - I(x - 1, y - 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - radius), x1 = std::min(w - 1, x + radius);
      const int y0 = std::max(0, y - radius), y1 = std::min(h - 1, y + radius);
      const double sum = I(x1 + 1, y1 + 1) - I(x0, y1 + 1) - I(x1 + 1, y0) + I(x0, y0);
      out.at(x, y) = sum / ((x1 - x0 + 1) * (y1 - y0 + 1));
    }
  return out;
}

}  // namespace detail

// Gradient-magnitude contour probability: box blur, 3x3 central differences
// with replicated borders, then normalization to [0,1]. Deterministic.
inline ProbMap predict_gradient(const Grid<float>& image, const BaselineConfig& cfg = {}) {
  if (image.size() == 0) throw std::invalid_argument("predict_gradient: empty image");
  if (cfg.blur_radius < 0) throw std::invalid_argument("predict_gradient: negative blur radius");
  if (cfg.normalize == BaselineConfig::Normalize::Percentile &&
      (cfg.percentile <= 50.0 || cfg.percentile > 100.0))
    throw std::invalid_argument("predict_gradient: percentile must be in (50, 100]");

  const int w = image.width, h = image.height;
  const Grid<double> blurred = detail::box_blur(image, cfg.blur_radius);
  auto px = [&](int x, int y) {
    return blurred.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
  };

  Grid<double> mag(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double gx = 0.5 * (px(x + 1, y) - px(x - 1, y));
      const double gy = 0.5 * (px(x, y + 1) - px(x, y - 1));
      mag.at(x, y) = std::sqrt(gx * gx + gy * gy);
    }

  double scale = 0.0;
  if (cfg.normalize == BaselineConfig::Normalize::GlobalMax) {
    for (double v : mag.data) scale = std::max(scale, v);
  } else {
    std::vector<double> sorted = mag.data;
    std::sort(sorted.begin(), sorted.end());
    const size_t idx = std::min(sorted.size() - 1,
                                static_cast<size_t>(cfg.percentile / 100.0 * (sorted.size() - 1)));
    scale = sorted[idx];
  }

  ProbMap out(w, h);
  if (scale > 0.0)
    for (size_t i = 0; i < mag.data.size(); ++i)
      out.probs.data[i] = static_cast<float>(std::min(1.0, mag.data[i] / scale));
  return out;
}

inline ProbMap predict_gradient(const ProbMap& image, const BaselineConfig& cfg = {}) {
  return predict_gradient(image.probs, cfg);
}

}  // namespace contourbench
