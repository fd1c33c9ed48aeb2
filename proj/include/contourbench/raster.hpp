#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace contourbench {

// Row-major 2D grid. All rasters in the toolkit are built on this; values
// are immutable by convention once a raster leaves its producer.
template <typename T>
struct Grid {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  Grid() = default;
  Grid(int w, int h, T fill = T{}) : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("Grid: non-positive dimensions");
  }

  T at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
  T& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
  size_t size() const { return data.size(); }

  bool operator==(const Grid&) const = default;
};

// Semantic segmentation mask: class index per pixel, optional ignore label.
struct SegMask {
  Grid<uint8_t> labels;
  std::optional<uint8_t> ignore_index;

  int width() const { return labels.width; }
  int height() const { return labels.height; }
  bool is_ignored(int x, int y) const {
    return ignore_index && labels.at(x, y) == *ignore_index;
  }
};

// Binary contour raster, entries are exactly 0 or 1.
struct ContourMap {
  Grid<uint8_t> bits;

  ContourMap() = default;
  explicit ContourMap(int w, int h) : bits(w, h, 0) {}

  int width() const { return bits.width; }
  int height() const { return bits.height; }
  size_t count() const {
    size_t n = 0;
    for (uint8_t b : bits.data) n += b;
    return n;
  }

  bool operator==(const ContourMap&) const = default;
};

// Contour probability raster, values in [0,1].
struct ProbMap {
  Grid<float> probs;

  ProbMap() = default;
  explicit ProbMap(int w, int h) : probs(w, h, 0.0f) {}

  int width() const { return probs.width; }
  int height() const { return probs.height; }
};

enum class SEKind { Square, Disk };

// Structuring element for binary morphology. Size is the full extent in
// pixels and must be odd; square size 1 is the dilation identity.
struct StructuringElement {
  SEKind kind = SEKind::Square;
  int size = 3;

  StructuringElement() = default;
  StructuringElement(SEKind k, int s) : kind(k), size(s) {
    if (s < 1 || s % 2 == 0) throw std::invalid_argument("StructuringElement: size must be odd and >= 1");
  }

  static StructuringElement square(int s) { return {SEKind::Square, s}; }
  static StructuringElement disk(int s) { return {SEKind::Disk, s}; }

  // Offsets of the footprint relative to the center pixel.
  std::vector<std::pair<int, int>> offsets() const {
    const int r = size / 2;
    std::vector<std::pair<int, int>> out;
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) {
        if (kind == SEKind::Disk && dx * dx + dy * dy > r * r) continue;
        out.emplace_back(dx, dy);
      }
    return out;
  }
};

// Binary dilation; footprint clipped at the image border, no wraparound.
inline ContourMap dilate(const ContourMap& c, const StructuringElement& se) {
  ContourMap out(c.width(), c.height());
  const auto offs = se.offsets();
  for (int y = 0; y < c.height(); ++y)
    for (int x = 0; x < c.width(); ++x) {
      if (!c.bits.at(x, y)) continue;
      for (auto [dx, dy] : offs) {
        const int nx = x + dx, ny = y + dy;
        if (c.bits.in_bounds(nx, ny)) out.bits.at(nx, ny) = 1;
      }
    }
  return out;
}

inline ContourMap erode(const ContourMap& c, const StructuringElement& se) {
  ContourMap out(c.width(), c.height());
  const auto offs = se.offsets();
  for (int y = 0; y < c.height(); ++y)
    for (int x = 0; x < c.width(); ++x) {
      bool all = true;
      for (auto [dx, dy] : offs) {
        const int nx = x + dx, ny = y + dy;
        if (!c.bits.in_bounds(nx, ny) || !c.bits.at(nx, ny)) { all = false; break; }
      }
      out.bits.at(x, y) = all ? 1 : 0;
    }
  return out;
}

// Threshold a probability map with strict ">": t=1.0 gives the empty map,
// t=0.0 keeps only strictly positive pixels.
inline ContourMap binarize(const ProbMap& p, double t) {
  ContourMap out(p.width(), p.height());
  for (size_t i = 0; i < p.probs.size(); ++i)
    out.bits.data[i] = (p.probs.data[i] > t) ? 1 : 0;
  return out;
}

}  // namespace contourbench
