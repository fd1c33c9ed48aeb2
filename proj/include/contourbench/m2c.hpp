#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "contourbench/raster.hpp"

namespace contourbench {

// One semantic class of a source dataset.
struct ClassSpec {
  uint8_t index = 0;
  std::string name;
  std::string source_dataset;
};

struct ClassError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class Connectivity { Four = 4, Eight = 8 };

namespace detail {
inline std::span<const std::pair<int, int>> neighbor_offsets(Connectivity conn) {
  static constexpr std::array<std::pair<int, int>, 4> four{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
  static constexpr std::array<std::pair<int, int>, 8> eight{
      {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};
  if (conn == Connectivity::Four) return {four.data(), four.size()};
  return {eight.data(), eight.size()};
}
}  // namespace detail

// Mask2Contour for one class: the inner boundary of the class region. A pixel
// is contour iff it carries the class and some in-image neighbor carries a
// different, non-ignore label. Out-of-image never counts as background, and
// ignore pixels never trigger a contour.
inline ContourMap mask_to_contour(const SegMask& mask, uint8_t cls,
                                  Connectivity conn = Connectivity::Four) {
  if (mask.ignore_index && cls == *mask.ignore_index)
    throw ClassError("mask_to_contour: class equals ignore_index");
  const auto offs = detail::neighbor_offsets(conn);
  ContourMap out(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.labels.at(x, y) != cls) continue;
      for (auto [dx, dy] : offs) {
        const int nx = x + dx, ny = y + dy;
        if (!mask.labels.in_bounds(nx, ny)) continue;
        const uint8_t q = mask.labels.at(nx, ny);
        if (q != cls && !(mask.ignore_index && q == *mask.ignore_index)) {
          out.bits.at(x, y) = 1;
          break;
        }
      }
    }
  return out;
}

struct ClassContour {
  ContourMap contour;
  bool empty_foreground = false;  // class has no pixels in the mask at all
};

// Per-class contours for a whole class table. Classes absent from the mask
// yield empty maps flagged empty_foreground.
inline std::map<uint8_t, ClassContour> mask_to_contours_all(
    const SegMask& mask, const std::vector<ClassSpec>& classes,
    Connectivity conn = Connectivity::Four) {
  if (classes.empty()) throw ClassError("mask_to_contours_all: empty class table");
  std::vector<size_t> fg_count(256, 0);
  for (uint8_t v : mask.labels.data) ++fg_count[v];

  std::map<uint8_t, ClassContour> out;
  for (const auto& c : classes) {
    ClassContour cc;
    cc.contour = mask_to_contour(mask, c.index, conn);
    cc.empty_foreground = (fg_count[c.index] == 0);
    out.emplace(c.index, std::move(cc));
  }
  return out;
}

}  // namespace contourbench
