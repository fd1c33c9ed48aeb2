#pragma once

#include "contourbench/raster.hpp"

namespace contourbench {

// Zhang-Suen thinning. Reduces a binary map to a one-pixel-wide skeleton;
// optional pre-matching step for thick binarized predictions.
inline ContourMap thin(const ContourMap& c) {
  const int w = c.width(), h = c.height();
  Grid<uint8_t> img = c.bits;

  auto px = [&](int x, int y) -> uint8_t {
    return img.in_bounds(x, y) ? img.at(x, y) : 0;
  };
  // Neighbors P2..P9 clockwise from north.
  auto neighbors = [&](int x, int y, uint8_t n[8]) {
    n[0] = px(x, y - 1); n[1] = px(x + 1, y - 1); n[2] = px(x + 1, y);
    n[3] = px(x + 1, y + 1); n[4] = px(x, y + 1); n[5] = px(x - 1, y + 1);
    n[6] = px(x - 1, y); n[7] = px(x - 1, y - 1);
  };

  bool changed = true;
  std::vector<std::pair<int, int>> to_clear;
  while (changed) {
    changed = false;
    for (int phase = 0; phase < 2; ++phase) {
      to_clear.clear();
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          if (!img.at(x, y)) continue;
          uint8_t n[8];
          neighbors(x, y, n);
          int b = 0, a = 0;
          for (int i = 0; i < 8; ++i) {
            b += n[i];
            if (!n[i] && n[(i + 1) % 8]) ++a;
          }
          if (b < 2 || b > 6 || a != 1) continue;
          const bool cond = phase == 0
              ? (!(n[0] && n[2] && n[4]) && !(n[2] && n[4] && n[6]))
              : (!(n[0] && n[2] && n[6]) && !(n[0] && n[4] && n[6]));
          if (cond) to_clear.emplace_back(x, y);
        }
      for (auto [x, y] : to_clear) img.at(x, y) = 0;
      if (!to_clear.empty()) changed = true;
    }
  }
  ContourMap out;
  out.bits = std::move(img);
  return out;
}

}  // namespace contourbench
