#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "contourbench/raster.hpp"

namespace contourbench {

// Smallest even integer >= x.
inline int even_ceil(double x) {
  if (x <= 0.0) throw std::domain_error("even_ceil: input must be positive");
  return 2 * static_cast<int>(std::ceil(x / 2.0));
}

// Pixel tolerance T derived from the relative max-dist ratio and image size:
// T = even_ceil(S * d_max) with S the longer image side.
struct Tolerance {
  double d_max = 0.0;
  int image_size = 0;  // S
  int t_pixels = 0;    // derived even tolerance
};

inline Tolerance tolerance_for(double d_max, int width, int height) {
  if (d_max <= 0.0) throw std::domain_error("tolerance_for: d_max must be positive");
  if (width <= 0 || height <= 0) throw std::invalid_argument("tolerance_for: zero-sized image");
  Tolerance tol;
  tol.d_max = d_max;
  tol.image_size = std::max(width, height);
  tol.t_pixels = even_ceil(tol.image_size * d_max);
  return tol;
}

struct MatchResult {
  size_t n_pred = 0;
  size_t n_gt = 0;
  size_t n_matched = 0;
};

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

namespace detail {

struct Pixel {
  int x, y;
};

inline std::vector<Pixel> contour_pixels(const ContourMap& c) {
  std::vector<Pixel> out;
  for (int y = 0; y < c.height(); ++y)
    for (int x = 0; x < c.width(); ++x)
      if (c.bits.at(x, y)) out.push_back({x, y});
  return out;
}

inline bool within(const Pixel& a, const Pixel& b, int t) {
  const long long dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy <= static_cast<long long>(t) * t;
}

inline void check_dims(const ContourMap& pred, const ContourMap& gt) {
  if (pred.width() != gt.width() || pred.height() != gt.height())
    throw DimensionMismatch("matching: prediction and ground truth dimensions differ");
}

// Hopcroft-Karp maximum bipartite matching over explicit adjacency lists.
// Deterministic: vertices are processed in insertion (row-major pixel) order.
inline size_t hopcroft_karp(const std::vector<std::vector<int>>& adj, int n_right) {
  const int n_left = static_cast<int>(adj.size());
  constexpr int kNil = -1;
  std::vector<int> match_l(n_left, kNil), match_r(n_right, kNil), dist(n_left);

  // Greedy seed matching; cuts the phase count sharply on boundary-shaped
  // graphs without affecting the final cardinality.
  size_t seeded = 0;
  for (int u = 0; u < n_left; ++u)
    for (int v : adj[u])
      if (match_r[v] == kNil) {
        match_l[u] = v;
        match_r[v] = u;
        ++seeded;
        break;
      }

  auto bfs = [&]() {
    std::queue<int> q;
    bool found = false;
    for (int u = 0; u < n_left; ++u) {
      if (match_l[u] == kNil) { dist[u] = 0; q.push(u); }
      else dist[u] = -1;
    }
    while (!q.empty()) {
      const int u = q.front(); q.pop();
      for (int v : adj[u]) {
        const int w = match_r[v];
        if (w == kNil) found = true;
        else if (dist[w] == -1) { dist[w] = dist[u] + 1; q.push(w); }
      }
    }
    return found;
  };
  std::vector<int> iter(n_left);
  auto dfs = [&](auto&& self, int u) -> bool {
    for (int& i = iter[u]; i < static_cast<int>(adj[u].size()); ++i) {
      const int v = adj[u][i];
      const int w = match_r[v];
      if (w == kNil || (dist[w] == dist[u] + 1 && self(self, w))) {
        match_l[u] = v;
        match_r[v] = u;
        return true;
      }
    }
    dist[u] = -1;
    return false;
  };

  size_t matched = seeded;
  while (bfs()) {
    std::fill(iter.begin(), iter.end(), 0);
    for (int u = 0; u < n_left; ++u)
      if (match_l[u] == kNil && dfs(dfs, u)) ++matched;
  }
  return matched;
}

}  // namespace detail

// Maximum one-to-one matching between pred and gt contour pixels, an edge
// wherever the Euclidean distance is <= T. Reference path: candidate edges
// found by scanning all pairs.
inline MatchResult match_exact(const ContourMap& pred, const ContourMap& gt, const Tolerance& tol) {
  detail::check_dims(pred, gt);
  const auto ps = detail::contour_pixels(pred);
  const auto gs = detail::contour_pixels(gt);
  MatchResult r{ps.size(), gs.size(), 0};
  if (ps.empty() || gs.empty()) return r;

  std::vector<std::vector<int>> adj(ps.size());
  for (size_t i = 0; i < ps.size(); ++i)
    for (size_t j = 0; j < gs.size(); ++j)
      if (detail::within(ps[i], gs[j], tol.t_pixels)) adj[i].push_back(static_cast<int>(j));
  r.n_matched = detail::hopcroft_karp(adj, static_cast<int>(gs.size()));
  return r;
}

// Same contract and same exact cardinality as match_exact; candidate edges
// come from a uniform grid bucket index with cell size T, so runtime stays
// tractable on megapixel rasters.
inline MatchResult match_fast(const ContourMap& pred, const ContourMap& gt, const Tolerance& tol) {
  detail::check_dims(pred, gt);
  const auto ps = detail::contour_pixels(pred);
  const auto gs = detail::contour_pixels(gt);
  MatchResult r{ps.size(), gs.size(), 0};
  if (ps.empty() || gs.empty()) return r;

  const int cell = std::max(tol.t_pixels, 1);
  const int gw = (gt.width() + cell - 1) / cell;
  const int gh = (gt.height() + cell - 1) / cell;
  std::vector<std::vector<int>> buckets(static_cast<size_t>(gw) * gh);
  for (size_t j = 0; j < gs.size(); ++j)
    buckets[static_cast<size_t>(gs[j].y / cell) * gw + gs[j].x / cell].push_back(static_cast<int>(j));

  std::vector<std::vector<int>> adj(ps.size());
  for (size_t i = 0; i < ps.size(); ++i) {
    const int cx = ps[i].x / cell, cy = ps[i].y / cell;
    for (int by = std::max(0, cy - 1); by <= std::min(gh - 1, cy + 1); ++by)
      for (int bx = std::max(0, cx - 1); bx <= std::min(gw - 1, cx + 1); ++bx)
        for (int j : buckets[static_cast<size_t>(by) * gw + bx])
          if (detail::within(ps[i], gs[j], tol.t_pixels)) adj[i].push_back(j);
  }
  r.n_matched = detail::hopcroft_karp(adj, static_cast<int>(gs.size()));
  return r;
}

// Existence-test counts: how many pred pixels have some gt pixel within T and
// vice versa. Not one-to-one; kept for protocol comparison only.
struct LooseMatchResult {
  size_t n_pred = 0;
  size_t n_gt = 0;
  size_t n_pred_hit = 0;
  size_t n_gt_hit = 0;
};

inline LooseMatchResult match_loose(const ContourMap& pred, const ContourMap& gt, const Tolerance& tol) {
  detail::check_dims(pred, gt);
  const auto ps = detail::contour_pixels(pred);
  const auto gs = detail::contour_pixels(gt);
  LooseMatchResult r{ps.size(), gs.size(), 0, 0};
  if (ps.empty() || gs.empty()) return r;

  const int cell = std::max(tol.t_pixels, 1);
  const int gw = (gt.width() + cell - 1) / cell;
  const int gh = (gt.height() + cell - 1) / cell;
  std::vector<std::vector<int>> buckets(static_cast<size_t>(gw) * gh);
  for (size_t j = 0; j < gs.size(); ++j)
    buckets[static_cast<size_t>(gs[j].y / cell) * gw + gs[j].x / cell].push_back(static_cast<int>(j));

  std::vector<uint8_t> gt_hit(gs.size(), 0);
  for (const auto& p : ps) {
    bool hit = false;
    const int cx = p.x / cell, cy = p.y / cell;
    for (int by = std::max(0, cy - 1); by <= std::min(gh - 1, cy + 1); ++by)
      for (int bx = std::max(0, cx - 1); bx <= std::min(gw - 1, cx + 1); ++bx)
        for (int j : buckets[static_cast<size_t>(by) * gw + bx])
          if (detail::within(p, gs[j], tol.t_pixels)) { hit = true; gt_hit[j] = 1; }
    if (hit) ++r.n_pred_hit;
  }
  for (uint8_t h : gt_hit) r.n_gt_hit += h;
  return r;
}

}  // namespace contourbench
