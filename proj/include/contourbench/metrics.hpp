#pragma once

#include <json.hpp>

#include <string>
#include <tuple>
#include <vector>

#include "contourbench/matching.hpp"
#include "contourbench/parallel.hpp"
#include "contourbench/raster.hpp"
#include "contourbench/thinning.hpp"
#include "contourbench/version.hpp"

namespace contourbench {

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

namespace detail {

// Empty/empty convention: P=R=F=1 when both sides are empty, the empty side
// alone scores 0.
inline double safe_ratio(size_t num, size_t den, size_t other_side) {
  if (den == 0) return other_side == 0 ? 1.0 : 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

inline Prf prf_from(size_t n_pred, size_t n_gt, size_t matched_pred, size_t matched_gt) {
  Prf r;
  r.precision = safe_ratio(matched_pred, n_pred, n_gt);
  r.recall = safe_ratio(matched_gt, n_gt, n_pred);
  r.f1 = (r.precision + r.recall > 0.0)
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

}  // namespace detail

inline Prf prf(const MatchResult& m) {
  return detail::prf_from(m.n_pred, m.n_gt, m.n_matched, m.n_matched);
}

// One (image, threshold) cell. For the exact one-to-one protocol
// matched_pred == matched_gt; the loose existence protocol splits them.
struct MatchCounts {
  size_t n_pred = 0;
  size_t n_gt = 0;
  size_t matched_pred = 0;
  size_t matched_gt = 0;
};

struct ThresholdSweep {
  std::vector<double> thresholds;
  std::vector<std::vector<MatchCounts>> per_image;  // [image][threshold]
};

enum class ThinningMode { Off, On };
enum class MatchProtocol { Exact, Loose };

struct SweepOptions {
  ThinningMode thinning = ThinningMode::Off;
  MatchProtocol protocol = MatchProtocol::Exact;
  int workers = 1;
};

// Interior threshold grid i/(k+1), i=1..k; excludes 0 and 1.
inline std::vector<double> threshold_grid(int k) {
  if (k < 2) throw std::invalid_argument("threshold_grid: need at least 2 thresholds");
  std::vector<double> t(k);
  for (int i = 1; i <= k; ++i) t[i - 1] = static_cast<double>(i) / (k + 1);
  return t;
}

inline ThresholdSweep sweep(const std::vector<ProbMap>& preds, const std::vector<ContourMap>& gts,
                            const Tolerance& tol, int k_thresholds,
                            const SweepOptions& opts = {}) {
  if (preds.size() != gts.size() || preds.empty())
    throw std::invalid_argument("sweep: prediction/ground-truth count mismatch");
  for (size_t i = 0; i < preds.size(); ++i)
    if (preds[i].width() != gts[i].width() || preds[i].height() != gts[i].height())
      throw DimensionMismatch("sweep: dimensions differ at image " + std::to_string(i));

  ThresholdSweep sw;
  sw.thresholds = threshold_grid(k_thresholds);
  sw.per_image.assign(preds.size(), std::vector<MatchCounts>(sw.thresholds.size()));

  const size_t n_cells = preds.size() * sw.thresholds.size();
  parallel_for(n_cells, opts.workers, [&](size_t cell) {
    const size_t img = cell / sw.thresholds.size();
    const size_t ti = cell % sw.thresholds.size();
    ContourMap bin = binarize(preds[img], sw.thresholds[ti]);
    if (opts.thinning == ThinningMode::On) bin = thin(bin);
    MatchCounts& c = sw.per_image[img][ti];
    if (opts.protocol == MatchProtocol::Exact) {
      const MatchResult m = match_fast(bin, gts[img], tol);
      c = {m.n_pred, m.n_gt, m.n_matched, m.n_matched};
    } else {
      const LooseMatchResult m = match_loose(bin, gts[img], tol);
      c = {m.n_pred, m.n_gt, m.n_pred_hit, m.n_gt_hit};
    }
  });
  return sw;
}

struct OdsResult {
  double f = 0.0;
  double threshold = 0.0;
  size_t threshold_index = 0;
};

// Best single dataset-wide threshold; counts are summed over images before
// the F computation. Ties break toward the lower threshold.
inline OdsResult ods(const ThresholdSweep& sw) {
  OdsResult best{-1.0, 0.0, 0};
  for (size_t ti = 0; ti < sw.thresholds.size(); ++ti) {
    MatchCounts sum;
    for (const auto& row : sw.per_image) {
      sum.n_pred += row[ti].n_pred;
      sum.n_gt += row[ti].n_gt;
      sum.matched_pred += row[ti].matched_pred;
      sum.matched_gt += row[ti].matched_gt;
    }
    const double f = detail::prf_from(sum.n_pred, sum.n_gt, sum.matched_pred, sum.matched_gt).f1;
    if (f > best.f) best = {f, sw.thresholds[ti], ti};
  }
  return best;
}

// Best per-image threshold; the chosen cells' counts are summed and the
// aggregate F of those sums is returned.
inline double ois(const ThresholdSweep& sw) {
  MatchCounts sum;
  for (const auto& row : sw.per_image) {
    size_t best_ti = 0;
    double best_f = -1.0;
    for (size_t ti = 0; ti < row.size(); ++ti) {
      const double f =
          detail::prf_from(row[ti].n_pred, row[ti].n_gt, row[ti].matched_pred, row[ti].matched_gt).f1;
      if (f > best_f) { best_f = f; best_ti = ti; }
    }
    sum.n_pred += row[best_ti].n_pred;
    sum.n_gt += row[best_ti].n_gt;
    sum.matched_pred += row[best_ti].matched_pred;
    sum.matched_gt += row[best_ti].matched_gt;
  }
  return detail::prf_from(sum.n_pred, sum.n_gt, sum.matched_pred, sum.matched_gt).f1;
}

// IoU after dilating both maps with the same kernel; tolerant overlap measure
// for one-pixel-wide structures. 1.0 when both maps are empty.
inline double line_iou(const ContourMap& pred, const ContourMap& gt, const StructuringElement& se) {
  if (pred.width() != gt.width() || pred.height() != gt.height())
    throw DimensionMismatch("line_iou: dimensions differ");
  const ContourMap pd = dilate(pred, se);
  const ContourMap gd = dilate(gt, se);
  size_t inter = 0, uni = 0;
  for (size_t i = 0; i < pd.bits.size(); ++i) {
    inter += pd.bits.data[i] & gd.bits.data[i];
    uni += pd.bits.data[i] | gd.bits.data[i];
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

inline double line_iou(const ContourMap& pred, const ContourMap& gt, int k) {
  return line_iou(pred, gt, StructuringElement::square(k));
}

struct EvalParams {
  double d_max = 0.0075;
  int k_thresholds = 51;
  int iou_kernel = 3;
  SEKind iou_kernel_kind = SEKind::Square;
  ThinningMode thinning = ThinningMode::Off;
  MatchProtocol protocol = MatchProtocol::Exact;
  int workers = 1;
};

struct EvalReport {
  double ods_f = 0.0;
  double ods_threshold = 0.0;
  double ois_f = 0.0;
  double line_iou = 0.0;  // macro average at the ODS threshold
  size_t n_images = 0;
  Tolerance tolerance;
  std::vector<std::tuple<double, double, double, double>> per_threshold_prf;  // (t, P, R, F)
  EvalParams params;
};

inline EvalReport evaluate(const std::vector<ProbMap>& preds, const std::vector<ContourMap>& gts,
                           const EvalParams& params = {}) {
  if (preds.size() != gts.size() || preds.empty())
    throw std::invalid_argument("evaluate: prediction/ground-truth count mismatch");

  // Tolerance derives from the first pair; the benchmark protocol resizes all
  // images to a common size before evaluation.
  const Tolerance tol = tolerance_for(params.d_max, preds[0].width(), preds[0].height());

  SweepOptions opts{params.thinning, params.protocol, params.workers};
  const ThresholdSweep sw = sweep(preds, gts, tol, params.k_thresholds, opts);
  const OdsResult od = ods(sw);

  EvalReport rep;
  rep.ods_f = od.f;
  rep.ods_threshold = od.threshold;
  rep.ois_f = ois(sw);
  rep.n_images = preds.size();
  rep.tolerance = tol;
  rep.params = params;

  for (size_t ti = 0; ti < sw.thresholds.size(); ++ti) {
    MatchCounts sum;
    for (const auto& row : sw.per_image) {
      sum.n_pred += row[ti].n_pred;
      sum.n_gt += row[ti].n_gt;
      sum.matched_pred += row[ti].matched_pred;
      sum.matched_gt += row[ti].matched_gt;
    }
    const Prf p = detail::prf_from(sum.n_pred, sum.n_gt, sum.matched_pred, sum.matched_gt);
    rep.per_threshold_prf.emplace_back(sw.thresholds[ti], p.precision, p.recall, p.f1);
  }

  // LineIoU per image at the ODS-optimal threshold, macro-averaged. Raw
  // binarized predictions; thinning applies to matching only.
  const StructuringElement se{params.iou_kernel_kind, params.iou_kernel};
  std::vector<double> ious(preds.size());
  parallel_for(preds.size(), params.workers, [&](size_t i) {
    ious[i] = line_iou(binarize(preds[i], od.threshold), gts[i], se);
  });
  double acc = 0.0;
  for (double v : ious) acc += v;
  rep.line_iou = acc / static_cast<double>(preds.size());
  return rep;
}

inline nlohmann::ordered_json report_to_json(const EvalReport& rep) {
  nlohmann::ordered_json j;
  j["toolkit"] = kToolkitName;
  j["version"] = kVersion;
  j["params"] = {
      {"d_max", rep.params.d_max},
      {"thresholds", rep.params.k_thresholds},
      {"iou_kernel", rep.params.iou_kernel},
      {"iou_kernel_kind", rep.params.iou_kernel_kind == SEKind::Square ? "square" : "disk"},
      {"thinning", rep.params.thinning == ThinningMode::On ? "on" : "off"},
      {"protocol", rep.params.protocol == MatchProtocol::Exact ? "exact" : "loose"},
      {"workers", rep.params.workers},
  };
  j["tolerance"] = {
      {"d_max", rep.tolerance.d_max},
      {"image_size", rep.tolerance.image_size},
      {"t_pixels", rep.tolerance.t_pixels},
  };
  j["n_images"] = rep.n_images;
  j["ods_f"] = rep.ods_f;
  j["ods_threshold"] = rep.ods_threshold;
  j["ois_f"] = rep.ois_f;
  j["line_iou"] = rep.line_iou;
  auto& arr = j["per_threshold"] = nlohmann::ordered_json::array();
  for (const auto& [t, p, r, f] : rep.per_threshold_prf)
    arr.push_back({{"threshold", t}, {"precision", p}, {"recall", r}, {"f1", f}});
  return j;
}

}  // namespace contourbench
