// Acceptance suite: one pass/fail line per criterion. Usage:
//   acceptance <path-to-contour-bench-cli>
// Exit code 0 iff every criterion passes.

#include <array>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "contourbench/baseline.hpp"
#include "contourbench/dataset.hpp"
#include "contourbench/metrics.hpp"
#include "contourbench/png_io.hpp"
#include "test_util.hpp"

using namespace contourbench;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int n, const std::string& name, bool ok, const std::string& detail = "") {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << name;
  if (!ok && !detail.empty()) std::cout << " (" << detail << ")";
  std::cout << std::endl;
  if (!ok) ++g_failures;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// --- synthetic fixture ------------------------------------------------------

struct FixtureSpec {
  int n_images = 10;
  int side = 1024;
};

void draw_rect(Grid<uint8_t>& m, int x0, int y0, int x1, int y1, uint8_t cls) {
  for (int y = std::max(0, y0); y <= std::min(m.height - 1, y1); ++y)
    for (int x = std::max(0, x0); x <= std::min(m.width - 1, x1); ++x) m.at(x, y) = cls;
}

void draw_disk(Grid<uint8_t>& m, int cx, int cy, int r, uint8_t cls) {
  for (int y = std::max(0, cy - r); y <= std::min(m.height - 1, cy + r); ++y)
    for (int x = std::max(0, cx - r); x <= std::min(m.width - 1, cx + r); ++x)
      if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) m.at(x, y) = cls;
}

// Geometric-shape tiles: background 0, classes 1..3, one guaranteed shape per
// class plus a few extras. Image gray level tracks the class index.
void build_fixture(const fs::path& images_dir, const fs::path& masks_dir, const FixtureSpec& spec) {
  fs::create_directories(images_dir);
  fs::create_directories(masks_dir);
  for (int i = 0; i < spec.n_images; ++i) {
    std::mt19937 rng(1000 + i);
    const int s = spec.side;
    SegMask mask;
    mask.labels = Grid<uint8_t>(s, s, 0);
    std::uniform_int_distribution<int> pos(s / 8, s - s / 8);
    std::uniform_int_distribution<int> extent(s / 16, s / 6);
    std::uniform_int_distribution<int> cls_d(1, 3);
    for (uint8_t cls = 1; cls <= 3; ++cls) {
      const int cx = pos(rng), cy = pos(rng), e = extent(rng);
      if (cls % 2) draw_rect(mask.labels, cx - e, cy - e, cx + e, cy + e, cls);
      else draw_disk(mask.labels, cx, cy, e, cls);
    }
    for (int extra = 0; extra < 3; ++extra) {
      const int cx = pos(rng), cy = pos(rng), e = extent(rng) / 2;
      draw_disk(mask.labels, cx, cy, e, static_cast<uint8_t>(cls_d(rng)));
    }

    ProbMap img(s, s);
    constexpr std::array<float, 4> level = {0.12f, 0.38f, 0.62f, 0.88f};
    for (size_t p = 0; p < mask.labels.size(); ++p)
      img.probs.data[p] = level[mask.labels.data[p]];

    char stem[32];
    std::snprintf(stem, sizeof(stem), "tile_%02d", i);
    save_mask_png(mask, (masks_dir / (std::string(stem) + ".png")).string());
    save_png(img, (images_dir / (std::string(stem) + ".png")).string());
  }
}

// --- criteria ---------------------------------------------------------------

void criterion_1() {
  const Tolerance t = tolerance_for(0.0075, 1024, 1024);
  report(1, "tolerance T=8 for d_max=0.0075, S=1024", t.t_pixels == 8,
         "got " + std::to_string(t.t_pixels));
}

void criterion_2() {
  std::mt19937 rng(20001);
  std::uniform_int_distribution<int> dim(4, 64), ncls(2, 6);
  bool ok = true;
  std::string detail;
  for (int trial = 0; trial < 500 && ok; ++trial) {
    const int w = dim(rng), h = dim(rng), k = ncls(rng);
    const std::optional<uint8_t> ignore =
        (trial % 2 == 0) ? std::optional<uint8_t>(255) : std::nullopt;
    const SegMask m = (trial % 3 == 0) ? test_util::random_mask(rng, w, h, k, ignore)
                                       : test_util::random_blocky_mask(rng, w, h, k, ignore);
    for (const auto conn : {Connectivity::Four, Connectivity::Eight})
      for (int cls = 0; cls < k && ok; ++cls)
        if (mask_to_contour(m, static_cast<uint8_t>(cls), conn) !=
            test_util::oracle_contour(m, static_cast<uint8_t>(cls), conn)) {
          ok = false;
          detail = "mismatch at trial " + std::to_string(trial);
        }
  }
  report(2, "M2C equals the neighborhood oracle on 500 random masks", ok, detail);
}

void criterion_3() {
  std::mt19937 rng(30001);
  bool ok = true;
  std::string detail;
  // Exactness vs exhaustive assignment enumeration, <= 20 pixels per side.
  for (int trial = 0; trial < 200 && ok; ++trial) {
    const ContourMap pred = test_util::random_sparse_contour(rng, 24, 24, 20);
    const ContourMap gt = test_util::random_sparse_contour(rng, 24, 24, 20);
    const Tolerance tol{0.0, 0, 1 + trial % 6};
    const size_t got = match_fast(pred, gt, tol).n_matched;
    const size_t want = test_util::oracle_max_matching(pred, gt, tol.t_pixels);
    if (got != want)
      { ok = false; detail = "cardinality mismatch at trial " + std::to_string(trial); }
  }
  // Symmetry + tolerance monotonicity, 1000 random cases.
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    const ContourMap a = test_util::random_contour(rng, 20, 20, 0.1);
    const ContourMap b = test_util::random_contour(rng, 20, 20, 0.1);
    const Tolerance t1{0.0, 0, 1 + trial % 4};
    const Tolerance t2{0.0, 0, t1.t_pixels + 2};
    if (match_fast(a, b, t1).n_matched != match_fast(b, a, t1).n_matched)
      { ok = false; detail = "symmetry violated at trial " + std::to_string(trial); }
    else if (match_fast(a, b, t1).n_matched > match_fast(a, b, t2).n_matched)
      { ok = false; detail = "tolerance monotonicity violated at trial " + std::to_string(trial); }
  }
  report(3, "matching exactness, symmetry, and tolerance monotonicity", ok, detail);
}

void criterion_4() {
  std::mt19937 rng(40001);
  bool ok = true;
  std::string why;

  auto as_prob = [](const ContourMap& c) {
    ProbMap p(c.width(), c.height());
    for (size_t i = 0; i < c.bits.size(); ++i) p.probs.data[i] = c.bits.data[i] ? 1.0f : 0.0f;
    return p;
  };

  std::vector<ProbMap> perfect, empty;
  std::vector<ContourMap> gts;
  for (int i = 0; i < 4; ++i) {
    ContourMap gt = test_util::random_contour(rng, 48, 48, 0.06);
    if (gt.count() == 0) gt.bits.at(1, 1) = 1;
    perfect.push_back(as_prob(gt));
    empty.emplace_back(48, 48);
    gts.push_back(std::move(gt));
  }
  EvalParams params;
  params.k_thresholds = 15;
  const EvalReport rp = evaluate(perfect, gts, params);
  if (rp.ods_f != 1.0 || rp.ois_f != 1.0 || rp.line_iou != 1.0)
    { ok = false; why = "perfect suite not 1.000"; }
  const EvalReport re = evaluate(empty, gts, params);
  if (ok && (re.ods_f != 0.0 || re.ois_f != 0.0))
    { ok = false; why = "empty suite not 0.000"; }

  // Single image: OIS == ODS exactly.
  if (ok) {
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    ProbMap p(48, 48);
    for (auto& v : p.probs.data) v = u(rng);
    const auto sw = sweep({p}, {gts[0]}, tolerance_for(0.0075, 48, 48), 15);
    if (ois(sw) != ods(sw).f) { ok = false; why = "single-image OIS != ODS"; }
  }

  // OIS-chosen per-image F >= per-image F at the ODS threshold, 50 suites.
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (int suite = 0; suite < 50 && ok; ++suite) {
    std::vector<ProbMap> preds;
    std::vector<ContourMap> g;
    for (int i = 0; i < 3; ++i) {
      ProbMap p(24, 24);
      for (auto& v : p.probs.data) v = u(rng);
      preds.push_back(std::move(p));
      g.push_back(test_util::random_contour(rng, 24, 24, 0.1));
    }
    const auto sw = sweep(preds, g, Tolerance{0.0, 0, 2}, 9);
    const OdsResult od = ods(sw);
    for (const auto& row : sw.per_image) {
      double best = -1.0;
      for (const auto& c : row)
        best = std::max(best, contourbench::detail::prf_from(c.n_pred, c.n_gt, c.matched_pred, c.matched_gt).f1);
      const auto& at = row[od.threshold_index];
      if (best < contourbench::detail::prf_from(at.n_pred, at.n_gt, at.matched_pred, at.matched_gt).f1) {
        ok = false;
        why = "OIS per-image F below ODS F in suite " + std::to_string(suite);
      }
    }
  }
  report(4, "metric identities (perfect/empty/single-image/OIS>=ODS)", ok, why);
}

void criterion_5() {
  ContourMap p(20, 20), g(20, 20);
  p.bits.at(8, 8) = 1;
  g.bits.at(8, 10) = 1;
  const double v = line_iou(p, g, 3);
  report(5, "LineIoU hand case (8,8)/(8,10), k=3 -> 0.2", v == 3.0 / 15.0, std::to_string(v));
}

struct PipelineRun {
  fs::path out, pred_dir, report_path;
  bool ok = false;
  std::string detail;
};

PipelineRun run_pipeline(const std::string& cli, const fs::path& root, const std::string& name,
                         const fs::path& images, const fs::path& masks, const fs::path& classes) {
  PipelineRun run;
  run.out = root / name / "gt";
  run.pred_dir = root / name / "pred";
  run.report_path = root / name / "report.json";
  fs::create_directories(root / name);

  const std::string manifest = (run.out / "manifest.jsonl").string();
  if (run_cli(cli + " convert --images " + images.string() + " --masks " + masks.string() +
              " --classes " + classes.string() + " --out " + run.out.string() +
              " --source synthetic --workers 4 > /dev/null") != 0) {
    run.detail = "convert failed";
    return run;
  }
  if (run_cli(cli + " predict-baseline --manifest " + manifest + " --out " +
              run.pred_dir.string() + " --blur 1 --workers 4 > /dev/null") != 0) {
    run.detail = "predict-baseline failed";
    return run;
  }
  if (run_cli(cli + " eval --manifest " + manifest + " --pred " + run.pred_dir.string() +
              " --output " + run.report_path.string() +
              " --d-max 0.0075 --thresholds 51 --iou-kernel 3 --workers 4 > /dev/null") != 0) {
    run.detail = "eval failed";
    return run;
  }
  run.ok = true;
  return run;
}

void criteria_6_and_7(const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / "cb_acceptance_pipeline";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path images = root / "images", masks = root / "masks";
  build_fixture(images, masks, {10, 1024});

  const fs::path classes = root / "classes.json";
  std::ofstream(classes) << R"([{"index":1,"name":"building"},{"index":2,"name":"road"},{"index":3,"name":"water"}])";

  const auto t0 = std::chrono::steady_clock::now();
  const PipelineRun run1 = run_pipeline(cli, root, "run1", images, masks, classes);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  bool ok6 = run1.ok;
  std::string detail6 = run1.detail;
  nlohmann::json rep;
  if (ok6) {
    try {
      rep = nlohmann::json::parse(slurp(run1.report_path));
      // Schema: required fields with the right types and ranges.
      for (const char* key : {"toolkit", "version", "params", "tolerance", "n_images", "ods_f",
                              "ods_threshold", "ois_f", "line_iou", "per_threshold"})
        if (!rep.contains(key)) throw std::runtime_error(std::string("missing field ") + key);
      if (!rep["per_threshold"].is_array() || rep["per_threshold"].size() != 51)
        throw std::runtime_error("per_threshold must hold 51 entries");
      if (rep["tolerance"]["t_pixels"].get<int>() != 8)
        throw std::runtime_error("tolerance t_pixels != 8");
      const double ods_f = rep["ods_f"].get<double>();
      if (!(ods_f > 0.0 && ods_f < 1.0))
        throw std::runtime_error("baseline ODS not strictly in (0,1): " + std::to_string(ods_f));
    } catch (const std::exception& ex) {
      ok6 = false;
      detail6 = ex.what();
    }
  }
  if (ok6 && elapsed >= 300.0) {
    ok6 = false;
    detail6 = "pipeline took " + std::to_string(elapsed) + " s";
  }

  // CLI output must equal the library API bit-for-bit.
  if (ok6) {
    const Manifest m = load_manifest(run1.out / "manifest.jsonl");
    std::vector<ProbMap> preds;
    std::vector<ContourMap> gts;
    for (const auto& r : m.records) {
      const std::string stem = fs::path(r.image_path).stem().string();
      preds.push_back(load_prob_png((run1.pred_dir / (stem + "__" + r.class_name + ".png")).string()));
      gts.push_back(load_contour_png((run1.out / r.contour_path).string()));
    }
    EvalParams params;
    params.workers = 4;
    const std::string api_bytes = report_to_json(evaluate(preds, gts, params)).dump(2) + "\n";
    if (api_bytes != slurp(run1.report_path)) {
      ok6 = false;
      detail6 = "CLI report differs from library API report";
    }
  }
  report(6, "end-to-end pipeline at 1024x1024 (" +
                std::to_string(static_cast<int>(elapsed)) + " s)", ok6, detail6);

  // Criterion 7: a second run must be byte-identical.
  const PipelineRun run2 = run_pipeline(cli, root, "run2", images, masks, classes);
  bool ok7 = run1.ok && run2.ok;
  std::string detail7 = run2.detail;
  if (ok7 && slurp(run1.out / "manifest.jsonl") != slurp(run2.out / "manifest.jsonl"))
    { ok7 = false; detail7 = "manifests differ"; }
  if (ok7) {
    for (const auto& e : fs::recursive_directory_iterator(run1.out)) {
      if (e.path().extension() != ".png") continue;
      const fs::path other = run2.out / fs::relative(e.path(), run1.out);
      if (slurp(e.path()) != slurp(other)) {
        ok7 = false;
        detail7 = "contour PNG differs: " + other.string();
        break;
      }
    }
  }
  if (ok7 && slurp(run1.report_path) != slurp(run2.report_path))
    { ok7 = false; detail7 = "reports differ"; }
  report(7, "determinism: repeat pipeline runs are byte-identical", ok7, detail7);

  fs::remove_all(root);
}

void criterion_8() {
  const bool ok = prompt_for("building") == "Edge of all buildings" &&
                  prompt_for("road") == "Edge of all roads";
  report(8, "prompt template", ok);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-contour-bench-cli>\n";
    return 2;
  }
  const std::string cli = argv[1];

  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criteria_6_and_7(cli);
  criterion_8();

  std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED" : std::to_string(g_failures) + " CRITERIA FAILED")
            << std::endl;
  return g_failures == 0 ? 0 : 1;
}
