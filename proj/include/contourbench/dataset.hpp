#pragma once

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "contourbench/m2c.hpp"
#include "contourbench/parallel.hpp"
#include "contourbench/png_io.hpp"
#include "contourbench/version.hpp"

namespace contourbench {

namespace fs = std::filesystem;

// Irregular plurals for the prompt template. Applied before substitution;
// anything not listed gets a literal "s" appended.
inline const std::map<std::string, std::string>& plural_overrides() {
  static const std::map<std::string, std::string> table = {
      {"grass", "grass"},       {"water", "water"},   {"vegetation", "vegetation"},
      {"barren", "barren"},     {"forest", "forest"}, {"agriculture", "agriculture"},
      {"low vegetation", "low vegetation"},
  };
  return table;
}

// "Edge of all {T}s" with T the class name (pluralized).
inline std::string prompt_for(const std::string& class_name) {
  if (class_name.empty()) throw std::invalid_argument("prompt_for: empty class name");
  const auto& overrides = plural_overrides();
  const auto it = overrides.find(class_name);
  const std::string plural = it != overrides.end() ? it->second : class_name + "s";
  return "Edge of all " + plural;
}

struct TripletRecord {
  std::string image_path;
  std::string prompt;
  std::string class_name;
  uint8_t class_index = 0;
  std::string contour_path;
  std::string source_dataset;
  std::string split = "train";
  std::string prompt_override;  // free-form referring expression; empty = templated

  bool operator==(const TripletRecord&) const = default;
};

struct Manifest {
  std::vector<TripletRecord> records;
  std::vector<ClassSpec> class_table;
};

inline nlohmann::ordered_json record_to_json(const TripletRecord& r) {
  nlohmann::ordered_json j;
  j["image_path"] = r.image_path;
  j["prompt"] = r.prompt;
  j["class_name"] = r.class_name;
  j["class_index"] = r.class_index;
  j["contour_path"] = r.contour_path;
  j["source_dataset"] = r.source_dataset;
  j["split"] = r.split;
  if (!r.prompt_override.empty()) j["prompt_override"] = r.prompt_override;
  return j;
}

inline TripletRecord record_from_json(const nlohmann::json& j) {
  TripletRecord r;
  r.image_path = j.at("image_path").get<std::string>();
  r.prompt = j.at("prompt").get<std::string>();
  r.class_name = j.at("class_name").get<std::string>();
  r.class_index = j.at("class_index").get<uint8_t>();
  r.contour_path = j.at("contour_path").get<std::string>();
  r.source_dataset = j.at("source_dataset").get<std::string>();
  r.split = j.at("split").get<std::string>();
  if (j.contains("prompt_override")) r.prompt_override = j["prompt_override"].get<std::string>();
  return r;
}

// JSONL, one record per line, stable key order.
inline void write_manifest(const Manifest& m, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest: " + path.string());
  for (const auto& r : m.records) out << record_to_json(r).dump() << "\n";
}

inline Manifest load_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read manifest: " + path.string());
  Manifest m;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    m.records.push_back(record_from_json(nlohmann::json::parse(line)));
  }
  return m;
}

// Class table file: JSON list of {"index": int, "name": str}.
inline std::vector<ClassSpec> load_class_table(const fs::path& path, const std::string& source = "") {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read class table: " + path.string());
  nlohmann::json j = nlohmann::json::parse(in);
  std::vector<ClassSpec> out;
  std::set<int> seen;
  for (const auto& e : j) {
    ClassSpec c;
    c.index = e.at("index").get<uint8_t>();
    c.name = e.at("name").get<std::string>();
    c.source_dataset = source;
    if (c.name.empty()) throw std::runtime_error("class table: empty class name");
    if (!seen.insert(c.index).second)
      throw std::runtime_error("class table: duplicate index " + std::to_string(c.index));
    out.push_back(std::move(c));
  }
  if (out.empty()) throw std::runtime_error("class table: no classes");
  return out;
}

struct BuildOptions {
  Connectivity connectivity = Connectivity::Four;
  std::string source_dataset = "local";
  std::string split = "train";
  std::optional<uint8_t> ignore_index;
  int workers = 1;
};

struct BuildResult {
  Manifest manifest;
  size_t pairs_skipped = 0;  // (image, class) pairs with empty foreground
  std::vector<std::string> errors;
};

namespace detail {
inline std::string rel_or_abs(const fs::path& target, const fs::path& base) {
  std::error_code ec;
  const fs::path rel = fs::relative(fs::absolute(target), fs::absolute(base), ec);
  if (ec || rel.empty()) return fs::absolute(target).lexically_normal().generic_string();
  return rel.generic_string();
}
}  // namespace detail

// Construction pipeline: for every image x class with nonzero foreground, run
// Mask2Contour, write the contour PNG under
// out_dir/<source>/<class_name>/<image_stem>.png and emit one record.
// Recorded paths are relative to out_dir (the manifest directory). Per-file
// failures are collected; the build continues.
inline BuildResult build_manifest(const fs::path& images_dir, const fs::path& masks_dir,
                                  const std::vector<ClassSpec>& class_table,
                                  const fs::path& out_dir, const BuildOptions& opts = {}) {
  if (class_table.empty()) throw std::invalid_argument("build_manifest: empty class table");

  std::vector<fs::path> images;
  for (const auto& e : fs::directory_iterator(images_dir))
    if (e.is_regular_file() && e.path().extension() == ".png") images.push_back(e.path());
  std::sort(images.begin(), images.end());

  fs::create_directories(out_dir);
  for (const auto& c : class_table)
    fs::create_directories(out_dir / opts.source_dataset / c.name);

  struct PerImage {
    std::vector<TripletRecord> records;
    size_t skipped = 0;
    std::string error;
  };
  std::vector<PerImage> results(images.size());

  parallel_for(images.size(), opts.workers, [&](size_t i) {
    PerImage& out = results[i];
    const fs::path& img = images[i];
    const std::string stem = img.stem().string();
    const fs::path mask_path = masks_dir / (stem + ".png");
    try {
      if (!fs::exists(mask_path)) throw std::runtime_error("missing mask for image " + stem);
      const SegMask mask = load_mask_png(mask_path.string(), opts.ignore_index);
      const auto contours = mask_to_contours_all(mask, class_table, opts.connectivity);
      for (const auto& c : class_table) {
        const ClassContour& cc = contours.at(c.index);
        if (cc.empty_foreground) { ++out.skipped; continue; }
        const fs::path contour_path = out_dir / opts.source_dataset / c.name / (stem + ".png");
        save_png(cc.contour, contour_path.string());
        TripletRecord r;
        r.image_path = detail::rel_or_abs(img, out_dir);
        r.prompt = prompt_for(c.name);
        r.class_name = c.name;
        r.class_index = c.index;
        r.contour_path = detail::rel_or_abs(contour_path, out_dir);
        r.source_dataset = opts.source_dataset;
        r.split = opts.split;
        out.records.push_back(std::move(r));
      }
    } catch (const std::exception& ex) {
      out.error = std::string(ex.what());
    }
  });

  BuildResult res;
  res.manifest.class_table = class_table;
  for (auto& pi : results) {
    if (!pi.error.empty()) res.errors.push_back(pi.error);
    res.pairs_skipped += pi.skipped;
    for (auto& r : pi.records) res.manifest.records.push_back(std::move(r));
  }
  write_manifest(res.manifest, out_dir / "manifest.jsonl");
  return res;
}

struct StatsEntry {
  std::string name;
  size_t count = 0;
  double percent = 0.0;
};

struct StatsReport {
  size_t total = 0;
  std::vector<StatsEntry> per_class;   // sorted by name
  std::vector<StatsEntry> per_source;  // sorted by name
  std::vector<StatsEntry> per_split;   // sorted by name
};

inline StatsReport stats(const Manifest& m) {
  StatsReport rep;
  rep.total = m.records.size();
  std::map<std::string, size_t> by_class, by_source, by_split;
  for (const auto& r : m.records) {
    ++by_class[r.class_name];
    ++by_source[r.source_dataset];
    ++by_split[r.split];
  }
  auto collect = [&](const std::map<std::string, size_t>& src) {
    std::vector<StatsEntry> out;
    for (const auto& [name, count] : src)
      out.push_back({name, count,
                     rep.total ? 100.0 * static_cast<double>(count) / rep.total : 0.0});
    return out;
  };
  rep.per_class = collect(by_class);
  rep.per_source = collect(by_source);
  rep.per_split = collect(by_split);
  return rep;
}

inline nlohmann::ordered_json stats_to_json(const StatsReport& rep) {
  auto entries = [](const std::vector<StatsEntry>& v) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& e : v)
      arr.push_back({{"name", e.name}, {"count", e.count}, {"percent", e.percent}});
    return arr;
  };
  nlohmann::ordered_json j;
  j["toolkit"] = kToolkitName;
  j["version"] = kVersion;
  j["total"] = rep.total;
  j["per_class"] = entries(rep.per_class);
  j["per_source"] = entries(rep.per_source);
  j["per_split"] = entries(rep.per_split);
  return j;
}

inline std::string stats_table(const StatsReport& rep) {
  std::ostringstream os;
  auto section = [&](const char* title, const std::vector<StatsEntry>& v) {
    os << title << "\n";
    for (const auto& e : v) {
      char pct[16];
      std::snprintf(pct, sizeof(pct), "%5.1f%%", e.percent);
      os << "  " << e.name << ": " << e.count << " (" << pct << ")\n";
    }
  };
  os << "total records: " << rep.total << "\n";
  section("per class:", rep.per_class);
  section("per source:", rep.per_source);
  section("per split:", rep.per_split);
  return os.str();
}

struct Violation {
  std::string kind;  // parse | schema | missing_file | duplicate | prompt_mismatch
  std::string message;
};

// Schema, file-existence, duplicate-key, and prompt-template checks. Relative
// paths resolve against the manifest's directory. Empty result means valid.
inline std::vector<Violation> validate_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read manifest: " + path.string());
  const fs::path base = fs::absolute(path).parent_path();

  std::vector<Violation> out;
  std::set<std::pair<std::string, int>> keys;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    TripletRecord r;
    try {
      r = record_from_json(nlohmann::json::parse(line));
    } catch (const std::exception& ex) {
      out.push_back({"parse", where + ": " + ex.what()});
      continue;
    }
    if (r.class_name.empty() || r.prompt.empty())
      out.push_back({"schema", where + ": empty class_name or prompt"});
    if (!keys.insert({r.image_path, r.class_index}).second)
      out.push_back({"duplicate", where + ": duplicate (image_path, class_index) = (" +
                                      r.image_path + ", " + std::to_string(r.class_index) + ")"});
    const std::string expected = r.prompt_override.empty() ? prompt_for(r.class_name) : r.prompt_override;
    if (r.prompt != expected)
      out.push_back({"prompt_mismatch",
                     where + ": prompt \"" + r.prompt + "\" != expected \"" + expected + "\""});
    for (const std::string& p : {r.image_path, r.contour_path}) {
      const fs::path resolved = fs::path(p).is_absolute() ? fs::path(p) : base / p;
      if (!fs::exists(resolved))
        out.push_back({"missing_file", where + ": missing " + resolved.generic_string()});
    }
  }
  return out;
}

}  // namespace contourbench
