#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "roomforge/constraints.hpp"
#include "roomforge/prompting.hpp"
#include "roomforge/random.hpp"
#include "roomforge/transforms.hpp"

namespace roomforge {

enum class Origin { Handmade, Repaired, Generated, Augmented };

constexpr std::string_view to_string(Origin o) noexcept {
  switch (o) {
    case Origin::Handmade: return "handmade";
    case Origin::Repaired: return "repaired";
    case Origin::Generated: return "generated";
    case Origin::Augmented: return "augmented";
  }
  return "?";
}

inline std::optional<Origin> origin_from_string(std::string_view s) {
  for (Origin o : {Origin::Handmade, Origin::Repaired, Origin::Generated, Origin::Augmented}) {
    if (to_string(o) == s) return o;
  }
  return std::nullopt;
}

struct Provenance {
  Origin origin = Origin::Handmade;
  Transform transform = Transform::Identity;  // augmented entries only
  std::string parent;                         // augmented entries only

  static Provenance handmade() { return {Origin::Handmade, Transform::Identity, {}}; }
  static Provenance repaired() { return {Origin::Repaired, Transform::Identity, {}}; }
  static Provenance generated() { return {Origin::Generated, Transform::Identity, {}}; }
  static Provenance augmented(Transform t, std::string parent_id) {
    return {Origin::Augmented, t, std::move(parent_id)};
  }

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct DatasetEntry {
  std::string id;
  Grid grid;
  PromptSpec spec;
  Provenance provenance;
  int round_added = 0;

  friend bool operator==(const DatasetEntry&, const DatasetEntry&) = default;
};

class DatasetError : public std::runtime_error {
 public:
  enum class Kind { EmptyDataset, ManifestCorrupt, LevelFileUnparseable };

  DatasetError(Kind kind, std::string message) : std::runtime_error(std::move(message)), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Ordered, duplicate-free collection of rooms with provenance.
class Dataset {
 public:
  const std::vector<DatasetEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  const DatasetEntry* find(std::string_view id) const {
    for (const auto& e : entries_) {
      if (e.id == id) return &e;
    }
    return nullptr;
  }

  bool contains_grid(const Grid& grid) const {
    const auto [lo, hi] = by_hash_.equal_range(grid_hash(grid));
    for (auto it = lo; it != hi; ++it) {
      if (entries_[it->second].grid == grid) return true;
    }
    return false;
  }

  // Appends the room unless an identical one is already stored. Throws
  // LevelError if the room has no census.
  bool add_if_new(const Grid& grid, Provenance provenance, int round_added) {
    if (contains_grid(grid)) return false;
    PromptSpec spec = derive_spec(grid);
    insert(DatasetEntry{make_id(next_id_), grid, std::move(spec), std::move(provenance), round_added});
    return true;
  }

  // Restores an entry with a known id (loading).
  void insert(DatasetEntry entry) {
    if (find(entry.id) != nullptr) {
      throw DatasetError(DatasetError::Kind::ManifestCorrupt, "duplicate entry id " + entry.id);
    }
    if (contains_grid(entry.grid)) {
      throw DatasetError(DatasetError::Kind::ManifestCorrupt, entry.id + " duplicates a stored room");
    }
    if (const auto n = parse_id(entry.id); n && *n >= next_id_) next_id_ = *n + 1;
    by_hash_.emplace(grid_hash(entry.grid), entries_.size());
    entries_.push_back(std::move(entry));
  }

  std::vector<FinetuneRecord> records() const {
    std::vector<FinetuneRecord> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back({build_prompt(e.spec), " " + serialize_level(e.grid, true)});
    return out;
  }

  // The fine-tune file contents: one record per entry, LF-terminated.
  std::string finetune_jsonl() const {
    std::string out;
    for (const auto& r : records()) {
      out += to_jsonl(r);
      out += '\n';
    }
    return out;
  }

  friend bool operator==(const Dataset& a, const Dataset& b) { return a.entries_ == b.entries_; }

 private:
  static std::uint64_t grid_hash(const Grid& g) { return fnv1a64(serialize_level(g)); }

  static std::string make_id(std::uint64_t n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "L%06llu", static_cast<unsigned long long>(n));
    return buf;
  }

  static std::optional<std::uint64_t> parse_id(std::string_view id) {
    if (id.size() < 2 || id[0] != 'L') return std::nullopt;
    std::uint64_t n = 0;
    for (char ch : id.substr(1)) {
      if (ch < '0' || ch > '9') return std::nullopt;
      n = n * 10 + static_cast<std::uint64_t>(ch - '0');
    }
    return n;
  }

  std::vector<DatasetEntry> entries_;
  std::unordered_multimap<std::uint64_t, std::size_t> by_hash_;
  std::uint64_t next_id_ = 1;
};

// Adds the augmentation variants of every non-augmented entry: flips,
// rotation, pattern swap and swap+flip. Variants that duplicate an
// existing room, cannot be rotated, or fail validation are skipped and
// reported through `warnings`.
inline Dataset augment_all(const Dataset& dataset, std::vector<std::string>* warnings = nullptr) {
  Dataset out = dataset;
  auto warn = [&](std::string msg) {
    if (warnings) warnings->push_back(std::move(msg));
  };
  for (const auto& source : dataset.entries()) {
    if (source.provenance.origin == Origin::Augmented) continue;
    for (Transform t : kAugmentTransforms) {
      if (t == Transform::Identity) continue;
      std::optional<Grid> variant;
      try {
        variant = apply_transform(t, source.grid);
      } catch (const LevelError& e) {
        warn(source.id + " " + std::string(to_string(t)) + ": " + e.what());
        continue;
      }
      if (!validate(*variant).pass) {
        warn(source.id + " " + std::string(to_string(t)) + ": variant is not playable");
        continue;
      }
      try {
        out.add_if_new(*variant, Provenance::augmented(t, source.id), source.round_added);
      } catch (const LevelError& e) {
        warn(source.id + " " + std::string(to_string(t)) + ": " + e.what());
      }
    }
  }
  return out;
}

// n specs drawn uniformly, with replacement, from the entries' specs.
inline std::vector<PromptSpec> sample_specs(const Dataset& dataset, std::size_t n, std::uint64_t seed) {
  if (dataset.empty()) {
    throw DatasetError(DatasetError::Kind::EmptyDataset, "cannot sample prompts from an empty dataset");
  }
  Rng rng(seed);
  std::vector<PromptSpec> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(dataset.entries()[rng.below(dataset.size())].spec);
  return out;
}

// Stable digest of the fine-tune file contents.
inline std::string dataset_fingerprint(const Dataset& dataset) {
  return hex64(fnv1a64(dataset.finetune_jsonl()));
}

namespace detail {

inline void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

// Directory layout: levels/<id>.lvl, manifest.jsonl, finetune.jsonl.
inline void save(const Dataset& dataset, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "levels");
  std::string manifest;
  for (const auto& e : dataset.entries()) {
    const std::string file = "levels/" + e.id + ".lvl";
    const auto text = serialize_level(e.grid);
    const auto path = dir / file;
    if (!fs::exists(path) || detail::read_file(path) != text) detail::write_file_atomic(path, text);

    nlohmann::ordered_json j;
    j["id"] = e.id;
    j["file"] = file;
    j["provenance"] = to_string(e.provenance.origin);
    if (e.provenance.origin == Origin::Augmented) {
      j["transform"] = to_string(e.provenance.transform);
      j["parent"] = e.provenance.parent;
    }
    j["round_added"] = e.round_added;
    manifest += j.dump();
    manifest += '\n';
  }
  detail::write_file_atomic(dir / "manifest.jsonl", manifest);
  detail::write_file_atomic(dir / "finetune.jsonl", dataset.finetune_jsonl());
}

inline Dataset load(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.jsonl";
  if (!std::filesystem::exists(manifest_path)) {
    throw DatasetError(DatasetError::Kind::ManifestCorrupt, "no manifest at " + manifest_path.string());
  }
  std::istringstream manifest(detail::read_file(manifest_path));
  Dataset dataset;
  std::string line;
  int line_no = 0;
  while (std::getline(manifest, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto corrupt = [&](const std::string& what) {
      return DatasetError(DatasetError::Kind::ManifestCorrupt,
                          "manifest line " + std::to_string(line_no) + ": " + what);
    };
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw corrupt("not a JSON object");

    std::string id, file, origin_name;
    int round_added = 0;
    try {
      id = j.at("id").get<std::string>();
      file = j.at("file").get<std::string>();
      origin_name = j.at("provenance").get<std::string>();
      round_added = j.at("round_added").get<int>();
    } catch (const nlohmann::json::exception& e) {
      throw corrupt(e.what());
    }
    const auto origin = origin_from_string(origin_name);
    if (!origin) throw corrupt("unknown provenance \"" + origin_name + "\"");
    Provenance provenance{*origin, Transform::Identity, {}};
    if (*origin == Origin::Augmented) {
      const auto t = transform_from_string(j.value("transform", std::string{}));
      if (!t) throw corrupt("augmented entry without a known transform");
      provenance.transform = *t;
      provenance.parent = j.value("parent", std::string{});
    }

    const auto path = dir / file;
    if (!std::filesystem::exists(path)) {
      throw DatasetError(DatasetError::Kind::LevelFileUnparseable, file + ": file is missing");
    }
    std::optional<Grid> grid;
    try {
      grid = parse_level(detail::read_file(path));
    } catch (const LevelError& e) {
      throw DatasetError(DatasetError::Kind::LevelFileUnparseable, file + ": " + e.what());
    }
    PromptSpec spec;
    try {
      spec = derive_spec(*grid);
    } catch (const LevelError& e) {
      throw DatasetError(DatasetError::Kind::LevelFileUnparseable, file + ": " + e.what());
    }
    dataset.insert(DatasetEntry{id, std::move(*grid), std::move(spec), std::move(provenance), round_added});
  }
  return dataset;
}

}  // namespace roomforge
