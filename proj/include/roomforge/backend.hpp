#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "roomforge/dataset.hpp"
#include "roomforge/prompting.hpp"
#include "roomforge/random.hpp"

namespace roomforge {

enum class BackendKind { Remote, Mock };

struct ModelRef {
  BackendKind kind = BackendKind::Mock;
  std::string handle;      // remote model id or mock digest
  std::string trained_on;  // fingerprint of the fine-tune file
  int epochs = 0;
  std::string parent;      // handle this model was fine-tuned from, if any

  friend bool operator==(const ModelRef&, const ModelRef&) = default;
};

inline nlohmann::ordered_json to_json(const ModelRef& m) {
  nlohmann::ordered_json j;
  j["kind"] = m.kind == BackendKind::Mock ? "mock" : "remote";
  j["handle"] = m.handle;
  j["trained_on"] = m.trained_on;
  j["epochs"] = m.epochs;
  j["parent"] = m.parent;
  return j;
}

inline ModelRef model_ref_from_json(const nlohmann::json& j) {
  ModelRef m;
  m.kind = j.at("kind").get<std::string>() == "mock" ? BackendKind::Mock : BackendKind::Remote;
  m.handle = j.at("handle").get<std::string>();
  m.trained_on = j.value("trained_on", std::string{});
  m.epochs = j.value("epochs", 0);
  m.parent = j.value("parent", std::string{});
  return m;
}

struct GenerationRequest {
  ModelRef model;
  std::string prompt;
  double temperature = 0.4;
  int n = 1;
  std::vector<std::string> stop = {std::string(kLevelTerminator)};
  int max_tokens = 0;  // 0: derived from the prompt's room size
};

// Room cells plus one newline per row plus slack for the terminator.
inline int default_max_tokens(const PromptSpec& spec) { return spec.width * spec.height + spec.height + 8; }

class BackendError : public std::runtime_error {
 public:
  enum class Kind { RemoteRejected, JobFailed, RecordsInvalid, MockSpecUnparseable, UnknownModel, Transport };

  BackendError(Kind kind, std::string message) : std::runtime_error(std::move(message)), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class Backend {
 public:
  virtual ~Backend() = default;

  virtual BackendKind kind() const = 0;

  // Trains on a fine-tune JSONL file, continuing from `base` when given.
  virtual ModelRef fine_tune(const std::optional<ModelRef>& base, const std::filesystem::path& records,
                             int epochs) = 0;

  // Raw completions with stop sequences removed.
  virtual std::vector<std::string> generate(const GenerationRequest& request) = 0;
};

// Reads and checks every line of a fine-tune file.
inline std::vector<FinetuneRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BackendError(BackendError::Kind::RecordsInvalid, "cannot read " + path.string());
  std::vector<FinetuneRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(parse_record(line));
    } catch (const RecordError& e) {
      throw BackendError(BackendError::Kind::RecordsInvalid,
                         path.filename().string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

namespace detail {

inline std::string strip_stops(std::string text, const std::vector<std::string>& stops) {
  std::size_t cut = text.size();
  for (const auto& s : stops) {
    if (s.empty()) continue;
    cut = std::min(cut, text.find(s));
  }
  text.resize(cut);
  return text;
}

}  // namespace detail

// Offline stand-in for a fine-tuned language model: an order-2 Markov
// chain over tiles along each row. Tiles are stored by role (base,
// patterns, border wall, other wall, water, door) so that generation
// follows the tiles named in the prompt. Transition tables exist per
// room size, per width and globally; lookups back off in that order.
class MockBackend final : public Backend {
 public:
  explicit MockBackend(std::uint64_t seed = 0) : seed_(seed) {}

  BackendKind kind() const override { return BackendKind::Mock; }

  ModelRef fine_tune(const std::optional<ModelRef>& base, const std::filesystem::path& records,
                     int epochs) override {
    std::string bytes;
    {
      std::ifstream in(records, std::ios::binary);
      if (!in) throw BackendError(BackendError::Kind::RecordsInvalid, "cannot read " + records.string());
      std::ostringstream ss;
      ss << in.rdbuf();
      bytes = ss.str();
    }
    const auto recs = read_records(records);
    auto model = std::make_shared<Model>();
    int line_no = 0;
    for (const auto& r : recs) {
      ++line_no;
      PromptSpec spec;
      try {
        spec = parse_prompt(r.prompt);
      } catch (const PromptError& e) {
        throw BackendError(BackendError::Kind::RecordsInvalid,
                           "record " + std::to_string(line_no) + ": " + e.what());
      }
      model->learn(spec, completion_grid(r.completion));
    }

    ModelRef ref;
    ref.kind = BackendKind::Mock;
    ref.trained_on = hex64(fnv1a64(bytes));
    ref.handle = "mock-" + hex64(fnv1a64(ref.trained_on + ":" + std::to_string(seed_)));
    ref.epochs = epochs;
    ref.parent = base ? base->handle : std::string{};
    std::lock_guard lock(mu_);
    models_[ref.handle] = std::move(model);
    return ref;
  }

  std::vector<std::string> generate(const GenerationRequest& request) override {
    std::shared_ptr<const Model> model;
    {
      std::lock_guard lock(mu_);
      const auto it = models_.find(request.model.handle);
      if (it == models_.end()) {
        throw BackendError(BackendError::Kind::UnknownModel,
                           "mock model " + request.model.handle + " is not loaded; fine-tune first");
      }
      model = it->second;
    }
    PromptSpec spec;
    try {
      spec = parse_prompt(request.prompt);
    } catch (const PromptError& e) {
      throw BackendError(BackendError::Kind::MockSpecUnparseable, e.what());
    }
    const int max_tokens = request.max_tokens > 0 ? request.max_tokens : default_max_tokens(spec);
    const int exponent = temperature_exponent(request.temperature);

    std::vector<std::string> out;
    for (int i = 0; i < request.n; ++i) {
      const auto seed = fnv1a64(request.model.handle + '\x1f' + request.prompt + '\x1f' + std::to_string(i));
      std::string text = model->sample(spec, exponent, Rng(seed));
      if (static_cast<int>(text.size()) > max_tokens) text.resize(max_tokens);
      out.push_back(detail::strip_stops(std::move(text), request.stop));
    }
    return out;
  }

  // Integer power applied to transition counts: round(1/T), at least 1.
  // Zero means greedy decoding.
  static int temperature_exponent(double temperature) {
    if (temperature <= 0.0) return 0;
    const int k = static_cast<int>(std::floor(1.0 / temperature + 0.5));
    return std::max(1, k);
  }

 private:
  enum Role : int { kBase, kPattern0, kPattern1, kBorder, kOtherWall, kWater, kDoor, kRoles, kStart = kRoles };

  static constexpr int kTokens = kRoles + 1;
  static constexpr int kContexts = 3 * 3 * kTokens * kTokens;

  using Counts = std::array<std::uint32_t, kRoles>;
  using Table = std::vector<Counts>;

  static int edge_kind(int i, int n) { return i == 0 ? 0 : (i == n - 1 ? 2 : 1); }

  static int context(int row_kind, int col_kind, int prev2, int prev1) {
    return ((row_kind * 3 + col_kind) * kTokens + prev2) * kTokens + prev1;
  }

  static Tile other_wall(Tile border) { return border == Tile::E ? Tile::Hash : Tile::E; }

  static int role_of(const PromptSpec& spec, Tile t) {
    if (t == spec.base_tile) return kBase;
    if (!spec.pattern_tiles.empty() && t == spec.pattern_tiles[0]) return kPattern0;
    if (spec.pattern_tiles.size() > 1 && t == spec.pattern_tiles[1]) return kPattern1;
    if (t == spec.border_tile) return kBorder;
    if (is_wall(t)) return kOtherWall;
    if (t == Tile::F) return kWater;
    if (t == Tile::J) return kDoor;
    return kBase;
  }

  static Tile tile_of(const PromptSpec& spec, int role) {
    switch (role) {
      case kPattern1:
        if (spec.pattern_tiles.size() > 1) return spec.pattern_tiles[1];
        [[fallthrough]];
      case kPattern0:
        if (!spec.pattern_tiles.empty()) return spec.pattern_tiles[0];
        return spec.base_tile;
      case kBorder: return spec.border_tile;
      case kOtherWall: return other_wall(spec.border_tile);
      case kWater: return Tile::F;
      case kDoor: return Tile::J;
      default: return spec.base_tile;
    }
  }

  struct Model {
    std::map<std::pair<int, int>, Table> by_size;
    std::map<int, Table> by_width;
    Table global = Table(kContexts, Counts{});

    void learn(const PromptSpec& spec, const Grid& grid) {
      auto& sized = by_size.try_emplace({grid.width(), grid.height()}, kContexts, Counts{}).first->second;
      auto& wide = by_width.try_emplace(grid.width(), kContexts, Counts{}).first->second;
      for (int r = 0; r < grid.height(); ++r) {
        int prev2 = kStart;
        int prev1 = kStart;
        for (int c = 0; c < grid.width(); ++c) {
          const int role = role_of(spec, grid.at(r, c));
          const int ctx = context(edge_kind(r, grid.height()), edge_kind(c, grid.width()), prev2, prev1);
          ++sized[ctx][role];
          ++wide[ctx][role];
          ++global[ctx][role];
          prev2 = prev1;
          prev1 = role;
        }
      }
    }

    static bool seen(const Table& t, int ctx) {
      for (auto v : t[ctx]) {
        if (v) return true;
      }
      return false;
    }

    const Counts* lookup(int width, int height, int ctx) const {
      if (auto it = by_size.find({width, height}); it != by_size.end() && seen(it->second, ctx)) {
        return &it->second[ctx];
      }
      if (auto it = by_width.find(width); it != by_width.end() && seen(it->second, ctx)) {
        return &it->second[ctx];
      }
      if (seen(global, ctx)) return &global[ctx];
      return nullptr;
    }

    static int draw(const Counts& counts, int exponent, Rng& rng) {
      if (exponent == 0) {
        return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
      }
      std::array<std::uint64_t, kRoles> weights{};
      std::uint64_t total = 0;
      for (int i = 0; i < kRoles; ++i) {
        std::uint64_t w = counts[i] ? 1 : 0;
        for (int k = 0; k < exponent && counts[i]; ++k) {
          w = w > (std::uint64_t{1} << 40) / counts[i] ? (std::uint64_t{1} << 40) : w * counts[i];
        }
        weights[i] = w;
        total += w;
      }
      std::uint64_t x = rng.below(total);
      for (int i = 0; i < kRoles; ++i) {
        if (x < weights[i]) return i;
        x -= weights[i];
      }
      return kBase;
    }

    std::string sample(const PromptSpec& spec, int exponent, Rng rng) const {
      std::string text;
      text.reserve(static_cast<std::size_t>(spec.width + 1) * spec.height);
      for (int r = 0; r < spec.height; ++r) {
        int prev2 = kStart;
        int prev1 = kStart;
        for (int c = 0; c < spec.width; ++c) {
          const int rk = edge_kind(r, spec.height);
          const int ck = edge_kind(c, spec.width);
          const Counts* counts = lookup(spec.width, spec.height, context(rk, ck, prev2, prev1));
          int role;
          if (counts) {
            role = draw(*counts, exponent, rng);
          } else {
            role = (rk != 1 || ck != 1) ? kBorder : kBase;
          }
          text.push_back(to_char(tile_of(spec, role)));
          prev2 = prev1;
          prev1 = role;
        }
        text.push_back('\n');
      }
      return text;
    }
  };

  std::uint64_t seed_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const Model>> models_;
};

}  // namespace roomforge
