#pragma once

#include <unistd.h>

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "roomforge/roomforge.hpp"

namespace support {

using namespace roomforge;

inline Grid rows(std::initializer_list<std::string_view> lines) {
  std::string text;
  for (auto l : lines) {
    text += l;
    text += '\n';
  }
  return parse_level(text);
}

inline oracle::Room to_room(const Grid& g) {
  oracle::Room room;
  const auto text = serialize_level(g);
  std::size_t start = 0;
  while (start < text.size()) {
    const auto end = text.find('\n', start);
    room.rows.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return room;
}

// 12x10: a top door, a left door, a three-cell pond and a one-tile-thick
// wall spur off the left border. Passes every constraint.
inline Grid passing_room() {
  return rows({
      "EEEJAAJEEEEE",
      "EAAAAAAAAAAE",
      "EAAAAAAAAAAE",
      "JAAAAAAAFAAE",
      "AAAAAAAFFAAE",
      "JAAAAAAAAAAE",
      "EAAAAAAAAAAE",
      "EEEEEAAAAAAE",
      "EAAAAAAAAAAE",
      "EEEEEEEEEEEE",
  });
}

// 16x12 room in the style of the hand-made set.
inline const char* kSampleRoomText =
    "EEEEEEJAAJEEEEEE\n"
    "EAAAAAAAAAAAAAAE\n"
    "EAABBAAAAAAAAAAE\n"
    "EAABBAAAAACCAAAE\n"
    "EAAAAAAAAACCAAAJ\n"
    "EAAAAAAFFAAAAAAA\n"
    "EAAAAAAFAAAAAAAJ\n"
    "EAAAAAAAAAAAAAAE\n"
    "EAAAEAAAAAABBAAE\n"
    "EAAAEAAAAAABBAAE\n"
    "EAAAEAAAAAAAAAAE\n"
    "EEEEEEEEEEEEEEEE\n"
    ". XUT";

inline Grid random_grid(Rng& rng, int w, int h, std::string_view alphabet) {
  std::vector<Tile> cells(static_cast<std::size_t>(w) * h);
  for (auto& t : cells) t = *tile_from_char(alphabet[rng.below(alphabet.size())]);
  return Grid(w, h, std::move(cells));
}

// Room-like random grid: a wall ring sprinkled with junctions and gaps, and
// an interior that is mostly one walkable tile. Exercises doors, clusters
// and ties far more often than uniform noise.
inline Grid roomish_grid(Rng& rng, int w, int h) {
  const Tile ring = rng.chance(1, 3) ? Tile::Hash : Tile::E;
  const Tile base = kWalkableTiles[rng.below(3)];
  const int noise = rng.range(5, 40);  // percent of interior cells that are not base
  Grid g(w, h, base);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (g.on_border(r, c)) {
        const auto roll = rng.below(100);
        g.set(r, c, roll < 12 ? Tile::J : roll < 22 ? base : roll < 25 ? Tile::E : ring);
      } else if (static_cast<int>(rng.below(100)) < noise) {
        g.set(r, c, kAllTiles[rng.below(kAllTiles.size())]);
      }
    }
  }
  return g;
}

// Empty when the library validator and the oracle agree on the verdict,
// every constraint's pass flag, the offending cells of every failed
// constraint and the repairability score; otherwise a description.
inline std::string oracle_disagreement(const Grid& g) {
  const auto mine = validate(g);
  const auto theirs = oracle::check(to_room(g));
  std::string out;
  if (mine.pass != theirs.ok) out += "verdict; ";
  for (std::size_t i = 0; i < kConstraintCount; ++i) {
    const auto& c = mine.constraints[i];
    if (c.pass != theirs.pass[i]) {
      out += constraint_name(c.id) + " pass; ";
      continue;
    }
    if (c.pass) continue;
    oracle::Cells cells;
    for (Cell x : c.offending) cells.insert({x.row, x.col});
    if (cells != theirs.offending[i]) out += constraint_name(c.id) + " cells; ";
  }
  if (mine.repairability != theirs.repairability) out += "repairability; ";
  if (mine.doors.size() != static_cast<std::size_t>(theirs.doors)) out += "door count; ";
  if (!out.empty()) out += "\n" + serialize_level(g);
  return out;
}

// Random spec that build_prompt accepts.
inline PromptSpec random_spec(Rng& rng) {
  PromptSpec s;
  s.width = rng.range(4, 40);
  s.height = rng.range(4, 40);
  std::vector<Tile> walk(kWalkableTiles.begin(), kWalkableTiles.end());
  for (std::size_t i = walk.size(); i > 1; --i) std::swap(walk[i - 1], walk[rng.below(i)]);
  s.base_tile = walk[0];
  const int patterns = rng.range(0, 2);
  s.pattern_tiles.assign(walk.begin() + 1, walk.begin() + 1 + patterns);
  s.border_tile = rng.chance(1, 2) ? Tile::E : Tile::Hash;
  s.percent_pattern_tiles = patterns == 0 ? 0.0 : static_cast<double>(rng.below(10001)) / 100.0;
  return s;
}

// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("roomforge-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

// Backend whose completions come from a callback, one call per sample.
class ScriptedBackend final : public Backend {
 public:
  using Script = std::function<std::string(const GenerationRequest&, int)>;
  explicit ScriptedBackend(Script script) : script_(std::move(script)) {}

  BackendKind kind() const override { return BackendKind::Mock; }

  ModelRef fine_tune(const std::optional<ModelRef>& base, const std::filesystem::path& records,
                     int epochs) override {
    ++fine_tunes;
    ModelRef m;
    m.handle = "scripted";
    m.trained_on = hex64(fnv1a64(detail::read_file(records)));
    m.epochs = epochs;
    m.parent = base ? base->handle : "";
    return m;
  }

  std::vector<std::string> generate(const GenerationRequest& request) override {
    ++requests;
    samples += request.n;
    std::vector<std::string> out;
    for (int i = 0; i < request.n; ++i) out.push_back(script_(request, i));
    return out;
  }

  int fine_tunes = 0;
  int requests = 0;
  int samples = 0;

 private:
  Script script_;
};

}  // namespace support

namespace roomforge {

inline void PrintTo(const Grid& g, std::ostream* os) { *os << "\n" << serialize_level(g); }

}  // namespace roomforge
