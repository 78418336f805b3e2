#pragma once

// Hand-made-style sample rooms for demos and fixtures: walled rooms with
// one vertical and one horizontal door, scattered pattern patches, an
// optional wall spur and an optional pond. Every returned room passes
// validation.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "roomforge/constraints.hpp"
#include "roomforge/random.hpp"
#include "roomforge/transforms.hpp"

namespace roomforge {

struct SampleRoomOptions {
  int pattern_tiles = 2;  // 0, 1 or 2
  bool spur = true;
  bool pond = true;
};

inline std::optional<Grid> try_sample_room(Rng& rng, const SampleRoomOptions& opts) {
  static constexpr int kWidths[] = {10, 12, 14, 16};
  static constexpr int kHeights[] = {8, 10, 12};
  const int w = kWidths[rng.below(4)];
  const int h = kHeights[rng.below(3)];
  const Tile border = rng.chance(1, 4) ? Tile::Hash : Tile::E;
  const Tile base = kWalkableTiles[rng.below(3)];
  std::vector<Tile> patterns;
  for (Tile t : kWalkableTiles) {
    if (t != base) patterns.push_back(t);
  }
  if (rng.chance(1, 2)) std::swap(patterns[0], patterns[1]);
  patterns.resize(static_cast<std::size_t>(opts.pattern_tiles));

  Grid g(w, h, border);
  for (int r = 1; r < h - 1; ++r) {
    for (int c = 1; c < w - 1; ++c) g.set(r, c, base);
  }
  for (std::size_t p = 0; p < patterns.size(); ++p) {
    const int patches = rng.range(1, 3);
    for (int k = 0; k < patches; ++k) {
      const int ph = rng.range(1, 3);
      const int pw = rng.range(1, 3);
      const int r0 = rng.range(1, h - 1 - ph);
      const int c0 = rng.range(1, w - 1 - pw);
      for (int r = r0; r < r0 + ph; ++r) {
        for (int c = c0; c < c0 + pw; ++c) g.set(r, c, patterns[p]);
      }
    }
  }

  if (opts.spur && rng.chance(1, 2)) {
    const int c = rng.range(3, w - 4);
    const int len = rng.range(2, 3);
    const bool from_top = rng.chance(1, 2);
    for (int k = 1; k <= len; ++k) g.set(from_top ? k : h - 1 - k, c, border);
  }
  if (opts.pond && rng.chance(1, 2)) {
    const int r = rng.range(2, h - 4);
    const int c = rng.range(2, w - 5);
    g.set(r, c, Tile::F);
    g.set(r, c + 1, Tile::F);
    g.set(r + 1, c, Tile::F);
  }

  const int vr = rng.range(1, h - 4);
  const int vc = rng.chance(1, 2) ? 0 : w - 1;
  g.set(vr, vc, Tile::J);
  g.set(vr + 1, vc, base);
  g.set(vr + 2, vc, Tile::J);
  const int hc = rng.range(1, w - 5);
  const int hr = rng.chance(1, 2) ? 0 : h - 1;
  g.set(hr, hc, Tile::J);
  g.set(hr, hc + 1, base);
  g.set(hr, hc + 2, base);
  g.set(hr, hc + 3, Tile::J);

  const auto census = count_tiles(g);
  const auto walkable = walkable_by_count(census);
  if (walkable.size() != patterns.size() + 1 || walkable.front() != base) return std::nullopt;
  if (walkable.size() == 3 && census[tile_index(walkable[1])] == census[tile_index(walkable[2])]) {
    return std::nullopt;
  }
  if (!validate(g).pass) return std::nullopt;
  return g;
}

inline Grid sample_room(Rng& rng, const SampleRoomOptions& opts = {}) {
  while (true) {
    if (auto g = try_sample_room(rng, opts)) return *g;
  }
}

// n distinct rooms whose augmentation variants are all playable and all
// distinct from each other and from every other room's variants, so that
// augmenting them yields exactly 7 (two patterns) or 4 (one pattern)
// entries per room.
inline std::vector<Grid> augmentable_rooms(std::size_t n, std::uint64_t seed, const SampleRoomOptions& opts = {}) {
  Rng rng(seed);
  std::vector<Grid> rooms;
  std::set<std::string> seen;
  while (rooms.size() < n) {
    const Grid g = sample_room(rng, opts);
    std::vector<std::string> variants;
    bool ok = true;
    for (Transform t : kAugmentTransforms) {
      std::optional<Grid> v;
      try {
        v = apply_transform(t, g);
      } catch (const LevelError&) {
        ok = false;
        break;
      }
      if (!validate(*v).pass) {
        ok = false;
        break;
      }
      auto text = serialize_level(*v);
      const bool repeat = std::find(variants.begin(), variants.end(), text) != variants.end();
      // Swap variants coincide with their sources when there is no second pattern.
      const bool swap_kind = t == Transform::Swap || t == Transform::SwapFlipH || t == Transform::SwapFlipV;
      if (repeat && !(swap_kind && opts.pattern_tiles < 2)) ok = false;
      if (seen.count(text)) ok = false;
      if (!ok) break;
      if (!repeat) variants.push_back(std::move(text));
    }
    if (!ok) continue;
    seen.insert(variants.begin(), variants.end());
    rooms.push_back(g);
  }
  return rooms;
}

}  // namespace roomforge
