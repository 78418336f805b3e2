#pragma once

#include <algorithm>
#include <array>
#include <vector>

#include "roomforge/grid.hpp"

namespace roomforge {

using TileCounts = std::array<int, kAllTiles.size()>;

inline TileCounts count_tiles(const Grid& grid) {
  TileCounts counts{};
  for (Tile t : grid.cells()) ++counts[tile_index(t)];
  return counts;
}

// Prompt-facing summary of a room's tile usage.
struct TileCensus {
  TileCounts counts{};
  Tile base_tile = Tile::A;
  std::vector<Tile> pattern_tiles;  // 0-2 entries, descending count
  Tile border_tile = Tile::E;
  double percent_pattern = 0.0;

  int count(Tile t) const { return counts[tile_index(t)]; }
};

// Walkable tiles present, most frequent first, alphabetical on ties.
inline std::vector<Tile> walkable_by_count(const TileCounts& counts) {
  std::vector<Tile> present;
  for (Tile t : kWalkableTiles) {
    if (counts[tile_index(t)] > 0) present.push_back(t);
  }
  std::stable_sort(present.begin(), present.end(), [&](Tile a, Tile b) {
    return counts[tile_index(a)] > counts[tile_index(b)];
  });
  return present;
}

// Percentage of all cells holding a non-base walkable tile.
inline double pattern_percent(const Grid& grid) {
  const auto counts = count_tiles(grid);
  const auto walkable = walkable_by_count(counts);
  int pattern = 0;
  for (std::size_t i = 1; i < walkable.size(); ++i) pattern += counts[tile_index(walkable[i])];
  return 100.0 * pattern / static_cast<double>(grid.size());
}

inline TileCensus tile_census(const Grid& grid) {
  TileCensus census;
  census.counts = count_tiles(grid);

  const auto walkable = walkable_by_count(census.counts);
  if (walkable.empty()) {
    throw LevelError(LevelError::Kind::NoWalkableTiles, "room has no walkable tiles");
  }
  census.base_tile = walkable.front();
  census.pattern_tiles.assign(walkable.begin() + 1, walkable.end());

  std::array<int, kWallTiles.size()> border_walls{};
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      if (!grid.on_border(r, c)) continue;
      for (std::size_t w = 0; w < kWallTiles.size(); ++w) {
        if (grid.at(r, c) == kWallTiles[w]) ++border_walls[w];
      }
    }
  }
  if (border_walls[0] == 0 && border_walls[1] == 0) {
    throw LevelError(LevelError::Kind::NoBorderWall, "room border has no wall tiles");
  }
  census.border_tile = border_walls[1] > border_walls[0] ? kWallTiles[1] : kWallTiles[0];

  int pattern = 0;
  for (Tile t : census.pattern_tiles) pattern += census.count(t);
  census.percent_pattern = 100.0 * pattern / static_cast<double>(grid.size());
  return census;
}

inline Grid flip_horizontal(const Grid& grid) {
  Grid out = grid;
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) out.set(r, grid.width() - 1 - c, grid.at(r, c));
  }
  return out;
}

inline Grid flip_vertical(const Grid& grid) {
  Grid out = grid;
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) out.set(grid.height() - 1 - r, c, grid.at(r, c));
  }
  return out;
}

// Exchanges the two pattern tiles. Rooms with fewer than two pattern
// tiles come back unchanged.
inline Grid swap_patterns(const Grid& grid, const TileCensus& census) {
  if (census.pattern_tiles.size() < 2) return grid;
  const Tile p0 = census.pattern_tiles[0];
  const Tile p1 = census.pattern_tiles[1];
  std::vector<Tile> cells = grid.cells();
  for (Tile& t : cells) {
    if (t == p0) {
      t = p1;
    } else if (t == p1) {
      t = p0;
    }
  }
  return Grid(grid.width(), grid.height(), std::move(cells));
}

// Census-free variant; rooms without a census are returned unchanged.
inline Grid swap_patterns(const Grid& grid) {
  const auto walkable = walkable_by_count(count_tiles(grid));
  if (walkable.size() < 3) return grid;
  TileCensus census;
  census.pattern_tiles = {walkable[1], walkable[2]};
  return swap_patterns(grid, census);
}

}  // namespace roomforge
