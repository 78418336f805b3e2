#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>

#include "roomforge/census.hpp"
#include "roomforge/doors.hpp"

namespace roomforge {

namespace detail {

inline Cell rotate_cell_cw(Cell c, int height) { return {c.col, height - 1 - c.row}; }

constexpr Wall rotate_wall_cw(Wall w) noexcept {
  switch (w) {
    case Wall::Left: return Wall::Top;
    case Wall::Top: return Wall::Right;
    case Wall::Right: return Wall::Bottom;
    case Wall::Bottom: return Wall::Left;
  }
  return w;
}

inline int along_wall(Wall w, Cell c) {
  return orientation_of(w) == Orientation::Vertical ? c.row : c.col;
}

}  // namespace detail

// Clockwise quarter turn. Legal doors change orientation under rotation,
// so each one is respaced to the spacing its new wall requires: the
// junction nearer the origin stays put, the other moves, the opening is
// filled with the base tile and vacated door cells become border wall.
// When the moved junction would leave the wall, the far junction is
// anchored instead.
inline Grid rotate90(const Grid& grid) {
  const int h = grid.height();
  Grid out(h, grid.width(), Tile::E);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < grid.width(); ++c) out.set(detail::rotate_cell_cw({r, c}, h), grid.at(r, c));
  }

  const auto scan = find_doors(grid);
  if (scan.doors.empty()) return out;

  const auto counts = count_tiles(grid);
  const auto walkable = walkable_by_count(counts);
  const Tile base = walkable.empty() ? Tile::A : walkable.front();
  Tile border = Tile::E;
  try {
    border = tile_census(grid).border_tile;
  } catch (const LevelError&) {
  }

  for (const Door& door : scan.doors) {
    const Wall wall = detail::rotate_wall_cw(door.wall);
    const int spacing = junction_spacing(orientation_of(wall));
    const int len = detail::wall_length(out, wall);

    std::vector<int> footprint;
    footprint.push_back(detail::along_wall(wall, detail::rotate_cell_cw(door.junctions.first, h)));
    footprint.push_back(detail::along_wall(wall, detail::rotate_cell_cw(door.junctions.second, h)));
    for (Cell g : door.gap_cells) {
      footprint.push_back(detail::along_wall(wall, detail::rotate_cell_cw(g, h)));
    }
    const auto [lo_it, hi_it] = std::minmax_element(footprint.begin(), footprint.end());
    const int lo = *lo_it;
    const int hi = *hi_it;

    auto usable = [&](int start) {
      const int end = start + spacing;
      if (start < 1 || end > len - 2) return false;
      for (int i = start; i <= end; ++i) {
        const bool ours = std::find(footprint.begin(), footprint.end(), i) != footprint.end();
        if (!ours && !is_wall(out.at(detail::wall_cell(out, wall, i)))) return false;
      }
      return true;
    };

    int start = lo;
    if (!usable(start)) {
      start = hi - spacing;
      if (!usable(start)) {
        const Cell at = detail::wall_cell(out, wall, lo);
        throw LevelError(LevelError::Kind::DoorRelocationFailed,
                         "cannot respace door on " + std::string(to_string(door.wall)) +
                             " wall at row " + std::to_string(door.junctions.first.row) +
                             ", col " + std::to_string(door.junctions.first.col),
                         at.row, at.col);
      }
    }

    for (int i : footprint) out.set(detail::wall_cell(out, wall, i), border);
    out.set(detail::wall_cell(out, wall, start), Tile::J);
    out.set(detail::wall_cell(out, wall, start + spacing), Tile::J);
    for (int i = start + 1; i < start + spacing; ++i) out.set(detail::wall_cell(out, wall, i), base);
  }
  return out;
}

// The augmentation transforms, by name.
enum class Transform { Identity, FlipH, FlipV, Rot90, Swap, SwapFlipH, SwapFlipV };

inline constexpr std::array<Transform, 7> kAugmentTransforms = {
    Transform::Identity, Transform::FlipH,     Transform::FlipV,    Transform::Rot90,
    Transform::Swap,     Transform::SwapFlipH, Transform::SwapFlipV};

constexpr std::string_view to_string(Transform t) noexcept {
  switch (t) {
    case Transform::Identity: return "identity";
    case Transform::FlipH: return "flip_h";
    case Transform::FlipV: return "flip_v";
    case Transform::Rot90: return "rot90";
    case Transform::Swap: return "swap";
    case Transform::SwapFlipH: return "swap_flip_h";
    case Transform::SwapFlipV: return "swap_flip_v";
  }
  return "?";
}

inline std::optional<Transform> transform_from_string(std::string_view name) {
  for (Transform t : kAugmentTransforms) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

inline Grid apply_transform(Transform t, const Grid& grid) {
  switch (t) {
    case Transform::Identity: return grid;
    case Transform::FlipH: return flip_horizontal(grid);
    case Transform::FlipV: return flip_vertical(grid);
    case Transform::Rot90: return rotate90(grid);
    case Transform::Swap: return swap_patterns(grid);
    case Transform::SwapFlipH: return swap_patterns(flip_horizontal(grid));
    case Transform::SwapFlipV: return swap_patterns(flip_vertical(grid));
  }
  return grid;
}

}  // namespace roomforge
