#pragma once

#include <algorithm>
#include <string_view>
#include <utility>
#include <vector>

#include "roomforge/grid.hpp"

namespace roomforge {

enum class Wall { Top, Bottom, Left, Right };
enum class Orientation { Vertical, Horizontal };

constexpr std::string_view to_string(Wall w) noexcept {
  switch (w) {
    case Wall::Top: return "top";
    case Wall::Bottom: return "bottom";
    case Wall::Left: return "left";
    case Wall::Right: return "right";
  }
  return "?";
}

constexpr std::string_view to_string(Orientation o) noexcept {
  return o == Orientation::Vertical ? "vertical" : "horizontal";
}

constexpr Orientation orientation_of(Wall w) noexcept {
  return (w == Wall::Left || w == Wall::Right) ? Orientation::Vertical : Orientation::Horizontal;
}

// Distance between the two junctions of a legal door, measured along
// the wall: one gap tile on vertical walls, two on horizontal walls.
constexpr int junction_spacing(Orientation o) noexcept {
  return o == Orientation::Vertical ? 2 : 3;
}

struct Door {
  Wall wall = Wall::Left;
  std::pair<Cell, Cell> junctions;  // ordered along the wall
  std::vector<Cell> gap_cells;

  Orientation orientation() const noexcept { return orientation_of(wall); }

  friend bool operator==(const Door&, const Door&) = default;
};

struct DoorScan {
  std::vector<Door> doors;
  std::vector<Cell> stray_junctions;  // J cells that do not belong to a legal door
};

namespace detail {

// Wall of a non-corner border cell.
inline Wall wall_of(const Grid& g, Cell c) {
  if (c.col == 0) return Wall::Left;
  if (c.col == g.width() - 1) return Wall::Right;
  if (c.row == 0) return Wall::Top;
  return Wall::Bottom;
}

// Cell at position `along` on a wall.
inline Cell wall_cell(const Grid& g, Wall w, int along) {
  switch (w) {
    case Wall::Top: return {0, along};
    case Wall::Bottom: return {g.height() - 1, along};
    case Wall::Left: return {along, 0};
    case Wall::Right: return {along, g.width() - 1};
  }
  return {};
}

inline int wall_length(const Grid& g, Wall w) {
  return orientation_of(w) == Orientation::Vertical ? g.height() : g.width();
}

}  // namespace detail

// Pairs border junctions into doors. A junction belongs to a door when it
// has exactly one correctly spaced partner on its wall with only walkable
// tiles in between, and that partner has no other candidate. Everything
// else (interior or corner junctions, unpaired or ambiguous chains) is
// reported as stray.
inline DoorScan find_doors(const Grid& grid) {
  DoorScan scan;
  constexpr std::array<Wall, 4> walls = {Wall::Top, Wall::Bottom, Wall::Left, Wall::Right};

  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      if (grid.at(r, c) == Tile::J && (!grid.on_border(r, c) || grid.is_corner(r, c))) {
        scan.stray_junctions.push_back({r, c});
      }
    }
  }

  for (Wall w : walls) {
    const int len = detail::wall_length(grid, w);
    const int spacing = junction_spacing(orientation_of(w));
    auto is_j = [&](int i) { return grid.at(detail::wall_cell(grid, w, i)) == Tile::J; };

    // partners[i] counts candidate pairs that junction i participates in.
    std::vector<int> partners(len, 0);
    std::vector<int> pairs;  // start index of each candidate pair
    for (int i = 1; i + spacing <= len - 2; ++i) {
      if (!is_j(i) || !is_j(i + spacing)) continue;
      bool open = true;
      for (int k = i + 1; k < i + spacing; ++k) {
        open = open && is_walkable(grid.at(detail::wall_cell(grid, w, k)));
      }
      if (!open) continue;
      pairs.push_back(i);
      ++partners[i];
      ++partners[i + spacing];
    }

    std::vector<bool> in_door(len, false);
    for (int i : pairs) {
      if (partners[i] != 1 || partners[i + spacing] != 1) continue;
      Door door;
      door.wall = w;
      door.junctions = {detail::wall_cell(grid, w, i), detail::wall_cell(grid, w, i + spacing)};
      for (int k = i + 1; k < i + spacing; ++k) {
        door.gap_cells.push_back(detail::wall_cell(grid, w, k));
      }
      in_door[i] = in_door[i + spacing] = true;
      scan.doors.push_back(std::move(door));
    }
    for (int i = 1; i < len - 1; ++i) {
      if (is_j(i) && !in_door[i]) scan.stray_junctions.push_back(detail::wall_cell(grid, w, i));
    }
  }
  std::sort(scan.stray_junctions.begin(), scan.stray_junctions.end());
  return scan;
}

}  // namespace roomforge
