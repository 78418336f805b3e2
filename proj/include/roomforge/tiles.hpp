#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace roomforge {

// The seven room tiles. The enumerator value is the character used in
// the level text format.
enum class Tile : char {
  A = 'A',
  B = 'B',
  C = 'C',
  E = 'E',
  Hash = '#',
  F = 'F',
  J = 'J',
};

inline constexpr std::array<Tile, 7> kAllTiles = {
    Tile::A, Tile::B, Tile::C, Tile::E, Tile::Hash, Tile::F, Tile::J};

// Walkable tiles in tie-break order.
inline constexpr std::array<Tile, 3> kWalkableTiles = {Tile::A, Tile::B, Tile::C};

// Wall tiles in tie-break order.
inline constexpr std::array<Tile, 2> kWallTiles = {Tile::E, Tile::Hash};

constexpr char to_char(Tile t) noexcept { return static_cast<char>(t); }

constexpr std::optional<Tile> tile_from_char(char ch) noexcept {
  switch (ch) {
    case 'A': return Tile::A;
    case 'B': return Tile::B;
    case 'C': return Tile::C;
    case 'E': return Tile::E;
    case '#': return Tile::Hash;
    case 'F': return Tile::F;
    case 'J': return Tile::J;
    default: return std::nullopt;
  }
}

constexpr bool is_walkable(Tile t) noexcept {
  return t == Tile::A || t == Tile::B || t == Tile::C;
}
constexpr bool is_wall(Tile t) noexcept { return t == Tile::E || t == Tile::Hash; }
constexpr bool is_water(Tile t) noexcept { return t == Tile::F; }
constexpr bool is_junction(Tile t) noexcept { return t == Tile::J; }

// Walls and water block movement; junctions are door openings.
constexpr bool is_unwalkable(Tile t) noexcept { return is_wall(t) || is_water(t); }
constexpr bool is_traversable(Tile t) noexcept { return is_walkable(t) || is_junction(t); }

// Dense index in kAllTiles order, for count tables.
constexpr std::size_t tile_index(Tile t) noexcept {
  switch (t) {
    case Tile::A: return 0;
    case Tile::B: return 1;
    case Tile::C: return 2;
    case Tile::E: return 3;
    case Tile::Hash: return 4;
    case Tile::F: return 5;
    case Tile::J: return 6;
  }
  return 0;
}

}  // namespace roomforge
