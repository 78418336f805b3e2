#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "roomforge/tiles.hpp"

namespace roomforge {

struct Cell {
  int row = 0;
  int col = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

class LevelError : public std::runtime_error {
 public:
  enum class Kind {
    RaggedRows,
    IllegalSymbol,
    Empty,
    TooSmall,
    NoWalkableTiles,
    NoBorderWall,
    DoorRelocationFailed,
  };

  LevelError(Kind kind, std::string message, int row = -1, int col = -1)
      : std::runtime_error(std::move(message)), kind_(kind), row_(row), col_(col) {}

  Kind kind() const noexcept { return kind_; }
  // Location of the problem, or -1 when not applicable.
  int row() const noexcept { return row_; }
  int col() const noexcept { return col_; }

 private:
  Kind kind_;
  int row_;
  int col_;
};

// A rectangular room of tiles, row-major. Any tile arrangement of at
// least 4x4 is representable; playability is the validator's concern.
class Grid {
 public:
  static constexpr int kMinSide = 4;

  Grid(int width, int height, Tile fill) : width_(width), height_(height) {
    check_size(width, height);
    cells_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  Grid(int width, int height, std::vector<Tile> cells)
      : width_(width), height_(height), cells_(std::move(cells)) {
    check_size(width, height);
    if (cells_.size() != static_cast<std::size_t>(width) * height) {
      throw std::invalid_argument("grid cell count does not match dimensions");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return cells_.size(); }

  Tile at(int row, int col) const { return cells_[index(row, col)]; }
  Tile at(Cell c) const { return at(c.row, c.col); }
  void set(int row, int col, Tile t) { cells_[index(row, col)] = t; }
  void set(Cell c, Tile t) { set(c.row, c.col, t); }

  bool contains(int row, int col) const noexcept {
    return row >= 0 && row < height_ && col >= 0 && col < width_;
  }
  bool on_border(int row, int col) const noexcept {
    return row == 0 || col == 0 || row == height_ - 1 || col == width_ - 1;
  }
  bool on_border(Cell c) const noexcept { return on_border(c.row, c.col); }
  bool is_corner(int row, int col) const noexcept {
    return (row == 0 || row == height_ - 1) && (col == 0 || col == width_ - 1);
  }

  const std::vector<Tile>& cells() const noexcept { return cells_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  static void check_size(int width, int height) {
    if (width < kMinSide || height < kMinSide) {
      throw LevelError(LevelError::Kind::TooSmall,
                       "room is " + std::to_string(width) + "x" + std::to_string(height) +
                           ", minimum is 4x4");
    }
  }

  std::size_t index(int row, int col) const {
    if (!contains(row, col)) throw std::out_of_range("grid cell out of range");
    return static_cast<std::size_t>(row) * width_ + col;
  }

  int width_;
  int height_;
  std::vector<Tile> cells_;
};

inline constexpr std::string_view kLevelTerminator = ". XUT";

namespace detail {

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

}  // namespace detail

// Parses the level text format. Surrounding whitespace and one trailing
// ". XUT" terminator are ignored.
inline Grid parse_level(std::string_view text) {
  text = detail::trim(text);
  if (text.ends_with(kLevelTerminator)) {
    text.remove_suffix(kLevelTerminator.size());
    text = detail::trim(text);
  }
  if (text.empty()) throw LevelError(LevelError::Kind::Empty, "level text has no rows");

  std::vector<Tile> cells;
  int width = -1;
  int row = 0;
  std::size_t pos = 0;
  while (true) {
    const auto nl = text.find('\n', pos);
    const auto line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    const int len = static_cast<int>(line.size());
    if (width < 0) {
      width = len;
    } else if (len != width) {
      throw LevelError(LevelError::Kind::RaggedRows,
                       "row " + std::to_string(row) + " has " + std::to_string(len) +
                           " tiles, expected " + std::to_string(width),
                       row);
    }
    for (int col = 0; col < len; ++col) {
      const auto t = tile_from_char(line[col]);
      if (!t) {
        std::string shown = line[col] == '\r' ? "\\r" : std::string(1, line[col]);
        throw LevelError(LevelError::Kind::IllegalSymbol,
                         "illegal symbol '" + shown + "' at row " + std::to_string(row) +
                             ", col " + std::to_string(col),
                         row, col);
      }
      cells.push_back(*t);
    }
    ++row;
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return Grid(width, row, std::move(cells));
}

// Every row is followed by exactly one '\n'; the terminator, when
// requested, follows the final newline.
inline std::string serialize_level(const Grid& grid, bool with_terminator = false) {
  std::string out;
  out.reserve(grid.size() + grid.height() + kLevelTerminator.size());
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) out.push_back(to_char(grid.at(r, c)));
    out.push_back('\n');
  }
  if (with_terminator) out.append(kLevelTerminator);
  return out;
}

}  // namespace roomforge
