#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "roomforge/census.hpp"
#include "roomforge/doors.hpp"

namespace roomforge {

// Boolean cell mask with the shape of a grid.
class CellMask {
 public:
  CellMask(int width, int height) : width_(width), height_(height), bits_(width * height, 0) {}

  bool test(int row, int col) const { return bits_[row * width_ + col] != 0; }
  bool test(Cell c) const { return test(c.row, c.col); }
  void set(int row, int col, bool v = true) { bits_[row * width_ + col] = v ? 1 : 0; }

  std::size_t count() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1)); }

  std::vector<Cell> cells() const {
    std::vector<Cell> out;
    for (int r = 0; r < height_; ++r) {
      for (int c = 0; c < width_; ++c) {
        if (test(r, c)) out.push_back({r, c});
      }
    }
    return out;
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  friend bool operator==(const CellMask&, const CellMask&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

// Traversable cells covered by at least one fully traversable 2x2 block:
// the places a two-tile-wide player path can reach.
inline CellMask wide_walkable_region(const Grid& grid) {
  CellMask mask(grid.width(), grid.height());
  for (int r = 0; r + 1 < grid.height(); ++r) {
    for (int c = 0; c + 1 < grid.width(); ++c) {
      if (is_traversable(grid.at(r, c)) && is_traversable(grid.at(r, c + 1)) &&
          is_traversable(grid.at(r + 1, c)) && is_traversable(grid.at(r + 1, c + 1))) {
        mask.set(r, c);
        mask.set(r, c + 1);
        mask.set(r + 1, c);
        mask.set(r + 1, c + 1);
      }
    }
  }
  return mask;
}

enum class ConstraintId { C1 = 0, C2, C3, C4, C5, C6, C7 };

inline constexpr std::size_t kConstraintCount = 7;

inline std::string constraint_name(ConstraintId id) {
  return "C" + std::to_string(static_cast<int>(id) + 1);
}

struct ConstraintResult {
  ConstraintId id = ConstraintId::C1;
  bool pass = true;
  std::vector<Cell> offending;
  std::string message;
};

struct PlayabilityReport {
  bool pass = true;
  std::array<ConstraintResult, kConstraintCount> constraints;
  std::vector<Door> doors;
  // Non-gating: every pair of doors is reachable along the wide region.
  bool all_doors_connected = true;
  // Offending cells summed over failed constraints. Zero iff pass.
  std::size_t repairability = 0;

  const ConstraintResult& operator[](ConstraintId id) const {
    return constraints[static_cast<std::size_t>(id)];
  }
  int failed_count() const {
    return static_cast<int>(std::count_if(constraints.begin(), constraints.end(),
                                          [](const ConstraintResult& c) { return !c.pass; }));
  }
};

namespace detail {

constexpr std::array<std::pair<int, int>, 4> kSteps4 = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

// 4-connected component labels over cells where `member` holds; -1 elsewhere.
template <typename Pred>
std::vector<int> label_components(const Grid& grid, Pred member, int& count) {
  const int w = grid.width();
  const int h = grid.height();
  std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
  count = 0;
  std::queue<Cell> frontier;
  auto flood = [&](int id) {
    while (!frontier.empty()) {
      const Cell c = frontier.front();
      frontier.pop();
      for (auto [dr, dc] : kSteps4) {
        const int nr = c.row + dr;
        const int nc = c.col + dc;
        if (!grid.contains(nr, nc) || label[nr * w + nc] != -1 || !member(nr, nc)) continue;
        label[nr * w + nc] = id;
        frontier.push({nr, nc});
      }
    }
  };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (label[r * w + c] != -1 || !member(r, c)) continue;
      label[r * w + c] = count;
      frontier.push({r, c});
      flood(count++);
    }
  }
  return label;
}

inline std::vector<Cell> unique_cells(std::vector<Cell> cells) {
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

}  // namespace detail

// Checks the seven playability rules:
//   C1 walkable tiles are a strict majority of the interior
//   C2 obstacles touching the door path keep a one-cell clearance from
//      other obstacle clusters (no diagonal pinches)
//   C3 water may cluster (always satisfied; recorded for completeness)
//   C4 walls are one tile thick: no 2x2 block of wall tiles
//   C5 one walkable tile strictly outnumbers the others
//   C6 junctions form legal doors, and with two or more doors some pair
//      is connected through the wide walkable region
//   C7 even width and height
inline PlayabilityReport validate(const Grid& grid) {
  PlayabilityReport report;
  const int w = grid.width();
  const int h = grid.height();
  for (std::size_t i = 0; i < kConstraintCount; ++i) report.constraints[i].id = ConstraintId(i);
  auto& c1 = report.constraints[0];
  auto& c2 = report.constraints[1];
  auto& c3 = report.constraints[2];
  auto& c4 = report.constraints[3];
  auto& c5 = report.constraints[4];
  auto& c6 = report.constraints[5];
  auto& c7 = report.constraints[6];

  // C1
  const int interior = (w - 2) * (h - 2);
  int interior_walkable = 0;
  for (int r = 1; r < h - 1; ++r) {
    for (int c = 1; c < w - 1; ++c) {
      if (is_walkable(grid.at(r, c))) {
        ++interior_walkable;
      } else {
        c1.offending.push_back({r, c});
      }
    }
  }
  c1.pass = 2 * interior_walkable > interior;
  c1.message = std::to_string(interior_walkable) + " of " + std::to_string(interior) +
               " interior cells are walkable";

  // Door path: wide-region components reached by a door opening.
  const auto wide = wide_walkable_region(grid);
  auto scan = find_doors(grid);
  int wide_components = 0;
  const auto wide_label =
      detail::label_components(grid, [&](int r, int c) { return wide.test(r, c); }, wide_components);
  std::vector<std::vector<int>> door_labels(scan.doors.size());
  for (std::size_t d = 0; d < scan.doors.size(); ++d) {
    for (Cell g : scan.doors[d].gap_cells) {
      const int l = wide_label[g.row * w + g.col];
      if (l >= 0) door_labels[d].push_back(l);
    }
  }
  std::vector<bool> on_path(wide_components, scan.doors.empty());
  for (const auto& labels : door_labels) {
    for (int l : labels) on_path[l] = true;
  }
  auto path_cell = [&](int r, int c) {
    const int l = wide_label[r * w + c];
    return l >= 0 && on_path[l];
  };

  // C2: obstacle clusters; every unwalkable border cell joins cluster 0.
  std::vector<int> cluster(static_cast<std::size_t>(w) * h, -1);
  {
    int n = 0;
    auto raw = detail::label_components(
        grid, [&](int r, int c) { return is_unwalkable(grid.at(r, c)); }, n);
    std::vector<int> remap(n, -1);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        if (grid.on_border(r, c) && raw[r * w + c] >= 0) remap[raw[r * w + c]] = 0;
      }
    }
    int next = 1;
    for (int& m : remap) {
      if (m < 0) m = next++;
    }
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] >= 0) cluster[i] = remap[raw[i]];
    }
  }
  auto touches_path = [&](int r, int c) {
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if ((dr || dc) && grid.contains(r + dr, c + dc) && path_cell(r + dr, c + dc)) return true;
      }
    }
    return false;
  };
  CellMask exposed(w, h);
  for (int r = 1; r < h - 1; ++r) {
    for (int c = 1; c < w - 1; ++c) {
      if (is_unwalkable(grid.at(r, c)) && touches_path(r, c)) exposed.set(r, c);
    }
  }
  for (int r = 1; r < h - 1; ++r) {
    for (int c = 1; c < w - 1; ++c) {
      if (!exposed.test(r, c)) continue;
      bool pinched = false;
      for (int dr = -1; dr <= 1 && !pinched; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int nr = r + dr;
          const int nc = c + dc;
          if ((dr || dc) && exposed.test(nr, nc) && cluster[nr * w + nc] != cluster[r * w + c]) {
            pinched = true;
            break;
          }
        }
      }
      if (pinched) c2.offending.push_back({r, c});
    }
  }
  c2.pass = c2.offending.empty();
  c2.message = c2.pass ? "obstacles along the path are at least two tiles apart"
                       : std::to_string(c2.offending.size()) +
                             " obstacle cells pinch the path against another obstacle";

  c3.pass = true;
  c3.message = "water tiles may form clusters";

  // C4
  for (int r = 0; r + 1 < h; ++r) {
    for (int c = 0; c + 1 < w; ++c) {
      if (is_wall(grid.at(r, c)) && is_wall(grid.at(r, c + 1)) && is_wall(grid.at(r + 1, c)) &&
          is_wall(grid.at(r + 1, c + 1))) {
        c4.offending.insert(c4.offending.end(), {{r, c}, {r, c + 1}, {r + 1, c}, {r + 1, c + 1}});
      }
    }
  }
  c4.offending = detail::unique_cells(std::move(c4.offending));
  c4.pass = c4.offending.empty();
  c4.message = c4.pass ? "walls are a single tile thick"
                       : std::to_string(c4.offending.size()) + " cells form 2x2 wall blocks";

  // C5
  const auto counts = count_tiles(grid);
  const auto walkable = walkable_by_count(counts);
  if (walkable.empty()) {
    c5.pass = false;
    for (int r = 1; r < h - 1; ++r) {
      for (int c = 1; c < w - 1; ++c) c5.offending.push_back({r, c});
    }
    c5.message = "no walkable tiles";
  } else {
    const int top = counts[tile_index(walkable.front())];
    std::vector<Tile> tied;
    for (Tile t : walkable) {
      if (counts[tile_index(t)] == top) tied.push_back(t);
    }
    c5.pass = tied.size() == 1;
    if (c5.pass) {
      c5.message = std::string("base tile is ") + to_char(walkable.front());
    } else {
      std::string names;
      for (Tile t : tied) names += to_char(t);
      c5.message = "no single base tile: " + names + " tie at " + std::to_string(top);
      for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
          if (std::find(tied.begin(), tied.end(), grid.at(r, c)) != tied.end()) {
            c5.offending.push_back({r, c});
          }
        }
      }
    }
  }

  // C6
  c6.offending = scan.stray_junctions;
  bool some_pair = scan.doors.size() < 2;
  report.all_doors_connected = true;
  for (std::size_t a = 0; a < scan.doors.size(); ++a) {
    for (std::size_t b = a + 1; b < scan.doors.size(); ++b) {
      bool linked = false;
      for (int la : door_labels[a]) {
        linked = linked || std::find(door_labels[b].begin(), door_labels[b].end(), la) !=
                               door_labels[b].end();
      }
      some_pair = some_pair || linked;
      report.all_doors_connected = report.all_doors_connected && linked;
    }
  }
  if (!some_pair) {
    for (const Door& d : scan.doors) {
      c6.offending.push_back(d.junctions.first);
      c6.offending.push_back(d.junctions.second);
      c6.offending.insert(c6.offending.end(), d.gap_cells.begin(), d.gap_cells.end());
    }
  }
  c6.offending = detail::unique_cells(std::move(c6.offending));
  c6.pass = c6.offending.empty();
  if (!scan.stray_junctions.empty()) {
    c6.message = std::to_string(scan.stray_junctions.size()) + " junction tiles are not part of a legal door";
  } else if (!some_pair) {
    c6.message = "no two doors are connected by a two-wide path";
  } else {
    c6.message = std::to_string(scan.doors.size()) + " doors";
  }
  if (!c6.pass && !scan.stray_junctions.empty() && !some_pair) {
    c6.message += "; no two doors are connected by a two-wide path";
  }

  // C7
  if (w % 2 != 0) {
    for (int r = 0; r < h; ++r) c7.offending.push_back({r, w - 1});
  }
  if (h % 2 != 0) {
    for (int c = 0; c < w; ++c) c7.offending.push_back({h - 1, c});
  }
  c7.offending = detail::unique_cells(std::move(c7.offending));
  c7.pass = c7.offending.empty();
  c7.message = "size " + std::to_string(w) + "x" + std::to_string(h) +
               (c7.pass ? " is even" : " must be even in both dimensions");

  report.doors = std::move(scan.doors);
  report.pass = true;
  for (const auto& c : report.constraints) {
    if (!c.pass) {
      report.pass = false;
      report.repairability += c.offending.size();
    }
  }
  return report;
}

// Indices of the k failing reports that look cheapest to repair: fewest
// offending cells, then fewest failed constraints, then input order.
inline std::vector<std::size_t> repairability_order(const std::vector<PlayabilityReport>& reports,
                                                    std::size_t k) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (!reports[i].pass) idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = reports[a];
    const auto& rb = reports[b];
    if (ra.repairability != rb.repairability) return ra.repairability < rb.repairability;
    return ra.failed_count() < rb.failed_count();
  });
  if (idx.size() > k) idx.resize(k);
  return idx;
}

inline std::vector<Grid> repairability_rank(const std::vector<std::pair<Grid, PlayabilityReport>>& candidates,
                                            std::size_t k) {
  std::vector<PlayabilityReport> reports;
  reports.reserve(candidates.size());
  for (const auto& [g, r] : candidates) reports.push_back(r);
  std::vector<Grid> out;
  for (std::size_t i : repairability_order(reports, k)) out.push_back(candidates[i].first);
  return out;
}

inline nlohmann::ordered_json cells_to_json(const std::vector<Cell>& cells) {
  auto arr = nlohmann::ordered_json::array();
  for (Cell c : cells) arr.push_back({c.row, c.col});
  return arr;
}

// {verdict, constraints: [{id, pass, cells, message}], repairability,
//  doors, all_doors_connected}
inline nlohmann::ordered_json to_json(const PlayabilityReport& report) {
  nlohmann::ordered_json j;
  j["verdict"] = report.pass ? "pass" : "fail";
  auto constraints = nlohmann::ordered_json::array();
  for (const auto& c : report.constraints) {
    nlohmann::ordered_json cj;
    cj["id"] = constraint_name(c.id);
    cj["pass"] = c.pass;
    cj["cells"] = cells_to_json(c.offending);
    cj["message"] = c.message;
    constraints.push_back(std::move(cj));
  }
  j["constraints"] = std::move(constraints);
  j["repairability"] = report.repairability;
  auto doors = nlohmann::ordered_json::array();
  for (const auto& d : report.doors) {
    nlohmann::ordered_json dj;
    dj["wall"] = to_string(d.wall);
    dj["orientation"] = to_string(d.orientation());
    dj["junctions"] = cells_to_json({d.junctions.first, d.junctions.second});
    dj["gap"] = cells_to_json(d.gap_cells);
    doors.push_back(std::move(dj));
  }
  j["doors"] = std::move(doors);
  j["all_doors_connected"] = report.all_doors_connected;
  return j;
}

}  // namespace roomforge
