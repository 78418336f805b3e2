#pragma once

// Straightforward re-statement of the playability rules, written
// separately from the library so the two can be checked against each
// other. Favours obviousness over speed: union-find, fixpoint labelling
// and all-pairs scans.

#include <algorithm>
#include <array>
#include <cstdlib>
#include <numeric>
#include <set>
#include <string>
#include <vector>

namespace oracle {

// Plain text grid: rows of the same length over "ABCE#FJ".
struct Room {
  std::vector<std::string> rows;

  int w() const { return static_cast<int>(rows[0].size()); }
  int h() const { return static_cast<int>(rows.size()); }
  char at(int r, int c) const { return rows[r][c]; }
  bool inside(int r, int c) const { return r >= 0 && c >= 0 && r < h() && c < w(); }
  bool border(int r, int c) const { return r == 0 || c == 0 || r == h() - 1 || c == w() - 1; }
  bool corner(int r, int c) const { return (r == 0 || r == h() - 1) && (c == 0 || c == w() - 1); }
};

inline bool walkable(char t) { return t == 'A' || t == 'B' || t == 'C'; }
inline bool wall(char t) { return t == 'E' || t == '#'; }
inline bool blocked(char t) { return wall(t) || t == 'F'; }
inline bool passable(char t) { return walkable(t) || t == 'J'; }

using Cells = std::set<std::pair<int, int>>;

struct Verdict {
  std::array<bool, 7> pass{};
  std::array<Cells, 7> offending;
  bool ok = true;
  std::size_t repairability = 0;
  int doors = 0;
};

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void join(int a, int b) { parent[find(a)] = find(b); }
};

struct OracleDoor {
  std::pair<int, int> j1, j2;
  std::vector<std::pair<int, int>> gap;
};

// Candidate partners of a border junction: same wall, two rows apart on
// left/right walls or three columns apart on top/bottom walls, with only
// walkable tiles strictly between, never a corner.
inline std::vector<OracleDoor> candidates(const Room& g, int r, int c) {
  std::vector<OracleDoor> out;
  const bool side = (c == 0 || c == g.w() - 1) && !g.corner(r, c);
  const bool topbot = (r == 0 || r == g.h() - 1) && !g.corner(r, c);
  for (int dir : {-1, 1}) {
    int pr = r, pc = c;
    std::vector<std::pair<int, int>> gap;
    if (side) {
      pr = r + 2 * dir;
      gap.push_back({r + dir, c});
    } else if (topbot) {
      pc = c + 3 * dir;
      gap.push_back({r, c + dir});
      gap.push_back({r, c + 2 * dir});
    } else {
      continue;
    }
    if (!g.inside(pr, pc) || g.corner(pr, pc) || g.at(pr, pc) != 'J') continue;
    bool open = true;
    for (auto [a, b] : gap) open = open && walkable(g.at(a, b));
    if (!open) continue;
    std::sort(gap.begin(), gap.end());
    OracleDoor d;
    d.j1 = std::min(std::make_pair(r, c), std::make_pair(pr, pc));
    d.j2 = std::max(std::make_pair(r, c), std::make_pair(pr, pc));
    d.gap = gap;
    out.push_back(d);
  }
  return out;
}

inline Verdict check(const Room& g) {
  Verdict v;
  const int W = g.w(), H = g.h();
  auto id = [&](int r, int c) { return r * W + c; };

  // C1
  int walk = 0, inner = 0;
  for (int r = 1; r < H - 1; ++r) {
    for (int c = 1; c < W - 1; ++c) {
      ++inner;
      if (walkable(g.at(r, c))) {
        ++walk;
      } else {
        v.offending[0].insert({r, c});
      }
    }
  }
  v.pass[0] = walk * 2 > inner;

  // Doors.
  std::vector<OracleDoor> doors;
  Cells stray;
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      if (g.at(r, c) != 'J') continue;
      auto mine = candidates(g, r, c);
      if (mine.size() != 1) {
        stray.insert({r, c});
        continue;
      }
      auto [pr, pc] = mine[0].j1 == std::make_pair(r, c) ? mine[0].j2 : mine[0].j1;
      if (candidates(g, pr, pc).size() != 1) {
        stray.insert({r, c});
        continue;
      }
      if (mine[0].j1 == std::make_pair(r, c)) doors.push_back(mine[0]);
    }
  }
  v.doors = static_cast<int>(doors.size());

  // Wide region: every cell of some passable 2x2 square.
  auto wide = [&](int r, int c) {
    for (int dr = -1; dr <= 0; ++dr) {
      for (int dc = -1; dc <= 0; ++dc) {
        bool all = true;
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            const int rr = r + dr + a, cc = c + dc + b;
            all = all && g.inside(rr, cc) && passable(g.at(rr, cc));
          }
        }
        if (all) return true;
      }
    }
    return false;
  };

  // Component labels over the wide region by repeated min-propagation.
  std::vector<int> label(W * H, -1);
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      if (wide(r, c)) label[id(r, c)] = id(r, c);
    }
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (int r = 0; r < H; ++r) {
      for (int c = 0; c < W; ++c) {
        if (label[id(r, c)] < 0) continue;
        const int dr[] = {1, -1, 0, 0}, dc[] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nr = r + dr[k], nc = c + dc[k];
          if (g.inside(nr, nc) && label[id(nr, nc)] >= 0 && label[id(nr, nc)] < label[id(r, c)]) {
            label[id(r, c)] = label[id(nr, nc)];
            changed = true;
          }
        }
      }
    }
  }
  auto door_labels = [&](const OracleDoor& d) {
    std::set<int> s;
    for (auto [r, c] : d.gap) {
      if (label[id(r, c)] >= 0) s.insert(label[id(r, c)]);
    }
    return s;
  };
  std::set<int> path_labels;
  if (doors.empty()) {
    for (int l : label) {
      if (l >= 0) path_labels.insert(l);
    }
  } else {
    for (const auto& d : doors) {
      auto s = door_labels(d);
      path_labels.insert(s.begin(), s.end());
    }
  }
  auto on_path = [&](int r, int c) { return label[id(r, c)] >= 0 && path_labels.count(label[id(r, c)]); };

  // C2: clusters with the whole border ring of obstacles as one.
  UnionFind uf(W * H + 1);
  const int ring = W * H;
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      if (!blocked(g.at(r, c))) continue;
      if (g.border(r, c)) uf.join(id(r, c), ring);
      if (c + 1 < W && blocked(g.at(r, c + 1))) uf.join(id(r, c), id(r, c + 1));
      if (r + 1 < H && blocked(g.at(r + 1, c))) uf.join(id(r, c), id(r + 1, c));
    }
  }
  std::vector<std::pair<int, int>> exposed;
  for (int r = 1; r < H - 1; ++r) {
    for (int c = 1; c < W - 1; ++c) {
      if (!blocked(g.at(r, c))) continue;
      bool near = false;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) near = near || ((dr || dc) && on_path(r + dr, c + dc));
      }
      if (near) exposed.push_back({r, c});
    }
  }
  for (auto a : exposed) {
    for (auto b : exposed) {
      const int cheb = std::max(std::abs(a.first - b.first), std::abs(a.second - b.second));
      if (cheb == 1 && uf.find(id(a.first, a.second)) != uf.find(id(b.first, b.second))) {
        v.offending[1].insert(a);
      }
    }
  }
  v.pass[1] = v.offending[1].empty();

  v.pass[2] = true;

  // C4
  for (int r = 0; r + 1 < H; ++r) {
    for (int c = 0; c + 1 < W; ++c) {
      if (wall(g.at(r, c)) && wall(g.at(r + 1, c)) && wall(g.at(r, c + 1)) && wall(g.at(r + 1, c + 1))) {
        v.offending[3].insert({{r, c}, {r + 1, c}, {r, c + 1}, {r + 1, c + 1}});
      }
    }
  }
  v.pass[3] = v.offending[3].empty();

  // C5
  std::array<int, 3> n{};
  for (const auto& row : g.rows) {
    for (char t : row) {
      if (walkable(t)) ++n[t - 'A'];
    }
  }
  const int best = *std::max_element(n.begin(), n.end());
  if (best == 0) {
    for (int r = 1; r < H - 1; ++r) {
      for (int c = 1; c < W - 1; ++c) v.offending[4].insert({r, c});
    }
  } else if (std::count(n.begin(), n.end(), best) > 1) {
    for (int r = 0; r < H; ++r) {
      for (int c = 0; c < W; ++c) {
        if (walkable(g.at(r, c)) && n[g.at(r, c) - 'A'] == best) v.offending[4].insert({r, c});
      }
    }
  }
  v.pass[4] = v.offending[4].empty();

  // C6
  v.offending[5] = stray;
  if (doors.size() >= 2) {
    bool linked = false;
    for (std::size_t a = 0; a < doors.size(); ++a) {
      for (std::size_t b = a + 1; b < doors.size(); ++b) {
        auto la = door_labels(doors[a]);
        for (int l : door_labels(doors[b])) linked = linked || la.count(l);
      }
    }
    if (!linked) {
      for (const auto& d : doors) {
        v.offending[5].insert(d.j1);
        v.offending[5].insert(d.j2);
        v.offending[5].insert(d.gap.begin(), d.gap.end());
      }
    }
  }
  v.pass[5] = v.offending[5].empty();

  // C7
  if (W % 2) {
    for (int r = 0; r < H; ++r) v.offending[6].insert({r, W - 1});
  }
  if (H % 2) {
    for (int c = 0; c < W; ++c) v.offending[6].insert({H - 1, c});
  }
  v.pass[6] = v.offending[6].empty();

  for (int i = 0; i < 7; ++i) {
    if (!v.pass[i]) {
      v.ok = false;
      v.repairability += v.offending[i].size();
    }
  }
  return v;
}

}  // namespace oracle
