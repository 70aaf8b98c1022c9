#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "liouville/core/geometry.hpp"
#include "liouville/core/grid_field.hpp"

namespace liouville {

/// Marching-squares geometry of {u > t} on one grid. Cells are walked
/// counter-clockwise (corners (i,j), (i+1,j), (i+1,j+1), (i,j+1)); nodes that
/// are masked out, or lie in the one-cell halo around the grid, count as below
/// the level and place their crossings at edge midpoints. The saddle case is
/// resolved by the mean of the four corners. Crossing points are computed from
/// the lower-index node of each edge so neighbouring cells agree bit for bit.
class MarchingSquares {
 public:
  MarchingSquares(const GridField& u, double t) : u_(u), t_(t) {}

  struct CellPiece {
    /// Superlevel polygons inside the cell (closed, counter-clockwise).
    std::vector<Polyline> polygons;
    /// Contour segments with the superlevel set on their left, as
    /// (edge key in, edge key out, point in, point out).
    struct Seg {
      std::uint64_t k0, k1;
      Point p0, p1;
    };
    std::vector<Seg> segments;
  };

  /// Cell (i, j) spans nodes i..i+1, j..j+1; i and j may be -1 or n-1 (halo).
  CellPiece cell(int i, int j, bool want_polygons) const {
    CellPiece out;
    const std::array<std::array<int, 2>, 4> corner{{{i, j}, {i + 1, j}, {i + 1, j + 1}, {i, j + 1}}};
    std::array<bool, 4> above{};
    std::array<double, 4> val{};
    std::array<bool, 4> valid{};
    int count = 0;
    for (int k = 0; k < 4; ++k) {
      valid[k] = node_valid(corner[k][0], corner[k][1]);
      val[k] = valid[k] ? u_.at(corner[k][0], corner[k][1]) : -std::numeric_limits<double>::infinity();
      above[k] = val[k] > t_;
      count += above[k];
    }
    if (count == 0) return out;
    auto pos = [&](int k) { return node_pos(corner[k][0], corner[k][1]); };
    if (count == 4) {
      if (want_polygons) out.polygons.push_back({pos(0), pos(1), pos(2), pos(3), pos(0)});
      return out;
    }
    // Crossing on edge k (corner k -> corner k+1).
    auto crossing = [&](int k) {
      int a = k, b = (k + 1) % 4;
      return edge_point(corner[a][0], corner[a][1], corner[b][0], corner[b][1]);
    };
    auto key = [&](int k) {
      int a = k, b = (k + 1) % 4;
      return edge_key(corner[a][0], corner[a][1], corner[b][0], corner[b][1]);
    };
    bool saddle = count == 2 && above[0] == above[2];
    bool joined = true;
    if (saddle) {
      bool all_valid = valid[0] && valid[1] && valid[2] && valid[3];
      joined = all_valid && 0.25 * (val[0] + val[1] + val[2] + val[3]) > t_;
    }
    if (!saddle || joined) {
      Polyline poly;
      for (int k = 0; k < 4; ++k) {
        if (above[k]) poly.push_back(pos(k));
        if (above[k] != above[(k + 1) % 4]) poly.push_back(crossing(k));
      }
      // Segments run from an exit crossing (above -> below) to the next entry crossing.
      for (int k = 0; k < 4; ++k) {
        if (!(above[k] && !above[(k + 1) % 4])) continue;
        int m = (k + 1) % 4;
        while (!(!above[m] && above[(m + 1) % 4])) m = (m + 1) % 4;
        out.segments.push_back({key(k), key(m), crossing(k), crossing(m)});
      }
      if (want_polygons) {
        poly.push_back(poly.front());
        out.polygons.push_back(std::move(poly));
      }
    } else {
      // Separated saddle: a triangle around each above corner.
      for (int k = 0; k < 4; ++k) {
        if (!above[k]) continue;
        int prev = (k + 3) % 4;
        out.segments.push_back({key(k), key(prev), crossing(k), crossing(prev)});
        if (want_polygons) out.polygons.push_back({crossing(prev), pos(k), crossing(k), crossing(prev)});
      }
    }
    return out;
  }

  /// Closed contour polylines of {u = t}, each oriented with the superlevel
  /// set on its left (outer boundaries counter-clockwise, holes clockwise).
  std::vector<Polyline> contours() const {
    const int n = u_.n();
    std::unordered_map<std::uint64_t, CellPiece::Seg> by_start;
    std::vector<std::uint64_t> order;
    for (int j = -1; j < n; ++j)
      for (int i = -1; i < n; ++i) {
        auto piece = cell(i, j, false);
        for (auto& s : piece.segments) {
          order.push_back(s.k0);
          by_start.emplace(s.k0, s);
        }
      }
    std::vector<Polyline> out;
    std::unordered_map<std::uint64_t, bool> used;
    for (std::uint64_t start : order) {
      if (used[start]) continue;
      Polyline path;
      std::uint64_t k = start;
      while (!used[k]) {
        used[k] = true;
        auto it = by_start.find(k);
        if (it == by_start.end()) break;
        if (path.empty()) path.push_back(it->second.p0);
        path.push_back(it->second.p1);
        k = it->second.k1;
      }
      if (path.size() >= 2) {
        if (!(path.front() == path.back())) path.push_back(path.front());
        if (path.size() >= 4) out.push_back(std::move(path));
      }
    }
    return out;
  }

 private:
  bool node_valid(int i, int j) const {
    if (i < 0 || j < 0 || i >= u_.n() || j >= u_.n()) return false;
    return std::isfinite(u_.at(i, j));
  }
  Point node_pos(int i, int j) const {
    return {-u_.extent() + i * u_.h(), -u_.extent() + j * u_.h()};
  }
  std::int64_t node_id(int i, int j) const {
    return static_cast<std::int64_t>(j + 1) * (u_.n() + 2) + (i + 1);
  }
  std::uint64_t edge_key(int i0, int j0, int i1, int j1) const {
    std::int64_t a = node_id(i0, j0), b = node_id(i1, j1);
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
  }
  Point edge_point(int i0, int j0, int i1, int j1) const {
    if (node_id(i0, j0) > node_id(i1, j1)) {
      std::swap(i0, i1);
      std::swap(j0, j1);
    }
    Point A = node_pos(i0, j0), B = node_pos(i1, j1);
    bool va = node_valid(i0, j0), vb = node_valid(i1, j1);
    if (!va || !vb) return 0.5 * (A + B);
    double a = u_.at(i0, j0), b = u_.at(i1, j1);
    double s = (t_ - a) / (b - a);
    return A + s * (B - A);
  }

  const GridField& u_;
  double t_;
};

/// Marching-squares contours of {u = t}; empty (with the flag set) when t is
/// outside the open range of the field.
struct ContourSet {
  std::vector<Polyline> paths;
  bool range_warning = false;
};

inline ContourSet superlevel_contours(const GridField& u, double t) {
  ContourSet cs;
  if (!(t > u.min_value() && t < u.max_value())) {
    cs.range_warning = true;
    return cs;
  }
  cs.paths = MarchingSquares(u, t).contours();
  return cs;
}

}  // namespace liouville
