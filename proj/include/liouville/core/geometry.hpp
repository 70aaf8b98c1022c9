#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

namespace liouville {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend constexpr Point operator*(Point a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Point a, Point b) = default;
};

constexpr double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

/// Closed paths repeat their first vertex at the end.
using Polyline = std::vector<Point>;

struct Disk {
  Point center;
  double radius = 0.0;
};

/// Axis-aligned rectangle [lo.x, hi.x] x [lo.y, hi.y].
struct Box {
  Point lo;
  Point hi;
};

inline bool is_closed(std::span<const Point> path) {
  return path.size() >= 2 && path.front() == path.back();
}

/// Vertices of a ring without the repeated closing vertex.
inline std::span<const Point> ring_vertices(std::span<const Point> ring) {
  if (is_closed(ring)) return ring.first(ring.size() - 1);
  return ring;
}

inline double signed_area(std::span<const Point> ring) {
  auto v = ring_vertices(ring);
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * acc;
}

inline double path_length(std::span<const Point> path) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) acc += distance(path[i], path[i + 1]);
  return acc;
}

inline Box bounding_box(std::span<const Point> pts) {
  Box b{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
        {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
  for (const auto& p : pts) {
    b.lo.x = std::min(b.lo.x, p.x);
    b.lo.y = std::min(b.lo.y, p.y);
    b.hi.x = std::max(b.hi.x, p.x);
    b.hi.y = std::max(b.hi.y, p.y);
  }
  return b;
}

inline double diameter(const Box& b) { return distance(b.lo, b.hi); }

inline double distance_to_box(Point p, const Box& b) {
  double dx = std::max({b.lo.x - p.x, 0.0, p.x - b.hi.x});
  double dy = std::max({b.lo.y - p.y, 0.0, p.y - b.hi.y});
  return std::hypot(dx, dy);
}

inline double distance_to_segment(Point p, Point a, Point b) {
  Point ab = b - a;
  double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

inline double distance_to_path(Point p, std::span<const Point> path) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < path.size(); ++i) d = std::min(d, distance_to_segment(p, path[i], path[i + 1]));
  if (path.size() == 1) d = distance(p, path[0]);
  return d;
}

/// Crossing-number test; points on the boundary may land on either side.
inline bool contains(std::span<const Point> ring, Point p) {
  auto v = ring_vertices(ring);
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      double x = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

/// Even-odd membership over a set of rings (outer boundaries and holes).
inline bool contains(const std::vector<Polyline>& rings, Point p) {
  bool inside = false;
  for (const auto& r : rings)
    if (contains(r, p)) inside = !inside;
  return inside;
}

namespace detail {

inline int orientation(Point a, Point b, Point c) {
  double v = cross(b - a, c - a);
  double scale = std::max({std::abs(b.x - a.x), std::abs(b.y - a.y), std::abs(c.x - a.x), std::abs(c.y - a.y)});
  double eps = 1e-14 * scale * scale;
  if (v > eps) return 1;
  if (v < -eps) return -1;
  return 0;
}

inline bool on_segment(Point a, Point b, Point p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

}  // namespace detail

inline bool segments_intersect(Point a, Point b, Point c, Point d) {
  int o1 = detail::orientation(a, b, c);
  int o2 = detail::orientation(a, b, d);
  int o3 = detail::orientation(c, d, a);
  int o4 = detail::orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && detail::on_segment(a, b, c)) return true;
  if (o2 == 0 && detail::on_segment(a, b, d)) return true;
  if (o3 == 0 && detail::on_segment(c, d, a)) return true;
  if (o4 == 0 && detail::on_segment(c, d, b)) return true;
  return false;
}

/// Whether any two non-adjacent segments of the given paths touch. Segments are
/// bucketed on a uniform hash grid so long contours stay near linear cost.
inline bool has_self_intersection(const std::vector<Polyline>& paths) {
  struct Seg {
    Point a, b;
    std::size_t path, index, count;
    bool closed;
  };
  std::vector<Seg> segs;
  double total = 0.0;
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const auto& path = paths[p];
    if (path.size() < 2) continue;
    std::size_t count = path.size() - 1;
    for (std::size_t i = 0; i < count; ++i) {
      segs.push_back({path[i], path[i + 1], p, i, count, is_closed(path)});
      total += distance(path[i], path[i + 1]);
    }
  }
  if (segs.size() < 2) return false;
  double cell = std::max(2.0 * total / static_cast<double>(segs.size()), 1e-300);
  auto key = [](std::int64_t i, std::int64_t j) { return (i << 32) ^ (j & 0xffffffff); };
  std::unordered_map<std::int64_t, std::vector<std::size_t>> buckets;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    Box bb = bounding_box(std::vector<Point>{segs[s].a, segs[s].b});
    auto i0 = static_cast<std::int64_t>(std::floor(bb.lo.x / cell));
    auto i1 = static_cast<std::int64_t>(std::floor(bb.hi.x / cell));
    auto j0 = static_cast<std::int64_t>(std::floor(bb.lo.y / cell));
    auto j1 = static_cast<std::int64_t>(std::floor(bb.hi.y / cell));
    for (auto i = i0; i <= i1; ++i)
      for (auto j = j0; j <= j1; ++j) buckets[key(i, j)].push_back(s);
  }
  auto adjacent = [](const Seg& u, const Seg& v) {
    if (u.path != v.path) return false;
    std::size_t d = u.index > v.index ? u.index - v.index : v.index - u.index;
    if (d == 1) return true;
    return u.closed && d == u.count - 1;
  };
  for (const auto& [k, ids] : buckets) {
    for (std::size_t x = 0; x < ids.size(); ++x) {
      for (std::size_t y = x + 1; y < ids.size(); ++y) {
        const Seg& u = segs[ids[x]];
        const Seg& v = segs[ids[y]];
        if (adjacent(u, v)) {
          // Adjacent segments share one vertex; flag only folding back onto each other.
          if (detail::orientation(u.a, u.b, v.a) == 0 && detail::orientation(u.a, u.b, v.b) == 0) {
            Point du = u.b - u.a, dv = v.b - v.a;
            if (dot(du, dv) < 0.0 && u.count > 2) return true;
          }
          continue;
        }
        if (segments_intersect(u.a, u.b, v.a, v.b)) return true;
      }
    }
  }
  return false;
}

inline bool is_simple(const Polyline& path) { return !has_self_intersection({path}); }

}  // namespace liouville
