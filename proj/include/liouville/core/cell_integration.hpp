#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "liouville/core/geometry.hpp"
#include "liouville/core/grid_field.hpp"
#include "liouville/core/potential.hpp"
#include "liouville/core/weight.hpp"

namespace liouville {

namespace detail {

/// Sutherland–Hodgman against the half-plane left of the directed line q0 -> q1.
inline std::vector<Point> clip_half_plane(const std::vector<Point>& poly, Point q0, Point q1) {
  std::vector<Point> out;
  if (poly.empty()) return out;
  Point e = q1 - q0;
  auto side = [&](Point p) { return cross(e, p - q0); };
  for (std::size_t i = 0; i < poly.size(); ++i) {
    Point a = poly[i], b = poly[(i + 1) % poly.size()];
    double sa = side(a), sb = side(b);
    if (sa >= 0.0) out.push_back(a);
    if ((sa >= 0.0) != (sb >= 0.0)) out.push_back(a + (sa / (sa - sb)) * (b - a));
  }
  return out;
}

}  // namespace detail

/// A disk replaced by the regular polygon with the same area. Only the few
/// sides facing a cell are used when clipping it.
class CircleClipper {
 public:
  CircleClipper() = default;
  CircleClipper(Point center, double radius, double cell)
      : c_(center), R_(radius) {
    sides_ = std::max<long>(4096, static_cast<long>(16.0 * std::numbers::pi * radius / cell));
    ang_ = 2.0 * std::numbers::pi / static_cast<double>(sides_);
    Rpoly_ = R_ * std::sqrt(ang_ / std::sin(ang_));
  }

  double radius() const { return R_; }
  /// A cell whose far corner is within this radius lies inside the polygon.
  double inner() const { return Rpoly_ * std::cos(0.5 * ang_) * (1.0 - 1e-12); }
  double outer() const { return Rpoly_; }

  /// Clips a ring (no repeated vertex) lying in the box [lo, hi].
  std::vector<Point> clip(std::vector<Point> ring, Point lo, Point hi) const {
    auto vertex = [&](long m) {
      long mm = ((m % sides_) + sides_) % sides_;
      double th = ang_ * static_cast<double>(mm);
      return Point{c_.x + Rpoly_ * std::cos(th), c_.y + Rpoly_ * std::sin(th)};
    };
    long m0 = 0, m1 = sides_ - 1;
    bool holds_center = c_.x >= lo.x && c_.x <= hi.x && c_.y >= lo.y && c_.y <= hi.y;
    if (!holds_center) {
      Point q[4] = {lo, {hi.x, lo.y}, hi, {lo.x, hi.y}};
      double th0 = std::atan2(q[0].y - c_.y, q[0].x - c_.x);
      double dmin = 0.0, dmax = 0.0;
      for (int k = 1; k < 4; ++k) {
        double d = std::remainder(std::atan2(q[k].y - c_.y, q[k].x - c_.x) - th0, 2.0 * std::numbers::pi);
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
      }
      m0 = static_cast<long>(std::floor((th0 + dmin) / ang_)) - 1;
      m1 = static_cast<long>(std::floor((th0 + dmax) / ang_)) + 1;
    }
    for (long m = m0; m <= m1 && ring.size() >= 3; ++m) ring = detail::clip_half_plane(ring, vertex(m), vertex(m + 1));
    return ring;
  }

 private:
  Point c_{};
  double R_ = 0.0;
  double Rpoly_ = 0.0;
  double ang_ = 0.0;
  long sides_ = 4096;
};

/// ∫_ring w and ∫_ring K e^u w inside grid cell (i, j), with u bilinear in
/// the cell. A null or disabled K skips the second integral. A piecewise
/// radial K is split along its jump circles, so the quadrature only ever sees
/// a smooth integrand: K = K_last + Σ_k (K_k − K_{k+1}) 1_{|x| < break_k}.
inline std::pair<double, double> integrate_cell_piece(const GridField& u, int i, int j, const std::vector<Point>& ring,
                                                      const ConicalWeight& w, const PotentialSpec* K,
                                                      bool want_measure = true) {
  double fw = want_measure ? integrate_polygon(std::span<const Point>(ring), w, detail::UnitIntegrand{}) : 0.0;
  double ff = 0.0;
  if (K && !K->disabled) {
    const double h = u.h();
    Point o = u.node(i, j);
    double u00 = u.at(i, j), u10 = u.at(i + 1, j), u11 = u.at(i + 1, j + 1), u01 = u.at(i, j + 1);
    auto eu = [&](Point x) {
      double fx = (x.x - o.x) / h, fy = (x.y - o.y) / h;
      return std::exp((1 - fx) * (1 - fy) * u00 + fx * (1 - fy) * u10 + fx * fy * u11 + (1 - fx) * fy * u01);
    };
    if (K->kind == PotentialKind::piecewise_radial) {
      Point lo = o, hi = u.node(i + 1, j + 1);
      Point cK = (-1.0 / K->scale) * K->origin;
      double near = distance_to_box(cK, Box{lo, hi}), far = 0.0;
      for (Point q : {lo, hi, Point{lo.x, hi.y}, Point{hi.x, lo.y}}) far = std::max(far, distance(q, cK));
      ff = K->levels.back() * integrate_polygon(std::span<const Point>(ring), w, eu);
      for (std::size_t k = 0; k < K->breaks.size(); ++k) {
        double R = K->breaks[k] / K->scale, jump = K->levels[k] - K->levels[k + 1];
        if (jump == 0.0 || R <= near) continue;
        if (R >= far) {
          ff += jump * integrate_polygon(std::span<const Point>(ring), w, eu);
          continue;
        }
        auto inner = CircleClipper(cK, R, h).clip(ring, lo, hi);
        if (inner.size() >= 3) ff += jump * integrate_polygon(std::span<const Point>(inner), w, eu);
      }
    } else {
      ff = integrate_polygon(std::span<const Point>(ring), w, [&](Point x) { return (*K)(x) * eu(x); });
    }
  }
  return {fw, ff};
}

/// Mass ∫_{B_R(center)} K e^u w of a grid field as a function of R, with the
/// cells on the circle clipped exactly against an equal-area polygon.
class GridDiskMass {
 public:
  GridDiskMass(const GridField& u, const ConicalWeight& w, const PotentialSpec& K, Point center)
      : u_(u), w_(w), K_(K), c_(center) {
    validate(w_);
    const int n = u_.n();
    for (int j = 0; j + 1 < n; ++j)
      for (int i = 0; i + 1 < n; ++i) {
        Point lo = u_.node(i, j), hi = u_.node(i + 1, j + 1);
        Cell c{i, j, distance_to_box(c_, Box{lo, hi}), 0.0, 0.0, true};
        for (Point q : {lo, hi, Point{lo.x, hi.y}, Point{hi.x, lo.y}}) c.far = std::max(c.far, distance(q, c_));
        for (double v : {u_.at(i, j), u_.at(i + 1, j), u_.at(i + 1, j + 1), u_.at(i, j + 1)})
          c.valid = c.valid && std::isfinite(v);
        if (c.valid) {
          std::vector<Point> ring = {lo, {hi.x, lo.y}, hi, {lo.x, hi.y}};
          c.mass = integrate_cell_piece(u_, i, j, ring, w_, &K_, false).second;
        }
        cells_.push_back(c);
      }
    std::sort(cells_.begin(), cells_.end(), [](const Cell& a, const Cell& b) { return a.far < b.far; });
    prefix_.assign(cells_.size() + 1, 0.0);
    for (std::size_t k = 0; k < cells_.size(); ++k) prefix_[k + 1] = prefix_[k] + cells_[k].mass;
    // Largest radius whose disk only meets valid cells.
    max_radius_ = std::numeric_limits<double>::infinity();
    for (const auto& c : cells_)
      if (!c.valid) max_radius_ = std::min(max_radius_, c.near);
    // The square grid's own edge.
    Point lo = u_.node(0, 0), hi = u_.node(n - 1, n - 1);
    max_radius_ = std::min({max_radius_, c_.x - lo.x, hi.x - c_.x, c_.y - lo.y, hi.y - c_.y});
  }

  double max_radius() const { return max_radius_; }

  double operator()(double R) const {
    if (R <= 0.0) return 0.0;
    require(R <= max_radius_ * (1.0 + 1e-12), ErrorKind::out_of_domain, "mass disk leaves the field's domain");
    CircleClipper clip(c_, R, u_.h());
    // Cells entirely inside the clip polygon form a prefix (far < inner).
    auto first = std::partition_point(cells_.begin(), cells_.end(),
                                      [&](const Cell& c) { return c.far <= clip.inner(); });
    std::size_t m = static_cast<std::size_t>(first - cells_.begin());
    double acc = prefix_[m];
    for (auto it = first; it != cells_.end() && it->far < clip.outer() + 2.0 * u_.h(); ++it) {
      if (it->near >= clip.outer() || !it->valid) continue;
      Point lo = u_.node(it->i, it->j), hi = u_.node(it->i + 1, it->j + 1);
      auto ring = clip.clip({lo, {hi.x, lo.y}, hi, {lo.x, hi.y}}, lo, hi);
      if (ring.size() >= 3) acc += integrate_cell_piece(u_, it->i, it->j, ring, w_, &K_, false).second;
    }
    return acc;
  }

 private:
  struct Cell {
    int i, j;
    double near, far, mass;
    bool valid;
  };
  const GridField& u_;
  ConicalWeight w_;
  PotentialSpec K_;
  Point c_;
  std::vector<Cell> cells_;
  std::vector<double> prefix_;
  double max_radius_ = 0.0;
};

}  // namespace liouville
