#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "liouville/core/geometry.hpp"
#include "liouville/core/quadrature.hpp"
#include "liouville/errors.hpp"

namespace liouville {

/// factor * |x - center|^{2 alpha}. The factor carries the Jacobian of a
/// blow-up rescaling; it is 1 for the plain weight.
struct ConicalWeight {
  double alpha = 0.0;
  Point center{};
  double factor = 1.0;

  ConicalWeight() = default;
  ConicalWeight(double alpha_, Point center_ = {}, double factor_ = 1.0)
      : alpha(alpha_), center(center_), factor(factor_) {
    require(alpha > -1.0 && alpha <= 0.0, ErrorKind::invalid_weight, "weight exponent alpha must lie in (-1, 0]");
    require(factor > 0.0 && std::isfinite(factor), ErrorKind::invalid_weight, "weight factor must be positive");
  }

  double operator()(Point x) const {
    if (alpha == 0.0) return factor;
    double r = distance(x, center);
    if (r == 0.0) return std::numeric_limits<double>::infinity();
    return factor * std::pow(r, 2.0 * alpha);
  }

  /// Exponent k = 2 + 2 alpha of the radial antiderivative.
  double k() const { return 2.0 + 2.0 * alpha; }

  /// ∫_{r0 <= |x-c| <= r1} weight dx.
  double annulus(double r0, double r1) const {
    return factor * 2.0 * std::numbers::pi * (std::pow(r1, k()) - std::pow(r0, k())) / k();
  }

  /// Inverse of the centered disk measure: the radius whose disk has measure m.
  double radius_of_measure(double m) const {
    return std::pow(m * k() / (2.0 * std::numbers::pi * factor), 1.0 / k());
  }
};

inline void validate(const ConicalWeight& w) {
  require(w.alpha > -1.0 && w.alpha <= 0.0, ErrorKind::invalid_weight, "weight exponent alpha must lie in (-1, 0]");
}

namespace detail {

/// Radial Gauss–Jacobi rule for ∫_0^1 s^{1+2alpha} g(s) ds, cached per thread.
inline const GaussRule& radial_rule(double alpha, int m) {
  thread_local double cached_alpha = std::numeric_limits<double>::quiet_NaN();
  thread_local int cached_m = 0;
  thread_local GaussRule rule;
  if (cached_alpha != alpha || cached_m != m) {
    rule = gauss_jacobi_unit(1.0 + 2.0 * alpha, m);
    cached_alpha = alpha;
    cached_m = m;
  }
  return rule;
}

struct UnitIntegrand {
  double operator()(Point) const { return 1.0; }
};

template <class F>
inline constexpr bool is_unit_v = std::is_same_v<std::decay_t<F>, UnitIntegrand>;

/// Signed ∫ over the triangle (c, a, b) of f * |x-c|^{2alpha}, in polar
/// coordinates about c: exact radial antiderivative for unit f, Gauss–Jacobi
/// in r otherwise, adaptive in the angle.
template <class F>
double polar_triangle(const ConicalWeight& w, Point a, Point b, F& f, double rel_tol) {
  Point pa = a - w.center, pb = b - w.center;
  double cr = cross(pa, pb);
  Point e = pb - pa;
  double scale = std::max(dot(pa, pa), dot(pb, pb));
  if (std::abs(cr) <= 1e-15 * scale) return 0.0;
  double th0 = std::atan2(pa.y, pa.x);
  double dth = std::atan2(cr, dot(pa, pb));
  const double k = w.k();
  // Distance from c to the edge line along direction theta.
  auto rho = [&](double th) {
    Point dir{std::cos(th), std::sin(th)};
    return cross(pa, e) / cross(dir, e);
  };
  auto g = [&](double s) {
    double th = th0 + s * dth;
    double R = rho(th);
    if constexpr (is_unit_v<F>) {
      return std::pow(R, k) / k;
    } else {
      const GaussRule& rr = radial_rule(w.alpha, 8);
      Point dir{std::cos(th), std::sin(th)};
      double acc = 0.0;
      for (std::size_t i = 0; i < rr.x.size(); ++i) acc += rr.w[i] * f(w.center + (R * rr.x[i]) * dir);
      return acc * std::pow(R, k);
    }
  };
  return dth * integrate_adaptive(g, 0.0, 1.0, rel_tol, 14).value;
}

/// Collapsed Gauss–Legendre rule on the triangle (a, b, c); unsigned.
template <class G>
double collapsed_triangle(Point a, Point b, Point c, G& g, int q) {
  const GaussRule& gl = gauss_legendre_unit(q);
  double area2 = std::abs(cross(b - a, c - a));
  double acc = 0.0;
  for (int i = 0; i < q; ++i) {
    double u = gl.x[i];
    for (int j = 0; j < q; ++j) {
      double v = gl.x[j] * (1.0 - u);
      Point x = a + u * (b - a) + v * (c - a);
      acc += gl.w[i] * gl.w[j] * (1.0 - u) * g(x);
    }
  }
  return acc * area2;
}

}  // namespace detail

/// Signed ∫_ring f(x) w(x) dx, positive for counter-clockwise rings. Polygons
/// near the weight center use polar edge triangles about the center; distant
/// ones use a fan of collapsed Gauss rules, where the weight is smooth.
template <class F>
double integrate_polygon_signed(std::span<const Point> ring, const ConicalWeight& w, F&& f, double rel_tol = 1e-10,
                                int far_order = 6) {
  auto v = ring_vertices(ring);
  if (v.size() < 3) return 0.0;
  Box bb = bounding_box(v);
  double diam = diameter(bb);
  double dist = distance_to_box(w.center, bb);
  if (w.alpha == 0.0 && detail::is_unit_v<F>) return w.factor * signed_area(ring);
  if (w.alpha == 0.0 || dist >= 4.0 * diam) {
    auto g = [&](Point x) { return f(x) * w(x); };
    double acc = 0.0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      double orient = cross(v[i] - v[0], v[i + 1] - v[0]) >= 0.0 ? 1.0 : -1.0;
      acc += orient * detail::collapsed_triangle(v[0], v[i], v[i + 1], g, far_order);
    }
    return acc;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    Point a = v[i], b = v[(i + 1) % v.size()];
    acc += detail::polar_triangle(w, a, b, f, rel_tol);
  }
  return w.factor * acc;
}

/// ∫_ring f(x) w(x) dx over a simple polygon of either orientation.
template <class F>
double integrate_polygon(std::span<const Point> ring, const ConicalWeight& w, F&& f, double rel_tol = 1e-10,
                         int far_order = 6) {
  double sign = signed_area(ring) < 0.0 ? -1.0 : 1.0;
  return sign * integrate_polygon_signed(ring, w, std::forward<F>(f), rel_tol, far_order);
}

inline double weighted_area(std::span<const Point> ring, const ConicalWeight& w) {
  validate(w);
  return integrate_polygon(ring, w, detail::UnitIntegrand{});
}

inline Polyline box_ring(const Box& b) {
  return {b.lo, {b.hi.x, b.lo.y}, b.hi, {b.lo.x, b.hi.y}, b.lo};
}

inline double weighted_area(const Box& box, const ConicalWeight& w) {
  validate(w);
  require(box.hi.x >= box.lo.x && box.hi.y >= box.lo.y, ErrorKind::invalid_argument, "box corners out of order");
  Polyline r = box_ring(box);
  return integrate_polygon(r, w, detail::UnitIntegrand{});
}

/// Disk measure. Centered disks are exact; otherwise polar about the center,
/// with a tangent-angle substitution when the center lies outside the disk.
inline double weighted_area(const Disk& disk, const ConicalWeight& w) {
  validate(w);
  require(disk.radius >= 0.0 && std::isfinite(disk.radius), ErrorKind::invalid_argument, "disk radius must be finite");
  const double R = disk.radius;
  const double k = w.k();
  Point p = w.center - disk.center;
  double d = norm(p);
  if (R == 0.0) return 0.0;
  if (d <= 1e-14 * R) return w.factor * std::numbers::pi * std::pow(R, k) / (1.0 + w.alpha);
  if (w.alpha == 0.0) return w.factor * std::numbers::pi * R * R;
  if (std::abs(d - R) <= 1e-12 * R) {
    // Center on the circle: rho = 2R cos(phi), an algebraic endpoint singularity.
    auto g = [&](double phi) { return std::pow(2.0 * R * std::cos(phi), k) / k; };
    return w.factor * 2.0 * integrate_endpoint_singular(g, 0.0, 0.5 * std::numbers::pi, 1e-13).value;
  }
  if (d <= R) {
    // Ray from c hits the circle once: rho = -p.e + sqrt((p.e)^2 - d^2 + R^2).
    auto g = [&](double th) {
      double pe = d * std::cos(th);
      double rho = std::max(0.0, -pe + std::sqrt(std::max(0.0, pe * pe - d * d + R * R)));
      return std::pow(rho, k) / k;
    };
    return w.factor * 2.0 * integrate_adaptive(g, 0.0, std::numbers::pi, 1e-12).value;
  }
  // Exterior center: angle th from the direction c -> disk center with
  // sin th = (R/d) sin psi; the chord is rho_pm = d cos th +- R cos psi.
  const double q = R / d;
  auto g = [&](double psi) {
    double s = q * std::sin(psi);
    double cth = std::sqrt(std::max(0.0, 1.0 - s * s));
    double half = R * std::cos(psi);
    double rp = d * cth + half, rm = std::max(0.0, d * cth - half);
    double dth = q * std::cos(psi) / cth;
    return (std::pow(rp, k) - std::pow(rm, k)) / k * dth;
  };
  return w.factor * 2.0 * integrate_adaptive(g, 0.0, 0.5 * std::numbers::pi, 1e-12).value;
}

/// ∫_path |x-c|^alpha dl, i.e. the length element of the square-root weight.
inline double weighted_length(std::span<const Point> path, const ConicalWeight& w) {
  validate(w);
  require(path.size() >= 2, ErrorKind::invalid_argument, "path needs at least two vertices");
  const double sf = std::sqrt(w.factor);
  if (w.alpha == 0.0) return sf * path_length(path);
  for (const auto& p : path)
    if (p == w.center)
      throw Error(ErrorKind::singular_boundary, "path vertex coincides with the weight center");
  const double al = w.alpha;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    Point a = path[i], b = path[i + 1];
    double L = distance(a, b);
    if (L == 0.0) continue;
    Point u = (1.0 / L) * (b - a);
    // Split at the foot of the perpendicular from the center.
    double tf = std::clamp(dot(w.center - a, u), 0.0, L);
    double h = std::abs(cross(u, w.center - a));
    // ∫_{s0}^{s1} (h^2+s^2)^{alpha/2} ds: plain rule on [s0, h], where the
    // integrand is analytic, and in log s beyond, where it behaves like s^alpha.
    auto piece = [&](double len, double s0) {
      if (len <= 0.0) return 0.0;
      double s1 = s0 + len;
      if (h == 0.0 && s0 == 0.0) return std::pow(s1, 1.0 + al) / (1.0 + al);
      auto f = [&](double s) { return std::pow(h * h + s * s, 0.5 * al); };
      auto flog = [&](double x) {
        double s = std::exp(x);
        return std::pow(h * h + s * s, 0.5 * al) * s;
      };
      double m = std::clamp(h, s0, s1);
      double acc = integrate_adaptive(f, s0, m, 1e-12, 20).value;
      if (m < s1) acc += integrate_adaptive(flog, std::log(m), std::log(s1), 1e-12, 20).value;
      return acc;
    };
    double foot = dot(w.center - a, u);
    // Left piece runs from the foot point back to a, right piece from the foot to b.
    total += piece(tf, std::max(0.0, foot - tf)) + piece(L - tf, std::max(0.0, tf - foot));
  }
  return sf * total;
}

/// Closed regular polygon approximating a circle, first vertex repeated.
inline Polyline circle_polyline(Point c, double R, std::size_t segments) {
  Polyline p(segments + 1);
  for (std::size_t i = 0; i < segments; ++i) {
    double th = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(segments);
    p[i] = {c.x + R * std::cos(th), c.y + R * std::sin(th)};
  }
  p[segments] = p[0];
  return p;
}

}  // namespace liouville
