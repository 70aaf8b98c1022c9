#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "liouville/blowup.hpp"
#include "liouville/core/cell_integration.hpp"
#include "liouville/core/geometry.hpp"
#include "liouville/core/grid_field.hpp"
#include "liouville/core/parallel.hpp"
#include "liouville/core/quadrature.hpp"
#include "liouville/core/weight.hpp"
#include "liouville/errors.hpp"
#include "liouville/rearrangement.hpp"
#include "liouville/solvers/dirichlet.hpp"

namespace liouville {

// ---------------------------------------------------------------------------
// Mean-value bound w(x) ≤ mean_{∂B} w − 2 log{1 − λ/(2β) ∫_B |y|^{2α} e^w}₊

struct SuzukiAudit {
  Point center{};
  double radius = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double boundary_mean = 0.0;
  double beta = 0.0;
  /// The other β when the singularity is within a cell of the circle.
  double beta_alt = std::numeric_limits<double>::quiet_NaN();
  bool indeterminate = false;
  double mass = 0.0;
  double bracket = 0.0;
  double margin = 0.0;
  /// Largest relative excess of −Δw over λ|x|^{2α}e^w on the ball's nodes.
  double residual_excess = 0.0;
  bool residual_warning = false;
};

namespace detail {

inline double circle_mean(const GridField& u, Point c, double r) {
  const int m = std::max(2048, static_cast<int>(8.0 * std::numbers::pi * r / u.h()));
  double sum = 0.0;
  for (int k = 0; k < m; ++k) {
    double th = 2.0 * std::numbers::pi * (k + 0.5) / m;
    sum += u.interpolate({c.x + r * std::cos(th), c.y + r * std::sin(th)});
  }
  return sum / m;
}

inline double suzuki_rhs(double mean, double lambda, double beta, double mass, double* bracket) {
  double br = 1.0 - lambda * mass / (2.0 * beta);
  if (bracket) *bracket = br;
  if (br <= 0.0) return std::numeric_limits<double>::infinity();
  return mean - 2.0 * std::log(br);
}

}  // namespace detail

/// The weight's center is the singularity. When it sits within one cell of
/// the circle both β are evaluated and the margin uses the larger one (4π),
/// which gives the smaller right-hand side.
inline SuzukiAudit suzuki_check(const GridField& w, const ConicalWeight& weight, double lambda, Point center,
                                double radius, double residual_tol = 0.05) {
  validate(weight);
  require(lambda > 0.0, ErrorKind::invalid_argument, "lambda must be positive");
  require(radius > 0.0, ErrorKind::invalid_argument, "ball radius must be positive");
  require(w.contains(center) && w.interpolable(center), ErrorKind::out_of_domain, "ball center outside the domain");
  SuzukiAudit a;
  a.center = center;
  a.radius = radius;
  GridDiskMass mass(w, weight, PotentialSpec::constant_value(1.0), center);
  require(radius <= mass.max_radius() * (1.0 + 1e-12), ErrorKind::out_of_domain, "ball leaves the domain");
  a.mass = mass(radius);
  a.lhs = w.interpolate(center);
  a.boundary_mean = detail::circle_mean(w, center, radius);
  const double d = distance(weight.center, center);
  const double b_in = 4.0 * std::numbers::pi * (1.0 + weight.alpha), b_out = 4.0 * std::numbers::pi;
  a.indeterminate = weight.alpha != 0.0 && std::abs(d - radius) < w.h();
  a.beta = d < radius && !a.indeterminate ? b_in : b_out;
  if (a.indeterminate) a.beta_alt = b_in;
  a.rhs = detail::suzuki_rhs(a.boundary_mean, lambda, a.beta, a.mass, &a.bracket);
  a.margin = std::isinf(a.rhs) ? std::numeric_limits<double>::infinity() : a.rhs - a.lhs;

  // −Δw ≤ λ|x|^{2α}e^w on the ball, with the 5-point Laplacian.
  auto W = dual_cell_weights(w, weight.alpha);
  const double ih2 = 1.0 / (w.h() * w.h());
  for (int j = 1; j + 1 < w.n(); ++j)
    for (int i = 1; i + 1 < w.n(); ++i) {
      Point p = w.node(i, j);
      if (distance(p, center) > radius) continue;
      double c = w.at(i, j), s[4] = {w.at(i + 1, j), w.at(i - 1, j), w.at(i, j + 1), w.at(i, j - 1)};
      bool ok = std::isfinite(c);
      for (double v : s) ok = ok && std::isfinite(v);
      if (!ok) continue;
      double lap = (4.0 * c - s[0] - s[1] - s[2] - s[3]) * ih2;
      double rhs = lambda * W[w.index(i, j)] * std::exp(c);
      a.residual_excess = std::max(a.residual_excess, (lap - rhs) / (std::abs(lap) + rhs));
    }
  a.residual_warning = a.residual_excess > residual_tol;
  return a;
}

struct SuzukiBatch {
  std::vector<SuzukiAudit> audits;
  double oscillation = 0.0;
  double worst_margin = std::numeric_limits<double>::infinity();
  bool ok(double rel_tol = 1e-3) const { return worst_margin >= -rel_tol * oscillation; }
};

/// `count` random balls inside the field's valid region, reproducible from `seed`.
inline SuzukiBatch suzuki_random_audit(const GridField& w, const ConicalWeight& weight, double lambda, int count,
                                       unsigned seed, unsigned jobs = 1) {
  SuzukiBatch out;
  out.oscillation = w.max_value() - w.min_value();
  GridDiskMass probe(w, weight, PotentialSpec::constant_value(1.0), {});
  const double R = probe.max_radius(), h = w.h();
  require(R > 8.0 * h, ErrorKind::invalid_argument, "field too coarse for random balls");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<std::pair<Point, double>> balls;
  while (static_cast<int>(balls.size()) < count) {
    double rc = (R - 4.0 * h) * std::sqrt(U(rng)), th = 2.0 * std::numbers::pi * U(rng);
    Point c{rc * std::cos(th), rc * std::sin(th)};
    double room = R - rc - h;
    if (room < 2.0 * h) continue;
    balls.push_back({c, 2.0 * h + (room - 2.0 * h) * U(rng)});
  }
  out.audits.resize(balls.size());
  parallel_for(balls.size(), jobs, [&](std::size_t k) {
    out.audits[k] = suzuki_check(w, weight, lambda, balls[k].first, balls[k].second);
  });
  for (const auto& a : out.audits) out.worst_margin = std::min(out.worst_margin, a.margin);
  return out;
}

// ---------------------------------------------------------------------------
// Weighted isoperimetric inequality on an explicit domain

struct HuberDomainAudit {
  double boundary_weighted_length = 0.0;
  double interior_weighted_mass = 0.0;
  double beta = 0.0;
  double ratio = 0.0;
  /// The singularity lies in Ω or in a bounded hole of it.
  bool singular_inside = false;
  bool indeterminate = false;
  std::size_t rings = 0;
  bool multiply_connected = false;
  bool subharmonic_warning = false;
  bool pass(double tol = 0.02) const { return indeterminate || ratio >= 1.0 - tol; }
};

namespace detail {

/// ∫_segment e^{h/2} |x − c|^α dl, split at the foot of the perpendicular.
inline double segment_length_weighted(Point a, Point b, const std::function<double(Point)>& hfun,
                                      const ConicalWeight& w) {
  double L = distance(a, b);
  if (L == 0.0) return 0.0;
  Point u = (1.0 / L) * (b - a);
  double foot = std::clamp(dot(w.center - a, u), 0.0, L);
  auto f = [&](double s) {
    Point x = a + s * u;
    return std::exp(0.5 * hfun(x)) * std::sqrt(w(x));
  };
  double acc = 0.0;
  if (foot > 0.0) acc += integrate_adaptive(f, 0.0, foot, 1e-12, 24).value;
  if (foot < L) acc += integrate_adaptive(f, foot, L, 1e-12, 24).value;
  return acc;
}

}  // namespace detail

/// Rings may come in either orientation; nesting decides which are holes.
/// `cell` sets the distance below which the singularity counts as sitting on
/// the boundary (indeterminate β). An empty h means h ≡ h_const.
inline HuberDomainAudit huber_check(const std::vector<Polyline>& boundary, const std::function<double(Point)>& h,
                                    double h_const, double alpha, Point singularity = {}, double cell = 0.0) {
  ConicalWeight w(alpha, singularity);
  require(!boundary.empty(), ErrorKind::invalid_domain, "empty boundary");
  for (const auto& r : boundary) {
    require(r.size() >= 4 && is_closed(r), ErrorKind::invalid_domain, "boundary rings must be closed polylines");
    require(std::abs(signed_area(r)) > 0.0, ErrorKind::invalid_domain, "degenerate boundary ring");
  }
  if (has_self_intersection(boundary)) throw Error(ErrorKind::invalid_domain, "boundary is self-intersecting");
  HuberDomainAudit a;
  a.rings = boundary.size();
  a.multiply_connected = boundary.size() > 1;
  double dmin = std::numeric_limits<double>::infinity();
  for (const auto& r : boundary) dmin = std::min(dmin, distance_to_path(singularity, std::span<const Point>(r)));
  if (alpha != 0.0 && dmin == 0.0)
    throw Error(ErrorKind::singular_boundary, "boundary passes through the singularity");
  a.indeterminate = alpha != 0.0 && dmin < cell;

  std::function<double(Point)> hf = h ? h : std::function<double(Point)>([&](Point) { return h_const; });
  // Depth parity: rings inside an odd number of others bound holes.
  for (std::size_t k = 0; k < boundary.size(); ++k) {
    int depth = 0;
    for (std::size_t m = 0; m < boundary.size(); ++m)
      if (m != k && contains(std::span<const Point>(boundary[m]), boundary[k].front())) ++depth;
    std::span<const Point> ring(boundary[k]);
    double part = h ? integrate_polygon(ring, w, [&](Point x) { return std::exp(hf(x)); })
                    : std::exp(h_const) * integrate_polygon(ring, w, detail::UnitIntegrand{});
    a.interior_weighted_mass += depth % 2 == 0 ? part : -part;
    if (h) {
      for (std::size_t i = 0; i + 1 < boundary[k].size(); ++i)
        a.boundary_weighted_length += detail::segment_length_weighted(boundary[k][i], boundary[k][i + 1], hf, w);
    } else {
      a.boundary_weighted_length += std::exp(0.5 * h_const) * weighted_length(ring, w);
    }
    if (contains(ring, singularity)) a.singular_inside = true;
  }
  a.beta = 4.0 * std::numbers::pi * (a.singular_inside ? 1.0 + alpha : 1.0);
  a.ratio = a.boundary_weighted_length * a.boundary_weighted_length / (a.beta * a.interior_weighted_mass);

  if (h) {
    // Subharmonicity of h on a lattice inside Ω.
    Box bb = bounding_box(std::span<const Point>(boundary.front()));
    for (const auto& r : boundary) {
      Box b2 = bounding_box(std::span<const Point>(r));
      bb.lo = {std::min(bb.lo.x, b2.lo.x), std::min(bb.lo.y, b2.lo.y)};
      bb.hi = {std::max(bb.hi.x, b2.hi.x), std::max(bb.hi.y, b2.hi.y)};
    }
    const double step = diameter(bb) / 256.0;
    for (int j = 1; j < 64; ++j)
      for (int i = 1; i < 64; ++i) {
        Point p{bb.lo.x + (bb.hi.x - bb.lo.x) * i / 64.0, bb.lo.y + (bb.hi.y - bb.lo.y) * j / 64.0};
        if (!contains(boundary, p)) continue;
        double c = hf(p);
        double lap = (hf({p.x + step, p.y}) + hf({p.x - step, p.y}) + hf({p.x, p.y + step}) +
                      hf({p.x, p.y - step}) - 4.0 * c) /
                     (step * step);
        if (lap < -1e-6 * (1.0 + std::abs(c)) / (step * step)) a.subharmonic_warning = true;
      }
  }
  return a;
}

inline HuberDomainAudit huber_check(const Polyline& boundary, double h_const, double alpha, Point singularity = {},
                                    double cell = 0.0) {
  return huber_check(std::vector<Polyline>{boundary}, {}, h_const, alpha, singularity, cell);
}

// ---------------------------------------------------------------------------
// sup + √σ inf

struct SupInfReport {
  double sup_A = 0.0;
  double inf_Omega = 0.0;
  Point sup_at{};
  Point inf_at{};
  double sigma = 1.0;
  double combination = 0.0;
  double product_form = 0.0;
};

/// Sup over A (grid max with quadratic refinement) and inf over the masked
/// domain. By default nodes whose 5-point stencil leaves the mask are left out
/// of the inf; `exclude_boundary_layer = false` keeps them.
inline SupInfReport supinf_eval(const GridField& u, const Disk& A, double sigma, bool exclude_boundary_layer = true) {
  require(sigma >= 1.0, ErrorKind::invalid_argument, "sigma must be at least 1");
  SupInfReport r;
  r.sigma = sigma;
  Peak top = find_peak(u, A);
  r.sup_A = top.M;
  r.sup_at = top.x;

  GridField neg(u.extent(), u.n(), u.shape(), u.alpha());
  for (int j = 0; j < u.n(); ++j)
    for (int i = 0; i < u.n(); ++i) {
      if (!u.in_domain(i, j)) continue;
      bool interior = i > 0 && j > 0 && i + 1 < u.n() && j + 1 < u.n() && u.in_domain(i + 1, j) &&
                      u.in_domain(i - 1, j) && u.in_domain(i, j + 1) && u.in_domain(i, j - 1);
      if (exclude_boundary_layer && !interior) continue;
      neg.at(i, j) = -u.at(i, j);
    }
  Peak low = find_peak(neg, {{0.0, 0.0}, std::numeric_limits<double>::infinity()});
  r.inf_Omega = -low.M;
  r.inf_at = low.x;
  const double s = std::sqrt(sigma);
  r.combination = r.sup_A + s * r.inf_Omega;
  r.product_form = std::exp(r.sup_A) * std::pow(std::exp(r.inf_Omega), s);
  if (!std::isfinite(r.product_form) || r.product_form == 0.0) r.product_form = std::exp(r.combination);
  return r;
}

/// (sup_A e^u)(inf e^u)^{√σ}, assembled in log space.
inline double supxinf_eval(const GridField& u, const Disk& A, double sigma, bool exclude_boundary_layer = true) {
  return std::exp(supinf_eval(u, A, sigma, exclude_boundary_layer).combination);
}

// ---------------------------------------------------------------------------
// |{|u − t| < ε}| as ε shrinks

struct LevelBand {
  double eps = 0.0;
  double measure = 0.0;
  double ratio = 0.0;  // measure / ε
};

/// Radius of the largest disk about c that only meets fully valid cells.
inline double valid_disk_radius(const GridField& u, Point c = {}) {
  double R = std::min({c.x - u.node(0, 0).x, u.node(u.n() - 1, 0).x - c.x, c.y - u.node(0, 0).y,
                       u.node(0, u.n() - 1).y - c.y});
  for (int j = 0; j + 1 < u.n(); ++j)
    for (int i = 0; i + 1 < u.n(); ++i)
      if (!(std::isfinite(u.at(i, j)) && std::isfinite(u.at(i + 1, j)) && std::isfinite(u.at(i, j + 1)) &&
            std::isfinite(u.at(i + 1, j + 1))))
        R = std::min(R, distance_to_box(c, Box{u.node(i, j), u.node(i + 1, j + 1)}));
  // Leave room for the clip polygon, which reaches slightly past R.
  return R * (1.0 - 1e-6);
}

/// Unweighted area of the band {|u − t| < ε} inside the valid disk, for each ε.
inline std::vector<LevelBand> level_measure_decay(const GridField& u, double t, const std::vector<double>& eps_ladder,
                                                  std::optional<double> clip_radius = std::nullopt) {
  require(t > u.min_value() && t < u.max_value(), ErrorKind::invalid_argument, "level must be inside the field range");
  double R = clip_radius ? *clip_radius : valid_disk_radius(u);
  SuperlevelIntegrator integ(u, ConicalWeight(0.0), R);
  std::vector<LevelBand> out;
  for (double e : eps_ladder) {
    require(e > 0.0, ErrorKind::invalid_argument, "band widths must be positive");
    LevelBand b;
    b.eps = e;
    b.measure = integ.at(t - e).xi - integ.at(t + e).xi;
    b.ratio = b.measure / e;
    out.push_back(b);
  }
  return out;
}

/// Largest over smallest ratio in a ladder; 1 for perfectly linear decay.
inline double band_ratio_spread(const std::vector<LevelBand>& bands) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& b : bands) {
    lo = std::min(lo, b.ratio);
    hi = std::max(hi, b.ratio);
  }
  return hi / lo;
}

// ---------------------------------------------------------------------------
// CSV

inline void write_suzuki_csv(const std::vector<SuzukiAudit>& audits, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error(ErrorKind::io, "cannot write " + path);
  std::fprintf(f, "cx,cy,radius,lhs,rhs,beta,mass,margin,indeterminate,residual_warning\n");
  for (const auto& a : audits)
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d\n", a.center.x, a.center.y, a.radius, a.lhs,
                 a.rhs, a.beta, a.mass, a.margin, a.indeterminate ? 1 : 0, a.residual_warning ? 1 : 0);
  if (std::fclose(f) != 0) throw Error(ErrorKind::io, "failed to close " + path);
}

inline void write_level_bands_csv(const std::vector<LevelBand>& bands, double t, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error(ErrorKind::io, "cannot write " + path);
  std::fprintf(f, "t,eps,measure,ratio\n");
  for (const auto& b : bands) std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", t, b.eps, b.measure, b.ratio);
  if (std::fclose(f) != 0) throw Error(ErrorKind::io, "failed to close " + path);
}

}  // namespace liouville
