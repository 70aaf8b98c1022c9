#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "liouville/core/cell_integration.hpp"
#include "liouville/core/geometry.hpp"
#include "liouville/core/grid_field.hpp"
#include "liouville/core/parallel.hpp"
#include "liouville/core/potential.hpp"
#include "liouville/core/weight.hpp"
#include "liouville/errors.hpp"
#include "liouville/rearrangement/contours.hpp"

namespace liouville {

/// Integrates the weight (and optionally K e^u) over {u > t} ∩ B_clip cell by
/// cell. Cells entirely above the level contribute a precomputed full-cell
/// value; crossing cells use the marching-squares polygons. The clip circle is
/// replaced by an equal-area regular polygon with many sides.
class SuperlevelIntegrator {
 public:
  struct Value {
    double xi = 0.0;
    double F = 0.0;
  };

  SuperlevelIntegrator(const GridField& u, const ConicalWeight& w, double clip_radius,
                       const PotentialSpec* K = nullptr, Point clip_center = {})
      : u_(u), w_(w), K_(K), c_(clip_center), R_(clip_radius) {
    validate(w_);
    require(clip_radius > 0.0, ErrorKind::invalid_argument, "clip radius must be positive");
    const int n = u_.n();
    clip_ = CircleClipper(c_, R_, u_.h());
    for (int j = 0; j + 1 < n; ++j)
      for (int i = 0; i + 1 < n; ++i) {
        Point lo = u_.node(i, j), hi = u_.node(i + 1, j + 1);
        Box box{lo, hi};
        if (distance_to_box(c_, box) >= clip_.outer()) continue;
        double far = 0.0;
        for (Point q : {lo, hi, Point{lo.x, hi.y}, Point{hi.x, lo.y}}) far = std::max(far, distance(q, c_));
        double v[4] = {u_.at(i, j), u_.at(i + 1, j), u_.at(i + 1, j + 1), u_.at(i, j + 1)};
        for (double x : v)
          require(std::isfinite(x), ErrorKind::out_of_domain, "clip disk reaches outside the field's domain");
        Cell c;
        c.i = i;
        c.j = j;
        c.vmin = *std::min_element(v, v + 4);
        c.vmax = *std::max_element(v, v + 4);
        c.straddle = far > clip_.inner();
        std::vector<Point> ring = {lo, {hi.x, lo.y}, hi, {lo.x, hi.y}};
        if (c.straddle) ring = clip_.clip(ring, lo, hi);
        if (ring.size() < 3) continue;
        auto [fw, ff] = integrate_cell_piece(u_, i, j, ring, w_, K_);
        c.full_w = fw;
        c.full_f = ff;
        cells_.push_back(c);
      }
    std::sort(cells_.begin(), cells_.end(), [](const Cell& a, const Cell& b) { return a.vmin > b.vmin; });
    prefix_w_.assign(cells_.size() + 1, 0.0);
    prefix_f_.assign(cells_.size() + 1, 0.0);
    for (std::size_t k = 0; k < cells_.size(); ++k) {
      prefix_w_[k + 1] = prefix_w_[k] + cells_[k].full_w;
      prefix_f_[k + 1] = prefix_f_[k] + cells_[k].full_f;
    }
  }

  double total_measure() const { return prefix_w_.back(); }
  double total_mass() const { return prefix_f_.back(); }

  Value at(double t) const {
    // Cells with vmin > t form a prefix in the sorted order.
    auto first_low = std::partition_point(cells_.begin(), cells_.end(), [&](const Cell& c) { return c.vmin > t; });
    std::size_t m = static_cast<std::size_t>(first_low - cells_.begin());
    Value v{prefix_w_[m], prefix_f_[m]};
    MarchingSquares ms(u_, t);
    for (auto it = first_low; it != cells_.end(); ++it) {
      if (!(it->vmax > t)) continue;
      auto piece = ms.cell(it->i, it->j, true);
      for (auto& poly : piece.polygons) {
        std::vector<Point> ring(poly.begin(), poly.end() - 1);
        if (it->straddle) ring = clip_.clip(ring, u_.node(it->i, it->j), u_.node(it->i + 1, it->j + 1));
        if (ring.size() < 3) continue;
        auto [fw, ff] = integrate_cell_piece(u_, it->i, it->j, ring, w_, K_);
        v.xi += fw;
        v.F += ff;
      }
    }
    return v;
  }

 private:
  struct Cell {
    int i = 0, j = 0;
    double vmin = 0.0, vmax = 0.0;
    bool straddle = false;
    double full_w = 0.0, full_f = 0.0;
  };

  const GridField& u_;
  ConicalWeight w_;
  const PotentialSpec* K_;
  Point c_;
  double R_;
  CircleClipper clip_;
  std::vector<Cell> cells_;
  std::vector<double> prefix_w_, prefix_f_;
};

struct DistributionData {
  std::vector<double> levels;  // increasing
  std::vector<double> xi;
  ConicalWeight weight;
  double clip_radius = 0.0;
};

/// Largest field value on the clip circle (the level above which superlevel
/// sets stay inside the clip disk).
inline double clip_circle_max(const GridField& u, double clip_radius, Point clip_center = {}) {
  const int m = std::max(2048, static_cast<int>(8.0 * std::numbers::pi * clip_radius / u.h()));
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < m; ++k) {
    double th = 2.0 * std::numbers::pi * k / m;
    best = std::max(best, u.interpolate({clip_center.x + clip_radius * std::cos(th),
                                         clip_center.y + clip_radius * std::sin(th)}));
  }
  return best;
}

/// Levels spaced by equal weighted-measure increments between `lower` and the
/// field maximum, from node samples in the clip disk.
inline std::vector<double> quantile_levels(const GridField& u, const ConicalWeight& w, double clip_radius, int m,
                                           double lower, Point clip_center = {}) {
  require(m >= 2, ErrorKind::invalid_argument, "level ladder needs at least two levels");
  std::vector<std::pair<double, double>> samples;
  const double h = u.h();
  for (int j = 0; j < u.n(); ++j)
    for (int i = 0; i < u.n(); ++i) {
      Point p = u.node(i, j);
      double v = u.at(i, j);
      if (!std::isfinite(v) || distance(p, clip_center) > clip_radius || !(v > lower)) continue;
      double r = std::max(distance(p, w.center), 0.5 * h);
      samples.push_back({v, w.factor * std::pow(r, 2.0 * w.alpha)});
    }
  require(samples.size() >= 2, ErrorKind::invalid_argument, "too few samples above the lower level");
  std::sort(samples.begin(), samples.end(), [](auto& a, auto& b) { return a.first > b.first; });
  double total = 0.0;
  for (auto& s : samples) total += s.second;
  std::vector<double> levels;
  double cum = 0.0;
  std::size_t k = 0;
  for (int q = 1; q <= m; ++q) {
    double target = total * q / (m + 1.0);
    while (k + 1 < samples.size() && cum + samples[k].second < target) cum += samples[k++].second;
    levels.push_back(samples[k].first);
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  double top = samples.front().first;
  levels.erase(std::remove_if(levels.begin(), levels.end(), [&](double t) { return !(t > lower && t < top); }),
               levels.end());
  return levels;
}

inline DistributionData distribution_function(const GridField& u, const ConicalWeight& w,
                                              std::vector<double> levels, double clip_radius, unsigned jobs = 1) {
  std::sort(levels.begin(), levels.end());
  DistributionData d;
  d.weight = w;
  d.clip_radius = clip_radius;
  d.levels = levels;
  d.xi.resize(levels.size());
  SuperlevelIntegrator integ(u, w, clip_radius);
  parallel_for(levels.size(), jobs, [&](std::size_t i) { d.xi[i] = integ.at(levels[i]).xi; });
  return d;
}

/// Weighted symmetric decreasing rearrangement sampled at the level ladder.
/// Entries run in increasing s (so decreasing level). K_hat is NaN where the
/// centered difference is not available.
struct RearrangedProfile {
  double alpha = 0.0;
  std::vector<double> t;
  std::vector<double> xi;
  std::vector<double> s;
  std::vector<double> v_star;
  std::vector<double> F;
  std::vector<double> K_hat;
  std::vector<double> huber_ratio;
  std::vector<double> beta;
  double s0 = std::numeric_limits<double>::quiet_NaN();
  double s1 = std::numeric_limits<double>::quiet_NaN();

  std::size_t size() const { return s.size(); }

  /// v*(r) = sup{t : ξ(t) > π r²}, by monotone linear interpolation.
  double v_star_at(double r) const { return interp(s, v_star, r); }
  double F_at(double r) const { return interp(s, F, r); }

  /// First radius where F reaches `value` (NaN if it never does).
  double radius_where_F(double value) const {
    for (std::size_t i = 1; i < F.size(); ++i)
      if (F[i - 1] < value && F[i] >= value) {
        double f = (value - F[i - 1]) / (F[i] - F[i - 1]);
        return s[i - 1] + f * (s[i] - s[i - 1]);
      }
    return std::numeric_limits<double>::quiet_NaN();
  }

 private:
  static double interp(const std::vector<double>& x, const std::vector<double>& y, double r) {
    require(!x.empty(), ErrorKind::invalid_argument, "empty profile");
    if (r <= x.front()) return y.front();
    if (r >= x.back()) return y.back();
    auto it = std::upper_bound(x.begin(), x.end(), r);
    std::size_t i = static_cast<std::size_t>(it - x.begin());
    double f = (r - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + f * (y[i] - y[i - 1]);
  }
};

namespace detail {

/// Three-point derivative at x[i] on a non-uniform grid (second order);
/// NaN when a neighbouring spacing vanishes.
inline double centered_derivative(const std::vector<double>& x, const std::vector<double>& y, std::size_t i) {
  double h1 = x[i] - x[i - 1], h2 = x[i + 1] - x[i];
  if (!(h1 > 0.0 && h2 > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return (h1 * h1 * y[i + 1] - h2 * h2 * y[i - 1] - (h1 * h1 - h2 * h2) * y[i]) / (h1 * h2 * (h1 + h2));
}

/// Fills s, K_hat and s0 from t, xi and F.
inline void finish_profile(RearrangedProfile& p) {
  const std::size_t n = p.xi.size();
  p.s.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.s[i] = std::sqrt(std::max(0.0, p.xi[i]) / std::numbers::pi);
  p.v_star = p.t;
  // K̂ = F'(s)/(2π s e^{v*}) = (dF/dξ) e^{-v*}.
  p.K_hat.assign(n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 1; i + 1 < n; ++i) {
    p.K_hat[i] = centered_derivative(p.xi, p.F, i) * std::exp(-p.v_star[i]);
  }
  p.huber_ratio.assign(n, std::numeric_limits<double>::quiet_NaN());
  p.beta.assign(n, std::numeric_limits<double>::quiet_NaN());
  p.s0 = p.radius_where_F(4.0 * std::numbers::pi);
}

}  // namespace detail

/// Rearrangement of a grid field. `levels` may be empty, in which case
/// `ladder` levels at equal ξ increments above the clip-circle maximum are used.
inline RearrangedProfile rearrange(const GridField& u, const ConicalWeight& w, const PotentialSpec& K,
                                   std::vector<double> levels, double clip_radius, int ladder = 512,
                                   unsigned jobs = 1) {
  SuperlevelIntegrator integ(u, w, clip_radius, &K);
  double top = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < u.n(); ++j)
    for (int i = 0; i < u.n(); ++i)
      if (std::isfinite(u.at(i, j)) && distance(u.node(i, j), {}) <= clip_radius) top = std::max(top, u.at(i, j));
  if (levels.empty()) {
    // Pilot ladder from node quantiles, then re-spaced to equal ξ steps using
    // the pilot's own distribution function.
    double t0 = clip_circle_max(u, clip_radius);
    auto pilot = quantile_levels(u, w, clip_radius, std::max(16, ladder / 4), t0);
    pilot.insert(pilot.begin(), t0);
    std::vector<double> pxi(pilot.size());
    parallel_for(pilot.size(), jobs, [&](std::size_t i) { pxi[i] = integ.at(pilot[i]).xi; });
    pilot.push_back(top);
    pxi.push_back(0.0);
    for (std::size_t i = pxi.size() - 1; i-- > 0;) pxi[i] = std::max(pxi[i], pxi[i + 1]);
    levels.clear();
    const double full = pxi.front();
    for (int q = 1; q <= ladder; ++q) {
      double target = full * q / (ladder + 1.0);
      std::size_t k = 0;
      while (k + 1 < pxi.size() && pxi[k + 1] >= target) ++k;
      double f = pxi[k] > pxi[k + 1] ? (pxi[k] - target) / (pxi[k] - pxi[k + 1]) : 0.5;
      levels.push_back(pilot[k] + f * (pilot[k + 1] - pilot[k]));
    }
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  require(!levels.empty() && levels.back() < top, ErrorKind::invalid_argument,
          "levels must lie below the field maximum in the clip disk");

  std::vector<SuperlevelIntegrator::Value> vals(levels.size());
  parallel_for(levels.size(), jobs, [&](std::size_t i) { vals[i] = integ.at(levels[i]); });

  RearrangedProfile p;
  p.alpha = w.alpha;
  // The maximum itself: empty superlevel set.
  p.t.push_back(top);
  p.xi.push_back(0.0);
  p.F.push_back(0.0);
  const double scale = integ.total_measure();
  for (std::size_t k = levels.size(); k-- > 0;) {
    double prev = p.xi.back();
    if (vals[k].xi < prev - 1e-6 * scale)
      throw Error(ErrorKind::inconsistent_distribution,
                  "sampled distribution function increases with the level near t=" + std::to_string(levels[k]));
    p.t.push_back(levels[k]);
    p.xi.push_back(std::max(prev, vals[k].xi));
    p.F.push_back(std::max(p.F.back(), vals[k].F));
  }
  detail::finish_profile(p);
  // s1: the superlevel set contains the singularity once t < u(c).
  if (u.contains(w.center) && u.interpolable(w.center)) {
    double uc = u.interpolate(w.center);
    p.s1 = uc >= top ? 0.0 : std::sqrt(integ.at(uc).xi / std::numbers::pi);
  }
  return p;
}

/// Rearrangement of a radial decreasing profile about the weight center:
/// ξ = π r^{2+2α}/(1+α) and F(r) = 2π ∫_0^r ρ^{1+2α} K e^u dρ. Radii must be
/// increasing and positive; `breaks` are radii where K jumps.
inline RearrangedProfile rearrange_radial(const std::function<double(double)>& u,
                                          const std::function<double(double)>& K, double alpha,
                                          std::vector<double> radii, std::vector<double> breaks = {}) {
  ConicalWeight w(alpha);
  require(!radii.empty() && radii.front() > 0.0, ErrorKind::invalid_argument, "radii must be positive");
  for (std::size_t i = 1; i < radii.size(); ++i)
    require(radii[i] > radii[i - 1], ErrorKind::invalid_argument, "radii must increase");
  const double k = w.k();
  auto g = [&](double r) { return std::pow(r, 1.0 + 2.0 * alpha) * K(r) * std::exp(u(r)); };
  RearrangedProfile p;
  p.alpha = alpha;
  p.t.push_back(u(0.0));
  p.xi.push_back(0.0);
  p.F.push_back(0.0);
  {
    // First cell: Gauss–Jacobi for the r^{1+2α} factor up to the first jump of K.
    double r0 = radii.front(), head = r0;
    for (double br : breaks)
      if (br > 0.0 && br < head) head = br;
    double acc = integrate_jacobi_head([&](double r) { return K(r) * std::exp(u(r)); }, 1.0 + 2.0 * alpha, head);
    acc += integrate_geometric(g, head, r0, breaks);
    p.t.push_back(u(r0));
    p.xi.push_back(std::numbers::pi * std::pow(r0, k) / (1.0 + alpha));
    p.F.push_back(2.0 * std::numbers::pi * acc);
  }
  for (std::size_t i = 1; i < radii.size(); ++i) {
    p.t.push_back(u(radii[i]));
    p.xi.push_back(std::numbers::pi * std::pow(radii[i], k) / (1.0 + alpha));
    p.F.push_back(p.F.back() + 2.0 * std::numbers::pi * integrate_geometric(g, radii[i - 1], radii[i], breaks));
  }
  detail::finish_profile(p);
  p.s1 = 0.0;
  return p;
}

struct KhatAudit {
  double margin = 0.0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  std::size_t samples = 0;
};

/// max(0, a − min K̂, max K̂ − b) over radii with the first and last `trim`
/// fraction removed.
inline KhatAudit audit_khat_bounds(const RearrangedProfile& p, double a, double b, double trim = 0.02) {
  KhatAudit out;
  const std::size_t n = p.size();
  std::size_t lo = static_cast<std::size_t>(std::ceil(trim * n)), hi = n - lo;
  for (std::size_t i = std::max<std::size_t>(lo, 1); i < hi; ++i) {
    if (!std::isfinite(p.K_hat[i])) continue;
    out.min = std::min(out.min, p.K_hat[i]);
    out.max = std::max(out.max, p.K_hat[i]);
    ++out.samples;
  }
  require(out.samples > 0, ErrorKind::invalid_argument, "K_hat is undefined on every interior radius");
  out.margin = std::max({0.0, a - out.min, out.max - b});
  return out;
}

struct DiffInequalityReport {
  std::vector<double> s;
  std::vector<double> regular;   // F − 2π s(−dv*/ds)
  std::vector<double> singular;  // F − (1+α) 2π s(−dv*/ds)
  std::vector<bool> singular_branch;
  std::vector<std::size_t> violations;  // indices into s
  double tol = 0.0;
  double max_relative_gap = 0.0;  // max |chosen|/F
  bool ok() const { return violations.empty(); }
};

/// Evaluates both branches of F ≥ (β/4π) 2π s(−dv*/ds). The singular branch
/// (β = 4π(1+α)) is the one demanded from s1 on, the regular one before it.
inline DiffInequalityReport audit_differential_inequality(const RearrangedProfile& p, double trim = 0.02) {
  DiffInequalityReport r;
  const std::size_t n = p.size();
  double fmax = 0.0;
  for (double f : p.F) fmax = std::max(fmax, f);
  r.tol = 1e-2 * fmax;
  std::size_t lo = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(trim * n))), hi = n - lo;
  for (std::size_t i = lo; i < hi && i + 1 < n; ++i) {
    double slope = detail::centered_derivative(p.s, p.v_star, i);
    if (!std::isfinite(slope)) continue;
    double rhs = 2.0 * std::numbers::pi * p.s[i] * (-slope);
    double reg = p.F[i] - rhs, sing = p.F[i] - (1.0 + p.alpha) * rhs;
    bool singular = std::isfinite(p.s1) && p.s[i] >= p.s1;
    r.s.push_back(p.s[i]);
    r.regular.push_back(reg);
    r.singular.push_back(sing);
    r.singular_branch.push_back(singular);
    double chosen = singular ? sing : reg;
    if (chosen < -r.tol) r.violations.push_back(r.s.size() - 1);
    if (p.F[i] > 0.0) r.max_relative_gap = std::max(r.max_relative_gap, std::abs(chosen) / p.F[i]);
  }
  return r;
}

struct IntegratedFit {
  double limit = 0.0;
  double C = 0.0;
  double exponent = 0.0;         // in the measure radius s
  double radial_exponent = 0.0;  // in |x|, i.e. (1+α)·exponent
  double expected_exponent = 0.0;
  double expected_radial_exponent = 0.0;
  double s_lo = 0.0, s_hi = 0.0;
  double misfit = 0.0;  // sqrt(1 − R²) of the log-log line
};

/// Fits F(s) = F∞ − C s^{−p} on the tail s ≥ max(s0, tail_start): a least
/// squares line of log(F∞ − F) against log s, with F∞ chosen to make that
/// line fit best.
inline IntegratedFit integrated_bound_fit(const RearrangedProfile& p, double a, double b, double s0,
                                          double tail_start = std::numeric_limits<double>::quiet_NaN()) {
  require(a > 0.0 && b >= a, ErrorKind::invalid_argument, "need 0 < a <= b");
  IntegratedFit fit;
  fit.expected_exponent = 2.0 * std::sqrt(a / b);
  fit.expected_radial_exponent = (1.0 + p.alpha) * fit.expected_exponent;
  const double s_max = p.s.empty() ? 0.0 : p.s.back();
  double start = std::isfinite(tail_start) ? tail_start : s_max / 100.0;
  if (std::isfinite(s0)) start = std::max(start, s0);
  if (!(start > 0.0) || s_max < 10.0 * start)
    throw Error(ErrorKind::insufficient_tail, "tail spans less than one decade in s");
  std::vector<double> ls, f;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p.s[i] >= start) {
      ls.push_back(std::log(p.s[i]));
      f.push_back(p.F[i]);
    }
  require(ls.size() >= 8, ErrorKind::insufficient_tail, "too few samples on the tail");
  const double flast = *std::max_element(f.begin(), f.end());
  const double spread = std::max(flast - *std::min_element(f.begin(), f.end()), 1e-300);
  struct Line {
    double slope, intercept, sse;
  };
  auto regress = [&](double x) {
    double finf = flast + std::exp(x);
    const std::size_t m = ls.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) {
      y[i] = std::log(finf - f[i]);
      sx += ls[i];
      sy += y[i];
      sxx += ls[i] * ls[i];
      sxy += ls[i] * y[i];
    }
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    double icpt = (sy - slope * sx) / m;
    double sse = 0, sst = 0, ybar = sy / m;
    for (std::size_t i = 0; i < m; ++i) {
      sse += std::pow(y[i] - icpt - slope * ls[i], 2);
      sst += std::pow(y[i] - ybar, 2);
    }
    // Plain SSE shrinks as F∞ runs off to infinity; 1 − R² does not.
    return Line{slope, icpt, sse / sst};
  };
  const double xlo = std::log(1e-12 * std::max(std::abs(flast), spread)), xhi = std::log(1e3 * spread);
  const int scan = 400;
  int best = 0;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= scan; ++k) {
    double x = xlo + (xhi - xlo) * k / scan;
    double sse = regress(x).sse;
    if (sse < best_sse) {
      best_sse = sse;
      best = k;
    }
  }
  double a0 = xlo + (xhi - xlo) * std::max(0, best - 1) / scan;
  double a1 = xlo + (xhi - xlo) * std::min(scan, best + 1) / scan;
  auto res = boost::math::tools::brent_find_minima([&](double x) { return regress(x).sse; }, a0, a1, 50);
  Line line = regress(res.first);
  fit.limit = flast + std::exp(res.first);
  fit.C = std::exp(line.intercept);
  fit.exponent = -line.slope;
  fit.radial_exponent = (1.0 + p.alpha) * fit.exponent;
  fit.s_lo = std::exp(ls.front());
  fit.s_hi = std::exp(ls.back());
  fit.misfit = std::sqrt(line.sse);
  return fit;
}

/// Weighted measure enclosed by oriented contours (holes clockwise).
inline double enclosed_measure(const std::vector<Polyline>& contours, const ConicalWeight& w) {
  double acc = 0.0;
  for (const auto& c : contours) acc += integrate_polygon_signed(std::span<const Point>(c), w, detail::UnitIntegrand{});
  return acc;
}

struct HuberAudit {
  double t = 0.0;
  double length = 0.0;
  double xi = 0.0;
  double beta = 0.0;
  double ratio = 0.0;
  std::size_t components = 0;
  bool center_inside = false;
  bool indeterminate = false;
  bool flagged = false;
  bool range_warning = false;
};

/// Isoperimetric step (∫_∂Ω dσ)² ≥ β ξ on the superlevel sets of a field.
/// β = 4π(1+α) when the weight center lies in the filled-in superlevel set,
/// 4π otherwise; centers within one cell of a contour are indeterminate.
inline HuberAudit huber_audit_contours(const std::vector<Polyline>& contours, const ConicalWeight& w, double t,
                                       double cell) {
  HuberAudit a;
  a.t = t;
  a.components = contours.size();
  for (const auto& c : contours) {
    a.length += weighted_length(std::span<const Point>(c), w);
    if (signed_area(c) > 0.0 && contains(c, w.center)) a.center_inside = true;
    if (distance_to_path(w.center, c) < cell) a.indeterminate = true;
  }
  a.xi = enclosed_measure(contours, w);
  a.beta = 4.0 * std::numbers::pi * (a.center_inside ? 1.0 + w.alpha : 1.0);
  a.ratio = a.length * a.length / (a.beta * a.xi);
  a.flagged = !a.indeterminate && a.ratio < 1.0 - 0.02;
  return a;
}

inline std::vector<HuberAudit> audit_huber_levels(const GridField& u, const ConicalWeight& w,
                                                  const std::vector<double>& levels, unsigned jobs = 1) {
  validate(w);
  std::vector<HuberAudit> out(levels.size());
  parallel_for(levels.size(), jobs, [&](std::size_t i) {
    auto cs = superlevel_contours(u, levels[i]);
    if (cs.range_warning) {
      out[i].t = levels[i];
      out[i].range_warning = true;
      return;
    }
    out[i] = huber_audit_contours(cs.paths, w, levels[i], u.h());
  });
  return out;
}

/// Attaches Huber ratios and β to the profile rows whose level was audited.
inline void attach_huber(RearrangedProfile& p, const std::vector<HuberAudit>& audits) {
  for (const auto& a : audits) {
    if (a.range_warning) continue;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p.t[i] == a.t) {
        p.huber_ratio[i] = a.ratio;
        p.beta[i] = a.beta;
      }
  }
}

inline void write_profile_csv(const RearrangedProfile& p, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error(ErrorKind::io, "cannot write " + path);
  std::fprintf(f, "t,xi,s,v_star,F,K_hat,huber_ratio,beta\n");
  for (std::size_t i = 0; i < p.size(); ++i)
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", p.t[i], p.xi[i], p.s[i], p.v_star[i], p.F[i],
                 p.K_hat[i], p.huber_ratio[i], p.beta[i]);
  if (std::fclose(f) != 0) throw Error(ErrorKind::io, "failed to close " + path);
}

}  // namespace liouville
