#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "liouville/core/cell_integration.hpp"
#include "liouville/core/geometry.hpp"
#include "liouville/core/grid_field.hpp"
#include "liouville/core/potential.hpp"
#include "liouville/core/quadrature.hpp"
#include "liouville/core/weight.hpp"
#include "liouville/errors.hpp"

namespace liouville {

enum class BlowupCase { I, II };
enum class Subcase { i, ii, none };

inline const char* to_string(BlowupCase c) { return c == BlowupCase::I ? "I" : "II"; }
inline const char* to_string(Subcase s) { return s == Subcase::i ? "i" : s == Subcase::ii ? "ii" : "n/a"; }

/// Mass of a disk of radius l about the peak, in rescaled units.
using MassFunction = std::function<double(double)>;

struct BlowupReport {
  double alpha = 0.0;
  double rho = 0.0;
  double case_threshold = 10.0;
  double M = 0.0;
  Point x_star{};
  Point x_grid{};  // grid argmax before refinement
  bool boundary_max = false;
  double delta = 0.0;
  double tau = std::numeric_limits<double>::quiet_NaN();
  bool tau_defined = false;
  double ratio_delta = 0.0;  // |x*|/δ
  BlowupCase case_tag = BlowupCase::I;
  Subcase subcase_tag = Subcase::none;
  double scale = 0.0;  // τ in case II, δ in case I
  double L_n = 0.0;
  double threshold = 0.0;
  double l_n = std::numeric_limits<double>::quiet_NaN();
  double mass_at_l = std::numeric_limits<double>::quiet_NaN();
  bool mass_truncated = false;  // the mass disk was capped by the domain
  double R_bar = std::numeric_limits<double>::quiet_NaN();
  double neck_mass = std::numeric_limits<double>::quiet_NaN();
  double p_n = std::numeric_limits<double>::quiet_NaN();
  /// log(|x*|/τ)/|log τ|, the quantity behind the sharpness condition.
  double sharpness_quantity = std::numeric_limits<double>::quiet_NaN();
};

/// δ, τ, the case tag and L_n from the peak data. The singularity sits at
/// `singularity` (the origin unless stated otherwise).
inline BlowupReport scales_from_peak(double M, Point x_star, double alpha, double rho, double case_threshold = 10.0,
                                     Point singularity = {}) {
  require(alpha > -1.0 && alpha <= 0.0, ErrorKind::invalid_weight, "alpha must lie in (-1, 0]");
  require(rho > 0.0, ErrorKind::invalid_argument, "rho must be positive");
  require(case_threshold > 0.0, ErrorKind::invalid_argument, "case threshold must be positive");
  BlowupReport r;
  r.alpha = alpha;
  r.rho = rho;
  r.case_threshold = case_threshold;
  r.M = M;
  r.x_star = r.x_grid = x_star;
  const double k = 1.0 + alpha;
  const double log_delta = -M / (2.0 * k);
  r.delta = std::exp(log_delta);
  const double dist = distance(x_star, singularity);
  r.ratio_delta = dist / r.delta;
  if (dist > 0.0) {
    r.tau = std::exp(k * log_delta - alpha * std::log(dist));
    r.tau_defined = true;
  }
  r.case_tag = r.ratio_delta <= case_threshold ? BlowupCase::I : BlowupCase::II;
  r.scale = r.case_tag == BlowupCase::II ? r.tau : r.delta;
  r.L_n = rho / r.scale;
  if (r.tau_defined) r.sharpness_quantity = std::log(dist / r.tau) / std::abs(std::log(r.tau));
  return r;
}

/// Threshold of the critical radius: 4π(1+1/√σ̄) in case II, 4π(1+α)(1+1/√σ̄) in case I.
inline double critical_threshold(BlowupCase c, double alpha, double sigma_bar) {
  require(sigma_bar >= 1.0, ErrorKind::invalid_argument, "sigma_bar must be at least 1");
  double base = 4.0 * std::numbers::pi * (1.0 + 1.0 / std::sqrt(sigma_bar));
  return c == BlowupCase::I ? (1.0 + alpha) * base : base;
}

struct Peak {
  double M = 0.0;
  Point x{};
  Point x_grid{};
  bool on_boundary = false;
};

/// Grid maximum over the disk A (ties go to the largest |x|), refined by one
/// Newton step on the quadratic through the 3x3 stencil.
inline Peak find_peak(const GridField& u, const Disk& A, Point singularity = {}) {
  Peak pk;
  int bi = -1, bj = -1;
  double best = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < u.n(); ++j)
    for (int i = 0; i < u.n(); ++i) {
      double v = u.at(i, j);
      Point p = u.node(i, j);
      if (!std::isfinite(v) || distance(p, A.center) > A.radius) continue;
      if (v > best || (v == best && distance(p, singularity) > distance(u.node(bi, bj), singularity))) {
        best = v;
        bi = i;
        bj = j;
      }
    }
  require(bi >= 0, ErrorKind::out_of_domain, "peak disk contains no grid nodes");
  pk.M = best;
  pk.x = pk.x_grid = u.node(bi, bj);
  pk.on_boundary = distance(pk.x, A.center) > A.radius - u.h();
  if (bi < 1 || bj < 1 || bi + 1 >= u.n() || bj + 1 >= u.n()) return pk;
  double s[3][3];
  for (int dj = -1; dj <= 1; ++dj)
    for (int di = -1; di <= 1; ++di) {
      s[di + 1][dj + 1] = u.at(bi + di, bj + dj);
      if (!std::isfinite(s[di + 1][dj + 1])) return pk;
    }
  const double h = u.h();
  Eigen::Vector2d g((s[2][1] - s[0][1]) / (2 * h), (s[1][2] - s[1][0]) / (2 * h));
  Eigen::Matrix2d H;
  H(0, 0) = (s[2][1] - 2 * s[1][1] + s[0][1]) / (h * h);
  H(1, 1) = (s[1][2] - 2 * s[1][1] + s[1][0]) / (h * h);
  H(0, 1) = H(1, 0) = (s[2][2] - s[2][0] - s[0][2] + s[0][0]) / (4 * h * h);
  if (!(H(0, 0) < 0.0 && H.determinant() > 0.0)) return pk;
  Eigen::Vector2d step = -(H.inverse() * g);
  if (!(std::abs(step(0)) <= h && std::abs(step(1)) <= h)) return pk;
  pk.x = {pk.x_grid.x + step(0), pk.x_grid.y + step(1)};
  pk.M = best + 0.5 * g.dot(step);
  return pk;
}

inline BlowupReport blowup_scales(const GridField& u, const Disk& A, double alpha, double rho,
                                  double case_threshold = 10.0, Point singularity = {}) {
  Peak pk = find_peak(u, A, singularity);
  BlowupReport r = scales_from_peak(pk.M, pk.x, alpha, rho, case_threshold, singularity);
  r.x_grid = pk.x_grid;
  r.boundary_max = pk.on_boundary;
  return r;
}

/// v(y) = u(x* + scale·y) − u(x*) on a fresh disk grid of radius `extent`.
inline GridField rescale(const GridField& u, Point x_star, double scale, int n_out, double extent) {
  require(scale > 0.0 && std::isfinite(scale), ErrorKind::invalid_argument, "scale must be positive");
  const double reach = scale * extent;
  bool inside = u.shape() == DomainShape::disk
                    ? norm(x_star) + reach <= u.extent() * (1.0 + 1e-12)
                    : std::abs(x_star.x) + reach <= u.extent() && std::abs(x_star.y) + reach <= u.extent();
  require(inside, ErrorKind::out_of_domain, "rescaling window exceeds the field's domain");
  const double base = u.interpolate(x_star);
  return GridField::sample(extent, n_out, DomainShape::disk, u.alpha(),
                           [&](Point y) { return u.interpolate(x_star + scale * y) - base; });
}

/// Weight of the rescaled problem: |x|^{2α} K e^u dx = factor |y − c'|^{2α} K e^v dy
/// with x = x* + λy, c' = (c − x*)/λ and factor = λ^{2+2α} e^{u(x*)}.
inline ConicalWeight rescaled_weight(double alpha, Point x_star, double scale, double base_value,
                                     Point singularity = {}) {
  return ConicalWeight(alpha, (1.0 / scale) * (singularity - x_star),
                       std::exp((2.0 + 2.0 * alpha) * std::log(scale) + base_value));
}

struct CriticalRadius {
  double l_n = 0.0;
  double mass_at_l = 0.0;
  bool reached = false;
};

/// l_n = sup{l ≤ L_n : m(l) ≤ threshold} for a non-decreasing mass function,
/// by bisection in log l. Returns L_n when the threshold is never passed.
inline CriticalRadius critical_radius(const MassFunction& mass, double threshold, double L_n, double rel_tol = 1e-10) {
  require(L_n > 0.0, ErrorKind::invalid_argument, "L_n must be positive");
  CriticalRadius c;
  double mL = mass(L_n);
  if (mL <= threshold) {
    c.l_n = L_n;
    c.mass_at_l = mL;
    return c;
  }
  c.reached = true;
  double lo = L_n, hi = L_n;
  // Walk down until the mass is at or below the threshold.
  for (int k = 0; k < 200 && mass(lo) > threshold; ++k) lo *= 0.5;
  while (hi / lo > 1.0 + rel_tol) {
    double mid = std::sqrt(lo * hi);
    if (mass(mid) <= threshold)
      lo = mid;
    else
      hi = mid;
  }
  c.l_n = lo;
  c.mass_at_l = mass(lo);
  return c;
}

/// Critical radius on a rescaled grid field with its rescaled weight and K.
inline CriticalRadius critical_radius(const GridField& v, const ConicalWeight& w, const PotentialSpec& K,
                                      double threshold, double L_n) {
  GridDiskMass m(v, w, K, {});
  double cap = std::min(L_n, m.max_radius());
  auto c = critical_radius([&](double l) { return m(std::min(l, cap)); }, threshold, L_n, 1e-8);
  return c;
}

inline Subcase subcase_classify(double l_n, double x_star_norm, double tau, double epsilon0, BlowupCase c) {
  if (c != BlowupCase::II || !(tau > 0.0))
    throw Error(ErrorKind::invalid_case, "subcases are defined in case II only");
  return epsilon0 * l_n <= x_star_norm / tau ? Subcase::i : Subcase::ii;
}

struct CircleProfiles {
  RadialProfile max;
  RadialProfile mean;
};

/// Circle maxima m(r) and means v̄(r) about `center` by angular sampling.
inline CircleProfiles circle_max_profile(const GridField& u, const std::vector<double>& radii, Point center = {}) {
  CircleProfiles out;
  out.max.alpha = out.mean.alpha = u.alpha();
  for (double r : radii) {
    double mx = -std::numeric_limits<double>::infinity(), sum = 0.0;
    int m = r == 0.0 ? 1 : std::max(720, static_cast<int>(8.0 * std::numbers::pi * r / u.h()));
    for (int k = 0; k < m; ++k) {
      double th = 2.0 * std::numbers::pi * k / m;
      double v = u.interpolate({center.x + r * std::cos(th), center.y + r * std::sin(th)});
      mx = std::max(mx, v);
      sum += v;
    }
    out.max.nodes.push_back(r);
    out.max.values.push_back(mx);
    out.mean.nodes.push_back(r);
    out.mean.values.push_back(sum / m);
  }
  return out;
}

struct DecayAudit {
  std::vector<double> radii, circle_max, circle_mean, tail_mass;
  double slope = 0.0;  // of m(r) against log r
  double intercept = 0.0;
  /// max_r [m(r) + 2 log r + 2α log(1 + 1.5 (τ/|x*|) r)]; ≤ 0 when the upper bound holds.
  double bound_margin = 0.0;
  /// Largest C2 with v̄(r) ≥ −2(1+1/√σ̄) log r + C2 on the range.
  double mean_C2 = 0.0;
  double tail_exponent = std::numeric_limits<double>::quiet_NaN();
  double tail_C = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

struct LineFit {
  double slope = 0.0, intercept = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LineFit f;
  f.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / m;
  return f;
}

inline void finish_decay(DecayAudit& d, double alpha, double sigma_bar, double tau_over_x) {
  std::vector<double> lr;
  for (double r : d.radii) lr.push_back(std::log(r));
  auto line = fit_line(lr, d.circle_max);
  d.slope = line.slope;
  d.intercept = line.intercept;
  d.bound_margin = -std::numeric_limits<double>::infinity();
  d.mean_C2 = std::numeric_limits<double>::infinity();
  const double c = 2.0 * (1.0 + 1.0 / std::sqrt(sigma_bar));
  for (std::size_t i = 0; i < d.radii.size(); ++i) {
    double r = d.radii[i];
    double bound = -2.0 * std::log(r) - 2.0 * alpha * std::log1p(1.5 * tau_over_x * r);
    d.bound_margin = std::max(d.bound_margin, d.circle_max[i] - bound);
    d.mean_C2 = std::min(d.mean_C2, d.circle_mean[i] + c * std::log(r));
  }
  std::vector<double> tx, ty;
  for (std::size_t i = 0; i < d.radii.size(); ++i)
    if (d.tail_mass[i] > 0.0) {
      tx.push_back(lr[i]);
      ty.push_back(std::log(d.tail_mass[i]));
    }
  if (tx.size() >= 4) {
    auto t = fit_line(tx, ty);
    d.tail_exponent = -t.slope;
    d.tail_C = std::exp(t.intercept);
  }
}

inline std::vector<double> log_radii(double r_lo, double r_hi, int samples) {
  if (!(r_lo > 0.0) || r_hi < 10.0 * r_lo)
    throw Error(ErrorKind::insufficient_tail, "decay range spans less than one decade");
  require(samples >= 4, ErrorKind::invalid_argument, "decay audit needs at least four radii");
  std::vector<double> r(samples);
  for (int i = 0; i < samples; ++i) r[i] = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (samples - 1));
  return r;
}

}  // namespace detail

/// Decay of a rescaled grid field about the origin on [r_lo, r_hi]. The tail
/// mass is taken up to the largest disk the grid supports.
inline DecayAudit decay_audit(const GridField& v, const ConicalWeight& w, const PotentialSpec& K, double sigma_bar,
                              double r_lo, double r_hi, double tau_over_x = 0.0, int samples = 32) {
  DecayAudit d;
  d.radii = detail::log_radii(r_lo, r_hi, samples);
  GridDiskMass mass(v, w, K, {});
  require(r_hi <= mass.max_radius(), ErrorKind::out_of_domain, "decay range exceeds the rescaled window");
  auto prof = circle_max_profile(v, d.radii);
  d.circle_max = prof.max.values;
  d.circle_mean = prof.mean.values;
  const double total = mass(mass.max_radius());
  for (double r : d.radii) d.tail_mass.push_back(total - mass(r));
  detail::finish_decay(d, w.alpha, sigma_bar, tau_over_x);
  return d;
}

/// Decay audit of a radial profile v(r) with weight r^{2α}, tail mass
/// measured up to r_total.
inline DecayAudit decay_audit_radial(const std::function<double(double)>& v, const std::function<double(double)>& K,
                                     double alpha, double sigma_bar, double r_lo, double r_hi, double r_total,
                                     const std::vector<double>& breaks = {}, int samples = 32) {
  DecayAudit d;
  d.radii = detail::log_radii(r_lo, r_hi, samples);
  auto g = [&](double r) { return std::pow(r, 1.0 + 2.0 * alpha) * K(r) * std::exp(v(r)); };
  for (double r : d.radii) {
    d.circle_max.push_back(v(r));
    d.circle_mean.push_back(v(r));
    d.tail_mass.push_back(2.0 * std::numbers::pi * integrate_geometric(g, r, r_total, breaks));
  }
  detail::finish_decay(d, alpha, sigma_bar, 0.0);
  return d;
}

/// ε = m(4 l) − m(R̄/4), with the outer radius capped at `cap`.
inline double neck_mass(const MassFunction& mass, double R_bar, double l_n, double cap) {
  double outer = std::min(4.0 * l_n, cap), inner = 0.25 * R_bar;
  if (!(outer > inner)) return 0.0;
  return mass(outer) - mass(inner);
}

/// R̄ = exp(√log(|x*|/τ)) in case II and √l_n in case I.
inline double neck_inner_radius(const BlowupReport& r) {
  if (r.case_tag == BlowupCase::II) {
    double q = norm(r.x_star) / r.tau;
    return q > 1.0 ? std::exp(std::sqrt(std::log(q))) : 1.0;
  }
  return std::sqrt(r.l_n);
}

/// Remark-type sufficient condition: the local mass reaches 4π(1+1/√σ̄).
inline bool sharpness_test(double local_mass, double sigma_bar) {
  return local_mass >= critical_threshold(BlowupCase::II, 0.0, sigma_bar);
}

inline bool sharpness_test(const GridField& u, Point x_star, double rho, const ConicalWeight& w,
                           const PotentialSpec& K, double sigma_bar) {
  GridDiskMass m(u, w, K, x_star);
  return sharpness_test(m(rho), sigma_bar);
}

/// Full report for a grid field: scales, critical radius, neck mass, boundary
/// mean p_n and, in case II, the subcase.
inline BlowupReport analyze_blowup(const GridField& u, const Disk& A, const PotentialSpec& K, double rho,
                                   double case_threshold = 10.0, double epsilon0 = 0.1, Point singularity = {}) {
  const double alpha = u.alpha();
  BlowupReport r = blowup_scales(u, A, alpha, rho, case_threshold, singularity);
  ConicalWeight w(alpha, singularity);
  GridDiskMass mass(u, w, K, r.x_star);
  const double cap = mass.max_radius() / r.scale;
  r.mass_truncated = cap < r.L_n;
  MassFunction m = [&](double l) { return mass(std::min(l, cap) * r.scale); };
  r.threshold = critical_threshold(r.case_tag, alpha, K.sigma_bar);
  auto c = critical_radius(m, r.threshold, r.L_n, 1e-8);
  r.l_n = c.l_n;
  r.mass_at_l = c.mass_at_l;
  r.R_bar = neck_inner_radius(r);
  r.neck_mass = neck_mass(m, r.R_bar, r.l_n, cap);
  if (r.case_tag == BlowupCase::II) r.subcase_tag = subcase_classify(r.l_n, norm(r.x_star - singularity), r.tau, epsilon0, r.case_tag);
  auto pn = circle_max_profile(u, {rho}, r.x_star);
  r.p_n = pn.mean.values[0];
  return r;
}

/// Report for a radial field peaked at the singularity (case I by
/// construction): u(r), K(r) on [0, r_domain].
inline BlowupReport analyze_radial_blowup(const std::function<double(double)>& u,
                                          const std::function<double(double)>& K, double alpha, double sigma_bar,
                                          double rho, double r_domain, const std::vector<double>& breaks = {},
                                          double case_threshold = 10.0) {
  BlowupReport r = scales_from_peak(u(0.0), {}, alpha, rho, case_threshold);
  const double d = r.scale;
  const double head = std::min(1e-2 * d, breaks.empty() ? 1e-2 * d : std::min(1e-2 * d, breaks.front()));
  const double beta = 1.0 + 2.0 * alpha;
  auto g = [&](double s) { return std::pow(s, beta) * K(s) * std::exp(u(s)); };
  const double base = integrate_jacobi_head([&](double s) { return K(s) * std::exp(u(s)); }, beta, head);
  const double cap = r_domain / d;
  r.mass_truncated = cap < r.L_n;
  MassFunction m = [&](double l) {
    double R = std::min(l, cap) * d;
    if (R <= head) return 2.0 * std::numbers::pi * integrate_jacobi_head([&](double s) { return K(s) * std::exp(u(s)); }, beta, R);
    return 2.0 * std::numbers::pi * (base + integrate_geometric(g, head, R, breaks));
  };
  r.threshold = critical_threshold(r.case_tag, alpha, sigma_bar);
  auto c = critical_radius(m, r.threshold, r.L_n, 1e-10);
  r.l_n = c.l_n;
  r.mass_at_l = c.mass_at_l;
  r.R_bar = neck_inner_radius(r);
  r.neck_mass = neck_mass(m, r.R_bar, r.l_n, cap);
  if (rho <= r_domain) r.p_n = u(rho);
  return r;
}

inline void write_report_csv(const BlowupReport& r, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error(ErrorKind::io, "cannot write " + path);
  std::fprintf(f,
               "M,x_star_x,x_star_y,delta,tau,ratio_delta,case,subcase,L_n,l_n,mass_at_l,threshold,R_bar,neck_mass,p_n,"
               "sharpness_quantity,boundary_max\n");
  std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.M,
               r.x_star.x, r.x_star.y, r.delta, r.tau, r.ratio_delta, to_string(r.case_tag), to_string(r.subcase_tag),
               r.L_n, r.l_n, r.mass_at_l, r.threshold, r.R_bar, r.neck_mass, r.p_n, r.sharpness_quantity,
               r.boundary_max ? 1 : 0);
  if (std::fclose(f) != 0) throw Error(ErrorKind::io, "failed to close " + path);
}

}  // namespace liouville
