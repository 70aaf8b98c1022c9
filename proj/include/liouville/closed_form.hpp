#pragma once

#include <cmath>
#include <numbers>

#include "liouville/core/potential.hpp"
#include "liouville/core/quadrature.hpp"
#include "liouville/errors.hpp"

namespace liouville {

/// The explicit two-level family: K = b on |z| < 1/n and a on [1/n, 1].
struct BubbleParams {
  double alpha = 0.0;
  double a = 1.0;
  double b = 1.0;
  double n = 1.0;

  void validate() const {
    require(alpha > -1.0 && alpha <= 0.0, ErrorKind::invalid_weight, "alpha must lie in (-1, 0]");
    require(a > 0.0 && a <= b && std::isfinite(b), ErrorKind::invalid_argument, "family needs 0 < a <= b");
    require(n >= 1.0 && std::isfinite(n), ErrorKind::invalid_argument, "family index n must be at least 1");
  }
  double k() const { return 2.0 * (1.0 + alpha); }
  double ratio() const { return std::sqrt(a / b); }
  /// Outer exponent 2(1+alpha)sqrt(a/b).
  double gamma() const { return k() * ratio(); }
};

namespace detail {

inline double log_bubble_constant(double alpha, double b) {
  return std::log(8.0 * (1.0 + alpha) * (1.0 + alpha) / b);
}

/// log(1 + x^p) for x >= 0 without overflow.
inline double log1p_pow(double x, double p) {
  if (x == 0.0) return 0.0;
  double lx = p * std::log(x);
  if (lx > 0.0) return lx + std::log1p(std::exp(-lx));
  return std::log1p(std::exp(lx));
}

inline void check_unit_radius(double r) {
  require(r >= 0.0, ErrorKind::out_of_domain, "radius must be nonnegative");
  require(r <= 1.0 + 1e-12, ErrorKind::out_of_domain, "family is defined on the unit disk only");
}

}  // namespace detail

inline double family_u(const BubbleParams& p, double r) {
  p.validate();
  detail::check_unit_radius(r);
  const double L0 = detail::log_bubble_constant(p.alpha, p.b);
  const double k = p.k(), g = p.gamma(), ln = std::log(p.n);
  if (r <= 1.0 / p.n) return L0 + k * ln - 2.0 * detail::log1p_pow(p.n * r, k);
  return L0 + g * ln + (g - k) * std::log(r) - 2.0 * detail::log1p_pow(p.n * r, g);
}

/// du/dr, one-sided from the left at the kink r = 1/n.
inline double family_u_prime(const BubbleParams& p, double r) {
  p.validate();
  detail::check_unit_radius(r);
  const double k = p.k(), g = p.gamma();
  if (r == 0.0) return 0.0;
  if (r <= 1.0 / p.n) {
    double q = std::pow(p.n * r, k);
    return -2.0 * k * q / (r * (1.0 + q));
  }
  double q = std::pow(p.n * r, g);
  return (g - k) / r - 2.0 * g * q / (r * (1.0 + q));
}

inline double family_K(const BubbleParams& p, double r) {
  p.validate();
  detail::check_unit_radius(r);
  return r < 1.0 / p.n ? p.b : p.a;
}

inline PotentialSpec family_potential(const BubbleParams& p) {
  p.validate();
  if (p.a == p.b) return PotentialSpec::constant_value(p.b, p.a, p.b);
  return PotentialSpec::piecewise({1.0 / p.n}, {p.b, p.a}, p.a, p.b);
}

/// U_{alpha,a,b}: the n = 1 profile extended to the whole plane.
inline double limit_bubble(double alpha, double a, double b, double r) {
  BubbleParams p{alpha, a, b, 1.0};
  p.validate();
  require(r >= 0.0, ErrorKind::out_of_domain, "radius must be nonnegative");
  const double L0 = detail::log_bubble_constant(alpha, b);
  const double k = p.k(), g = p.gamma();
  if (r < 1.0) return L0 - 2.0 * detail::log1p_pow(r, k);
  return L0 + (g - k) * std::log(r) - 2.0 * detail::log1p_pow(r, g);
}

inline double limit_bubble_prime(double alpha, double a, double b, double r) {
  BubbleParams p{alpha, a, b, 1.0};
  const double k = p.k(), g = p.gamma();
  if (r == 0.0) return 0.0;
  if (r < 1.0) {
    double q = std::pow(r, k);
    return -2.0 * k * q / (r * (1.0 + q));
  }
  double q = std::pow(r, g);
  return (g - k) / r - 2.0 * g * q / (r * (1.0 + q));
}

/// K of the limit bubble: b inside the unit disk, a outside.
inline double limit_bubble_K(double a, double b, double r) { return r < 1.0 ? b : a; }

/// Radial solution of -Δu = |x|^{2alpha} b e^u with concentration parameter mu.
inline double centered_bubble(double alpha, double b, double mu, double r) {
  const double k = 2.0 * (1.0 + alpha);
  return detail::log_bubble_constant(alpha, b) + k * std::log(mu) - 2.0 * detail::log1p_pow(mu * r, k);
}

inline double centered_bubble_prime(double alpha, double mu, double r) {
  const double k = 2.0 * (1.0 + alpha);
  if (r == 0.0) return 0.0;
  double q = std::pow(mu * r, k);
  return -2.0 * k * q / (r * (1.0 + q));
}

/// The mu for which the centered bubble takes the value M at the origin.
inline double bubble_mu(double alpha, double b, double M) {
  return std::exp((M - detail::log_bubble_constant(alpha, b)) / (2.0 * (1.0 + alpha)));
}

inline double supinf_bound(double alpha, double a, double b) {
  BubbleParams{alpha, a, b, 1.0}.validate();
  return (std::sqrt(a / b) + 1.0) * detail::log_bubble_constant(alpha, b);
}

struct SupInfCombination {
  double closed_form = 0.0;
  double from_family = 0.0;
  double value() const { return closed_form; }
};

/// sqrt(a/b) u_n(0) + u_n(1), by the closed form and by evaluating the family.
inline SupInfCombination supinf_combination(const BubbleParams& p) {
  p.validate();
  const double s = p.ratio(), g = p.gamma();
  SupInfCombination c;
  // (s+1)L0 + 2g log n - 2 log(1+n^g), written to stay accurate for large n.
  c.closed_form = (s + 1.0) * detail::log_bubble_constant(p.alpha, p.b) - 2.0 * std::log1p(std::pow(p.n, -g));
  c.from_family = s * family_u(p, 0.0) + family_u(p, 1.0);
  if (std::abs(c.closed_form - c.from_family) > 1e-10 * std::max(1.0, std::abs(c.closed_form)))
    throw Error(ErrorKind::non_convergence, "closed form and family evaluation of the combination disagree");
  return c;
}

inline double optimal_total_curvature(double alpha, double a, double b) {
  return 4.0 * std::numbers::pi * (1.0 + alpha) * (1.0 + std::sqrt(a / b));
}

/// Mass of U beyond r_max, 8π(1+alpha)sqrt(a/b)/(1+r_max^gamma).
inline double bubble_tail_mass(double alpha, double a, double b, double r_max) {
  BubbleParams p{alpha, a, b, 1.0};
  return 8.0 * std::numbers::pi * (1.0 + alpha) * p.ratio() / (1.0 + std::pow(r_max, p.gamma()));
}

/// ∫_0^{r_max} r^{2alpha} K e^U 2πr dr by adaptive quadrature in log r, plus
/// the analytic tail beyond r_max.
inline QuadResult bubble_total_curvature(double alpha, double a, double b, double r_max = 1e3, double tol = 1e-8) {
  BubbleParams{alpha, a, b, 1.0}.validate();
  require(r_max >= 10.0, ErrorKind::invalid_argument, "r_max must be at least 10");
  require(tol > 0.0, ErrorKind::invalid_argument, "tolerance must be positive");
  const double k = 2.0 * (1.0 + alpha);
  auto integrand = [&](double x) {
    double r = std::exp(x);
    return 2.0 * std::numbers::pi * std::exp(k * x + limit_bubble(alpha, a, b, r)) * limit_bubble_K(a, b, r);
  };
  // Below r_min the integrand is 2π·8(1+alpha)^2 r^{1+2alpha} to relative O(r^k).
  const double x_min = std::log(1e-8) / k;
  const double head = 8.0 * std::numbers::pi * (1.0 + alpha) * std::exp(k * x_min);
  const double rel = std::min(1e-12, tol * 1e-3);
  QuadResult inner = integrate_adaptive(integrand, x_min, 0.0, rel, 20);
  QuadResult outer = integrate_adaptive(integrand, 0.0, std::log(r_max), rel, 20);
  QuadResult out;
  out.value = head + inner.value + outer.value + bubble_tail_mass(alpha, a, b, r_max);
  out.error = inner.error + outer.error + head * 1e-8;
  if (out.error > tol)
    throw Error(ErrorKind::non_convergence,
                "total curvature quadrature did not reach tolerance; achieved " + std::to_string(out.error));
  return out;
}

}  // namespace liouville
