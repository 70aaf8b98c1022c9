#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "liouville/core/grid_field.hpp"
#include "liouville/core/potential.hpp"
#include "liouville/core/quadrature.hpp"
#include "liouville/errors.hpp"

namespace liouville {

struct RadialIVP {
  double alpha = 0.0;
  PotentialSpec K;
  double M = 0.0;
  double r_max = 10.0;
  double tol = 1e-10;
  /// Output nodes per decade of r (log-spaced), on top of the kink radii.
  int per_decade = 200;
};

namespace detail {

inline std::string radius_text(double r) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", r);
  return buf;
}

}  // namespace detail

/// Shoots (r u')' = -r^{1+2alpha} K e^u outward from u(0) = M. The state is
/// (u, r u') in t = log r, which removes the coordinate singularity at r = 0.
inline RadialProfile solve_radial(const RadialIVP& ivp) {
  require(ivp.alpha > -1.0 && ivp.alpha <= 0.0, ErrorKind::invalid_weight, "alpha must lie in (-1, 0]");
  require(ivp.tol > 0.0 && ivp.tol <= 1e-2, ErrorKind::invalid_argument, "tol must lie in (0, 1e-2]");
  require(ivp.r_max > 0.0 && std::isfinite(ivp.r_max), ErrorKind::invalid_argument, "r_max must be positive");
  require(std::isfinite(ivp.M), ErrorKind::invalid_argument, "center value M must be finite");
  require(ivp.K.is_radial(), ErrorKind::invalid_argument, "radial solve needs a radial potential");
  require(ivp.per_decade >= 10, ErrorKind::invalid_argument, "per_decade must be at least 10");
  ivp.K.validate();
  const double k = 2.0 + 2.0 * ivp.alpha;
  const double K0 = ivp.K.radial(0.0);
  const double lmax = std::log(std::numeric_limits<double>::max());
  if (ivp.M + std::log(std::max(K0, 1e-300)) > lmax - 1.0)
    throw Error(ErrorKind::blowup_overflow, "e^u overflows at radius 0 (M too large)");
  const double KeM = K0 * std::exp(ivp.M);

  // Two-term series u = M - K e^M r^k / k^2; its error is O((K e^M r^k)^2).
  double r_start = std::min(1e-3, std::pow(ivp.tol / std::max(1.0, KeM), 1.0 / k));
  r_start = std::min(r_start, 0.5 * ivp.r_max);
  auto series = [&](double r) {
    double q = KeM * std::pow(r, k);
    return std::array<double, 2>{ivp.M - q / (k * k), -q / k};
  };

  RadialProfile out;
  out.alpha = ivp.alpha;
  out.nodes.push_back(0.0);
  out.values.push_back(ivp.M);
  out.slopes.push_back(k > 1.0 || KeM == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity());
  for (int j = 48; j >= 1; --j) {
    double r = r_start * std::pow(10.0, -j / 4.0);
    auto s = series(r);
    out.nodes.push_back(r);
    out.values.push_back(s[0]);
    out.slopes.push_back(s[1] / r);
  }
  if (!std::isfinite(out.slopes[0])) out.slopes[0] = out.slopes[1];

  // Output times: log-spaced grid plus every kink, ascending.
  const double t0 = std::log(r_start), t1 = std::log(ivp.r_max);
  std::vector<double> times;
  const double dt_out = std::log(10.0) / ivp.per_decade;
  int nt = std::max(2, static_cast<int>(std::ceil((t1 - t0) / dt_out)));
  for (int i = 0; i <= nt; ++i) times.push_back(t0 + (t1 - t0) * i / nt);
  std::vector<double> kinks;
  for (double rb : ivp.K.radial_breaks())
    if (rb > r_start && rb < ivp.r_max) kinks.push_back(std::log(rb));
  times.insert(times.end(), kinks.begin(), kinks.end());
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(), [](double x, double y) { return std::abs(x - y) < 1e-13; }),
              times.end());

  using State = std::array<double, 2>;
  namespace ode = boost::numeric::odeint;
  std::vector<double> piece_ends = kinks;
  piece_ends.push_back(t1);

  State x = series(r_start);
  double t = t0;
  std::size_t next = 0;
  auto record = [&](double tt, const State& s) {
    double r = std::exp(tt);
    if (!std::isfinite(s[0]) || !std::isfinite(s[1]))
      throw Error(ErrorKind::blowup_overflow, "e^u overflowed; integration reached radius " + detail::radius_text(r));
    out.nodes.push_back(r);
    out.values.push_back(s[0]);
    out.slopes.push_back(s[1] / r);
  };
  for (double t_end : piece_ends) {
    // K is constant on this piece; evaluate it just inside.
    const double Kc = ivp.K.radial(std::exp(0.5 * (t + t_end)));
    const double lK = Kc > 0.0 ? std::log(Kc) : -std::numeric_limits<double>::infinity();
    auto rhs = [&](const State& s, State& d, double tt) {
      d[0] = s[1];
      double e = k * tt + s[0] + lK;
      if (e > lmax)
        throw Error(ErrorKind::blowup_overflow,
                    "e^u overflowed; integration reached radius " + detail::radius_text(std::exp(tt)));
      d[1] = Kc > 0.0 ? -std::exp(e) : 0.0;
    };
    auto stepper = ode::make_dense_output(ivp.tol * 1e-2, ivp.tol * 1e-2, ode::runge_kutta_dopri5<State>());
    stepper.initialize(x, t, std::min(1e-3, 0.5 * (t_end - t)));
    while (next < times.size() && times[next] <= t + 1e-14) {
      if (times[next] >= t - 1e-14) record(times[next], x);
      ++next;
    }
    std::size_t steps = 0;
    while (stepper.current_time() < t_end - 1e-14) {
      if (++steps > 2000000)
        throw Error(ErrorKind::non_convergence, "radial integrator exceeded the step budget near radius " +
                                                    detail::radius_text(std::exp(stepper.current_time())));
      stepper.do_step(rhs);
      State y;
      while (next < times.size() && times[next] <= std::min(stepper.current_time(), t_end) + 1e-14) {
        stepper.calc_state(times[next], y);
        record(times[next], y);
        ++next;
      }
      if (!std::isfinite(stepper.current_state()[0]))
        throw Error(ErrorKind::blowup_overflow,
                    "e^u overflowed; integration reached radius " + detail::radius_text(std::exp(stepper.current_time())));
    }
    stepper.calc_state(t_end, x);
    t = t_end;
  }
  // Kinks are recorded from both pieces; keep one node per radius.
  RadialProfile clean;
  clean.alpha = out.alpha;
  for (std::size_t i = 0; i < out.nodes.size(); ++i) {
    if (!clean.nodes.empty() && out.nodes[i] <= clean.nodes.back() * (1.0 + 1e-13)) continue;
    clean.nodes.push_back(out.nodes[i]);
    clean.values.push_back(out.values[i]);
    clean.slopes.push_back(out.slopes[i]);
  }
  clean.validate();
  return clean;
}

/// 2π ∫_0^r s^{1+2alpha} K(s) e^{u(s)} ds on the profile mesh: Gauss–Jacobi on
/// the first cell (exact for the weight), Gauss–Legendre on the rest.
inline double radial_mass(const RadialProfile& prof, const PotentialSpec& K, double r) {
  prof.validate();
  require(K.is_radial(), ErrorKind::invalid_argument, "radial mass needs a radial potential");
  require(r >= 0.0 && r <= prof.r_max() * (1.0 + 1e-12), ErrorKind::out_of_domain, "radius beyond the profile");
  const double al = prof.alpha;
  const double beta = 1.0 + 2.0 * al;
  const GaussRule& gl = gauss_legendre_unit(6);
  thread_local double cached = std::numeric_limits<double>::quiet_NaN();
  thread_local GaussRule gj;
  if (cached != al) {
    gj = gauss_jacobi_unit(beta, 6);
    cached = al;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < prof.nodes.size(); ++i) {
    double r0 = prof.nodes[i], r1 = std::min(prof.nodes[i + 1], r);
    if (r1 <= r0) break;
    double Kc = K.radial(0.5 * (r0 + r1));
    if (Kc == 0.0) continue;
    double cell = 0.0;
    if (r0 == 0.0) {
      for (std::size_t q = 0; q < gj.x.size(); ++q) cell += gj.w[q] * std::exp(prof(r1 * gj.x[q]));
      cell *= std::pow(r1, beta + 1.0);
    } else {
      for (std::size_t q = 0; q < gl.x.size(); ++q) {
        double s = r0 + (r1 - r0) * gl.x[q];
        cell += gl.w[q] * std::pow(s, beta) * std::exp(prof(s));
      }
      cell *= (r1 - r0);
    }
    acc += Kc * cell;
  }
  return 2.0 * std::numbers::pi * acc;
}

}  // namespace liouville
