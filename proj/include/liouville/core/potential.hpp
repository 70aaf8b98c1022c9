#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "liouville/core/geometry.hpp"
#include "liouville/core/grid_field.hpp"
#include "liouville/errors.hpp"

namespace liouville {

enum class PotentialKind { constant, piecewise_radial, sampled };

/// The coefficient K together with its structural constants a, b, sigma_bar,
/// B and rho_bar. Evaluation happens at origin + scale * y so that a rescaled
/// problem can keep referring to the original potential.
struct PotentialSpec {
  PotentialKind kind = PotentialKind::constant;
  double a = 1.0;
  double b = 1.0;
  double sigma_bar = 1.0;
  double B = 0.0;
  double rho_bar = 0.5;

  double value = 1.0;
  /// Piecewise radial: levels[k] on [breaks[k-1], breaks[k]), breaks increasing.
  std::vector<double> breaks;
  std::vector<double> levels;
  std::shared_ptr<const GridField> samples;

  Point origin{};
  double scale = 1.0;
  /// Tests only: K = 0, which turns the equation into Laplace's.
  bool disabled = false;

  static PotentialSpec constant_value(double k, double a, double b) {
    PotentialSpec p;
    p.kind = PotentialKind::constant;
    p.value = k;
    p.a = a;
    p.b = b;
    p.sigma_bar = b / a;
    p.validate();
    return p;
  }
  static PotentialSpec constant_value(double k) { return constant_value(k, k, k); }

  static PotentialSpec piecewise(std::vector<double> breaks, std::vector<double> levels, double a, double b) {
    PotentialSpec p;
    p.kind = PotentialKind::piecewise_radial;
    p.breaks = std::move(breaks);
    p.levels = std::move(levels);
    p.a = a;
    p.b = b;
    p.sigma_bar = b / a;
    p.validate();
    return p;
  }

  static PotentialSpec sampled_grid(std::shared_ptr<const GridField> g, double a, double b) {
    PotentialSpec p;
    p.kind = PotentialKind::sampled;
    p.samples = std::move(g);
    p.a = a;
    p.b = b;
    p.sigma_bar = b / a;
    p.validate();
    return p;
  }

  static PotentialSpec zero() {
    PotentialSpec p;
    p.disabled = true;
    return p;
  }

  void validate() const {
    if (disabled) return;
    require(a > 0.0 && a <= b && std::isfinite(b), ErrorKind::invalid_argument, "potential bounds need 0 < a <= b");
    require(sigma_bar >= 1.0, ErrorKind::invalid_argument, "sigma_bar must be at least 1");
    require(B >= 0.0, ErrorKind::invalid_argument, "B must be nonnegative");
    require(rho_bar > 0.0 && rho_bar <= 0.5, ErrorKind::invalid_argument, "rho_bar must lie in (0, 1/2]");
    require(scale > 0.0, ErrorKind::invalid_argument, "potential pull-back scale must be positive");
    const double slack = 1e-12 * b;
    auto in_range = [&](double k) { return k >= a - slack && k <= b + slack; };
    switch (kind) {
      case PotentialKind::constant:
        require(in_range(value), ErrorKind::invalid_argument, "constant potential outside [a, b]");
        break;
      case PotentialKind::piecewise_radial:
        require(levels.size() == breaks.size() + 1, ErrorKind::invalid_argument,
                "piecewise potential needs one more level than breakpoints");
        for (std::size_t k = 0; k < breaks.size(); ++k) {
          require(breaks[k] > 0.0, ErrorKind::invalid_argument, "breakpoints must be positive");
          if (k > 0) require(breaks[k] > breaks[k - 1], ErrorKind::invalid_argument, "breakpoints must increase");
        }
        for (double k : levels) require(in_range(k), ErrorKind::invalid_argument, "annular constant outside [a, b]");
        break;
      case PotentialKind::sampled:
        require(samples != nullptr, ErrorKind::invalid_argument, "sampled potential has no grid");
        for (std::size_t k = 0; k < samples->values().size(); ++k)
          if (samples->mask()[k])
            require(in_range(samples->values()[k]), ErrorKind::invalid_argument, "sampled potential outside [a, b]");
        break;
    }
  }

  bool is_radial() const { return disabled || kind != PotentialKind::sampled; }

  /// K at radius r from the pull-back origin, for radial kinds.
  double radial(double r) const {
    if (disabled) return 0.0;
    if (kind == PotentialKind::constant) return value;
    require(kind == PotentialKind::piecewise_radial, ErrorKind::invalid_argument, "potential is not radial");
    double rr = r * scale;
    auto it = std::upper_bound(breaks.begin(), breaks.end(), rr);
    return levels[static_cast<std::size_t>(it - breaks.begin())];
  }

  double operator()(Point y) const {
    if (disabled) return 0.0;
    Point x = origin + scale * y;
    switch (kind) {
      case PotentialKind::constant:
        return value;
      case PotentialKind::piecewise_radial: {
        auto it = std::upper_bound(breaks.begin(), breaks.end(), norm(x));
        return levels[static_cast<std::size_t>(it - breaks.begin())];
      }
      case PotentialKind::sampled:
        return samples->interpolate(x);
    }
    return value;
  }

  /// Radii (in the pulled-back variable) where a radial K jumps.
  std::vector<double> radial_breaks() const {
    std::vector<double> out;
    if (kind == PotentialKind::piecewise_radial && !disabled)
      for (double r : breaks) out.push_back(r / scale);
    return out;
  }

  double sup() const { return disabled ? 0.0 : b; }

  /// The same potential seen from the rescaled variable y = (x - x0)/lambda.
  PotentialSpec pulled_back(Point x0, double lambda) const {
    PotentialSpec p = *this;
    p.origin = origin + scale * x0;
    p.scale = scale * lambda;
    return p;
  }
};

}  // namespace liouville
