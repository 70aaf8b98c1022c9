#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "liouville/errors.hpp"

namespace liouville {

/// Nodes and weights on [0, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// Rule for ∫_0^1 x^beta g(x) dx, exact for polynomial g of degree < 2m.
/// Golub–Welsch on the Jacobi matrix of the weight (1+y)^beta on [-1, 1].
inline GaussRule gauss_jacobi_unit(double beta, int m) {
  require(beta > -1.0, ErrorKind::invalid_weight, "Gauss-Jacobi exponent must exceed -1");
  require(m >= 1, ErrorKind::invalid_argument, "Gauss rule needs at least one node");
  const double a = 0.0, b = beta;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (int n = 0; n < m; ++n) {
    double s = 2.0 * n + a + b;
    J(n, n) = n == 0 ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    if (n + 1 < m) {
      double k = n + 1.0;
      double t = 2.0 * k + a + b;
      double beta_k = 4.0 * k * (k + a) * (k + b) * (k + a + b) / (t * t * (t + 1.0) * (t - 1.0));
      J(n, n + 1) = J(n + 1, n) = std::sqrt(beta_k);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double mu0 = std::exp((a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                              std::lgamma(a + b + 2.0));
  GaussRule rule;
  rule.x.resize(m);
  rule.w.resize(m);
  // Map y in [-1,1] to x = (1+y)/2; (1+y)^b dy = 2^{b+1} x^b dx.
  const double jac = std::pow(0.5, b + 1.0);
  for (int i = 0; i < m; ++i) {
    double v0 = es.eigenvectors()(0, i);
    rule.x[i] = 0.5 * (1.0 + es.eigenvalues()(i));
    rule.w[i] = mu0 * v0 * v0 * jac;
  }
  return rule;
}

inline const GaussRule& gauss_legendre_unit(int m) {
  // Small fixed orders are shared; they are built once and never mutated.
  static const std::vector<GaussRule> table = [] {
    std::vector<GaussRule> t(33);
    for (int k = 1; k <= 32; ++k) t[k] = gauss_jacobi_unit(0.0, k);
    return t;
  }();
  require(m >= 1 && m <= 32, ErrorKind::invalid_argument, "Gauss-Legendre order out of range");
  return table[m];
}

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

/// Globally adaptive Gauss–Kronrod (15 points): bisect the interval with the
/// largest error estimate until the total estimate meets the relative
/// tolerance, the floor of a few ulps of the L1 norm, or the interval budget.
template <class F>
QuadResult integrate_adaptive(F&& f, double lo, double hi, double rel_tol = 1e-10, unsigned max_depth = 18) {
  QuadResult r;
  if (lo == hi) return r;
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  struct Piece {
    double a, b, value, error, l1;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  auto eval = [&](double a, double b) {
    Piece p{a, b, 0.0, 0.0, 0.0};
    p.value = GK::integrate(f, a, b, 0, 0.0, &p.error, &p.l1);
    return p;
  };
  std::priority_queue<Piece> heap;
  heap.push(eval(lo, hi));
  double total = heap.top().value, err = heap.top().error, l1 = heap.top().l1;
  const std::size_t budget = std::size_t{1} << std::min(max_depth, 14u);
  const double eps = std::numeric_limits<double>::epsilon();
  while (err > std::max(rel_tol * std::abs(total), 50.0 * eps * l1) && heap.size() < budget) {
    Piece p = heap.top();
    heap.pop();
    double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) {
      // Interval exhausted at machine resolution; keep it as is.
      heap.push(p);
      break;
    }
    Piece left = eval(p.a, mid), right = eval(mid, p.b);
    total += left.value + right.value - p.value;
    err += left.error + right.error - p.error;
    l1 += left.l1 + right.l1 - p.l1;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  total = 0.0;
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  r.value = total;
  r.error = err;
  return r;
}

/// ∫_a^b f on 0 < a < b with 10-point Gauss cells of ratio at most 1.25,
/// split at the given break points (jumps of f).
template <class F>
double integrate_geometric(F&& f, double a, double b, const std::vector<double>& breaks = {}) {
  if (!(b > a)) return 0.0;
  const GaussRule& gl = gauss_legendre_unit(10);
  std::vector<double> cuts{a};
  for (double br : breaks)
    if (br > a && br < b) cuts.push_back(br);
  std::sort(cuts.begin() + 1, cuts.end());
  cuts.push_back(b);
  double acc = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    double lo = cuts[c], hi = cuts[c + 1];
    int m = std::max(1, static_cast<int>(std::ceil(std::log(hi / lo) / std::log(1.25))));
    double q = std::pow(hi / lo, 1.0 / m);
    for (int j = 0; j < m; ++j) {
      double x0 = lo * std::pow(q, j), x1 = j + 1 == m ? hi : lo * std::pow(q, j + 1);
      double cell = 0.0;
      for (std::size_t k = 0; k < gl.x.size(); ++k) cell += gl.w[k] * f(x0 + (x1 - x0) * gl.x[k]);
      acc += cell * (x1 - x0);
    }
  }
  return acc;
}

/// ∫_0^r s^beta g(s) ds by a 16-point Gauss–Jacobi rule; g smooth on [0, r].
template <class G>
double integrate_jacobi_head(G&& g, double beta, double r) {
  if (!(r > 0.0)) return 0.0;
  thread_local double cached = std::numeric_limits<double>::quiet_NaN();
  thread_local GaussRule rule;
  if (cached != beta) {
    rule = gauss_jacobi_unit(beta, 16);
    cached = beta;
  }
  double acc = 0.0;
  for (std::size_t q = 0; q < rule.x.size(); ++q) acc += rule.w[q] * g(r * rule.x[q]);
  return acc * std::pow(r, beta + 1.0);
}

/// Double-exponential rule for integrands with endpoint singularities.
template <class F>
QuadResult integrate_endpoint_singular(F&& f, double lo, double hi, double rel_tol = 1e-10) {
  QuadResult r;
  if (lo == hi) return r;
  boost::math::quadrature::tanh_sinh<double> ts(12);
  double l1 = 0.0;
  r.value = ts.integrate(f, lo, hi, rel_tol, &r.error, &l1);
  return r;
}

}  // namespace liouville
