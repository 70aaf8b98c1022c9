#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "liouville/core/grid_field.hpp"
#include "liouville/core/potential.hpp"
#include "liouville/core/weight.hpp"
#include "liouville/errors.hpp"

namespace liouville {

struct Dirichlet2D {
  double extent = 1.0;
  int n = 65;
  DomainShape shape = DomainShape::disk;
  double alpha = 0.0;
  PotentialSpec K;
  /// Boundary values, evaluated at the boundary nodes of the mask.
  std::function<double(Point)> boundary = [](Point) { return 0.0; };
  double newton_tol = 1e-8;
  int max_iter = 50;
};

struct DirichletResult {
  GridField field;
  int iterations = 0;
  double residual = 0.0;
};

/// Average of |x|^{2alpha} over the dual cell of every node; NaN outside the mask.
/// The node at the origin (odd n) gets its finite cell average like any other.
inline std::vector<double> dual_cell_weights(const GridField& g, double alpha) {
  std::vector<double> W(g.values().size(), std::numeric_limits<double>::quiet_NaN());
  if (alpha == 0.0) {
    for (std::size_t k = 0; k < W.size(); ++k)
      if (g.mask()[k]) W[k] = 1.0;
    return W;
  }
  ConicalWeight w(alpha);
  const double h = g.h(), area = h * h;
  for (int j = 0; j < g.n(); ++j)
    for (int i = 0; i < g.n(); ++i) {
      if (!g.in_domain(i, j)) continue;
      Point p = g.node(i, j);
      Box cell{{p.x - 0.5 * h, p.y - 0.5 * h}, {p.x + 0.5 * h, p.y + 0.5 * h}};
      W[g.index(i, j)] = weighted_area(cell, w) / area;
    }
  return W;
}

namespace detail {

/// Nodes where the 5-point stencil is complete; the rest of the mask is boundary.
inline std::vector<unsigned char> interior_nodes(const GridField& g) {
  std::vector<unsigned char> in(g.values().size(), 0);
  const int n = g.n();
  for (int j = 1; j + 1 < n; ++j)
    for (int i = 1; i + 1 < n; ++i)
      in[g.index(i, j)] = g.in_domain(i, j) && g.in_domain(i - 1, j) && g.in_domain(i + 1, j) &&
                          g.in_domain(i, j - 1) && g.in_domain(i, j + 1);
  return in;
}

inline std::vector<double> node_potential(const GridField& g, const PotentialSpec& K) {
  std::vector<double> out(g.values().size(), 0.0);
  for (int j = 0; j < g.n(); ++j)
    for (int i = 0; i < g.n(); ++i)
      if (g.in_domain(i, j)) out[g.index(i, j)] = K(g.node(i, j));
  return out;
}

}  // namespace detail

/// -Δ_h u - W K e^u at every node with a complete stencil, NaN elsewhere.
inline GridField residual(const GridField& u, double alpha, const PotentialSpec& K) {
  const int n = u.n();
  require(n >= 5, ErrorKind::invalid_argument, "residual needs at least 3 interior nodes per axis");
  GridField r(u.extent(), n, u.shape(), u.alpha());
  auto W = dual_cell_weights(u, alpha);
  const double ih2 = 1.0 / (u.h() * u.h());
  for (int j = 1; j + 1 < n; ++j)
    for (int i = 1; i + 1 < n; ++i) {
      double c = u.at(i, j), e = u.at(i + 1, j), wv = u.at(i - 1, j), no = u.at(i, j + 1), so = u.at(i, j - 1);
      if (!(std::isfinite(c) && std::isfinite(e) && std::isfinite(wv) && std::isfinite(no) && std::isfinite(so)))
        continue;
      double lap = (4.0 * c - e - wv - no - so) * ih2;
      r.at(i, j) = lap - W[u.index(i, j)] * K(u.node(i, j)) * std::exp(c);
    }
  return r;
}

/// Sup-norm over finite entries.
inline double sup_norm(const GridField& f) {
  double m = 0.0;
  for (double v : f.values())
    if (std::isfinite(v)) m = std::max(m, std::abs(v));
  return m;
}

/// Damped Newton for the 5-point scheme with Dirichlet data on the mask boundary.
/// The symbolic factorization is computed once and reused.
inline DirichletResult solve_dirichlet_full(const Dirichlet2D& pb) {
  require(pb.newton_tol > 0.0, ErrorKind::invalid_argument, "newton_tol must be positive");
  require(pb.max_iter >= 1, ErrorKind::invalid_argument, "max_iter must be at least 1");
  require(pb.alpha > -1.0 && pb.alpha <= 0.0, ErrorKind::invalid_weight, "alpha must lie in (-1, 0]");
  pb.K.validate();
  GridField u(pb.extent, pb.n, pb.shape, pb.alpha);
  const int n = u.n();
  auto interior = detail::interior_nodes(u);
  std::vector<int> id(u.values().size(), -1);
  int m = 0;
  for (std::size_t k = 0; k < id.size(); ++k)
    if (interior[k]) id[k] = m++;
  require(m > 0, ErrorKind::invalid_argument, "grid has no interior nodes");
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (u.in_domain(i, j) && !interior[u.index(i, j)]) {
        double g = pb.boundary(u.node(i, j));
        require(std::isfinite(g), ErrorKind::invalid_argument, "boundary data must be finite");
        u.at(i, j) = g;
      }
  auto W = dual_cell_weights(u, pb.alpha);
  auto Kn = detail::node_potential(u, pb.K);
  std::vector<double> src(m);  // W * K per unknown
  std::vector<std::pair<int, int>> where(m);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      int q = id[u.index(i, j)];
      if (q < 0) continue;
      src[q] = W[u.index(i, j)] * Kn[u.index(i, j)];
      where[q] = {i, j};
    }
  const double ih2 = 1.0 / (u.h() * u.h());
  const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};

  // Laplacian part and the Dirichlet contribution to the right-hand side.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(m) * 5);
  Eigen::VectorXd bc = Eigen::VectorXd::Zero(m);
  for (int q = 0; q < m; ++q) {
    auto [i, j] = where[q];
    trip.emplace_back(q, q, 4.0 * ih2);
    for (int s = 0; s < 4; ++s) {
      int ii = i + di[s], jj = j + dj[s];
      int r = id[u.index(ii, jj)];
      if (r >= 0)
        trip.emplace_back(q, r, -ih2);
      else
        bc[q] += u.at(ii, jj) * ih2;
    }
  }
  Eigen::SparseMatrix<double> A(m, m);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  ldlt.analyzePattern(A);
  ldlt.factorize(A);
  require(ldlt.info() == Eigen::Success, ErrorKind::non_convergence, "Laplacian factorization failed");
  // Harmonic extension of the boundary data as the starting point.
  Eigen::VectorXd x = ldlt.solve(bc);

  auto F = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd f = A * v - bc;
    for (int q = 0; q < m; ++q) f[q] -= src[q] * std::exp(v[q]);
    return f;
  };
  auto supn = [](const Eigen::VectorXd& f) {
    double s = f.cwiseAbs().maxCoeff();
    return std::isfinite(s) ? s : std::numeric_limits<double>::infinity();
  };
  Eigen::VectorXd f = F(x);
  double res = supn(f);
  int it = 0;
  Eigen::SparseMatrix<double> J = A;
  std::vector<int> diag(m);
  for (int q = 0; q < m; ++q) {
    // Locate the stored diagonal entry of column q once.
    for (Eigen::SparseMatrix<double>::InnerIterator e(J, q); e; ++e)
      if (e.row() == q) diag[q] = static_cast<int>(&e.valueRef() - J.valuePtr());
  }
  while (res > pb.newton_tol) {
    if (it >= pb.max_iter)
      throw Error(ErrorKind::non_convergence,
                  "Newton did not converge in " + std::to_string(pb.max_iter) + " iterations; last residual " +
                      std::to_string(res));
    ++it;
    for (int q = 0; q < m; ++q) J.valuePtr()[diag[q]] = 4.0 * ih2 - src[q] * std::exp(x[q]);
    Eigen::VectorXd dx;
    ldlt.factorize(J);
    if (ldlt.info() == Eigen::Success) {
      dx = ldlt.solve(-f);
    }
    if (ldlt.info() != Eigen::Success || !dx.allFinite()) {
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
      lu.compute(J);
      require(lu.info() == Eigen::Success, ErrorKind::non_convergence, "Newton Jacobian is singular");
      dx = lu.solve(-f);
    }
    double step = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= 30; ++halving, step *= 0.5) {
      Eigen::VectorXd trial = x + step * dx;
      Eigen::VectorXd ft = F(trial);
      double rt = supn(ft);
      if (rt < res) {
        x = std::move(trial);
        f = std::move(ft);
        res = rt;
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw Error(ErrorKind::non_convergence,
                  "Newton line search stalled; last residual " + std::to_string(res));
  }
  for (int q = 0; q < m; ++q) u.at(where[q].first, where[q].second) = x[q];
  return {std::move(u), it, res};
}

inline GridField solve_dirichlet(const Dirichlet2D& pb) { return solve_dirichlet_full(pb).field; }

}  // namespace liouville
