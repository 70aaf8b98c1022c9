#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "liouville/closed_form.hpp"
#include "liouville/solvers/dirichlet.hpp"
#include "liouville/solvers/radial.hpp"

using namespace liouville;
constexpr double pi = std::numbers::pi;

namespace {

double sup_error_vs_bubble(const RadialProfile& prof, double alpha, double b, double M, double r_max) {
  double mu = bubble_mu(alpha, b, M);
  double err = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    double r = r_max * i / 4000.0;
    err = std::max(err, std::abs(prof(r) - centered_bubble(alpha, b, mu, r)));
  }
  for (double x = -12; x < 0; x += 0.01) {
    double r = std::pow(10.0, x);
    err = std::max(err, std::abs(prof(r) - centered_bubble(alpha, b, mu, r)));
  }
  return err;
}

}  // namespace

TEST(Radial, ReproducesCenteredBubble) {
  for (auto [alpha, M, b] : {std::tuple{0.0, 3.0, 1.0}, {-0.5, 3.0, 1.0}, {-0.75, 1.0, 1.0}, {-0.3, 0.5, 2.5}}) {
    RadialIVP ivp{alpha, PotentialSpec::constant_value(b), M, 10.0, 1e-10};
    auto prof = solve_radial(ivp);
    EXPECT_LE(sup_error_vs_bubble(prof, alpha, b, M, 10.0), 1e-6) << "alpha=" << alpha << " M=" << M;
  }
}

TEST(Radial, UnitScaleBubbleIsTheLimitProfile) {
  double alpha = -0.4, b = 2.0;
  double M = std::log(8 * (1 + alpha) * (1 + alpha) / b);
  auto prof = solve_radial({alpha, PotentialSpec::constant_value(b), M, 10.0, 1e-10});
  for (double r : {0.0, 0.3, 1.0, 4.0, 10.0}) EXPECT_NEAR(prof(r), limit_bubble(alpha, b, b, r), 1e-7);
}

TEST(Radial, TinyCenterValueStaysHarmonic) {
  auto prof = solve_radial({-0.5, PotentialSpec::constant_value(1.0), -30.0, 1.0, 1e-10});
  for (double r = 0; r <= 1.0; r += 0.01) EXPECT_NEAR(prof(r), -30.0, 1e-6);
}

TEST(Radial, OverflowNamesTheRadius) {
  try {
    solve_radial({0.0, PotentialSpec::constant_value(1.0), 800.0, 1.0, 1e-8});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::blowup_overflow);
    EXPECT_NE(std::string(e.what()).find("radius"), std::string::npos);
  }
}

TEST(Radial, PiecewisePotentialGivesLimitBubble) {
  for (auto [alpha, a, b] : {std::tuple{0.0, 1.0, 1.0}, {-0.5, 1.0, 4.0}, {-0.25, 1.0, 2.0}}) {
    auto K = b == a ? PotentialSpec::constant_value(b) : PotentialSpec::piecewise({1.0}, {b, a}, a, b);
    double M = limit_bubble(alpha, a, b, 0.0);
    auto prof = solve_radial({alpha, K, M, 1e3, 1e-10});
    for (double r : {0.2, 0.999, 1.0, 1.5, 20.0, 900.0})
      EXPECT_NEAR(prof(r), limit_bubble(alpha, a, b, r), 1e-6) << r;
    double mass = radial_mass(prof, K, 1e3);
    double expected = optimal_total_curvature(alpha, a, b) - bubble_tail_mass(alpha, a, b, 1e3);
    EXPECT_NEAR(mass / expected, 1.0, 1e-6);
  }
}

TEST(Radial, MassProperties) {
  double alpha = -0.5, b = 1.0, M = 3.0;
  auto K = PotentialSpec::constant_value(b);
  auto prof = solve_radial({alpha, K, M, 1e4, 1e-10});
  EXPECT_EQ(radial_mass(prof, K, 0.0), 0.0);
  // Whole bubble carries 8π(1+alpha); half of it sits inside r = 1/mu.
  double mu = bubble_mu(alpha, b, M);
  EXPECT_NEAR(radial_mass(prof, K, 1e4), 8 * pi * (1 + alpha), 1e-3);
  EXPECT_NEAR(radial_mass(prof, K, 1.0 / mu), 4 * pi * (1 + alpha), 1e-8);
  double prev = 0.0;
  for (double r = 0.001; r < 10; r *= 1.3) {
    double m = radial_mass(prof, K, r);
    EXPECT_GE(m, prev);
    // u <= u(0) gives 2πb e^M r^{2+2alpha}/(2+2alpha).
    EXPECT_LE(m, 2 * pi * b * std::exp(M) * std::pow(r, 2 + 2 * alpha) / (2 + 2 * alpha) * (1 + 1e-9));
    prev = m;
  }
  for (std::size_t i = 1; i < prof.nodes.size(); ++i) EXPECT_LE(prof.values[i], prof.values[i - 1] + 1e-12);
}

TEST(Dirichlet, ConvergesOnZeroBoundary) {
  Dirichlet2D pb;
  pb.extent = 1.0;
  pb.n = 64;
  pb.K = PotentialSpec::constant_value(1.0);
  auto res = solve_dirichlet_full(pb);
  EXPECT_LE(res.residual, 1e-8);
  EXPECT_LE(sup_norm(residual(res.field, 0.0, pb.K)), 1e-8);
  // Positive source: interior values above the boundary minimum.
  EXPECT_GE(res.field.min_value(), -1e-14);
}

TEST(Dirichlet, LaplaceLimitIsHarmonicExtension) {
  Dirichlet2D pb;
  pb.n = 41;
  pb.K = PotentialSpec::zero();
  pb.boundary = [](Point p) { return p.x * p.x - p.y * p.y + 0.5 * p.x; };
  auto u = solve_dirichlet(pb);
  double bmin = 1e300, bmax = -1e300;
  for (int j = 0; j < u.n(); ++j)
    for (int i = 0; i < u.n(); ++i) {
      if (!u.in_domain(i, j)) continue;
      Point p = u.node(i, j);
      // The 5-point Laplacian is exact on quadratics.
      EXPECT_NEAR(u.at(i, j), pb.boundary(p), 1e-10);
      bmin = std::min(bmin, u.at(i, j));
      bmax = std::max(bmax, u.at(i, j));
    }
  double gmin = 1e300;
  for (double th = 0; th < 2 * pi; th += 1e-3) gmin = std::min(gmin, pb.boundary({std::cos(th), std::sin(th)}));
  EXPECT_GE(bmin, gmin - 0.05);
}

TEST(Dirichlet, SingularWeightSolveHasSmallResidual) {
  Dirichlet2D pb;
  pb.n = 65;
  pb.alpha = -0.5;
  // Below the existence threshold 2(1+alpha)^2 of the zero-data problem.
  pb.K = PotentialSpec::constant_value(0.3);
  pb.boundary = [](Point p) { return 0.3 * p.x; };
  auto res = solve_dirichlet_full(pb);
  EXPECT_LE(sup_norm(residual(res.field, pb.alpha, pb.K)), 1e-8);
}

TEST(Residual, ConstantFieldIsNegative) {
  auto u = GridField::sample(1.0, 33, DomainShape::disk, -0.5, [](Point) { return 0.7; });
  auto r = residual(u, -0.5, PotentialSpec::constant_value(1.5));
  int count = 0;
  for (double v : r.values())
    if (std::isfinite(v)) {
      EXPECT_LT(v, 0.0);
      ++count;
    }
  EXPECT_GT(count, 500);
}

TEST(Residual, SecondOrderOnSampledBubble) {
  // Away from the origin node the truncation error drops by ~4 per halving.
  double errs[3];
  int k = 0;
  for (int n : {33, 65, 129}) {
    auto u = GridField::sample(1.0, n, DomainShape::square, 0.0,
                               [](Point p) { return centered_bubble(0.0, 1.0, 1.5, norm(p)); });
    auto r = residual(u, 0.0, PotentialSpec::constant_value(1.0));
    double e = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        Point p = u.node(i, j);
        double d = norm(p);
        if (d > 0.25 && d < 0.75 && std::isfinite(r.at(i, j))) e = std::max(e, std::abs(r.at(i, j)));
      }
    errs[k++] = e;
  }
  EXPECT_GT(errs[0] / errs[1], 3.5);
  EXPECT_GT(errs[1] / errs[2], 3.5);
}

TEST(Dirichlet, CrossSolverAgreementImprovesWithResolution) {
  const double alpha = 0.0, b = 1.0, M = 1.0;
  double mu = bubble_mu(alpha, b, M);
  auto prof = solve_radial({alpha, PotentialSpec::constant_value(b), M, 2.0, 1e-10});
  double errs[2];
  int k = 0;
  for (int n : {64, 128}) {
    Dirichlet2D pb;
    pb.n = n;
    pb.K = PotentialSpec::constant_value(b);
    pb.boundary = [&](Point p) { return centered_bubble(alpha, b, mu, norm(p)); };
    auto u = solve_dirichlet(pb);
    double e = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (u.in_domain(i, j)) e = std::max(e, std::abs(u.at(i, j) - prof(norm(u.node(i, j)))));
    errs[k++] = e;
  }
  EXPECT_LT(errs[0], 1e-2);
  EXPECT_GT(errs[0] / errs[1], 3.0);
}
