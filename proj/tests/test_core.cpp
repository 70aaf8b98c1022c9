#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "liouville/core/geometry.hpp"
#include "liouville/core/grid_field.hpp"
#include "liouville/core/potential.hpp"
#include "liouville/core/quadrature.hpp"
#include "liouville/core/weight.hpp"

using namespace liouville;
constexpr double pi = std::numbers::pi;

TEST(Quadrature, GaussJacobiIsExactOnMonomials) {
  for (double beta : {-0.8, -0.5, 0.0, 0.6, 1.0}) {
    auto rule = gauss_jacobi_unit(beta, 6);
    for (int j = 0; j < 12; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < rule.x.size(); ++i) acc += rule.w[i] * std::pow(rule.x[i], j);
      EXPECT_NEAR(acc, 1.0 / (beta + j + 1.0), 1e-13) << "beta=" << beta << " j=" << j;
    }
  }
}

TEST(Weight, CenteredDiskMeasure) {
  EXPECT_NEAR(weighted_area(Disk{{0, 0}, 1.0}, ConicalWeight(0.0)), pi, 1e-14);
  EXPECT_NEAR(weighted_area(Disk{{0, 0}, 1.0}, ConicalWeight(-0.5)), 2.0 * pi, 1e-13);
  for (double a : {-0.9, -0.3}) {
    double R = 1.7;
    EXPECT_NEAR(weighted_area(Disk{{0.2, -0.1}, R}, ConicalWeight(a, {0.2, -0.1})),
                pi * std::pow(R, 2 + 2 * a) / (1 + a), 1e-12);
  }
}

TEST(Weight, RejectsExponentAtOrBelowMinusOne) {
  try {
    ConicalWeight w(-1.0);
    FAIL() << "expected invalid weight";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_weight);
  }
  ConicalWeight w;
  w.alpha = -1.2;
  EXPECT_THROW(weighted_area(Disk{{0, 0}, 1.0}, w), Error);
}

TEST(Weight, BoxWithSingularCorner) {
  // ∫_{[0,1]^2} |x|^{-1} dx = 2 log(1 + sqrt 2).
  double v = weighted_area(Box{{0, 0}, {1, 1}}, ConicalWeight(-0.5));
  EXPECT_NEAR(v, 2.0 * std::log(1.0 + std::sqrt(2.0)), 1e-10);
  // The full square is four copies.
  double full = weighted_area(Box{{-1, -1}, {1, 1}}, ConicalWeight(-0.5));
  EXPECT_NEAR(full, 8.0 * std::log(1.0 + std::sqrt(2.0)), 1e-9);
}

TEST(Weight, AdditiveOverDisjointCells) {
  for (double a : {-0.75, -0.25}) {
    ConicalWeight w(a, {0.3, 0.1});
    double whole = weighted_area(Box{{-1, -1}, {1, 1}}, w);
    double parts = 0.0;
    const int m = 5;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double x0 = -1 + 2.0 * i / m, y0 = -1 + 2.0 * j / m;
        parts += weighted_area(Box{{x0, y0}, {x0 + 2.0 / m, y0 + 2.0 / m}}, w);
      }
    EXPECT_NEAR(parts / whole, 1.0, 1e-9);
  }
}

TEST(Weight, OffCenterDiskAgreesWithPolygon) {
  for (double a : {-0.5, -0.8}) {
    for (Point c : {Point{0.3, 0.2}, Point{2.5, -1.0}}) {
      ConicalWeight w(a, c);
      Disk d{{0, 0}, 1.0};
      double exact = weighted_area(d, w);
      double poly = weighted_area(circle_polyline({0, 0}, 1.0, 4096), w);
      EXPECT_NEAR(poly / exact, 1.0, 5e-6) << "center " << c.x << "," << c.y;
    }
  }
}

TEST(Weight, CenterOnTheCircle) {
  // rho(theta) = 2R cos theta, so μ = (2R)^k/k · sqrt(pi) Γ((k+1)/2)/Γ(k/2+1).
  for (double a : {-0.25, -0.5, -0.8}) {
    double R = 1.3, k = 2 + 2 * a;
    double exact = std::pow(2 * R, k) / k * std::sqrt(pi) * std::tgamma((k + 1) / 2) / std::tgamma(k / 2 + 1);
    EXPECT_NEAR(weighted_area(Disk{{0, 0}, R}, ConicalWeight(a, {0.0, R})) / exact, 1.0, 1e-10);
  }
}

TEST(Weight, FarMeasureBounds) {
  // Weight |x + e|^{2 alpha}: center at distance 1, disks of radius r <= 1/2.
  for (double a : {-0.25, -0.5, -0.75})
    for (double r : {0.1, 0.4, 0.5}) {
      double mu = weighted_area(Disk{{0, 0}, r}, ConicalWeight(a, {-1.0, 0.0}));
      EXPECT_GE(mu, std::pow(1.5, 2 * a) * pi * r * r);
      EXPECT_LE(mu, std::pow(0.5, 2 * a) * pi * r * r);
    }
}

TEST(Weight, NearMeasureBounds) {
  // Weight eps^{2 alpha}|x + e/eps|^{2 alpha}; the center sits within 2r.
  for (double a : {-0.25, -0.5, -0.75})
    for (double eps : {0.1, 0.01})
      for (double r : {0.6 / eps, 1.0 / eps, 3.0 / eps}) {
        ConicalWeight w(a, {-1.0 / eps, 0.0}, std::pow(eps, 2 * a));
        double mu = weighted_area(Disk{{0, 0}, r}, w);
        EXPECT_GE(mu, std::pow(3.0, 2 * a) * pi * std::pow(eps * r, 2 * a) * r * r);
        EXPECT_LE(mu, 2.0 / std::pow(2.0, 2 * a) * pi / (1 + a) * r * r);
      }
}

TEST(Weight, LengthOfCircles) {
  EXPECT_NEAR(weighted_length(circle_polyline({0, 0}, 1.0, 4096), ConicalWeight(0.0)), 2 * pi, 1e-5);
  for (double a : {-0.5, -0.9})
    for (double R : {0.3, 2.0}) {
      double L = weighted_length(circle_polyline({1, 1}, R, 4096), ConicalWeight(a, {1, 1}));
      EXPECT_NEAR(L / (2 * pi * std::pow(R, 1 + a)), 1.0, 1e-6);
    }
}

TEST(Weight, LengthOfSegments) {
  Polyline seg{{0, 1}, {1, 1}};
  EXPECT_NEAR(weighted_length(seg, ConicalWeight(0.0)), 1.0, 1e-15);
  // Through the center: ∫_{-1}^{1} |t|^{-1/2} dt = 4.
  Polyline through{{-1, 0}, {1, 0}};
  EXPECT_NEAR(weighted_length(through, ConicalWeight(-0.5)), 4.0, 1e-8);
  Polyline bad{{0, 0}, {1, 0}};
  try {
    weighted_length(bad, ConicalWeight(-0.5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::singular_boundary);
  }
  EXPECT_NO_THROW(weighted_length(bad, ConicalWeight(0.0)));
}

TEST(Weight, HuberEqualityForCenteredCircles) {
  for (double a : {0.0, -0.3, -0.6, -0.9}) {
    ConicalWeight w(a, {0.5, -0.5});
    double L = weighted_length(circle_polyline({0.5, -0.5}, 1.3, 4096), w);
    double A = weighted_area(Disk{{0.5, -0.5}, 1.3}, w);
    EXPECT_NEAR(L * L / A / (4 * pi * (1 + a)), 1.0, 1e-6);
  }
}

TEST(Grid, InterpolationBasics) {
  GridField g(1.0, 17, DomainShape::square);
  for (int j = 0; j < g.n(); ++j)
    for (int i = 0; i < g.n(); ++i) g.at(i, j) = i % 2 == 0 ? 0.0 : 1.0;
  EXPECT_DOUBLE_EQ(g.interpolate(g.node(3, 4)), 1.0);
  Point mid = 0.5 * (g.node(2, 4) + g.node(3, 4));
  EXPECT_NEAR(g.interpolate(mid), 0.5, 1e-15);
  for (auto& v : g.values()) v = 2.5;
  EXPECT_NEAR(g.interpolate({0.013, -0.77}), 2.5, 1e-15);
  EXPECT_THROW(g.interpolate({1.5, 0.0}), Error);
}

TEST(Grid, DiskMaskAndOutOfDomain) {
  auto g = GridField::sample(1.0, 33, DomainShape::disk, 0.0, [](Point p) { return p.x; });
  EXPECT_TRUE(std::isnan(g.at(0, 0)));
  EXPECT_NEAR(g.interpolate({0.21, 0.3}), 0.21, 1e-14);
  try {
    g.interpolate({0.99, 0.99});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::out_of_domain);
  }
}

TEST(Grid, FieldFileRoundTrip) {
  auto g = GridField::sample(1.5, 20, DomainShape::disk, -0.25, [](Point p) { return std::sin(p.x) + p.y * p.y; });
  auto path = std::filesystem::temp_directory_path() / "liouville_roundtrip.field";
  write_field(g, path.string());
  auto h = read_field(path.string());
  std::filesystem::remove(path);
  EXPECT_EQ(h.n(), g.n());
  EXPECT_EQ(h.extent(), g.extent());
  EXPECT_EQ(h.alpha(), g.alpha());
  for (std::size_t k = 0; k < g.values().size(); ++k) {
    if (std::isnan(g.values()[k]))
      EXPECT_TRUE(std::isnan(h.values()[k]));
    else
      EXPECT_EQ(g.values()[k], h.values()[k]);
  }
}

TEST(Grid, RadialProfileHermite) {
  RadialProfile p;
  for (int i = 0; i <= 20; ++i) {
    double r = 0.1 * i;
    p.nodes.push_back(r);
    p.values.push_back(r * r * r);
    p.slopes.push_back(3 * r * r);
  }
  EXPECT_NEAR(p(0.55), 0.55 * 0.55 * 0.55, 1e-14);
  p.nodes[3] = p.nodes[2];
  EXPECT_THROW(p.validate(), Error);
}

TEST(Geometry, SelfIntersectionDetection) {
  Polyline square{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
  Polyline bowtie{{0, 0}, {1, 1}, {1, 0}, {0, 1}, {0, 0}};
  EXPECT_TRUE(is_simple(square));
  EXPECT_FALSE(is_simple(bowtie));
  EXPECT_TRUE(is_simple(circle_polyline({0, 0}, 1.0, 2000)));
  EXPECT_NEAR(signed_area(square), 1.0, 1e-15);
  EXPECT_TRUE(contains(square, {0.5, 0.5}));
  EXPECT_FALSE(contains(square, {1.5, 0.5}));
}

TEST(Potential, RangeChecks) {
  EXPECT_THROW(PotentialSpec::constant_value(3.0, 1.0, 2.0), Error);
  auto p = PotentialSpec::piecewise({0.5}, {4.0, 1.0}, 1.0, 4.0);
  EXPECT_EQ(p({0.1, 0.0}), 4.0);
  EXPECT_EQ(p({0.5, 0.0}), 1.0);
  auto q = p.pulled_back({0.0, 0.0}, 0.1);
  EXPECT_EQ(q({4.0, 0.0}), 4.0);
  EXPECT_EQ(q({6.0, 0.0}), 1.0);
  EXPECT_THROW(PotentialSpec::piecewise({0.5}, {5.0, 1.0}, 1.0, 4.0), Error);
}
