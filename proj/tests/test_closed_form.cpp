#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "liouville/closed_form.hpp"

using namespace liouville;
constexpr double pi = std::numbers::pi;

TEST(Family, CenterValueOfStandardBubble) {
  EXPECT_NEAR(family_u({0, 1, 1, 1}, 0.0), std::log(8.0), 1e-15);
}

TEST(Family, BranchesAgreeAtKink) {
  BubbleParams p{-0.5, 1, 4, 100};
  double expected = std::log(8 * 0.25 / 4 * std::pow(100.0, 1.0) / 4);
  double left = family_u(p, 1.0 / p.n);
  double right = family_u(p, 1.0 / p.n * (1 + 1e-14));
  EXPECT_NEAR(left, expected, 1e-12);
  EXPECT_NEAR(right, expected, 1e-12);
  // u is C^1 across the kink: both slopes equal -2(1+alpha)n.
  double sl = family_u_prime(p, 1.0 / p.n);
  double sr = family_u_prime(p, 1.0 / p.n * (1 + 1e-12));
  EXPECT_NEAR(sl, -2 * (1 + p.alpha) * p.n, 1e-8);
  EXPECT_NEAR(sr, -2 * (1 + p.alpha) * p.n, 1e-6);
}

TEST(Family, UnitRadiusWhenRatioIsOne) {
  for (double n : {1.0, 3.0, 250.0}) {
    EXPECT_NEAR(family_u({0, 1, 1, n}, 1.0), std::log(8 * n * n / std::pow(1 + n * n, 2)), 1e-12);
  }
  EXPECT_THROW(family_u({0, 1, 1, 2}, 1.01), Error);
}

TEST(Family, PotentialLevels) {
  BubbleParams p{-0.25, 1, 2, 10};
  EXPECT_EQ(family_K(p, 0.0), 2.0);
  EXPECT_EQ(family_K(p, 1.0), 1.0);
  EXPECT_EQ(family_K({0, 3, 3, 10}, 0.5), 3.0);
  auto K = family_potential(p);
  EXPECT_EQ(K.radial(0.05), 2.0);
  EXPECT_EQ(K.radial(0.2), 1.0);
}

TEST(LimitBubble, CenterAndContinuity) {
  for (auto [a, b, al] : {std::tuple{1.0, 1.0, 0.0}, {1.0, 4.0, -0.5}, {2.0, 3.0, -0.8}}) {
    double L0 = std::log(8 * (1 + al) * (1 + al) / b);
    EXPECT_NEAR(limit_bubble(al, a, b, 0.0), L0, 1e-15);
    EXPECT_NEAR(limit_bubble(al, a, b, 1.0 - 1e-15), L0 - std::log(4.0), 1e-12);
    EXPECT_NEAR(limit_bubble(al, a, b, 1.0), L0 - std::log(4.0), 1e-12);
  }
  EXPECT_NEAR(limit_bubble(0, 1, 1, 0), std::log(8.0), 1e-15);
}

TEST(SupInf, ExamplesAndBound) {
  EXPECT_NEAR(supinf_combination({0, 1, 1, 1}).value(), std::log(16.0), 1e-14);
  EXPECT_NEAR(supinf_combination({0, 1, 1, 1e6}).value(), std::log(64.0), 1e-10);
  EXPECT_NEAR(supinf_bound(0, 1, 1), std::log(64.0), 1e-14);
  EXPECT_NEAR(supinf_bound(-0.5, 1, 1), 2 * std::log(2.0), 1e-14);
  EXPECT_NEAR(supinf_bound(0, 1, 4), 1.5 * std::log(2.0), 1e-14);
  for (auto [al, a, b] : {std::tuple{0.0, 1.0, 1.0}, {-0.5, 1.0, 4.0}, {-0.25, 1.0, 2.0}, {-0.9, 0.5, 3.0}}) {
    double prev = -1e300;
    for (double n = 1; n <= 1e7; n *= 3.7) {
      auto c = supinf_combination({al, a, b, n});
      EXPECT_NEAR(c.closed_form, c.from_family, 1e-10);
      EXPECT_LE(c.value(), supinf_bound(al, a, b) + 1e-14);
      EXPECT_GT(c.value(), prev);
      prev = c.value();
    }
  }
}

TEST(TotalCurvature, MatchesOptimalValue) {
  EXPECT_NEAR(bubble_total_curvature(0, 1, 1).value, 8 * pi, 8 * pi * 1e-9);
  EXPECT_NEAR(bubble_total_curvature(-0.5, 1, 1).value, 4 * pi, 4 * pi * 1e-9);
  EXPECT_NEAR(bubble_total_curvature(-0.5, 1, 4).value, 3 * pi, 3 * pi * 1e-9);
  EXPECT_NEAR(bubble_total_curvature(-0.9, 1, 9, 50.0).value, optimal_total_curvature(-0.9, 1, 9), 1e-8);
  EXPECT_THROW(bubble_total_curvature(0, 1, 1, 5.0), Error);
}

TEST(Family, RadiallyNonIncreasing) {
  for (BubbleParams p : {BubbleParams{0, 1, 1, 7}, BubbleParams{-0.5, 1, 4, 100}, BubbleParams{-0.9, 2, 3, 1e4}}) {
    double prev = family_u(p, 0.0);
    for (int i = 1; i <= 10000; ++i) {
      double v = family_u(p, i / 10000.0);
      EXPECT_LE(v, prev + 1e-13);
      prev = v;
    }
  }
}

TEST(Family, RescaledConvergesToLimitBubble) {
  for (BubbleParams p : {BubbleParams{0, 1, 1, 1e6}, BubbleParams{-0.5, 1, 4, 1e6}, BubbleParams{-0.25, 1, 2, 1e6}}) {
    for (double r : {0.5, 1.0, 2.0}) {
      double v = family_u(p, r / p.n) - family_u(p, 0.0);
      double U = limit_bubble(p.alpha, p.a, p.b, r) - limit_bubble(p.alpha, p.a, p.b, 0.0);
      EXPECT_NEAR(v, U, 1e-3);
    }
  }
}

TEST(Family, SolvesTheRadialEquation) {
  const double h = 1e-5;
  for (BubbleParams p : {BubbleParams{0, 1, 1, 3}, BubbleParams{-0.5, 1, 4, 10}, BubbleParams{-0.25, 1, 2, 5}}) {
    for (double r = 0.02; r < 0.99; r += 0.0137) {
      if (std::abs(r - 1.0 / p.n) < 3 * h) continue;
      double um = family_u(p, r - h), u0 = family_u(p, r), up = family_u(p, r + h);
      double lap = (up - 2 * u0 + um) / (h * h) + (up - um) / (2 * h * r);
      double res = -lap - std::pow(r, 2 * p.alpha) * family_K(p, r) * std::exp(u0);
      EXPECT_LE(std::abs(res), 1e-4) << "r=" << r;
    }
  }
}
