#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "liouville/blowup.hpp"
#include "liouville/closed_form.hpp"

using namespace liouville;
constexpr double pi = std::numbers::pi;

namespace {

double bubble_mass(double alpha, double mu, double r) {
  double q = std::pow(mu * r, 2 + 2 * alpha);
  return 8 * pi * (1 + alpha) * q / (1 + q);
}

// Off-center smooth bump used where only change-of-variables matters.
double bump(Point p) {
  Point d = p - Point{0.3, 0.1};
  return 3.0 - 20.0 * (d.x * d.x + d.y * d.y);
}

}  // namespace

TEST(Scales, DeltaFormula) {
  auto r = scales_from_peak(10.0, {0.2, 0.0}, -0.5, 0.1);
  EXPECT_NEAR(r.delta, std::exp(-10.0), 1e-18);
}

TEST(Scales, PeakAtSingularityIsCaseOne) {
  auto r = scales_from_peak(8.0, {0.0, 0.0}, -0.25, 0.1);
  EXPECT_EQ(r.case_tag, BlowupCase::I);
  EXPECT_FALSE(r.tau_defined);
  EXPECT_TRUE(std::isnan(r.tau));
  EXPECT_DOUBLE_EQ(r.L_n, 0.1 / r.delta);
  EXPECT_THROW(subcase_classify(1.0, 0.0, r.tau, 0.1, r.case_tag), Error);
}

TEST(Scales, RegularWeightGivesTauEqualDelta) {
  for (Point x : {Point{0.5, 0.0}, Point{1e-3, 2e-3}})
    EXPECT_DOUBLE_EQ(scales_from_peak(6.0, x, 0.0, 0.1).tau, scales_from_peak(6.0, x, 0.0, 0.1).delta);
}

TEST(Scales, TauDeltaRelation) {
  for (double a : {-0.9, -0.5, -0.25, 0.0})
    for (double M : {2.0, 10.0, 40.0})
      for (double d : {1e-4, 0.03, 0.7}) {
        auto r = scales_from_peak(M, {d, 0.0}, a, 0.1);
        double want = std::pow(r.delta / d, 1 + a);
        EXPECT_NEAR(r.tau / d / want, 1.0, 1e-12) << a << " " << M << " " << d;
      }
}

TEST(Scales, CaseTagUsesThreshold) {
  double M = 10.0, a = -0.5;
  double delta = std::exp(-M / (2 * (1 + a)));
  EXPECT_EQ(scales_from_peak(M, {10 * delta, 0}, a, 0.1).case_tag, BlowupCase::I);
  EXPECT_EQ(scales_from_peak(M, {10.5 * delta, 0}, a, 0.1).case_tag, BlowupCase::II);
  auto r = scales_from_peak(M, {0.1, 0}, a, 0.1);
  EXPECT_DOUBLE_EQ(r.L_n, 0.1 / r.tau);
}

TEST(Scales, DilationKeepsCase) {
  // u_λ(x) = u(λx) + (2+2α) log λ has peak M + (2+2α) log λ at x*/λ.
  for (double a : {-0.5, 0.0})
    for (double M : {4.0, 9.0})
      for (double d : {1e-3, 1e-2, 0.2})
        for (double lam : {0.1, 3.0, 50.0}) {
          auto r0 = scales_from_peak(M, {d, 0}, a, 0.1);
          auto r1 = scales_from_peak(M + (2 + 2 * a) * std::log(lam), {d / lam, 0}, a, 0.1);
          EXPECT_EQ(r0.case_tag, r1.case_tag);
          EXPECT_NEAR(r1.ratio_delta / r0.ratio_delta, 1.0, 1e-12);
        }
}

TEST(Scales, ThresholdCarriesConeFactorInCaseOne) {
  EXPECT_NEAR(critical_threshold(BlowupCase::II, -0.5, 4.0), 4 * pi * 1.5, 1e-12);
  EXPECT_NEAR(critical_threshold(BlowupCase::I, -0.5, 4.0), 0.5 * 4 * pi * 1.5, 1e-12);
}

TEST(Peak, QuadraticRefinementRecoversOffGridMaximum) {
  Point c{0.0123, -0.0217};
  auto g = GridField::sample(1.0, 129, DomainShape::disk, 0.0, [&](Point p) {
    Point d = p - c;
    return 5.0 - 3.0 * d.x * d.x - 2.0 * d.y * d.y - d.x * d.y;
  });
  auto pk = find_peak(g, {{0, 0}, 0.5});
  EXPECT_LT(distance(pk.x, c), 1e-10);
  EXPECT_NEAR(pk.M, 5.0, 1e-12);
  EXPECT_GT(distance(pk.x_grid, c), 1e-3);
  EXPECT_FALSE(pk.on_boundary);
}

TEST(Peak, MaximumOnDiskEdgeIsFlagged) {
  auto g = GridField::sample(1.0, 65, DomainShape::disk, 0.0, [](Point p) { return p.x; });
  auto r = blowup_scales(g, {{0, 0}, 0.5}, 0.0, 0.1);
  EXPECT_TRUE(r.boundary_max);
}

TEST(Rescale, IdentityScaleSubtractsPeak) {
  auto g = GridField::sample(1.0, 65, DomainShape::disk, 0.0, [](Point p) { return 2.0 - norm(p) * norm(p); });
  auto v = rescale(g, {0, 0}, 1.0, 65, 1.0);
  double worst = 0.0;
  for (int j = 0; j < 65; ++j)
    for (int i = 0; i < 65; ++i)
      if (g.in_domain(i, j)) worst = std::max(worst, std::abs(v.at(i, j) - (g.at(i, j) - 2.0)));
  EXPECT_LE(worst, 1e-12);
  EXPECT_EQ(v.interpolate({0, 0}), 0.0);
}

TEST(Rescale, WindowOutsideDomainIsRejected) {
  auto g = GridField::sample(1.0, 33, DomainShape::disk, 0.0, [](Point) { return 0.0; });
  try {
    rescale(g, {0.5, 0}, 0.2, 33, 3.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::out_of_domain);
  }
}

TEST(Rescale, PreservesWeightedMass) {
  auto g = GridField::sample(1.0, 257, DomainShape::disk, -0.5, bump);
  auto K = PotentialSpec::constant_value(1.0);
  Point xs{0.3, 0.1};
  double rho = 0.2, lam = 0.05;
  GridDiskMass orig(g, ConicalWeight(-0.5), K, xs);
  auto v = rescale(g, xs, lam, 257, 4.2);
  auto w = rescaled_weight(-0.5, xs, lam, g.interpolate(xs));
  GridDiskMass resc(v, w, K, {});
  EXPECT_NEAR(resc(rho / lam) / orig(rho), 1.0, 1e-3);
}

TEST(CriticalRadius, NeverReachedReturnsLn) {
  auto c = critical_radius([](double l) { return bubble_mass(0.0, 1.0, l); }, 8 * pi, 1e4);
  EXPECT_FALSE(c.reached);
  EXPECT_EQ(c.l_n, 1e4);
  EXPECT_NEAR(c.mass_at_l / (8 * pi), 1.0, 1e-7);
}

TEST(CriticalRadius, MatchesMassInverse) {
  // m(l) = 8π q/(1+q) = T  ⇔  q = T/(8π − T).
  double T = 4 * pi * 1.5;
  auto c = critical_radius([](double l) { return bubble_mass(0.0, 2.0, l); }, T, 100.0);
  EXPECT_TRUE(c.reached);
  double q = T / (8 * pi - T);
  EXPECT_NEAR(c.l_n, std::sqrt(q) / 2.0, 1e-8);
  EXPECT_LE(c.mass_at_l, T);
}

TEST(CriticalRadius, MonotoneUnderFieldOrdering) {
  auto g = GridField::sample(2.0, 257, DomainShape::disk, 0.0,
                             [](Point p) { return centered_bubble(0.0, 1.0, 4.0, norm(p)); });
  auto g2 = GridField::sample(2.0, 257, DomainShape::disk, 0.0,
                              [](Point p) { return centered_bubble(0.0, 1.0, 4.0, norm(p)) + std::log(2.0); });
  auto K = PotentialSpec::constant_value(1.0);
  ConicalWeight w(0.0);
  double T = 4 * pi;
  auto c1 = critical_radius(g, w, K, T, 1.9);
  auto c2 = critical_radius(g2, w, K, T, 1.9);
  EXPECT_TRUE(c1.reached);
  EXPECT_LT(c2.l_n, c1.l_n);
  // Half the bubble's mass sits inside q = 1, i.e. r = 1/μ.
  EXPECT_NEAR(c1.l_n, 0.25, 2e-3);
}

TEST(Subcases, Classification) {
  EXPECT_EQ(subcase_classify(1.0, 10.0, 1.0, 0.1, BlowupCase::II), Subcase::i);
  EXPECT_EQ(subcase_classify(1.0, 0.001, 1.0, 0.1, BlowupCase::II), Subcase::ii);
  EXPECT_EQ(subcase_classify(1.0, 0.125, 1.0, 0.125, BlowupCase::II), Subcase::i);
  try {
    subcase_classify(1.0, 1.0, 1.0, 0.1, BlowupCase::I);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_case);
  }
}

TEST(Profiles, RadialFieldMaxEqualsMean) {
  auto g = GridField::sample(1.0, 257, DomainShape::disk, 0.0,
                             [](Point p) { return centered_bubble(0.0, 1.0, 3.0, norm(p)); });
  std::vector<double> radii;
  for (double r = 0.05; r < 0.9; r += 0.05) radii.push_back(r);
  auto pr = circle_max_profile(g, radii);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    double u = centered_bubble(0.0, 1.0, 3.0, radii[i]);
    EXPECT_NEAR(pr.max.values[i], u, 2e-3);
    EXPECT_NEAR(pr.mean.values[i], u, 2e-3);
    if (i) {
      EXPECT_LE(pr.max.values[i], pr.max.values[i - 1]);
    }
  }
}

TEST(Decay, StandardBubbleSlope) {
  auto v = [](double r) { return centered_bubble(0.0, 1.0, 1.0, r) - centered_bubble(0.0, 1.0, 1.0, 0.0); };
  auto d = decay_audit_radial(v, [](double) { return 1.0; }, 0.0, 1.0, 1e2, 1e4, 1e8);
  EXPECT_NEAR(d.slope, -4.0, 1e-3);
  // Tail mass beyond r is 8π/(1+r²).
  EXPECT_NEAR(d.tail_exponent, 2.0, 1e-3);
  EXPECT_LE(d.bound_margin, 0.0);
}

TEST(Decay, LimitBubbleSlopeAndMeanBound) {
  struct Case {
    double alpha, a, b;
  };
  for (Case c : {Case{-0.5, 1, 4}, Case{-0.25, 1, 2}, Case{0, 1, 1}}) {
    auto v = [&](double r) { return limit_bubble(c.alpha, c.a, c.b, r); };
    auto K = [&](double r) { return limit_bubble_K(c.a, c.b, r); };
    double sb = c.b / c.a;
    auto d = decay_audit_radial(v, K, c.alpha, sb, 1e8, 1e14, 1e40, {1.0});
    double want = -2 * (1 + c.alpha) * (1 + std::sqrt(c.a / c.b));
    EXPECT_NEAR(d.slope / want, 1.0, 1e-3) << c.alpha;
    // The mean bound v̄ ≥ −2(1+1/√σ̄)log r + C2 holds with a finite C2.
    EXPECT_TRUE(std::isfinite(d.mean_C2));
  }
}

TEST(Decay, ShortRangeIsRejected) {
  auto v = [](double r) { return -4 * std::log1p(r); };
  try {
    decay_audit_radial(v, [](double) { return 1.0; }, 0.0, 1.0, 1.0, 5.0, 100.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::insufficient_tail);
  }
}

TEST(Sharpness, Thresholds) {
  double T = 4 * pi * 1.5;
  EXPECT_TRUE(sharpness_test(optimal_total_curvature(0.0, 1.0, 4.0), 4.0));
  EXPECT_FALSE(sharpness_test(1e-3, 4.0));
  EXPECT_TRUE(sharpness_test(T, 4.0));
  EXPECT_FALSE(sharpness_test(std::nextafter(T, 0.0), 4.0));
}

TEST(Sharpness, GridBubbleAndFlatField) {
  auto K = PotentialSpec::constant_value(1.0);
  auto bub = GridField::sample(1.0, 257, DomainShape::disk, 0.0,
                               [](Point p) { return centered_bubble(0.0, 1.0, 30.0, norm(p)); });
  auto flat = GridField::sample(1.0, 65, DomainShape::disk, 0.0, [](Point) { return -20.0; });
  // About 99.9% of 8π sits in the disk: above 6π, below 8π.
  EXPECT_TRUE(sharpness_test(bub, {0, 0}, 0.9, ConicalWeight(0.0), K, 4.0));
  EXPECT_FALSE(sharpness_test(bub, {0, 0}, 0.9, ConicalWeight(0.0), K, 1.0));
  EXPECT_FALSE(sharpness_test(flat, {0, 0}, 0.9, ConicalWeight(0.0), K, 1.0));
}

TEST(Neck, FamilyNeckMassDecreases) {
  double prev = std::numeric_limits<double>::infinity(), last = 0.0, thr = 0.0;
  for (double n : {10.0, 100.0, 1e3, 1e4}) {
    BubbleParams p{0.0, 1.0, 1.0, n};
    auto r = analyze_radial_blowup([&](double s) { return family_u(p, std::min(s, 1.0)); },
                                   [&](double s) { return family_K(p, std::min(s, 1.0)); }, 0.0, 1.0, 0.5, 1.0,
                                   {1.0 / n});
    EXPECT_EQ(r.case_tag, BlowupCase::I);
    EXPECT_LE(r.l_n, r.L_n);
    EXPECT_LT(r.neck_mass, prev) << n;
    prev = last = r.neck_mass;
    thr = r.threshold;
  }
  EXPECT_LT(last, 0.05 * thr);
}

TEST(Analyze, OffCenterPeakOnGrid) {
  // A sharp regular bubble away from a weak cone point: case II.
  Point x0{0.31, -0.12};
  auto g = GridField::sample(1.0, 257, DomainShape::disk, -0.25, [&](Point p) {
    return centered_bubble(0.0, 1.0, 20.0, distance(p, x0));
  });
  auto K = PotentialSpec::constant_value(1.0);
  auto r = analyze_blowup(g, {{0, 0}, 0.6}, K, 0.3);
  EXPECT_EQ(r.case_tag, BlowupCase::II);
  EXPECT_TRUE(r.tau_defined);
  EXPECT_LT(distance(r.x_star, x0), 0.25 * g.h());
  EXPECT_NEAR(r.tau / norm(r.x_star) / std::pow(r.delta / norm(r.x_star), 0.75), 1.0, 1e-12);
  EXPECT_LE(r.l_n, r.L_n);
  EXPECT_NE(r.subcase_tag, Subcase::none);
  EXPECT_TRUE(std::isfinite(r.p_n));
  EXPECT_TRUE(std::isfinite(r.neck_mass));
}
