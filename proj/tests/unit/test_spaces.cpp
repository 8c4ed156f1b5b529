#include <gtest/gtest.h>

#include <cmath>

#include "wrp/wrp.hpp"

using namespace wrp;

TEST(BoundaryDistance, CenterOfBall) {
  EXPECT_DOUBLE_EQ(boundary_distance(DomainSet::ball_at_zero(2, 1.0), Vec{0.0, 0.0}), 1.0);
}

TEST(BoundaryDistance, NearestFaceOfInterval) {
  EXPECT_DOUBLE_EQ(boundary_distance(DomainSet::cube(1, -2.0, 2.0), Vec{0.5}), 1.5);
}

TEST(BoundaryDistance, RectangleMatchesDenseBoundarySampling) {
  DomainSet d = DomainSet::box({-1.0, -3.0}, {1.0, 3.0});
  Vec x{0.2, 0.0};
  double best = INFINITY;
  const int n = 4000;
  for (int k = 0; k <= n; ++k) {
    double s = -1.0 + 2.0 * k / n, t = -3.0 + 6.0 * k / n;
    for (Vec b : {Vec{-1.0, t}, Vec{1.0, t}, Vec{s, -3.0}, Vec{s, 3.0}})
      best = std::min(best, std::max(std::abs(b[0] - x[0]), std::abs(b[1] - x[1])));
  }
  double got = boundary_distance(d, x);
  EXPECT_NEAR(got, 0.8, 1e-15);
  EXPECT_NEAR(got, best, 1e-12);
}

TEST(BoundaryDistance, OutsidePointIsDomainError) {
  try {
    boundary_distance(DomainSet::cube(1, -1.0, 1.0), Vec{1.5});
    FAIL() << "expected a domain error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::domain);
  }
}

TEST(BoundaryDistance, ShrinksTowardBoundary) {
  DomainSet d = DomainSet::ball_at_zero(2, 1.0);
  double prev = INFINITY;
  for (double s = 0.0; s < 1.0; s += 0.05) {
    double v = boundary_distance(d, Vec{s * 0.6, s * 0.8});
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(DomainFlags, BoxesAndBalls) {
  EXPECT_TRUE(DomainSet::cube(2, -1, 1).balanced());
  EXPECT_FALSE(DomainSet::box({-1.0}, {2.0}).balanced());
  EXPECT_TRUE(DomainSet::box({-1.0}, {2.0}).star_shaped());
  EXPECT_FALSE(DomainSet::box({0.5}, {2.0}).star_shaped());
  EXPECT_TRUE(DomainSet::ball_at_zero(3, 0.5).balanced());
  EXPECT_TRUE(DomainSet::cube(1, -1, 1).convex());
}

TEST(AdjustingWeight, ThresholdConstantsPass) {
  Weight w{"omega", {WeightPiece::constant(1.0), WeightPiece::constant(2.0)}, Vec{1.0, 2.0}, {}};
  auto reps = check_adjusting_weight(w, {2.0, 0.5});
  ASSERT_EQ(reps.size(), 3u);
  for (const auto& r : reps) EXPECT_TRUE(r.passed()) << r.detail;
  EXPECT_DOUBLE_EQ(reps[1].lhs, 1.0);
  EXPECT_DOUBLE_EQ(reps[2].lhs, 2.0);
}

TEST(AdjustingWeight, BelowOneFails) {
  Weight w = Weight::uniform("omega", WeightPiece::constant(0.9));
  auto reps = check_adjusting_weight(w, {1.0});
  EXPECT_TRUE(reps.back().failed());
}

TEST(AdjustingWeight, SineWeightOnGridPasses) {
  DomainSet U = DomainSet::cube(1, -3.0, 3.0);
  Weight w = Weight::uniform("omega", WeightPiece::sine());
  w.certified_sup = Vec{3.0};
  SampleGrid g = SampleGrid::lattice(U, 601);
  auto reps = check_adjusting_weight(w, {1.0}, {g});
  ASSERT_EQ(reps.size(), 2u);
  for (const auto& r : reps) EXPECT_TRUE(r.passed()) << r.detail;
  double dense_min = INFINITY;
  for (const auto& x : g.points()) dense_min = std::min(dense_min, 2.0 + std::sin(x[0]));
  EXPECT_DOUBLE_EQ(reps[1].rhs, dense_min);
}

TEST(AdjustingWeight, MonotoneInTheConstant) {
  Vec r{2.0, 0.25, 1.0};
  for (double c : {4.0, 5.0, 10.0}) {
    for (const auto& rep : check_adjusting_weight(Weight::uniform("w", WeightPiece::constant(c)), r)) EXPECT_TRUE(rep.passed());
  }
  auto low = check_adjusting_weight(Weight::uniform("w", WeightPiece::constant(3.99)), r);
  EXPECT_TRUE(low[2].failed());
}

TEST(Dominance, IdentityAndConstants) {
  SampleGrid g = SampleGrid::lattice(DomainSet::cube(1, -1, 1), 11);
  Weight f = Weight::uniform("f", WeightPiece::gauss(1.0));
  auto same = check_dominance_certificate(f, f, DominanceCertificate{"f", 1, "f", {1.0}}, {g});
  EXPECT_TRUE(same[0].passed());
  EXPECT_DOUBLE_EQ(same[0].margin, 0.0);
  auto consts = check_dominance_certificate(Weight::uniform("1", WeightPiece::constant(1.0)), Weight::uniform("2", WeightPiece::constant(2.0)),
                                            DominanceCertificate{"1", 1, "2", {2.0}}, {g});
  EXPECT_TRUE(consts[0].passed());
  EXPECT_DOUBLE_EQ(consts[0].margin, 0.0);
}

TEST(Dominance, PerFactorGaussMargins) {
  DomainSet U = DomainSet::cube(1, -1, 1);
  SampleGrid g = SampleGrid::lattice(U, 21);
  Weight f = Weight::uniform("f", WeightPiece::gauss(1.0));
  Weight g5 = Weight::uniform("g", WeightPiece::gauss(1.0).scaled(5.0));
  auto reps = check_dominance_certificate(f, g5, DominanceCertificate{"f", 1, "g", {3.0, 5.0}}, {g, g});
  ASSERT_EQ(reps.size(), 2u);
  EXPECT_TRUE(reps[0].passed());
  EXPECT_TRUE(reps[1].passed());
  double edge = 2.0 * std::exp(-g.points().back()[0] * g.points().back()[0]);
  EXPECT_NEAR(reps[0].margin, edge, 1e-15);
  EXPECT_NEAR(reps[1].margin, 0.0, 1e-15);
}

TEST(Dominance, EnlargingGNeverBreaksAPass) {
  SampleGrid g = SampleGrid::lattice(DomainSet::cube(1, -1, 1), 11);
  Weight f = Weight::uniform("f", WeightPiece::gauss(0.5));
  for (double s : {2.0, 2.5, 4.0}) {
    Weight gs = Weight::uniform("g", WeightPiece::gauss(0.5).scaled(s));
    EXPECT_TRUE(check_dominance_certificate(f, gs, DominanceCertificate{"f", 1, "g", {2.0}}, {g})[0].passed());
  }
  Weight small = Weight::uniform("g", WeightPiece::gauss(0.5).scaled(1.0));
  EXPECT_TRUE(check_dominance_certificate(f, small, DominanceCertificate{"f", 1, "g", {2.0}}, {g})[0].failed());
}

TEST(WeightIngest, CertifiedInfMustHoldOnGrid) {
  SampleGrid g = SampleGrid::lattice(DomainSet::cube(1, -3, 3), 31);
  Weight w = Weight::uniform("w", WeightPiece::sine());
  w.certified_inf = Vec{1.0};
  EXPECT_NO_THROW(w.validate({g}));
  w.certified_inf = Vec{1.5};
  EXPECT_THROW(w.validate({g}), Error);
}

TEST(WeightPieces, Vocabulary) {
  Vec x{0.5};
  EXPECT_DOUBLE_EQ(WeightPiece::constant(3.0)(x), 3.0);
  EXPECT_DOUBLE_EQ(WeightPiece::polynomial({1.0, 0.0, 2.0})(x), 1.5);
  EXPECT_DOUBLE_EQ(WeightPiece::gauss(2.0)(x), std::exp(-0.5));
  EXPECT_DOUBLE_EQ(WeightPiece::sine()(x), 2.0 + std::sin(0.5));
  EXPECT_DOUBLE_EQ(WeightPiece::gauss(2.0).scaled(3.0).shifted(1.0)(x), 3.0 * std::exp(-0.5) + 1.0);
}
