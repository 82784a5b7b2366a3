#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "equipart/geometry.hpp"
#include "oracles.hpp"

using namespace equipart;

namespace {

const ConvexPolygon kSquare = ConvexPolygon::rectangle(0, 0, 1, 1);

ConvexPolygon rigid(const ConvexPolygon& p, double angle, Point2 shift) {
  std::vector<Point2> v;
  for (Point2 q : p.vertices())
    v.push_back({q.x * std::cos(angle) - q.y * std::sin(angle) + shift.x, q.x * std::sin(angle) + q.y * std::cos(angle) + shift.y});
  return ConvexPolygon::from_vertices(v);
}

}  // namespace

TEST(Clip, AxisAlignedCut) {
  const ConvexPolygon half = clip(kSquare, HalfPlane({1, 0}, 0.5));
  EXPECT_DOUBLE_EQ(area(half), 0.5);
  EXPECT_EQ(half.size(), 4u);
  for (Point2 p : half.vertices()) EXPECT_LE(p.x, 0.5);
  EXPECT_NEAR(hausdorff_distance(half, ConvexPolygon::rectangle(0, 0, 0.5, 1)), 0.0, 1e-15);
}

TEST(Clip, ContainingHalfplaneKeepsPolygon) { EXPECT_EQ(clip(kSquare, HalfPlane({1, 0}, 2.0)), kSquare); }

TEST(Clip, DisjointHalfplaneIsEmpty) {
  const ConvexPolygon e = clip(kSquare, HalfPlane({1, 0}, -1.0));
  EXPECT_TRUE(e.empty());
  EXPECT_EQ(area(e), 0.0);
  EXPECT_EQ(perimeter(e), 0.0);
}

TEST(Clip, TouchingLineGivesEmpty) { EXPECT_TRUE(clip(kSquare, HalfPlane({1, 0}, 0.0)).empty()); }

TEST(Clip, IdempotentAndComplementary) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const ConvexPolygon p = ConvexPolygon::from_vertices(oracle::random_convex_vertices(rng, 3 + trial % 12));
    const HalfPlane h({u(rng), u(rng)}, 0.5 * u(rng));
    const ConvexPolygon once = clip(p, h);
    EXPECT_EQ(clip(once, h), once);
    EXPECT_NEAR(area(once) + area(clip(p, h.complement())), area(p), 1e-12 * area(p));
  }
}

TEST(Metrics, UnitSquare) {
  EXPECT_DOUBLE_EQ(area(kSquare), 1.0);
  EXPECT_DOUBLE_EQ(perimeter(kSquare), 4.0);
  EXPECT_DOUBLE_EQ(centroid(kSquare).x, 0.5);
  EXPECT_DOUBLE_EQ(centroid(kSquare).y, 0.5);
  EXPECT_DOUBLE_EQ(diameter(kSquare), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(width(kSquare), 1.0);
}

TEST(Metrics, Rectangle) {
  const ConvexPolygon r = ConvexPolygon::rectangle(0, 0, 1, 0.5);
  EXPECT_DOUBLE_EQ(perimeter(r), 3.0);
  EXPECT_DOUBLE_EQ(width(r), 0.5);
}

TEST(Metrics, Regular256Gon) {
  const ConvexPolygon p = ConvexPolygon::regular(256);
  EXPECT_NEAR(area(p), 0.5 * 256 * std::sin(2 * std::numbers::pi / 256), 1e-12);
  // the inscribed 256-gon misses pi by 2 pi^3 / (3 n^2) = 3.154e-4
  EXPECT_NEAR(std::numbers::pi - area(p), 2 * std::pow(std::numbers::pi, 3) / (3 * 256.0 * 256.0), 1e-8);
}

TEST(Metrics, WidthOfTriangle) {
  // equilateral with side 1: width is the height
  const ConvexPolygon t = ConvexPolygon::from_vertices({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}});
  EXPECT_NEAR(width(t), std::sqrt(3.0) / 2, 1e-15);
  EXPECT_NEAR(diameter(t), 1.0, 1e-15);
}

TEST(Metrics, RigidMotionInvariance) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const ConvexPolygon p = ConvexPolygon::from_vertices(oracle::random_convex_vertices(rng, 3 + trial % 9));
    const ConvexPolygon q = rigid(p, u(rng), {u(rng), u(rng)});
    EXPECT_NEAR(area(q), area(p), 1e-10 * area(p));
    EXPECT_NEAR(perimeter(q), perimeter(p), 1e-10 * perimeter(p));
    EXPECT_NEAR(width(q), width(p), 1e-10 * width(p));
    EXPECT_NEAR(diameter(q), diameter(p), 1e-10 * diameter(p));
  }
}

TEST(Polygon, CanonicalizesInput) {
  // clockwise with a collinear vertex and a duplicate
  const ConvexPolygon p = ConvexPolygon::from_vertices({{0, 0}, {0, 1}, {1, 1}, {1, 0.5}, {1, 0}, {1, 0}});
  EXPECT_EQ(p.size(), 4u);
  EXPECT_GT(detail::signed_area(p.vertices()), 0.0);
  EXPECT_THROW(ConvexPolygon::from_vertices({{0, 0}, {2, 0}, {1, 0.2}, {1, 2}}), std::invalid_argument);
  EXPECT_THROW(ConvexPolygon::from_vertices({{0, 0}, {1, NAN}, {1, 1}}), std::invalid_argument);
  EXPECT_TRUE(ConvexPolygon::from_vertices({{0, 0}, {1, 1}, {2, 2}}).empty());
}

TEST(Hausdorff, Examples) {
  EXPECT_EQ(hausdorff_distance(kSquare, kSquare), 0.0);
  for (double t : {0.1, 0.5, 2.0}) EXPECT_NEAR(hausdorff_distance(kSquare, ConvexPolygon::rectangle(t, 0, 1 + t, 1)), t, 1e-15);
  const ConvexPolygon wide = ConvexPolygon::rectangle(0, 0, 2, 1);
  EXPECT_DOUBLE_EQ(hausdorff_distance(kSquare, wide), 1.0);
  EXPECT_NEAR(oracle::sampled_hausdorff(kSquare.vertices(), wide.vertices()), 1.0, 1e-3);
  EXPECT_THROW(hausdorff_distance(kSquare, ConvexPolygon{}), std::invalid_argument);
}

TEST(Hausdorff, MatchesSampledOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = oracle::random_convex_vertices(rng, 3 + trial % 7);
    const auto b = oracle::random_convex_vertices(rng, 3 + trial % 5);
    const double exact = hausdorff_distance(ConvexPolygon::from_vertices(a), ConvexPolygon::from_vertices(b));
    const double sampled = oracle::sampled_hausdorff(a, b, 1000);
    EXPECT_GE(exact, sampled - 1e-12);
    EXPECT_NEAR(exact, sampled, 5e-3);
    EXPECT_NEAR(exact, hausdorff_distance(ConvexPolygon::from_vertices(b), ConvexPolygon::from_vertices(a)), 0.0);
  }
}

// Intersections of converging polygon sequences converge (checked at three
// decreasing perturbation scales).
TEST(Hausdorff, IntersectionsConverge) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const ConvexPolygon a = ConvexPolygon::regular(7, {0, 0}, 1.0);
  const ConvexPolygon b = ConvexPolygon::regular(5, {0.6, 0.2}, 0.9);
  const ConvexPolygon limit = intersect(a, b);
  ASSERT_FALSE(limit.empty());
  double previous = 1e300;
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      auto jitter = [&](const ConvexPolygon& p) {
        std::vector<Point2> v;
        for (Point2 q : p.vertices()) v.push_back({q.x + eps * u(rng), q.y + eps * u(rng)});
        return ConvexPolygon::from_vertices(v);
      };
      worst = std::max(worst, hausdorff_distance(intersect(jitter(a), jitter(b)), limit));
    }
    EXPECT_LT(worst, previous);
    EXPECT_LT(worst, 20 * eps);
    previous = worst;
  }
}

TEST(Moments, SecondMomentOfSquare) {
  const Moments m = moments(kSquare);
  EXPECT_NEAR(m.second_moment_about({0.5, 0.5}), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(m.second_moment_about({0, 0}), 2.0 / 3.0, 1e-15);
}
