#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cdplan/geometry.hpp"
#include "support/oracles.hpp"

using namespace cdplan;
using cdplan::testing::uniform;

namespace {

ConvexPolygon rect(double cx, double cy, double w, double h) {
  return ConvexPolygon({{cx - w / 2, cy - h / 2}, {cx + w / 2, cy - h / 2}, {cx + w / 2, cy + h / 2},
                        {cx - w / 2, cy + h / 2}});
}

}  // namespace

TEST(OverlapMeasure, Examples) {
  EXPECT_DOUBLE_EQ(overlap_measure(Circle({0, 0}, 1), Circle({0, 1}, 1)), 1.0);
  EXPECT_DOUBLE_EQ(overlap_measure(Circle({0, 0}, 1), Circle({3, 0}, 1)), 0.0);
  EXPECT_DOUBLE_EQ(overlap_measure(Circle({0, 0}, 1), Circle({0, 0}, 2)), 3.0);
}

TEST(OverlapMeasure, CoverSingletonAdditiveDisjoint) {
  const CircleCover r1{{Circle({0, 0}, 1)}};
  EXPECT_DOUBLE_EQ(overlap_measure_cover(r1, CircleCover{{Circle({0, 1}, 1)}}), 1.0);
  EXPECT_DOUBLE_EQ(overlap_measure_cover(r1, CircleCover{{Circle({3, 0}, 1)}}), 0.0);
  EXPECT_DOUBLE_EQ(overlap_measure_cover(r1, CircleCover{{Circle({0, 0}, 2)}}), 3.0);
  const CircleCover two{{Circle({0, 0}, 1), Circle({10, 0}, 1)}};
  const CircleCover obs{{Circle({1.5, 0}, 1), Circle({8.5, 0}, 1)}};
  EXPECT_DOUBLE_EQ(overlap_measure_cover(two, obs), 1.0);
  EXPECT_DOUBLE_EQ(overlap_measure_cover(two, CircleCover{{Circle({5, 5}, 1)}}), 0.0);
}

TEST(OverlapMeasure, SymmetricAndNonNegative) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 500; ++i) {
    const Circle a({uniform(rng, -2, 2), uniform(rng, -2, 2)}, uniform(rng, 0.1, 1));
    const Circle b({uniform(rng, -2, 2), uniform(rng, -2, 2)}, uniform(rng, 0.1, 1));
    EXPECT_GE(overlap_measure(a, b), 0.0);
    EXPECT_DOUBLE_EQ(overlap_measure(a, b), overlap_measure(b, a));
  }
}

TEST(Geometry, InvalidInputs) {
  EXPECT_THROW(Circle({0, 0}, 0.0), InvalidGeometry);
  EXPECT_THROW(Circle({0, 0}, -1.0), InvalidGeometry);
  EXPECT_THROW(ConvexPolygon({{0, 0}, {1, 0}}), InvalidGeometry);
  EXPECT_THROW(ConvexPolygon({{0, 0}, {1, 0}, {2, 0}}), InvalidGeometry);
  EXPECT_THROW(ConvexPolygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), InvalidGeometry);
  bool reversed = false;
  const auto p = ConvexPolygon::normalized({{0, 0}, {0, 1}, {1, 1}, {1, 0}}, &reversed);
  EXPECT_TRUE(reversed);
  EXPECT_GT(p.area(), 0.0);
}

TEST(MinEnclosingCircle, Examples) {
  const Circle c = min_enclosing_circle(rect(0, 0, 4, 2));
  EXPECT_NEAR(c.center().x, 0.0, 1e-12);
  EXPECT_NEAR(c.center().y, 0.0, 1e-12);
  EXPECT_NEAR(c.radius(), std::sqrt(5.0), 1e-12);
  const ConvexPolygon tri({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}});
  EXPECT_NEAR(min_enclosing_circle(tri).radius(), 1 / std::sqrt(3.0), 1e-12);
}

TEST(MinEnclosingCircle, MatchesBruteForceOnRandomPolygons) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    const ConvexPolygon p = cdplan::testing::random_convex_polygon(rng, 20, {uniform(rng, -3, 3), 0}, 2.0);
    const Circle c = min_enclosing_circle(p);
    const Circle ref = cdplan::testing::brute_force_mec(p.vertices());
    EXPECT_NEAR(c.radius(), ref.radius(), 1e-9);
    for (Point2 v : p.vertices()) EXPECT_LE(norm(v - c.center()), c.radius() + 1e-9);
  }
}

TEST(KCircleCover, Examples) {
  const ConvexPolygon r = rect(0, 0, 4, 2);
  const CircleCover one = k_circle_cover(r, 1);
  ASSERT_EQ(one.circles.size(), 1u);
  EXPECT_NEAR(one.circles[0].radius(), min_enclosing_circle(r).radius(), 1e-12);

  const CircleCover two = k_circle_cover(r, 2);
  ASSERT_EQ(two.circles.size(), 2u);
  std::vector<double> xs;
  for (const Circle& c : two.circles) {
    EXPECT_NEAR(c.radius(), std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(c.center().y, 0.0, 1e-12);
    xs.push_back(c.center().x);
  }
  std::sort(xs.begin(), xs.end());
  EXPECT_NEAR(xs[0], -1.0, 1e-12);
  EXPECT_NEAR(xs[1], 1.0, 1e-12);

  const ConvexPolygon thin = rect(0, 0, 6, 1);
  double area = 0.0;
  for (const Circle& c : k_circle_cover(thin, 3).circles) area += c.area();
  EXPECT_LT(area, min_enclosing_circle(thin).area());
  EXPECT_THROW(k_circle_cover(thin, 0), std::invalid_argument);
}

TEST(KCircleCover, CoversEveryVertexRandom) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const ConvexPolygon p = cdplan::testing::random_convex_polygon(rng, 7, {0, 0}, 2.0);
    const CircleCover cover = k_circle_cover(p, 1 + i % 5);
    std::vector<Point2> probes(p.vertices().begin(), p.vertices().end());
    for (int k = 0; k < 200; ++k) {
      // random interior points as convex combinations of three vertices
      const auto a = p[k % p.size()], b = p[(k * 3 + 1) % p.size()], c = p[(k * 5 + 2) % p.size()];
      const double u = uniform(rng, 0, 1), v = uniform(rng, 0, 1 - u);
      probes.push_back(a + u * (b - a) + v * (c - a));
    }
    for (Point2 q : probes) {
      bool inside = false;
      for (const Circle& c : cover.circles) inside = inside || norm(q - c.center()) <= c.radius() + 1e-9;
      EXPECT_TRUE(inside);
    }
  }
}

TEST(LineCircle, Examples) {
  EXPECT_TRUE(line_circle_no_intersection(Segment({-2, 2}, {2, 2}), Circle({0, 0}, 1)));
  EXPECT_FALSE(line_circle_no_intersection(Segment({-2, 0}, {2, 0}), Circle({0, 0}, 1)));
}

TEST(LineCircle, MatchesSamplingOracle) {
  std::mt19937_64 rng(4);
  int checked = 0;
  while (checked < 1000) {
    const Point2 a{uniform(rng, -3, 3), uniform(rng, -3, 3)};
    const Point2 b{uniform(rng, -3, 3), uniform(rng, -3, 3)};
    const Circle c({uniform(rng, -2, 2), uniform(rng, -2, 2)}, uniform(rng, 0.2, 1.5));
    if (norm(b - a) < 1e-3) continue;
    // skip near-tangent lines where the sampling oracle cannot resolve the answer
    const double dist = std::abs(cross(b - a, c.center() - a)) / norm(b - a);
    if (std::abs(dist - c.radius()) < 1e-3) continue;
    EXPECT_EQ(line_circle_no_intersection(Segment(a, b), c),
              !cdplan::testing::oracle_line_hits_circle(a, b, c.center(), c.radius()));
    ++checked;
  }
}

TEST(SegmentParams, Examples) {
  const auto p = segment_params(Segment({0, 0}, {2, 0}), Segment({1, -1}, {1, 1}));
  EXPECT_NEAR(p.t, 0.5, 1e-6);
  EXPECT_NEAR(p.s, 0.5, 1e-6);
  const auto q = segment_params(Segment({0, 0}, {1, 0}), Segment({3, -1}, {3, 1}), 0.0);
  EXPECT_NEAR(q.t, -2.0, 1e-12);
  EXPECT_NEAR(q.s, 0.5, 1e-12);
  EXPECT_THROW(segment_params(Segment({0, 0}, {1, 0}), Segment({0, 1}, {1, 1})), ParallelSegments);
}

TEST(SegmentsIntersect, Examples) {
  EXPECT_TRUE(segments_intersect(Segment({0, 0}, {2, 0}), Segment({1, -1}, {1, 1})));
  EXPECT_FALSE(segments_intersect(Segment({0, 0}, {1, 0}), Segment({2, 0}, {3, 0})));
  EXPECT_TRUE(segments_intersect(Segment({0, 0}, {2, 0}), Segment({2, 0}, {2, 2})));
  EXPECT_TRUE(segments_intersect(Segment({0, 0}, {2, 0}), Segment({1, 0}, {3, 0})));
}

TEST(SegmentsIntersect, MatchesOrientationOracle) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20000; ++i) {
    const Point2 a{uniform(rng, -1, 1), uniform(rng, -1, 1)}, b{uniform(rng, -1, 1), uniform(rng, -1, 1)};
    const Point2 c{uniform(rng, -1, 1), uniform(rng, -1, 1)}, d{uniform(rng, -1, 1), uniform(rng, -1, 1)};
    EXPECT_EQ(segments_intersect(Segment(a, b), Segment(c, d)),
              cdplan::testing::oracle_segments_intersect(a, b, c, d));
  }
}

TEST(PolygonsIntersect, Examples) {
  EXPECT_FALSE(polygons_intersect(rect(0, 0, 1, 1), rect(3, 0, 1, 1)));
  EXPECT_TRUE(polygons_intersect(rect(0, 0, 1, 1), rect(0.5, 0, 1, 1)));
  EXPECT_TRUE(polygons_intersect(rect(0, 0, 1, 1), rect(1, 0, 1, 1)));
  EXPECT_TRUE(polygons_intersect(rect(0, 0, 4, 4), rect(0, 0, 1, 1)));
}

TEST(PolygonsIntersect, MatchesEdgeCrossingOracle) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 1000; ++i) {
    const auto p = cdplan::testing::random_convex_polygon(rng, 3 + i % 6, {0, 0}, 1.0);
    const auto q = cdplan::testing::random_convex_polygon(
        rng, 3 + (i / 6) % 6, {uniform(rng, -2, 2), uniform(rng, -2, 2)}, uniform(rng, 0.2, 1.5));
    EXPECT_EQ(polygons_intersect(p, q), cdplan::testing::oracle_polygons_intersect(p.vertices(), q.vertices()));
  }
}

TEST(PolygonCircle, Examples) {
  const ConvexPolygon sq = rect(0, 0, 1, 1);
  EXPECT_FALSE(polygon_circle_intersect(sq, Circle({5, 0}, 1)));
  EXPECT_TRUE(polygon_circle_intersect(sq, Circle({0, 0}, 0.1)));
  EXPECT_TRUE(polygon_circle_intersect(sq, Circle({1.5, 0}, 1.0)));
  EXPECT_FALSE(polygon_circle_intersect(sq, Circle({1.5, 0}, 0.999)));
  EXPECT_TRUE(polygon_circle_intersect(rect(0, 0, 0.2, 0.2), Circle({0, 0}, 5)));
}

TEST(SignedSeparation, ContinuousAndConsistentWithIntersection) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    const Shape a = cdplan::testing::random_convex_polygon(rng, 5, {0, 0}, 1.0);
    const Shape b = i % 2 ? Shape(Circle({uniform(rng, -2.5, 2.5), uniform(rng, -2.5, 2.5)}, uniform(rng, 0.2, 1)))
                          : Shape(cdplan::testing::random_convex_polygon(
                                rng, 4, {uniform(rng, -2.5, 2.5), uniform(rng, -2.5, 2.5)}, 0.8));
    const double sep = signed_separation(a, b);
    if (std::abs(sep) > 1e-9) EXPECT_EQ(sep < 0, shapes_intersect(a, b));
    EXPECT_EQ(certified_disjoint(a, b, 0.0), !shapes_intersect(a, b));
  }
  EXPECT_NEAR(signed_separation(Shape(rect(0, 0, 1, 1)), Shape(rect(3, 0, 1, 1))), 2.0, 1e-12);
  EXPECT_NEAR(signed_separation(Shape(rect(0, 0, 1, 1)), Shape(Circle({2, 0}, 0.5))), 1.0, 1e-12);
}

TEST(Transforms, RigidMotionPreservesShape) {
  const ConvexPolygon p = rect(1, 2, 2, 1);
  const ConvexPolygon q = p.transformed({std::numbers::pi / 3, {4, -1}});
  EXPECT_NEAR(q.area(), p.area(), 1e-12);
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_NEAR(p.edge(i).length(), q.edge(i).length(), 1e-12);
  }
  EXPECT_EQ(reference_point(Shape(p)).x, p.vertex_mean().x);
}
