#include <gtest/gtest.h>

#include <random>

#include "arcoord/error.hpp"
#include "arcoord/polygon.hpp"
#include "oracles.hpp"

using namespace arcoord;

namespace {

Polygon2 square(double x0, double z0, double side = 1.0) {
  return Polygon2({{x0, z0}, {x0 + side, z0}, {x0 + side, z0 + side}, {x0, z0 + side}});
}

Polygon2 random_polygon(std::mt19937_64& rng, std::vector<Vec2>* raw = nullptr) {
  std::uniform_int_distribution<int> k(3, 12);
  auto pts = oracle::random_convex(rng, k(rng));
  if (raw != nullptr) *raw = pts;
  return convex_hull(pts);
}

void expect_valid(const Polygon2& p) {
  if (p.empty()) return;
  ASSERT_GE(p.size(), 3u);
  const auto& v = p.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_GT(oracle::cross2(v[i], v[(i + 1) % v.size()], v[(i + 2) % v.size()]), 0.0);
  }
}

std::vector<Vec2> sorted(std::vector<Vec2> v) {
  std::sort(v.begin(), v.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  return v;
}

}  // namespace

TEST(Polygon2, RejectsInvalidVertexLists) {
  EXPECT_THROW(Polygon2({{0, 0}, {1, 0}}), Error);
  EXPECT_THROW(Polygon2({{0, 0}, {1, 0}, {2, 0}}), Error);
  EXPECT_THROW(Polygon2({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), Error);  // clockwise
  EXPECT_NO_THROW(square(0, 0));
}

TEST(ConvexHull, DropsInteriorPoint) {
  const std::vector<Vec2> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
  const auto h = convex_hull(pts);
  EXPECT_EQ(h, square(0, 0));
}

TEST(ConvexHull, TriangleComesOutCounterclockwise) {
  const std::vector<Vec2> pts{{0, 0}, {0, 1}, {1, 0}};
  const auto h = convex_hull(pts);
  ASSERT_EQ(h.size(), 3u);
  EXPECT_EQ(h.vertices()[0], Vec2(0, 0));
  EXPECT_EQ(h.vertices()[1], Vec2(1, 0));
  EXPECT_EQ(h.vertices()[2], Vec2(0, 1));
}

TEST(ConvexHull, DropsCollinearBoundaryPoints) {
  const std::vector<Vec2> pts{{0, 0}, {0.5, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0.5}};
  EXPECT_EQ(convex_hull(pts).size(), 4u);
}

TEST(ConvexHull, DegenerateInputs) {
  const std::vector<Vec2> line{{0, 0}, {1, 1}, {2, 2}};
  EXPECT_THROW(convex_hull(line), Error);
  const std::vector<Vec2> same{{1, 1}, {1, 1}, {1, 1}};
  EXPECT_THROW(convex_hull(same), Error);
}

TEST(ConvexHull, MatchesBruteForceOracleOnDiskSamples) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec2> pts;
    while (pts.size() < 100) {
      const Vec2 p(u(rng), u(rng));
      if (p.norm() <= 1.0) pts.push_back(p);
    }
    const auto h = convex_hull(pts);
    expect_valid(h);
    EXPECT_EQ(sorted(h.vertices()), oracle::brute_force_hull(pts));
  }
}

TEST(ConvexHull, IdempotentAndOrderIndependent) {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Vec2> raw;
    const auto h = random_polygon(rng, &raw);
    EXPECT_EQ(convex_hull(h.vertices()), h);
    std::shuffle(raw.begin(), raw.end(), rng);
    EXPECT_EQ(convex_hull(raw), h);
  }
}

TEST(ContainsPoint, ClosedSquare) {
  const auto s = square(0, 0);
  EXPECT_TRUE(contains_point(s, {0.5, 0.5}));
  EXPECT_FALSE(contains_point(s, {2, 2}));
  EXPECT_TRUE(contains_point(s, {1, 0.5}));
  EXPECT_TRUE(contains_point(s, {0, 0}));
  EXPECT_FALSE(contains_point(Polygon2{}, {0, 0}));
}

TEST(IntersectConvex, SelfIntersectionIsIdentity) {
  const auto s = square(0, 0);
  EXPECT_EQ(sorted(intersect_convex(s, s).vertices()), sorted(s.vertices()));
}

TEST(IntersectConvex, ShiftedSquares) {
  const auto r = intersect_convex(square(0, 0), square(0.5, 0.5));
  EXPECT_EQ(r, square(0.5, 0.5, 0.5));
  EXPECT_NEAR(area(r), 0.25, 1e-15);
}

TEST(IntersectConvex, DisjointAndTouchingAreEmpty) {
  EXPECT_TRUE(intersect_convex(square(0, 0), square(3, 3)).empty());
  EXPECT_TRUE(intersect_convex(square(0, 0), square(1, 0)).empty());  // shared edge
  EXPECT_TRUE(intersect_convex(square(0, 0), square(1, 1)).empty());  // shared corner
  EXPECT_TRUE(intersect_convex(square(0, 0), Polygon2{}).empty());
}

TEST(IntersectConvex, NestedReturnsInner) {
  const auto inner = square(0.25, 0.25, 0.5);
  EXPECT_EQ(intersect_convex(square(0, 0), inner), inner);
}

TEST(IntersectConvex, MatchesRasterOracleAndProperties) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Vec2> ra, rb;
    const auto a = random_polygon(rng, &ra);
    const auto b = random_polygon(rng, &rb);
    const auto ab = intersect_convex(a, b);
    const auto ba = intersect_convex(b, a);
    expect_valid(ab);
    EXPECT_NEAR(area(ab), area(ba), 1e-12);
    EXPECT_LE(area(ab), std::min(area(a), area(b)) + 1e-12);
    for (const auto& v : ab.vertices()) {
      EXPECT_TRUE(contains_point(a, v));
      EXPECT_TRUE(contains_point(b, v));
    }
    const double expected = oracle::raster_area({ra, rb});
    EXPECT_NEAR(area(ab), expected, std::max(1e-4, 0.01 * expected)) << "trial " << trial;
  }
}

TEST(IntersectAll, Examples) {
  const auto s = square(0, 0);
  const std::vector<Polygon2> one{s};
  EXPECT_EQ(intersect_all(one), s);
  const std::vector<Polygon2> three{s, s, s};
  EXPECT_EQ(intersect_all(three), s);
  EXPECT_TRUE(intersect_all(std::vector<Polygon2>{}).empty());
}

TEST(IntersectAll, ThreeRandomPolygonsMatchOracle) {
  std::mt19937_64 rng(54);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Vec2> r0, r1, r2;
    const std::vector<Polygon2> ps{random_polygon(rng, &r0), random_polygon(rng, &r1), random_polygon(rng, &r2)};
    const auto all = intersect_all(ps);
    const double smallest = std::min({area(ps[0]), area(ps[1]), area(ps[2])});
    EXPECT_LE(area(all), smallest + 1e-12);
    const double expected = oracle::raster_area({r0, r1, r2});
    EXPECT_NEAR(area(all), expected, std::max(1e-4, 0.01 * expected));
  }
}

TEST(Area, Examples) {
  EXPECT_DOUBLE_EQ(area(square(0, 0)), 1.0);
  EXPECT_DOUBLE_EQ(area(Polygon2{}), 0.0);
  EXPECT_DOUBLE_EQ(area(Polygon2({{0, 0}, {1, 0}, {0, 1}})), 0.5);
}

TEST(Area, MatchesRasterOracle) {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec2> raw;
    const auto p = random_polygon(rng, &raw);
    const double expected = oracle::raster_area({raw});
    EXPECT_NEAR(area(p), expected, std::max(1e-4, 0.01 * expected));
  }
}
