#include <gtest/gtest.h>

#include "fracspec/geometry.hpp"
#include "fracspec/rng.hpp"

using namespace fracspec;

TEST(Summarize, Rectangle) {
  for (double L : {1.0, 2.0, 4.0}) {
    const auto g = summarize(Domain::rectangle(-L, L, -1, 1));
    EXPECT_DOUBLE_EQ(g.inradius, 1.0);
    EXPECT_DOUBLE_EQ(g.half_extent, L);
    EXPECT_TRUE(g.symmetric_x1);
    EXPECT_TRUE(g.convex);
    EXPECT_LE(g.inradius, g.half_extent);
    EXPECT_LE(g.half_extent, g.diameter);
  }
}

TEST(Summarize, DiskAndUnion) {
  const auto g = summarize(Domain::disk(0, 0, 1.5));
  EXPECT_DOUBLE_EQ(g.inradius, 1.5);
  EXPECT_DOUBLE_EQ(g.half_extent, 1.5);
  EXPECT_DOUBLE_EQ(g.diameter, 3.0);

  const auto u = summarize(Domain::interval_union({{-3, -1}, {1, 3}}));
  EXPECT_FALSE(u.convex);
  EXPECT_TRUE(u.symmetric_x1);
  EXPECT_DOUBLE_EQ(u.inradius, 1.0);
  EXPECT_DOUBLE_EQ(u.half_extent, 3.0);
}

TEST(Domain, ValidationErrors) {
  EXPECT_THROW(Domain::interval_union({}), ValidationError);
  EXPECT_THROW(Domain::interval_union({{0, 2}, {1, 3}}), ValidationError);
  EXPECT_THROW(Domain::interval(1, 1), ValidationError);
  EXPECT_THROW(Domain::rectangle(0, 1, 1, 0), ValidationError);
  EXPECT_THROW(Domain::disk(0, 0, 0), ValidationError);
}

TEST(Reflect, InvolutionAndAxis) {
  const Point p{1.0, 2.0};
  EXPECT_EQ(reflect(p), (Point{-1.0, 2.0}));
  EXPECT_EQ(reflect(Point{0.0, 5.0}), (Point{0.0, 5.0}));
  EXPECT_EQ(reflect(reflect(p)), p);
}

TEST(Scale, Homothety) {
  EXPECT_EQ(scale(Domain::interval(-1, 1), 2.0), Domain::interval(-2, 2));
  const auto d = scale(Domain::disk(0, 0, 1), 3.0);
  EXPECT_DOUBLE_EQ(summarize(d).inradius, 3.0);
  const auto r = Domain::rectangle(-2, 2, -1, 1);
  EXPECT_DOUBLE_EQ(summarize(scale(r, 0.5)).inradius, 0.5 * summarize(r).inradius);
  EXPECT_THROW(scale(r, 0.0), DomainError);
  EXPECT_THROW(scale(r, -1.0), DomainError);
}

TEST(Contains, BoundaryIsOutside) {
  const auto i = Domain::interval(-1, 1);
  EXPECT_TRUE(i.contains(Point{0.0}));
  EXPECT_FALSE(i.contains(Point{1.0}));
  EXPECT_FALSE(i.contains(Point{-1.0}));
  const auto r = Domain::rectangle(-2, 2, -1, 1);
  EXPECT_FALSE(r.contains(Point{2.0, 0.0}));
  EXPECT_FALSE(r.contains(Point{0.0, 1.0}));
  const auto d = Domain::disk(0, 0, 1);
  EXPECT_FALSE(d.contains(Point{1.0, 0.0}));
  EXPECT_TRUE(d.contains(Point{0.7, 0.7}));
}

TEST(Symmetry, MembershipCommutesWithReflection) {
  CounterRng rng(3, 0);
  for (const auto& D : {Domain::interval_union({{-3, -1}, {1, 3}}), Domain::rectangle(-2, 2, -1, 1),
                        Domain::disk(0, 0.3, 1)}) {
    ASSERT_TRUE(summarize(D).symmetric_x1);
    for (int i = 0; i < 2000; ++i) {
      Point p = Point::of_dim(D.dim());
      for (int k = 0; k < D.dim(); ++k) p[k] = 8.0 * rng.uniform() - 4.0;
      EXPECT_EQ(D.contains(p), D.contains(reflect(p)));
    }
  }
  EXPECT_FALSE(is_symmetric_x1(Domain::interval(-1, 2)));
  EXPECT_FALSE(is_symmetric_x1(Domain::disk(0.1, 0, 1)));
}

TEST(Symmetry, HalvesHaveEqualMeasure) {
  for (const auto& D : {Domain::interval_union({{-3, -1}, {1, 3}}), Domain::rectangle(-2, 2, -1, 1),
                        Domain::disk(0, 0, 1.3)}) {
    EXPECT_NEAR(half_measure(D, +1), half_measure(D, -1), 1e-10);
  }
  EXPECT_NEAR(half_measure(Domain::disk(0, 0, 1), 1) * 2, 3.141592653589793, 1e-12);
  EXPECT_NEAR(half_measure(Domain::interval(-1, 3), 1), 3.0, 1e-15);
}

TEST(Probe, PositiveHalf) {
  for (const auto& D : {Domain::interval(-1, 1), Domain::rectangle(-2, 2, -1, 1), Domain::disk(0, 0, 1)}) {
    const Point p = positive_probe(D);
    EXPECT_GT(p[0], 0.0);
    EXPECT_TRUE(D.contains(p));
  }
}
