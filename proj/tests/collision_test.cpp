#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "speared/collision.hpp"

namespace speared {
namespace {

const Aabb kUnitBox{{0, 0, 0}, {1, 1, 1}};

TEST(SegmentAabb, PassesThrough) {
  const auto c = segment_aabb_contact({{-1, 0.5, 0.5}, {2, 0.5, 0.5}}, kUnitBox);
  ASSERT_TRUE(c);
  EXPECT_DOUBLE_EQ(c->t, 1.0 / 3.0);
  EXPECT_EQ(c->point.x, 0.0);
}

TEST(SegmentAabb, MissesAbove) {
  EXPECT_FALSE(segment_aabb_contact({{-1, 0.5, 2}, {2, 0.5, 2}}, kUnitBox));
}

TEST(SegmentAabb, StartsInside) {
  const auto c = segment_aabb_contact({{0.5, 0.5, 0.5}, {3, 3, 3}}, kUnitBox);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->t, 0.0);
}

TEST(SegmentAabb, TouchingAFaceCounts) {
  EXPECT_TRUE(segment_aabb_contact({{-1, 0.5, 1}, {2, 0.5, 1}}, kUnitBox));
  EXPECT_TRUE(segment_aabb_contact({{-1, -1, 0}, {0, 0, 0}}, kUnitBox));
}

TEST(SegmentAabb, DegenerateSegment) {
  EXPECT_TRUE(segment_aabb_contact({{0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}}, kUnitBox));
  EXPECT_FALSE(segment_aabb_contact({{5, 5, 5}, {5, 5, 5}}, kUnitBox));
}

TEST(SegmentAabb, StopsShort) {
  EXPECT_FALSE(segment_aabb_contact({{-2, 0.5, 0.5}, {-0.1, 0.5, 0.5}}, kUnitBox));
}

TEST(Aabb, FromCenterSize) {
  const Aabb b = Aabb::from_center_size({10, 0, 5}, {4, 2, 10});
  EXPECT_EQ(b.min, (Pose{8, -1, 0}));
  EXPECT_EQ(b.max, (Pose{12, 1, 10}));
  EXPECT_TRUE(b.contains({12, 1, 10}));
  EXPECT_FALSE(b.contains({12.001, 0, 0}));
}

// Dense-sampling oracle on short random segments near random boxes. Cases
// within the sampling resolution of the boundary are undecidable for the
// oracle and skipped.
TEST(SegmentAabb, AgreesWithSamplingOracle) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> coord(-30, 30);
  std::uniform_real_distribution<double> extent(1, 20);
  std::uniform_real_distribution<double> unit(-1, 1);
  std::uniform_real_distribution<double> len(0, 20);
  int decided = 0;
  for (int i = 0; i < 2000; ++i) {
    const Pose c{coord(rng), coord(rng), coord(rng)};
    const Pose s{extent(rng), extent(rng), extent(rng)};
    const Aabb box = Aabb::from_center_size(c, s);
    const testing::BoxRef ref{box.min, box.max};

    const Pose a{coord(rng), coord(rng), coord(rng)};
    Pose dir{unit(rng), unit(rng), unit(rng)};
    const double n = norm(dir);
    if (n < 1e-6) continue;
    const Pose b = a + dir * (len(rng) / n);

    const auto sampled = testing::sample_segment(a, b, ref);
    const double resolution = distance(a, b) * 1e-3;
    if (!sampled.hit && sampled.min_outside_distance <= resolution) continue;
    ++decided;

    const auto contact = segment_aabb_contact({a, b}, box);
    ASSERT_EQ(contact.has_value(), sampled.hit) << "case " << i;
    if (contact) {
      EXPECT_LE(contact->t, sampled.first_inside_t + 1e-12);
      EXPECT_GE(contact->t, sampled.first_inside_t - 1e-3 - 1e-12);
      EXPECT_TRUE(box.contains(contact->point));
    }
  }
  EXPECT_GT(decided, 1900);
}

}  // namespace
}  // namespace speared
