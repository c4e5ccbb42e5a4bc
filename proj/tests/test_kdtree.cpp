#include <gtest/gtest.h>

#include "eecal/kdtree.hpp"
#include "support.hpp"

using namespace eecal;

TEST(KdTree, NearestMatchesBruteForce) {
  Rng rng(1);
  const std::vector<Vec3> pts = test::random_points(rng, 2000);
  const KdTree tree(pts);
  for (const Vec3& q : test::random_points(rng, 500, 1.2)) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if ((pts[i] - q).squaredNorm() < (pts[best] - q).squaredNorm()) best = i;
    }
    const auto nn = tree.nearest(q);
    ASSERT_TRUE(nn);
    EXPECT_EQ(nn->index, best);
    EXPECT_DOUBLE_EQ(nn->squared_distance, (pts[best] - q).squaredNorm());
  }
}

TEST(KdTree, TiesGoToLowestIndex) {
  const std::vector<Vec3> pts{{1, 0, 0}, {-1, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  const KdTree tree(pts);
  EXPECT_EQ(tree.nearest(Vec3(0, 0, 0))->index, 0u);
  EXPECT_EQ(tree.nearest(Vec3(1, 0, 0))->index, 0u);
}

TEST(KdTree, MaxDistanceAndEmpty) {
  const std::vector<Vec3> pts{{0, 0, 0}};
  const KdTree tree(pts);
  EXPECT_FALSE(tree.nearest(Vec3(1, 0, 0), 0.5));
  EXPECT_TRUE(tree.nearest(Vec3(0.5, 0, 0), 0.5));
  const KdTree empty(std::span<const Vec3>{});
  EXPECT_FALSE(empty.nearest(Vec3::Zero()));
  EXPECT_TRUE(empty.radius_search(Vec3::Zero(), 1.0).empty());
}

TEST(KdTree, RadiusSearchMatchesBruteForce) {
  Rng rng(2);
  const std::vector<Vec3> pts = test::random_points(rng, 1500);
  const KdTree tree(pts);
  for (const Vec3& q : test::random_points(rng, 100)) {
    std::vector<std::size_t> expected;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if ((pts[i] - q).norm() <= 0.2) expected.push_back(i);
    }
    EXPECT_EQ(tree.radius_search(q, 0.2), expected);
  }
}
