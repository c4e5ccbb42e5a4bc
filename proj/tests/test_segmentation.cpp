#include <gtest/gtest.h>

#include "eecal/segmentation.hpp"
#include "support.hpp"

using namespace eecal;

namespace {

PointCloud blob(const Vec3& centre, std::size_t n, double radius, Rng& rng) {
  std::uniform_real_distribution<double> u(-radius, radius);
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) c.push_back(centre + Vec3(u(rng), u(rng), u(rng)), Label::EE);
  return c;
}

PointCloud concat(const PointCloud& a, const PointCloud& b) {
  PointCloud out = a;
  for (std::size_t i = 0; i < b.size(); ++i) out.push_back(b.points[i], b.labels[i], b.keypoint_ids[i]);
  return out;
}

/// Components by brute-force flood fill over all pairs.
std::vector<std::size_t> brute_components(const std::vector<Vec3>& pts, double d) {
  std::vector<std::size_t> comp(pts.size(), SIZE_MAX);
  std::size_t next = 0;
  for (std::size_t s = 0; s < pts.size(); ++s) {
    if (comp[s] != SIZE_MAX) continue;
    std::vector<std::size_t> stack{s};
    comp[s] = next;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (comp[j] == SIZE_MAX && (pts[i] - pts[j]).norm() <= d) {
          comp[j] = next;
          stack.push_back(j);
        }
      }
    }
    ++next;
  }
  return comp;
}

PointCloud simulated_frame() {
  const Scenario s = test::noiseless_scenario(1);
  static const Dataset ds = generate_dataset(s, test::default_model());
  return ds.frames[0].cloud;
}

}  // namespace

TEST(PredictLabels, GroundTruthSegmenterReturnsLabels) {
  const PointCloud f = simulated_frame();
  EXPECT_EQ(predict_labels(f, GroundTruthSegmenter{}).labels, f.labels);
  EXPECT_THROW(predict_labels(PointCloud{}, GroundTruthSegmenter{}), Error);
}

TEST(PredictLabels, ZeroFlipEqualsGroundTruth) {
  const PointCloud f = simulated_frame();
  EXPECT_EQ(predict_labels(f, NoisyOracleSegmenter(0.0, 0.0, 3)).labels, f.labels);
}

TEST(PredictLabels, FlipRateMatchesBinomial) {
  Rng rng(4);
  PointCloud c;
  std::uniform_int_distribution<int> lab(0, 2);
  for (int i = 0; i < 100000; ++i) c.push_back(Vec3(i, 0, 0), static_cast<Label>(lab(rng)));
  const PointCloud out = predict_labels(c, NoisyOracleSegmenter(0.02, 0.0, 5));
  std::size_t diff = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    diff += out.labels[i] != c.labels[i] ? 1 : 0;
    EXPECT_LE(static_cast<int>(out.labels[i]), 2);
  }
  EXPECT_NEAR(static_cast<double>(diff) / 1e5, 0.02, 0.005);
}

TEST(PredictLabels, SpeckleOnlyAddsEE) {
  const PointCloud f = simulated_frame();
  const PointCloud out = predict_labels(f, NoisyOracleSegmenter(0.0, 0.05, 6));
  std::size_t added = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.labels[i] == Label::EE) EXPECT_EQ(out.labels[i], Label::EE);
    if (f.labels[i] != Label::EE && out.labels[i] == Label::EE) ++added;
  }
  EXPECT_GT(added, 0u);
}

TEST(ClusterFilter, CompactBlobUnchanged) {
  Rng rng(1);
  const PointCloud b = blob(Vec3(0, 0, 1), 500, 0.03, rng);
  EXPECT_EQ(cluster_filter(b).points, b.points);
}

TEST(ClusterFilter, RemovesDistantSpeckle) {
  Rng rng(2);
  const PointCloud b = blob(Vec3(0, 0, 1), 500, 0.03, rng);
  PointCloud speckle;
  for (int i = 0; i < 20; ++i) speckle.push_back(Vec3(0.5, 0.1 * i, 1), Label::EE);
  const PointCloud out = cluster_filter(concat(b, speckle));
  EXPECT_EQ(out.points, b.points);
}

TEST(ClusterFilter, EqualBlobsTieBreakOnCentroidX) {
  Rng rng(3);
  const PointCloud right = blob(Vec3(1, 0, 1), 200, 0.02, rng);
  const PointCloud left = blob(Vec3(0, 0, 1), 200, 0.02, rng);
  // Right blob first in index order; the lower centroid x must still win.
  const PointCloud out = cluster_filter(concat(right, left));
  EXPECT_EQ(out.points, left.points);
  const PointCloud out2 = cluster_filter(concat(left, right));
  EXPECT_EQ(out2.points, left.points);
}

TEST(ClusterFilter, AllClustersTooSmall) {
  PointCloud c;
  for (int i = 0; i < 10; ++i) c.push_back(Vec3(i, 0, 0), Label::EE);
  try {
    cluster_filter(c);
    FAIL() << "fragmented cloud accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoValidCluster);
  }
  EXPECT_THROW(cluster_filter(PointCloud{}), Error);
}

TEST(ClusterFilter, ComponentsMatchBruteForce) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<Vec3> pts = test::random_points(rng, 300, 0.2);
    const double d = 0.02 + 0.01 * trial;
    const std::vector<std::size_t> got = single_linkage_components(pts, d);
    const std::vector<std::size_t> expected = brute_components(pts, d);
    EXPECT_EQ(got, expected) << "d = " << d;
  }
}

TEST(ClusterFilter, OutputIsConnectedSubset) {
  Rng rng(9);
  PointCloud c = blob(Vec3(0, 0, 1), 400, 0.05, rng);
  c = concat(c, blob(Vec3(0.3, 0, 1), 100, 0.02, rng));
  const PointCloud out = cluster_filter(c);
  ASSERT_GE(out.size(), 2u);
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_NE(std::find(c.points.begin(), c.points.end(), out.points[i]), c.points.end());
    double nearest = 1e9;
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (j != i) nearest = std::min(nearest, (out.points[i] - out.points[j]).norm());
    }
    EXPECT_LE(nearest, 0.03);
  }
}

TEST(ClusterFilter, SimulatedFrameKeepsAllEEPoints) {
  const PointCloud f = simulated_frame();
  const PointCloud ee = extract_label(f, Label::EE);
  EXPECT_EQ(cluster_filter(ee).size(), ee.size());
}
