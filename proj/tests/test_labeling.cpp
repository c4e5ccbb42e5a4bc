#include <gtest/gtest.h>

#include "eecal/labeling.hpp"
#include "eecal/simulator.hpp"
#include "support.hpp"

using namespace eecal;
using test::default_model;

namespace {

struct NoiselessFixture {
  Scenario scenario = test::noiseless_scenario(1);
  Dataset ds = generate_dataset(scenario, default_model());
};

const NoiselessFixture& fixture() {
  static const NoiselessFixture f;
  return f;
}

PointCloud strip_labels(const PointCloud& c) {
  PointCloud out;
  out.points = c.points;
  return out;
}

}  // namespace

TEST(SubtractBackground, FrameEqualToBackground) {
  const PointCloud& bg = fixture().ds.background_cloud;
  const PointCloud out = subtract_background(strip_labels(bg), bg);
  EXPECT_EQ(out.indices_with(Label::Background).size(), bg.size());
}

TEST(SubtractBackground, DistantPointIsArm) {
  PointCloud bg;
  bg.points = {Vec3(0, 0, 2), Vec3(0.1, 0, 2)};
  PointCloud frame = bg;
  frame.points.push_back(Vec3(0, 0, 1));
  const PointCloud out = subtract_background(frame, bg);
  EXPECT_EQ(out.labels, (std::vector<Label>{Label::Background, Label::Background, Label::Arm}));
}

TEST(SubtractBackground, EmptyInputs) {
  PointCloud one;
  one.points = {Vec3::Zero()};
  EXPECT_THROW(subtract_background(PointCloud{}, one), Error);
  EXPECT_THROW(subtract_background(one, PointCloud{}), Error);
}

TEST(SubtractBackground, AgreesWithGroundTruthOnNoiselessFrames) {
  for (const Frame& f : fixture().ds.frames) {
    const PointCloud out = subtract_background(strip_labels(f.cloud), fixture().ds.background_cloud);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < f.cloud.size(); ++i) {
      const bool gt_bg = f.cloud.labels[i] == Label::Background;
      agree += gt_bg == (out.labels[i] == Label::Background) ? 1 : 0;
    }
    EXPECT_GE(static_cast<double>(agree) / static_cast<double>(f.cloud.size()), 0.99);
  }
}

TEST(SubtractBackground, MonotoneInRadius) {
  const Frame& f = fixture().ds.frames[0];
  std::size_t previous = 0;
  for (double r : {0.001, 0.005, 0.02, 0.05}) {
    LabelingConfig cfg;
    cfg.background_match_radius = r;
    const std::size_t n = subtract_background(strip_labels(f.cloud), fixture().ds.background_cloud, cfg)
                              .indices_with(Label::Background)
                              .size();
    EXPECT_GE(n, previous);
    previous = n;
  }
}

TEST(ExtractEEPoints, GroundTruthCalibrationReproducesLabels) {
  const Dataset& ds = fixture().ds;
  for (const Frame& f : ds.frames) {
    PointCloud arm = f.cloud;
    for (Label& l : arm.labels) l = l == Label::Background ? Label::Background : Label::Arm;
    const PointCloud out = extract_ee_points(arm, *ds.gt_calibration, f.t_b_ee, default_model().bbox);
    EXPECT_EQ(out.labels, f.cloud.labels);
  }
}

TEST(ExtractEEPoints, ShiftedCalibrationFindsNothing) {
  const Dataset& ds = fixture().ds;
  const Frame& f = ds.frames[0];
  PointCloud arm = f.cloud;
  for (Label& l : arm.labels) l = l == Label::Background ? Label::Background : Label::Arm;
  const Pose shifted = compose(Pose::from_translation(Vec3(1, 0, 0)), *ds.gt_calibration);
  const PointCloud out = extract_ee_points(arm, shifted, f.t_b_ee, default_model().bbox);
  EXPECT_TRUE(out.indices_with(Label::EE).empty());
}

TEST(ExtractEEPoints, NoisyFrameRecall) {
  Scenario s = test::noiseless_scenario(1);
  s.camera.noise_sigma_1m = 0.002;
  const Dataset ds = generate_dataset(s, default_model());
  for (const Frame& f : ds.frames) {
    PointCloud arm = f.cloud;
    for (Label& l : arm.labels) l = l == Label::Background ? Label::Background : Label::Arm;
    const PointCloud out = extract_ee_points(arm, *ds.gt_calibration, f.t_b_ee, default_model().bbox);
    std::size_t truth = 0, found = 0;
    for (std::size_t i = 0; i < f.cloud.size(); ++i) {
      if (f.cloud.labels[i] != Label::EE) continue;
      ++truth;
      found += out.labels[i] == Label::EE ? 1 : 0;
    }
    EXPECT_GE(static_cast<double>(found) / static_cast<double>(truth), 0.99);
  }
}

TEST(LabelKeypoints, NoiselessFullViewFindsAllSix) {
  const Dataset& ds = fixture().ds;
  for (const Frame& f : ds.frames) {
    const PointCloud ee = f.cloud.subset(f.cloud.indices_with(Label::EE));
    const Pose ee_pose = compose(*ds.gt_calibration, f.t_b_ee);
    const std::vector<int> ids = label_keypoints(ee, ee_pose, default_model().ref_keypoints);
    std::vector<int> found;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] == kNoKeypoint) continue;
      found.push_back(ids[i]);
      const Vec3 ref = ee_pose.apply(default_model().ref_keypoints[static_cast<std::size_t>(ids[i])]);
      EXPECT_LE((ee.points[i] - ref).norm(), 0.002);
    }
    std::sort(found.begin(), found.end());
    EXPECT_EQ(found, (std::vector<int>{0, 1, 2, 3, 4, 5}));
  }
}

TEST(LabelKeypoints, OccludedFingerLosesItsTip) {
  CameraModel cam;
  cam.noise_sigma_1m = 0.0;
  RenderOptions opts;
  opts.hidden_parts = {EEPart::FingerNegative};
  const Pose ee_pose{Quaternion::identity(), Vec3(0, 0, 1)};
  const PointCloud f = render_frame(default_model(), ee_pose, cam, {}, 1, opts);
  const std::vector<int> ids = label_keypoints(f, ee_pose, default_model().ref_keypoints);
  const auto count = std::count_if(ids.begin(), ids.end(), [](int id) { return id != kNoKeypoint; });
  EXPECT_LE(count, 5);
  EXPECT_EQ(std::count(ids.begin(), ids.end(), 4), 0);
}

TEST(LabelKeypoints, ZeroThresholdTagsNothing) {
  const Frame& f = fixture().ds.frames[0];
  const PointCloud ee = f.cloud.subset(f.cloud.indices_with(Label::EE));
  LabelingConfig cfg;
  cfg.keypoint_distance_threshold = 0.0;
  const std::vector<int> ids =
      label_keypoints(ee, compose(*fixture().ds.gt_calibration, f.t_b_ee), default_model().ref_keypoints, cfg);
  EXPECT_TRUE(std::all_of(ids.begin(), ids.end(), [](int id) { return id == kNoKeypoint; }));
}

TEST(LabelKeypoints, IdsUniqueAndWithinThreshold) {
  // Keypoints crowded together compete for one cloud point: lower id wins.
  PointCloud c;
  c.points = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
  const std::array<Vec3, 3> refs{Vec3(0.001, 0, 0), Vec3(-0.001, 0, 0), Vec3(0.999, 0, 0)};
  const std::vector<int> ids = label_keypoints(c, Pose::identity(), refs);
  EXPECT_EQ(ids, (std::vector<int>{0, 2}));
  EXPECT_THROW(label_keypoints(PointCloud{}, Pose::identity(), refs), Error);
}
