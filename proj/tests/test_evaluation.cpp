#include <gtest/gtest.h>

#include <numbers>

#include "eecal/evaluation.hpp"
#include "support.hpp"

using namespace eecal;
using test::default_model;

TEST(TranslationError, Examples) {
  Rng rng(1);
  const Pose p = test::random_pose(rng);
  EXPECT_EQ(translation_error(p, p), 0.0);
  EXPECT_NEAR(translation_error(p, {p.rotation, p.translation + Vec3(0, 3e-2, 4e-2)}), 0.05, 1e-15);
  const Pose q = test::random_pose(rng);
  const Vec3 d = p.translation - q.translation;
  EXPECT_DOUBLE_EQ(translation_error(p, q), std::sqrt(d.x() * d.x() + d.y() * d.y() + d.z() * d.z()));
}

TEST(RotationError, Examples) {
  const Quaternion q = Quaternion::from_rpy(0.1, 0.2, 0.3);
  EXPECT_NEAR(rotation_error({q, Vec3::Zero()}, {q, Vec3::Zero()}), 0.0, 1e-7);
  EXPECT_NEAR(rotation_error(Pose::identity(), {Quaternion::from_axis_angle(Vec3::UnitZ(), std::numbers::pi / 2),
                                                Vec3::Zero()}),
              std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(rotation_error({q, Vec3::Zero()}, {q.negated(), Vec3::Zero()}), 0.0, 1e-7);
}

TEST(AddMetric, Examples) {
  const std::vector<Vec3>& pts = default_model().surface_cloud.points;
  Rng rng(2);
  const Pose gt = test::random_pose(rng);
  EXPECT_EQ(add_metric(pts, gt, gt), 0.0);
  const Vec3 d(0.003, -0.004, 0.012);
  EXPECT_NEAR(add_metric(pts, gt, {gt.rotation, gt.translation + d}), d.norm(), 1e-12);
  try {
    add_metric(std::vector<Vec3>{}, gt, gt);
    FAIL() << "empty cloud accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyCloud);
  }
}

TEST(AddMetric, RotationAboutCentroidMatchesChordLengths) {
  const std::vector<Vec3>& pts = default_model().surface_cloud.points;
  const Vec3 c = centroid(pts);
  const Vec3 axis = Vec3(0.3, -0.5, 0.8).normalized();
  const double a = deg2rad(5.0);
  const Quaternion dq = Quaternion::from_axis_angle(axis, a);
  // Rotation by `a` about the centroid: p -> dq (p - c) + c.
  const Pose delta{dq, c - dq.rotate(c)};
  const Pose gt{Quaternion::identity(), Vec3(0, 0, 1)};
  const Pose pred = compose(gt, delta);
  // Each point moves along a chord 2 sin(a/2) r_perp, with r_perp its
  // distance from the rotation axis through the centroid.
  double sum = 0.0;
  for (const Vec3& p : pts) {
    const Vec3 v = p - c;
    const double r_perp = (v - v.dot(axis) * axis).norm();
    sum += 2.0 * std::sin(a / 2.0) * r_perp;
  }
  EXPECT_NEAR(add_metric(pts, gt, pred), sum / static_cast<double>(pts.size()), 1e-12);
}

TEST(AddMetric, UpperBound) {
  const std::vector<Vec3>& pts = default_model().surface_cloud.points;
  const Vec3 c = centroid(pts);
  double r_max = 0.0;
  for (const Vec3& p : pts) r_max = std::max(r_max, (p - c).norm());
  Rng rng(3);
  std::uniform_real_distribution<double> angle(0.0, deg2rad(10.0));
  for (int i = 0; i < 200; ++i) {
    const Pose gt = test::random_pose(rng);
    const Quaternion dq = Quaternion::from_axis_angle(random_unit_vector(rng), angle(rng));
    const Pose pred{dq * gt.rotation, gt.translation + 0.01 * random_unit_vector(rng)};
    // Offsets measured about the centroid: the bound uses the centroid shift.
    const double t_err = (gt.apply(c) - pred.apply(c)).norm();
    EXPECT_LE(add_metric(pts, gt, pred), t_err + r_max * rotation_error(gt, pred) + 1e-12);
  }
}

TEST(MeanStd, PopulationStatistics) {
  const MeanStd m = mean_std(std::vector<double>{2, 4, 4, 4, 5, 5, 7, 9});
  EXPECT_DOUBLE_EQ(m.mean, 5.0);
  EXPECT_DOUBLE_EQ(m.std, 2.0);
  EXPECT_EQ(mean_std(std::vector<double>{}).mean, 0.0);
}

TEST(EvaluateDataset, NoiselessOracleIsExact) {
  const Scenario s = test::noiseless_scenario(2);
  const Dataset ds = generate_dataset(s, default_model());
  const EvaluationReport r = evaluate_dataset(ds, default_model(), test::oracle_config());
  ASSERT_EQ(r.rows.size(), 4u);
  EXPECT_EQ(r.sane_frames, ds.frames.size());
  for (const MethodRow& row : r.rows) {
    EXPECT_EQ(row.frames, ds.frames.size());
    EXPECT_LE(row.translation.mean, 1e-4);
    EXPECT_LE(row.rotation.mean, deg2rad(0.01));
    EXPECT_LE(row.add.mean, 1e-4);
    for (double acc : row.add_accuracy) EXPECT_EQ(acc, 1.0);
  }
  EXPECT_EQ(r.rows[0].method, Method::Rpt);
  EXPECT_FALSE(r.rows[0].icp);
  EXPECT_TRUE(r.rows[1].icp);
  EXPECT_EQ(r.rows[2].method, Method::Kpm);
  ASSERT_TRUE(r.calibration_with_icp.available);
  EXPECT_LE(r.calibration_with_icp.translation_error, 1e-4);
  EXPECT_LE(r.calibration_without_icp.translation_error, 1e-4);
}

TEST(EvaluateDataset, MissingGroundTruth) {
  Dataset ds = generate_dataset(test::noiseless_scenario(1), default_model());
  ds.gt_calibration.reset();
  try {
    evaluate_dataset(ds, default_model(), test::oracle_config());
    FAIL() << "evaluation without ground truth";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingGroundTruth);
  }
}

TEST(EvaluateDataset, MissingPosesCountAsMisses) {
  Scenario s = test::noiseless_scenario(1);
  const Dataset ds = generate_dataset(s, default_model());
  PipelineConfig cfg = test::oracle_config(0.0, 0.0, 1.0);  // every keypoint dropped
  const EvaluationReport r = evaluate_dataset(ds, default_model(), cfg);
  const MethodRow& kpm = r.rows[2];
  EXPECT_EQ(kpm.frames, 0u);
  for (double acc : kpm.add_accuracy) EXPECT_EQ(acc, 0.0);
  for (double acc : r.rows[0].add_accuracy) EXPECT_EQ(acc, 1.0);
}
