#include <gtest/gtest.h>

#include "eecal/icp.hpp"
#include "eecal/pipeline.hpp"
#include "support.hpp"

using namespace eecal;
using test::default_model;

namespace {

struct View {
  Pose truth;
  PointCloud target;
};

View noiseless_view(const Pose& truth, const std::vector<EEPart>& hidden = {}) {
  CameraModel cam;
  cam.noise_sigma_1m = 0.0;
  RenderOptions opts;
  opts.hidden_parts = hidden;
  return {truth, render_frame(default_model(), truth, cam, {}, 1, opts)};
}

const IcpModel& icp_model() {
  static const IcpModel m = prepare_icp_model(default_model());
  return m;
}

/// Perturbs p by `degrees` about an axis through the EE origin and by `metres` along `dir`.
Pose offset(const Pose& p, double metres, double degrees, const Vec3& dir, const Vec3& axis) {
  return {Quaternion::from_axis_angle(axis, deg2rad(degrees)) * p.rotation, p.translation + metres * dir.normalized()};
}

void expect_monotone(const IcpResult& r) {
  for (const std::vector<double>& h : r.pass_rmse_histories) {
    for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LE(h[i], h[i - 1]);
  }
}

}  // namespace

TEST(IcpRefine, GroundTruthIsFixedPoint) {
  const View v = noiseless_view({Quaternion::from_rpy(0.3, -0.2, 0.4), Vec3(0.02, -0.03, 0.9)});
  const PointCloud source = visible_source(icp_model(), v.truth, HprParams{});
  const IcpResult r = icp_refine(source, v.target, v.truth);
  EXPECT_LE(r.iterations_used, 2);
  EXPECT_TRUE(r.converged);
  EXPECT_LE((r.refined_pose.translation - v.truth.translation).norm(), 1e-9);
  EXPECT_LE(rotation_distance(r.refined_pose.rotation, v.truth.rotation), 1e-9);
  EXPECT_NEAR(r.inlier_rmse, 0.0, 1e-9);
}

TEST(IcpRefine, RecoversSmallOffsetOnPartialView) {
  Rng rng(5);
  for (int i = 0; i < 5; ++i) {
    const Pose truth{Quaternion::from_rpy(0.4 * i - 0.8, 0.2, 0.3 * i), Vec3(0.01 * i, 0.02, 0.8 + 0.05 * i)};
    const View v = noiseless_view(truth);
    const Pose initial = offset(truth, 0.01, 3.0, random_unit_vector(rng), random_unit_vector(rng));
    const IcpResult r = refine_pose(icp_model(), v.target, initial, IcpConfig{}, HprParams{});
    EXPECT_LE((r.refined_pose.translation - truth.translation).norm(), 1e-4) << "pose " << i;
    EXPECT_LE(rad2deg(rotation_distance(r.refined_pose.rotation, truth.rotation)), 0.01) << "pose " << i;
    expect_monotone(r);
  }
}

TEST(IcpRefine, FarInitialisationHasNoCorrespondences) {
  const View v = noiseless_view({Quaternion::identity(), Vec3(0, 0, 1)});
  const Pose initial{Quaternion::identity(), Vec3(0.5, 0, 1)};
  const PointCloud source = visible_source(icp_model(), initial, HprParams{});
  try {
    icp_refine(source, v.target, initial);
    FAIL() << "disjoint clouds accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoCorrespondences);
  }
}

TEST(IcpRefine, TooFewPoints) {
  PointCloud small;
  small.points = std::vector<Vec3>(9, Vec3(0, 0, 1));
  const View v = noiseless_view({Quaternion::identity(), Vec3(0, 0, 1)});
  EXPECT_THROW(icp_refine(small, v.target, Pose::identity()), Error);
  EXPECT_THROW(icp_refine(v.target, small, Pose::identity()), Error);
}

TEST(IcpRefine, RmseNonIncreasingOnNoisyTargets) {
  Rng rng(6);
  CameraModel cam;  // default depth noise
  for (int i = 0; i < 10; ++i) {
    const Pose truth{Quaternion::from_rpy(0.1 * i, -0.3, 0.2 * i), Vec3(0.0, 0.01 * i, 1.0)};
    const PointCloud target = render_frame(default_model(), truth, cam, {}, derive_seed(3, {std::uint64_t(i)}));
    const Pose initial = offset(truth, 0.015, 4.0, random_unit_vector(rng), random_unit_vector(rng));
    const IcpResult r = refine_pose(icp_model(), target, initial, IcpConfig{}, HprParams{});
    expect_monotone(r);
    EXPECT_GE(r.fitness, 0.0);
    EXPECT_LE(r.fitness, 1.0);
    EXPECT_GE(r.inlier_rmse, 0.0);
  }
}

TEST(IcpRefine, RefinedPoseReproducesMovedSource) {
  const Pose truth{Quaternion::from_rpy(-0.2, 0.1, 0.5), Vec3(-0.02, 0.01, 0.95)};
  const View v = noiseless_view(truth);
  const Pose initial = offset(truth, 0.008, 2.0, Vec3(1, 1, 0), Vec3(0, 1, 1));
  std::vector<std::size_t> reps = icp_model().representatives;
  PointCloud model_points;
  for (std::size_t i : reps) model_points.points.push_back(default_model().surface_cloud.points[i]);
  const PointCloud source = transform_points(initial, model_points);
  const IcpResult r = icp_refine(source, v.target, initial);
  for (std::size_t i = 0; i < source.size(); ++i) {
    EXPECT_LE((r.correction.apply(source.points[i]) - r.refined_pose.apply(model_points.points[i])).norm(), 1e-9);
  }
}

TEST(RefineEstimates, CandidatesFailIndependently) {
  const Pose truth{Quaternion::from_rpy(0.2, 0.1, -0.3), Vec3(0, 0, 1)};
  const View v = noiseless_view(truth);
  const Pose good = offset(truth, 0.005, 1.0, Vec3(1, 0, 0), Vec3(0, 0, 1));
  const Pose bad = compose(Pose::from_translation(Vec3(0.5, 0, 0)), truth);

  const std::vector<PoseCandidate> both{{Method::Rpt, false, good, {}}, {Method::Kpm, false, good, {}}};
  RefineOutcome out = refine_estimates(icp_model(), v.target, both, IcpConfig{}, HprParams{});
  EXPECT_EQ(out.refined.size(), 2u);
  EXPECT_TRUE(out.errors.empty());

  const std::vector<PoseCandidate> rpt_only{{Method::Rpt, false, good, {}}};
  out = refine_estimates(icp_model(), v.target, rpt_only, IcpConfig{}, HprParams{});
  ASSERT_EQ(out.refined.size(), 1u);
  EXPECT_EQ(out.refined[0].method, Method::Rpt);

  const std::vector<PoseCandidate> one_bad{{Method::Rpt, false, good, {}}, {Method::Kpm, false, bad, {}}};
  out = refine_estimates(icp_model(), v.target, one_bad, IcpConfig{}, HprParams{});
  ASSERT_EQ(out.refined.size(), 1u);
  EXPECT_EQ(out.refined[0].method, Method::Rpt);
  ASSERT_EQ(out.errors.size(), 1u);
  EXPECT_NE(out.errors[0].find("kpm+icp"), std::string::npos);

  const std::vector<PoseCandidate> all_bad{{Method::Rpt, false, bad, {}}, {Method::Kpm, false, bad, {}}};
  out = refine_estimates(icp_model(), v.target, all_bad, IcpConfig{}, HprParams{});
  EXPECT_TRUE(out.refined.empty());
  EXPECT_EQ(out.errors.size(), 2u);
}

TEST(IcpConfig, Validation) {
  EXPECT_NO_THROW(IcpConfig{}.validate());
  IcpConfig c;
  c.max_iterations = 0;
  EXPECT_THROW(c.validate(), Error);
  c = IcpConfig{};
  c.max_correspondence_distance = 0.0;
  EXPECT_THROW(c.validate(), Error);
  c = IcpConfig{};
  c.relative_rmse_epsilon = -1.0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(IcpModel, SourceCappedAtConfiguredSize) {
  EXPECT_LE(icp_model().representatives.size(), IcpConfig{}.max_source_points);
  EXPECT_GT(icp_model().representatives.size(), 100u);
}
