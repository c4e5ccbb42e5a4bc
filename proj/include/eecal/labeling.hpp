#pragma once

// Automatic ground-truth generation from a calibrated setup: background
// subtraction, EE extraction through the transformed EE box, and keypoint
// tagging by nearest point.

#include <array>
#include <span>
#include <vector>

#include "eecal/error.hpp"
#include "eecal/geometry.hpp"
#include "eecal/kdtree.hpp"

namespace eecal {

struct LabelingConfig {
  double background_match_radius = 0.005;
  double keypoint_distance_threshold = 0.01;
  double ee_bbox_inflation = 0.01;
};

/// Background if some background point lies within the match radius, Arm otherwise.
inline PointCloud subtract_background(const PointCloud& frame, const PointCloud& background,
                                      const LabelingConfig& cfg = {}) {
  if (frame.empty() || background.empty()) {
    throw Error(ErrorKind::EmptyCloud, "background subtraction needs non-empty frame and background clouds");
  }
  const KdTree tree(background.points);
  PointCloud out = frame;
  out.labels.assign(frame.size(), Label::Arm);
  for (std::size_t i = 0; i < frame.size(); ++i) {
    if (tree.nearest(frame.points[i], cfg.background_match_radius)) out.labels[i] = Label::Background;
  }
  return out;
}

/// Relabels Arm points inside the EE box (EE frame, inflated) as EE. The box
/// is placed with compose(calibration, t_b_ee).
inline PointCloud extract_ee_points(const PointCloud& labeled, const Pose& calibration, const Pose& t_b_ee,
                                    const Aabb& ee_bbox, const LabelingConfig& cfg = {}) {
  if (!labeled.has_labels()) throw Error(ErrorKind::InvalidArgument, "extract_ee_points needs a labeled cloud");
  const Pose cam_to_ee = invert(compose(calibration, t_b_ee));
  const Aabb box = ee_bbox.inflated(cfg.ee_bbox_inflation);
  PointCloud out = labeled;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.labels[i] == Label::Arm && box.contains(cam_to_ee.apply(out.points[i]))) out.labels[i] = Label::EE;
  }
  return out;
}

/// Keypoint id per point of `ee_cloud` (-1 = none). Each reference keypoint,
/// placed in the camera frame, tags its nearest EE point when that point is
/// within the threshold. A point keeps the smallest keypoint id competing for it.
/// A non-positive threshold tags nothing.
inline std::vector<int> label_keypoints(const PointCloud& ee_cloud, const Pose& ee_pose_in_camera,
                                        std::span<const Vec3> ref_keypoints, const LabelingConfig& cfg = {}) {
  if (ee_cloud.empty()) throw Error(ErrorKind::EmptyCloud, "keypoint labeling needs EE points");
  std::vector<int> ids(ee_cloud.size(), kNoKeypoint);
  if (!(cfg.keypoint_distance_threshold > 0.0)) return ids;
  const KdTree tree(ee_cloud.points);
  for (std::size_t k = 0; k < ref_keypoints.size(); ++k) {
    const auto nn = tree.nearest(ee_pose_in_camera.apply(ref_keypoints[k]), cfg.keypoint_distance_threshold);
    if (nn && ids[nn->index] == kNoKeypoint) ids[nn->index] = static_cast<int>(k);
  }
  return ids;
}

}  // namespace eecal
