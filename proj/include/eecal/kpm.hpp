#pragma once

// Pose route 2: named keypoints predicted on the EE points, rigidly fitted to
// the reference keypoints of the model.

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "eecal/error.hpp"
#include "eecal/geometry.hpp"
#include "eecal/kdtree.hpp"
#include "eecal/random.hpp"

namespace eecal {

struct Keypoint {
  int id = kNoKeypoint;
  Vec3 position = Vec3::Zero();
};

class KeypointPredictor {
 public:
  virtual ~KeypointPredictor() = default;
  virtual std::vector<Keypoint> predict(const PointCloud& ee_points) const = 0;
};

/// Keypoints tagged in a labeled cloud, ordered by id.
inline std::vector<Keypoint> keypoints_from_labels(const PointCloud& cloud) {
  std::vector<Keypoint> out;
  for (std::size_t i = 0; i < cloud.keypoint_ids.size(); ++i) {
    if (cloud.keypoint_ids[i] != kNoKeypoint) out.push_back({cloud.keypoint_ids[i], cloud.points[i]});
  }
  std::sort(out.begin(), out.end(), [](const Keypoint& a, const Keypoint& b) { return a.id < b.id; });
  return out;
}

/// Drops each keypoint with probability `dropout`, then adds isotropic
/// Gaussian noise of standard deviation `sigma` per axis.
inline std::vector<Keypoint> perturb_keypoints(std::span<const Keypoint> truth, double sigma, double dropout,
                                               Rng& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<Keypoint> out;
  for (const Keypoint& k : truth) {
    const bool dropped = dropout > 0.0 && uni(rng) < dropout;
    const Vec3 offset(n(rng), n(rng), n(rng));
    if (dropped) continue;
    out.push_back({k.id, k.position + sigma * offset});
  }
  return out;
}

/// Ground-truth keypoints with noise and dropout, snapped to the nearest EE point.
class NoisyOracleKeypoints final : public KeypointPredictor {
 public:
  NoisyOracleKeypoints(std::vector<Keypoint> truth, double sigma, double dropout, std::uint64_t seed)
      : truth_(std::move(truth)), sigma_(sigma), dropout_(dropout), seed_(seed) {}

  std::vector<Keypoint> predict(const PointCloud& ee_points) const override {
    if (ee_points.empty()) return {};
    Rng rng(seed_);
    std::vector<Keypoint> raw = perturb_keypoints(truth_, sigma_, dropout_, rng);
    const KdTree tree(ee_points.points);
    for (Keypoint& k : raw) k.position = ee_points.points[tree.nearest(k.position)->index];
    return raw;
  }

 private:
  std::vector<Keypoint> truth_;
  double sigma_;
  double dropout_;
  std::uint64_t seed_;
};

inline std::vector<Keypoint> predict_keypoints(const PointCloud& ee_points, const KeypointPredictor& predictor) {
  return predictor.predict(ee_points);
}

/// Keeps keypoints lying within `radius` of some EE point.
inline std::vector<Keypoint> filter_high_quality(std::span<const Keypoint> predicted, const PointCloud& ee_points,
                                                 double radius) {
  std::vector<Keypoint> out;
  if (ee_points.empty()) return out;
  const KdTree tree(ee_points.points);
  for (const Keypoint& k : predicted) {
    if (tree.nearest(k.position, radius)) out.push_back(k);
  }
  return out;
}

struct KpmOptions {
  std::size_t min_keypoints = 4;
  double quality_radius = 0.03;
  /// Matched references whose second principal extent falls below this
  /// fraction of the first are treated as collinear.
  double collinearity_ratio = 1e-3;
};

/// T_C^EE fitted from reference keypoints (EE frame) to predictions (camera frame).
inline Pose kpm_pose(std::span<const Keypoint> predicted, std::span<const Vec3> ref_keypoints,
                     const KpmOptions& options = {}) {
  std::array<bool, kNumKeypoints> seen{};
  std::vector<Vec3> src;
  std::vector<Vec3> dst;
  for (const Keypoint& k : predicted) {
    if (k.id < 0 || static_cast<std::size_t>(k.id) >= ref_keypoints.size()) {
      throw Error(ErrorKind::InvalidArgument, "keypoint id " + std::to_string(k.id) + " has no reference");
    }
    if (seen[static_cast<std::size_t>(k.id)]) {
      throw Error(ErrorKind::InvalidArgument, "duplicate keypoint id " + std::to_string(k.id));
    }
    seen[static_cast<std::size_t>(k.id)] = true;
    src.push_back(ref_keypoints[static_cast<std::size_t>(k.id)]);
    dst.push_back(k.position);
  }
  if (src.size() < options.min_keypoints) {
    throw Error(ErrorKind::TooFewKeypoints, "need at least " + std::to_string(options.min_keypoints) +
                                                " keypoints, got " + std::to_string(src.size()));
  }
  const Vec3 c = centroid(src);
  Eigen::MatrixXd centered(3, static_cast<Eigen::Index>(src.size()));
  for (std::size_t i = 0; i < src.size(); ++i) centered.col(static_cast<Eigen::Index>(i)) = src[i] - c;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
  const Eigen::VectorXd sv = svd.singularValues();
  if (sv(1) < options.collinearity_ratio * sv(0)) {
    throw Error(ErrorKind::DegenerateGeometry, "matched keypoints are (near) collinear");
  }
  return kabsch_fit(src, dst);
}

}  // namespace eecal
