#pragma once

// Point-to-point ICP refinement of an EE pose estimate against the segmented
// EE points of a frame.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "eecal/ee_model.hpp"
#include "eecal/error.hpp"
#include "eecal/geometry.hpp"
#include "eecal/kdtree.hpp"
#include "eecal/visibility.hpp"

namespace eecal {

struct IcpConfig {
  double max_correspondence_distance = 0.02;
  int max_iterations = 50;
  double relative_rmse_epsilon = 1e-6;
  double relative_fitness_epsilon = 1e-6;
  /// Source = model voxel representatives visible from the camera at the
  /// current estimate; visibility is recomputed between passes.
  int visibility_passes = 3;
  double source_voxel_size = 0.005;
  std::size_t max_source_points = 5000;

  void validate() const {
    if (!(max_correspondence_distance > 0.0) || max_iterations < 1 || !(relative_rmse_epsilon > 0.0) ||
        !(relative_fitness_epsilon > 0.0) || visibility_passes < 1 || !(source_voxel_size > 0.0) ||
        max_source_points < 10) {
      throw Error(ErrorKind::InvalidArgument, "invalid ICP configuration");
    }
  }
};

struct IcpResult {
  Pose refined_pose;
  Pose correction;  // refined_pose = compose(correction, initial)
  double fitness = 0.0;
  double inlier_rmse = 0.0;
  int iterations_used = 0;
  bool converged = false;
  std::vector<double> rmse_history;  // inlier RMSE of every accepted iterate
  std::vector<std::vector<double>> pass_rmse_histories;
};

namespace detail {

struct Correspondences {
  std::vector<Vec3> source;
  std::vector<Vec3> target;
  double fitness = 0.0;
  double rmse = 0.0;
};

inline Correspondences correspond(const std::vector<Vec3>& source, const PointCloud& target, const KdTree& tree,
                                  double max_distance) {
  Correspondences c;
  double sq = 0.0;
  for (const Vec3& s : source) {
    if (const auto nn = tree.nearest(s, max_distance)) {
      c.source.push_back(s);
      c.target.push_back(target.points[nn->index]);
      sq += nn->squared_distance;
    }
  }
  if (!c.source.empty()) {
    c.fitness = static_cast<double>(c.source.size()) / static_cast<double>(source.size());
    c.rmse = std::sqrt(sq / static_cast<double>(c.source.size()));
  }
  return c;
}

inline double relative_change(double now, double before) {
  return std::abs(now - before) / std::max(std::abs(before), 1e-12);
}

}  // namespace detail

/// Aligns `source` (model points already placed at `initial`) to `target`.
/// An iterate is accepted only if it does not increase the inlier RMSE; the
/// first rejected iterate ends the run.
/// `tree` must index `target`.
inline IcpResult icp_refine(const PointCloud& source, const PointCloud& target, const KdTree& tree,
                            const Pose& initial, const IcpConfig& cfg) {
  cfg.validate();
  if (source.size() < 10 || target.size() < 10) {
    throw Error(ErrorKind::TooFewPoints, "ICP needs at least 10 source and 10 target points");
  }
  if (!initial.translation.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "ICP initial pose is not finite");
  }

  IcpResult out;
  Pose correction = Pose::identity();
  std::vector<Vec3> moved = source.points;
  detail::Correspondences corr = detail::correspond(moved, target, tree, cfg.max_correspondence_distance);
  if (corr.source.empty()) {
    throw Error(ErrorKind::NoCorrespondences, "no source point within the correspondence distance of the target");
  }
  out.rmse_history.push_back(corr.rmse);

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    out.iterations_used = it;
    const Pose delta = kabsch_fit(corr.source, corr.target);
    const Pose candidate = compose(delta, correction);
    std::vector<Vec3> candidate_points = transform_points(candidate, std::span<const Vec3>(source.points));
    detail::Correspondences next =
        detail::correspond(candidate_points, target, tree, cfg.max_correspondence_distance);
    if (next.source.size() < 3 || next.rmse > corr.rmse) {
      out.converged = true;
      break;
    }
    const bool small = detail::relative_change(next.rmse, corr.rmse) < cfg.relative_rmse_epsilon &&
                       detail::relative_change(next.fitness, corr.fitness) < cfg.relative_fitness_epsilon;
    correction = candidate;
    corr = std::move(next);
    out.rmse_history.push_back(corr.rmse);
    if (small) {
      out.converged = true;
      break;
    }
  }

  out.correction = correction;
  out.refined_pose = compose(correction, initial);
  out.fitness = corr.fitness;
  out.inlier_rmse = corr.rmse;
  out.pass_rmse_histories = {out.rmse_history};
  return out;
}

inline IcpResult icp_refine(const PointCloud& source, const PointCloud& target, const Pose& initial,
                            const IcpConfig& cfg = {}) {
  return icp_refine(source, target, KdTree(target.points), initial, cfg);
}

/// Model prepared once per EE model: voxel representatives used as ICP source.
struct IcpModel {
  const EEModel* model = nullptr;
  std::vector<std::size_t> representatives;
};

inline IcpModel prepare_icp_model(const EEModel& model, const IcpConfig& cfg = {}) {
  IcpModel m{&model, {}};
  double voxel = cfg.source_voxel_size;
  for (;;) {
    m.representatives = voxel_representatives(model.surface_cloud.points, voxel);
    if (m.representatives.size() <= cfg.max_source_points) break;
    voxel *= 1.25;
  }
  return m;
}

/// Model source cloud for an estimate: representatives visible from the
/// camera when the model sits at `pose`.
inline PointCloud visible_source(const IcpModel& m, const Pose& pose, const HprParams& hpr) {
  const std::vector<Vec3> placed = transform_points(pose, std::span<const Vec3>(m.model->surface_cloud.points));
  const std::vector<char> visible = visible_mask(placed, hpr);
  PointCloud src;
  src.points.reserve(m.representatives.size());
  for (std::size_t i : m.representatives) {
    if (visible[i]) src.points.push_back(placed[i]);
  }
  return src;
}

/// Runs icp_refine for up to cfg.visibility_passes passes, re-selecting the
/// visible part of the model at each new estimate.
inline IcpResult refine_pose(const IcpModel& m, const PointCloud& target, const Pose& initial,
                             const IcpConfig& cfg, const HprParams& hpr) {
  cfg.validate();
  Pose pose = initial;
  IcpResult last;
  int iterations = 0;
  std::vector<std::vector<double>> histories;
  const KdTree tree(target.points);
  for (int pass = 0; pass < cfg.visibility_passes; ++pass) {
    const PointCloud source = visible_source(m, pose, hpr);
    last = icp_refine(source, target, tree, pose, cfg);
    iterations += last.iterations_used;
    histories.push_back(last.rmse_history);
    pose = last.refined_pose;
    const double moved = last.correction.translation.norm() + last.correction.rotation.angle();
    if (moved < 1e-10) break;
  }
  last.refined_pose = pose;
  last.correction = compose(pose, invert(initial));
  last.iterations_used = iterations;
  last.pass_rmse_histories = std::move(histories);
  return last;
}

}  // namespace eecal
