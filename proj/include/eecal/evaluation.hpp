#pragma once

// Pose error metrics and the dataset-level report (RPT / KPM, with and
// without ICP).

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "eecal/calibration.hpp"
#include "eecal/error.hpp"
#include "eecal/geometry.hpp"
#include "eecal/pipeline.hpp"

namespace eecal {

inline double translation_error(const Pose& gt, const Pose& pred) { return (gt.translation - pred.translation).norm(); }

inline double rotation_error(const Pose& gt, const Pose& pred) { return rotation_distance(gt.rotation, pred.rotation); }

/// Mean distance between the model points placed with `gt` and with `pred`.
inline double add_metric(std::span<const Vec3> model_points, const Pose& gt, const Pose& pred) {
  if (model_points.empty()) throw Error(ErrorKind::EmptyCloud, "ADD needs a non-empty model cloud");
  double sum = 0.0;
  for (const Vec3& p : model_points) sum += (gt.apply(p) - pred.apply(p)).norm();
  return sum / static_cast<double>(model_points.size());
}

struct PoseErrorReport {
  double translation_error = 0.0;  // m
  double rotation_error = 0.0;     // rad
  double add = 0.0;                // m
};

inline PoseErrorReport pose_errors(std::span<const Vec3> model_points, const Pose& gt, const Pose& pred) {
  return {translation_error(gt, pred), rotation_error(gt, pred), add_metric(model_points, gt, pred)};
}

struct CandidateReport {
  Method method = Method::Rpt;
  bool icp = false;
  PoseErrorReport errors;
  std::optional<IcpResult> icp_stats;
};

struct FrameReport {
  std::size_t frame_index = 0;
  int config_id = 0;
  bool sane = false;
  std::string rejection;
  std::size_t ee_points = 0;
  std::size_t keypoints_used = 0;
  std::vector<CandidateReport> candidates;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

inline MeanStd mean_std(std::span<const double> v) {
  MeanStd m;
  if (v.empty()) return m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.std += (x - m.mean) * (x - m.mean);
  m.std = std::sqrt(m.std / static_cast<double>(v.size()));
  return m;
}

struct MethodRow {
  Method method = Method::Rpt;
  bool icp = false;
  std::size_t frames = 0;
  MeanStd translation;  // m
  MeanStd rotation;     // rad
  MeanStd add;          // m
  std::vector<double> add_accuracy;  // fraction of sane frames with ADD <= threshold
};

struct CalibrationErrors {
  bool available = false;
  double translation_error = 0.0;
  double rotation_error = 0.0;
  std::string message;
};

struct EvaluationReport {
  std::vector<double> add_thresholds;
  std::vector<FrameReport> frames;
  std::vector<MethodRow> rows;
  CalibrationErrors calibration_without_icp;
  CalibrationErrors calibration_with_icp;
  std::size_t sane_frames = 0;
};

inline CalibrationErrors calibration_errors(const std::vector<FrameEstimate>& estimates, bool icp,
                                            const OutlierConfig& outlier, const Pose& gt) {
  CalibrationErrors e;
  try {
    const CalibrationResult r = calibrate_estimates(estimates, icp, outlier);
    e.available = true;
    e.translation_error = translation_error(gt, r.calibration);
    e.rotation_error = rotation_error(gt, r.calibration);
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::NoUsableFrames) throw;
    e.message = err.what();
  }
  return e;
}

/// Runs every route with and without ICP on every frame and scores the poses
/// against ground truth. ADD uses the full model cloud.
inline EvaluationReport evaluate_dataset(const Dataset& dataset, const EEModel& model, PipelineConfig cfg,
                                         unsigned jobs = 1) {
  if (!dataset.gt_calibration) {
    throw Error(ErrorKind::MissingGroundTruth, "dataset has no ground-truth calibration");
  }
  cfg.icp.enabled = true;
  const Pose gt = *dataset.gt_calibration;
  const FramePipeline pipeline(dataset, model, cfg);
  const std::vector<FrameEstimate> estimates = pipeline.estimate_all(jobs);

  EvaluationReport report;
  report.add_thresholds = cfg.evaluation.add_thresholds;
  report.frames.resize(estimates.size());
  parallel_for(estimates.size(), jobs, [&](std::size_t i) {
    const FrameEstimate& est = estimates[i];
    FrameReport& fr = report.frames[i];
    fr.frame_index = est.frame_index;
    fr.config_id = est.config_id;
    fr.sane = est.sane;
    fr.rejection = est.rejection_message;
    fr.ee_points = est.ee_points;
    fr.keypoints_used = est.keypoints_used;
    const Pose truth = compose(gt, est.t_b_ee);
    for (const PoseCandidate& c : est.candidates) {
      fr.candidates.push_back({c.method, c.icp, pose_errors(model.surface_cloud.points, truth, c.ee_pose),
                               c.icp_stats});
    }
  });

  for (const FrameReport& fr : report.frames) report.sane_frames += fr.sane ? 1 : 0;
  for (Method m : {Method::Rpt, Method::Kpm}) {
    for (bool icp : {false, true}) {
      MethodRow row{m, icp, 0, {}, {}, {}, std::vector<double>(report.add_thresholds.size(), 0.0)};
      std::vector<double> t, r, a;
      for (const FrameReport& fr : report.frames) {
        for (const CandidateReport& c : fr.candidates) {
          if (c.method != m || c.icp != icp) continue;
          t.push_back(c.errors.translation_error);
          r.push_back(c.errors.rotation_error);
          a.push_back(c.errors.add);
        }
      }
      row.frames = t.size();
      row.translation = mean_std(t);
      row.rotation = mean_std(r);
      row.add = mean_std(a);
      for (std::size_t k = 0; k < report.add_thresholds.size(); ++k) {
        std::size_t hits = 0;
        for (double x : a) hits += x <= report.add_thresholds[k] ? 1 : 0;
        // Frames where the route produced no pose count as misses.
        row.add_accuracy[k] = report.sane_frames == 0
                                  ? 0.0
                                  : static_cast<double>(hits) / static_cast<double>(report.sane_frames);
      }
      report.rows.push_back(std::move(row));
    }
  }
  report.calibration_without_icp = calibration_errors(estimates, false, cfg.calibration.outlier, gt);
  report.calibration_with_icp = calibration_errors(estimates, true, cfg.calibration.outlier, gt);
  return report;
}

}  // namespace eecal
