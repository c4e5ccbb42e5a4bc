#pragma once

// Single-frame EE pose estimation (segment, cluster, sanity gate, RPT / KPM,
// ICP) and the dataset-level calibration built on it.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "eecal/calibration.hpp"
#include "eecal/ee_model.hpp"
#include "eecal/error.hpp"
#include "eecal/geometry.hpp"
#include "eecal/icp.hpp"
#include "eecal/kpm.hpp"
#include "eecal/labeling.hpp"
#include "eecal/parallel.hpp"
#include "eecal/random.hpp"
#include "eecal/rpt.hpp"
#include "eecal/segmentation.hpp"
#include "eecal/simulator.hpp"

namespace eecal {

enum class SegmenterKind { GroundTruth, NoisyOracle };

struct SegmentationConfig {
  SegmenterKind predictor = SegmenterKind::GroundTruth;
  double flip_probability = 0.0;
  double speckle_rate = 0.0;
  ClusterFilterConfig cluster;
};

/// Noise of the oracle predictors standing in for the learned networks.
struct PredictorConfig {
  double rotation_sigma_deg = 5.0;
  double keypoint_sigma_m = 0.005;
  double keypoint_dropout = 0.1;
};

struct RptConfig {
  bool enabled = true;
  /// Used only on noisy data (depth noise or noisy segmentation); noise-free
  /// extents are exact and must not be trimmed.
  double trim_fraction = 0.002;
  std::size_t min_points = 10;
};

struct KpmConfig {
  bool enabled = true;
  KpmOptions options;
};

struct IcpSection {
  bool enabled = true;
  IcpConfig config;
};

struct CalibrationConfig {
  SanityConfig sanity;
  OutlierConfig outlier;
};

struct EvaluationConfig {
  std::vector<double> add_thresholds{0.005, 0.01, 0.015, 0.02, 0.03, 0.05};
};

/// Simulator overrides applied on top of the default scenario.
struct SimulatorConfig {
  int frames_per_config = 10;
  double noise_sigma_1m = 0.002;
  double noise_exponent = 2.0;
  double dropout = 0.0;
  std::vector<EEPart> hidden_parts;  // hidden in every frame
  EEModelParams model;
};

struct PipelineConfig {
  std::uint64_t seed = 0;
  SimulatorConfig simulator;
  LabelingConfig labeling;
  SegmentationConfig segmentation;
  PredictorConfig predictors;
  RptConfig rpt;
  KpmConfig kpm;
  IcpSection icp;
  CalibrationConfig calibration;
  EvaluationConfig evaluation;
};

inline Scenario scenario_from_config(const PipelineConfig& cfg) {
  Scenario s = default_scenario();
  s.seed = cfg.seed;
  s.frames_per_config = cfg.simulator.frames_per_config;
  s.camera.noise_sigma_1m = cfg.simulator.noise_sigma_1m;
  s.camera.noise_exponent = cfg.simulator.noise_exponent;
  s.camera.dropout = cfg.simulator.dropout;
  s.model = cfg.simulator.model;
  for (RobotConfig& rc : s.robot_configs) rc.hidden_parts = cfg.simulator.hidden_parts;
  return s;
}

struct PoseCandidate {
  Method method = Method::Rpt;
  bool icp = false;
  Pose ee_pose;  // T_C^EE
  std::optional<IcpResult> icp_stats;
};

struct FrameEstimate {
  std::size_t frame_index = 0;
  int config_id = 0;
  Pose t_b_ee;
  std::size_t ee_points = 0;  // after cluster filtering
  bool sane = false;
  std::optional<ErrorKind> rejection;
  std::string rejection_message;
  std::size_t keypoints_used = 0;
  std::vector<PoseCandidate> candidates;
  std::vector<std::string> errors;  // failures of individual routes

  const PoseCandidate* find(Method m, bool icp) const {
    for (const PoseCandidate& c : candidates) {
      if (c.method == m && c.icp == icp) return &c;
    }
    return nullptr;
  }
};

struct RefinedEstimate {
  Method method = Method::Rpt;
  IcpResult result;
};

struct RefineOutcome {
  std::vector<RefinedEstimate> refined;
  std::vector<std::string> errors;  // candidates whose refinement failed
};

/// ICP from every initial (non-ICP) candidate. A failing candidate is
/// recorded and skipped.
inline RefineOutcome refine_estimates(const IcpModel& model, const PointCloud& target,
                                      std::span<const PoseCandidate> candidates, const IcpConfig& cfg,
                                      const HprParams& hpr) {
  RefineOutcome out;
  for (const PoseCandidate& c : candidates) {
    if (c.icp) continue;
    try {
      out.refined.push_back({c.method, refine_pose(model, target, c.ee_pose, cfg, hpr)});
    } catch (const Error& e) {
      out.errors.push_back(std::string(to_string(c.method)) + "+icp: " + e.what());
    }
  }
  return out;
}

/// Everything shared by the frames of one dataset.
class FramePipeline {
 public:
  FramePipeline(const Dataset& dataset, const EEModel& model, PipelineConfig cfg)
      : dataset_(dataset), model_(model), cfg_(std::move(cfg)) {
    cfg_.icp.config.validate();
    icp_model_ = prepare_icp_model(model_, cfg_.icp.config);
    const bool noisy = dataset_.scenario.camera.noise_sigma_1m > 0.0 ||
                       cfg_.segmentation.predictor == SegmenterKind::NoisyOracle;
    rpt_options_.trim_fraction = noisy ? cfg_.rpt.trim_fraction : 0.0;
    rpt_options_.min_points = cfg_.rpt.min_points;
  }

  const PipelineConfig& config() const { return cfg_; }
  const EEModel& model() const { return model_; }

  /// Segmented and cluster-filtered EE points of a frame.
  PointCloud ee_points(std::size_t frame_index) const {
    const Frame& f = dataset_.frames.at(frame_index);
    std::unique_ptr<SegmentationPredictor> seg;
    if (cfg_.segmentation.predictor == SegmenterKind::GroundTruth) {
      seg = std::make_unique<GroundTruthSegmenter>();
    } else {
      seg = std::make_unique<NoisyOracleSegmenter>(cfg_.segmentation.flip_probability,
                                                   cfg_.segmentation.speckle_rate,
                                                   derive_seed(cfg_.seed, {frame_index, kSegmentationStream}));
    }
    const PointCloud ee = extract_label(predict_labels(f.cloud, *seg), Label::EE);
    if (ee.empty()) return ee;
    return cluster_filter(ee, cfg_.segmentation.cluster);
  }

  FrameEstimate estimate(std::size_t frame_index) const {
    const Frame& f = dataset_.frames.at(frame_index);
    FrameEstimate est;
    est.frame_index = frame_index;
    est.config_id = f.config_id;
    est.t_b_ee = f.t_b_ee;

    PointCloud ee;
    try {
      ee = ee_points(frame_index);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoValidCluster) throw;
      est.rejection = e.kind();
      est.rejection_message = e.what();
      return est;
    }
    est.ee_points = ee.size();
    const SanityResult sanity = sanity_check(ee, cfg_.calibration.sanity);
    if (!sanity.passed) {
      est.rejection = sanity.reason;
      est.rejection_message = sanity.message;
      return est;
    }
    est.sane = true;

    if (cfg_.rpt.enabled) {
      try {
        if (!dataset_.gt_calibration) {
          throw Error(ErrorKind::MissingGroundTruth, "rotation oracle needs the ground-truth calibration");
        }
        const Pose truth = compose(*dataset_.gt_calibration, f.t_b_ee);
        const NoisyOracleRotation rot(truth.rotation, deg2rad(cfg_.predictors.rotation_sigma_deg),
                                      derive_seed(cfg_.seed, {frame_index, kRotationStream}));
        est.candidates.push_back({Method::Rpt, false, rpt_pose(ee, rot, model_.rpt_descriptor, rpt_options_), {}});
      } catch (const Error& e) {
        est.errors.push_back(std::string("rpt: ") + e.what());
      }
    }
    if (cfg_.kpm.enabled) {
      try {
        const NoisyOracleKeypoints kp(keypoints_from_labels(f.cloud), cfg_.predictors.keypoint_sigma_m,
                                      cfg_.predictors.keypoint_dropout,
                                      derive_seed(cfg_.seed, {frame_index, kKeypointStream}));
        const std::vector<Keypoint> good =
            filter_high_quality(predict_keypoints(ee, kp), ee, cfg_.kpm.options.quality_radius);
        est.keypoints_used = good.size();
        est.candidates.push_back({Method::Kpm, false, kpm_pose(good, model_.ref_keypoints, cfg_.kpm.options), {}});
      } catch (const Error& e) {
        est.errors.push_back(std::string("kpm: ") + e.what());
      }
    }
    if (cfg_.icp.enabled) {
      RefineOutcome refined =
          refine_estimates(icp_model_, ee, est.candidates, cfg_.icp.config, dataset_.scenario.camera.hpr);
      for (RefinedEstimate& r : refined.refined) {
        const Pose pose = r.result.refined_pose;
        est.candidates.push_back({r.method, true, pose, std::move(r.result)});
      }
      est.errors.insert(est.errors.end(), refined.errors.begin(), refined.errors.end());
    }
    return est;
  }

  std::vector<FrameEstimate> estimate_all(unsigned jobs) const {
    std::vector<FrameEstimate> out(dataset_.frames.size());
    parallel_for(out.size(), jobs, [&](std::size_t i) { out[i] = estimate(i); });
    return out;
  }

 private:
  static constexpr std::uint64_t kSegmentationStream = 1;
  static constexpr std::uint64_t kRotationStream = 2;
  static constexpr std::uint64_t kKeypointStream = 3;

  const Dataset& dataset_;
  const EEModel& model_;
  PipelineConfig cfg_;
  IcpModel icp_model_;
  RptOptions rpt_options_;
};

/// Per-frame T_C^B samples from the chosen variant (with or without ICP).
inline std::vector<CalibrationSample> calibration_samples(const std::vector<FrameEstimate>& estimates, bool icp) {
  std::vector<CalibrationSample> samples;
  for (const FrameEstimate& est : estimates) {
    for (const PoseCandidate& c : est.candidates) {
      if (c.icp != icp) continue;
      samples.push_back({est.config_id, est.frame_index, c.method, frame_calibration(c.ee_pose, est.t_b_ee)});
    }
  }
  return samples;
}

inline CalibrationResult calibrate_estimates(const std::vector<FrameEstimate>& estimates, bool icp,
                                             const OutlierConfig& outlier) {
  CalibrationResult r = calibrate_samples(calibration_samples(estimates, icp), outlier);
  r.icp = icp;
  r.frames_total = estimates.size();
  for (const FrameEstimate& est : estimates) {
    if (!est.sane) {
      ++r.frames_rejected;
      r.frame_errors.push_back("frame " + std::to_string(est.frame_index) + ": " + est.rejection_message);
    }
    for (const std::string& e : est.errors) {
      r.frame_errors.push_back("frame " + std::to_string(est.frame_index) + ": " + e);
    }
  }
  return r;
}

/// Full calibration of a dataset. ICP is used when enabled in the config.
inline CalibrationResult calibrate(const Dataset& dataset, const EEModel& model, const PipelineConfig& cfg,
                                   unsigned jobs = 1) {
  if (dataset.frames.empty()) throw Error(ErrorKind::NoUsableFrames, "dataset has no frames");
  const FramePipeline pipeline(dataset, model, cfg);
  return calibrate_estimates(pipeline.estimate_all(jobs), cfg.icp.enabled, cfg.calibration.outlier);
}

}  // namespace eecal
