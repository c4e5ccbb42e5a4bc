#pragma once

// Subcommand implementations behind the eecal executable. Each returns the
// process exit code.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "eecal/dataset.hpp"
#include "eecal/ee_model.hpp"
#include "eecal/error.hpp"
#include "eecal/evaluation.hpp"
#include "eecal/json_io.hpp"
#include "eecal/labeling.hpp"
#include "eecal/pipeline.hpp"

namespace eecal {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitIo = 3,
  kExitNoUsableFrames = 4,
  kExitSanity = 5,
  kExitMissingGroundTruth = 6,
};

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidDimensions:
      return kExitConfig;
    case ErrorKind::Io: return kExitIo;
    case ErrorKind::NoUsableFrames: return kExitNoUsableFrames;
    case ErrorKind::MissingGroundTruth: return kExitMissingGroundTruth;
    default: return kExitFailure;
  }
}

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  bool no_icp = false;
  std::string output;
};

inline PipelineConfig resolve_config(const CommonOptions& o) {
  PipelineConfig cfg = o.config_path.empty() ? PipelineConfig{} : load_config(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.no_icp) cfg.icp.enabled = false;
  return cfg;
}

namespace detail {

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

inline void emit(const std::string& output, const std::string& text, std::ostream& out) {
  if (output.empty() || output == "-") {
    out << text;
  } else {
    write_text_file(output, text);
  }
}

inline EEModel model_for(const Dataset& ds) {
  try {
    return build_ee_model(ds.scenario.model);
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, std::string("dataset model: ") + e.what());
  }
}

}  // namespace detail

/// Renders the configured scenario into a dataset directory.
inline int cmd_simulate(const CommonOptions& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    if (o.output.empty()) throw Error(ErrorKind::Config, "simulate needs --output DIR");
    const PipelineConfig cfg = resolve_config(o);
    const Scenario scenario = scenario_from_config(cfg);
    const EEModel model = build_ee_model(scenario.model);
    const Dataset ds = generate_dataset(scenario, model, o.jobs);
    save_dataset(o.output, ds, o.jobs);
    for (const std::string& w : ds.warnings) err << "warning: " << w << "\n";
    out << "wrote " << ds.frames.size() << " frames to " << o.output << "\n";
    return kExitOk;
  });
}

/// Re-derives frame labels and keypoint ids from background.ply, the
/// manifest calibration and the EE box, and writes the relabeled dataset.
inline int cmd_label(const std::string& dataset_dir, const CommonOptions& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    if (o.output.empty()) throw Error(ErrorKind::Config, "label needs --output DIR");
    const PipelineConfig cfg = resolve_config(o);
    Dataset ds = load_dataset(dataset_dir, o.jobs);
    if (!ds.gt_calibration) throw Error(ErrorKind::MissingGroundTruth, "labeling needs the manifest calibration");
    if (ds.background_cloud.empty()) throw Error(ErrorKind::Io, "dataset has no background cloud");
    const EEModel model = detail::model_for(ds);
    std::vector<std::size_t> keypoints(ds.frames.size(), 0);
    parallel_for(ds.frames.size(), o.jobs, [&](std::size_t i) {
      Frame& f = ds.frames[i];
      PointCloud labeled = subtract_background(f.cloud, ds.background_cloud, cfg.labeling);
      labeled = extract_ee_points(labeled, *ds.gt_calibration, f.t_b_ee, model.bbox, cfg.labeling);
      labeled.keypoint_ids.assign(labeled.size(), kNoKeypoint);
      const std::vector<std::size_t> ee_idx = labeled.indices_with(Label::EE);
      if (!ee_idx.empty()) {
        const PointCloud ee = labeled.subset(ee_idx);
        const std::vector<int> ids =
            label_keypoints(ee, compose(*ds.gt_calibration, f.t_b_ee), model.ref_keypoints, cfg.labeling);
        for (std::size_t k = 0; k < ee_idx.size(); ++k) {
          labeled.keypoint_ids[ee_idx[k]] = ids[k];
          keypoints[i] += ids[k] != kNoKeypoint ? 1 : 0;
        }
      }
      f.cloud = std::move(labeled);
    });
    save_dataset(o.output, ds, o.jobs);
    for (std::size_t i = 0; i < keypoints.size(); ++i) {
      if (keypoints[i] < static_cast<std::size_t>(kNumKeypoints)) {
        err << "frame " << i << ": " << keypoints[i] << " of " << kNumKeypoints << " keypoints labeled\n";
      }
    }
    out << "labeled " << ds.frames.size() << " frames into " << o.output << "\n";
    return kExitOk;
  });
}

inline int cmd_calibrate(const std::string& dataset_dir, const CommonOptions& o, std::ostream& out,
                         std::ostream& err) {
  return detail::guarded(err, [&] {
    const PipelineConfig cfg = resolve_config(o);
    const Dataset ds = load_dataset(dataset_dir, o.jobs);
    const EEModel model = detail::model_for(ds);
    const CalibrationResult r = calibrate(ds, model, cfg, o.jobs);
    Json j = calibration_result_json(r);
    std::ostream& info = (o.output.empty() || o.output == "-") ? err : out;
    if (ds.gt_calibration) {
      const double et = translation_error(*ds.gt_calibration, r.calibration);
      const double er = rotation_error(*ds.gt_calibration, r.calibration);
      j["ground_truth_error"] = {{"translation_m", round9(et)}, {"rotation_deg", round9(rad2deg(er))}};
      char buf[128];
      std::snprintf(buf, sizeof buf, "e_t = %.6g m, e_R = %.6g deg\n", et, rad2deg(er));
      info << buf;
    }
    detail::emit(o.output, j.dump(2) + "\n", out);
    return kExitOk;
  });
}

inline int cmd_estimate(const std::string& dataset_dir, long long frame_index, const CommonOptions& o,
                        std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const PipelineConfig cfg = resolve_config(o);
    const Dataset ds = load_dataset(dataset_dir, o.jobs);
    if (frame_index < 0 || static_cast<std::size_t>(frame_index) >= ds.frames.size()) {
      throw Error(ErrorKind::Config, "frame index " + std::to_string(frame_index) + " out of range [0, " +
                                         std::to_string(ds.frames.size()) + ")");
    }
    const EEModel model = detail::model_for(ds);
    const FramePipeline pipeline(ds, model, cfg);
    const FrameEstimate est = pipeline.estimate(static_cast<std::size_t>(frame_index));
    detail::emit(o.output, frame_estimate_json(est).dump(2) + "\n", out);
    if (!est.sane) {
      err << "sanity check failed: " << est.rejection_message << "\n";
      return kExitSanity;
    }
    return kExitOk;
  });
}

/// Writes report.json, report.txt and frames.csv into the output directory
/// (the text table also goes to `out`).
inline int cmd_evaluate(const std::string& dataset_dir, const CommonOptions& o, std::ostream& out,
                        std::ostream& err) {
  return detail::guarded(err, [&] {
    const PipelineConfig cfg = resolve_config(o);
    const Dataset ds = load_dataset(dataset_dir, o.jobs);
    if (!ds.gt_calibration) {
      throw Error(ErrorKind::MissingGroundTruth, "manifest has no gt_calibration; evaluation needs ground truth");
    }
    const EEModel model = detail::model_for(ds);
    const EvaluationReport report = evaluate_dataset(ds, model, cfg, o.jobs);
    const std::string table = evaluation_table(report);
    if (!o.output.empty()) {
      const std::filesystem::path dir(o.output);
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
      write_text_file((dir / "report.json").string(), evaluation_report_json(report).dump(2) + "\n");
      write_text_file((dir / "report.txt").string(), table);
      write_text_file((dir / "frames.csv").string(), evaluation_csv(report));
    }
    out << table;
    return kExitOk;
  });
}

}  // namespace eecal
