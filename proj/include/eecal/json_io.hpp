#pragma once

// JSON encoding of poses, scenarios, pipeline configs and results. Numbers
// are rounded to 9 significant digits so output files are stable text.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eecal/calibration.hpp"
#include "eecal/error.hpp"
#include "eecal/evaluation.hpp"
#include "eecal/geometry.hpp"
#include "eecal/pipeline.hpp"
#include "eecal/simulator.hpp"

namespace eecal {

using Json = nlohmann::ordered_json;

inline double round9(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return std::strtod(buf, nullptr);
}

inline Json vec_json(const Vec3& v) { return Json::array({round9(v.x()), round9(v.y()), round9(v.z())}); }

inline Json pose_json(const Pose& p) {
  const Quaternion q = p.rotation.canonical();
  return Json{{"q", Json::array({round9(q.w()), round9(q.x()), round9(q.y()), round9(q.z())})},
              {"t", vec_json(p.translation)}};
}

/// Strict reader for one JSON object: every key must be consumed, otherwise
/// finish() reports the first unknown key by its dotted path.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw Error(ErrorKind::Config, where() + " must be a JSON object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  bool read(const std::string& key, T& out) {
    if (!j_.contains(key)) return false;
    used_.insert(key);
    try {
      out = j_.at(key).template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorKind::Config, "bad value for '" + join(key) + "'");
    }
    return true;
  }

  template <class T>
  T require(const std::string& key) {
    T out{};
    if (!read(key, out)) throw Error(ErrorKind::Config, "missing key '" + join(key) + "'");
    return out;
  }

  const Json& raw(const std::string& key) {
    if (!j_.contains(key)) throw Error(ErrorKind::Config, "missing key '" + join(key) + "'");
    used_.insert(key);
    return j_.at(key);
  }

  std::optional<ObjectReader> child(const std::string& key) {
    if (!j_.contains(key)) return std::nullopt;
    used_.insert(key);
    return ObjectReader(j_.at(key), join(key));
  }

  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.contains(key)) throw Error(ErrorKind::Config, "unknown key '" + join(key) + "'");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "document" : "'" + path_ + "'"; }

  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

inline Vec3 vec_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorKind::Config, what + " must be an array of 3 numbers");
  try {
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::Config, what + " must be an array of 3 numbers");
  }
}

inline Pose pose_from_json(const Json& j, const std::string& what) {
  ObjectReader r(j, what);
  const Json& q = r.raw("q");
  if (!q.is_array() || q.size() != 4) throw Error(ErrorKind::Config, r.join("q") + " must be [w,x,y,z]");
  Pose p;
  try {
    p.rotation = Quaternion(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>());
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::Config, r.join("q") + " must be [w,x,y,z]");
  } catch (const Error&) {
    throw Error(ErrorKind::Config, r.join("q") + " is not a valid quaternion");
  }
  p.translation = vec_from_json(r.raw("t"), r.join("t"));
  r.finish();
  return p;
}

// ---------------------------------------------------------------------------
// Scenario and model parameters

inline Json model_params_json(const EEModelParams& m) {
  return Json{{"body", {{"length_x", m.body.length_x}, {"width_y", m.body.width_y}, {"height_z", m.body.height_z}}},
              {"finger",
               {{"length", m.finger.length},
                {"width", m.finger.width},
                {"thickness", m.finger.thickness},
                {"gap", m.finger.gap}}},
              {"density", m.density},
              {"origin_inset", m.origin_inset}};
}

inline void read_model_params(ObjectReader& r, EEModelParams& m) {
  if (auto b = r.child("body")) {
    b->read("length_x", m.body.length_x);
    b->read("width_y", m.body.width_y);
    b->read("height_z", m.body.height_z);
    b->finish();
  }
  if (auto f = r.child("finger")) {
    f->read("length", m.finger.length);
    f->read("width", m.finger.width);
    f->read("thickness", m.finger.thickness);
    f->read("gap", m.finger.gap);
    f->finish();
  }
  r.read("density", m.density);
  r.read("origin_inset", m.origin_inset);
  r.finish();
}

inline Json hidden_parts_json(const std::vector<EEPart>& parts) {
  Json a = Json::array();
  for (EEPart p : parts) a.push_back(std::string(to_string(p)));
  return a;
}

inline std::vector<EEPart> hidden_parts_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorKind::Config, what + " must be an array of part names");
  std::vector<EEPart> out;
  for (const Json& e : j) {
    if (!e.is_string()) throw Error(ErrorKind::Config, what + " must be an array of part names");
    out.push_back(ee_part_from_string(e.get<std::string>()));
  }
  return out;
}

/// Scenario echo stored in a dataset manifest. The ground-truth calibration is
/// stored separately so that removing it hides it from every consumer.
inline Json scenario_json(const Scenario& s) {
  Json cam{{"horizontal_fov_deg", round9(rad2deg(s.camera.horizontal_fov))},
           {"vertical_fov_deg", round9(rad2deg(s.camera.vertical_fov))},
           {"near_clip", s.camera.near_clip},
           {"noise_sigma_1m", s.camera.noise_sigma_1m},
           {"noise_exponent", s.camera.noise_exponent},
           {"dropout", s.camera.dropout},
           {"hpr", {{"angular_resolution", s.camera.hpr.angular_resolution}, {"depth_margin", s.camera.hpr.depth_margin}}}};
  if (s.camera.pose) cam["pose"] = pose_json(*s.camera.pose);
  Json configs = Json::array();
  for (const RobotConfig& rc : s.robot_configs) {
    configs.push_back({{"config_id", rc.config_id}, {"t_b_ee", pose_json(rc.t_b_ee)},
                       {"hidden_parts", hidden_parts_json(rc.hidden_parts)}});
  }
  Json bg = Json::array();
  for (const BackgroundPrimitive& p : s.background) {
    bg.push_back({{"kind", p.kind == BackgroundPrimitive::Kind::Plane ? "plane" : "box"},
                  {"pose", pose_json(p.pose)},
                  {"size", vec_json(p.size)}});
  }
  return Json{{"seed", s.seed},
              {"frames_per_config", s.frames_per_config},
              {"camera", cam},
              {"model", model_params_json(s.model)},
              {"robot_configs", configs},
              {"background", bg},
              {"background_spacing", s.background_spacing}};
}

inline Scenario scenario_from_json(const Json& j) {
  Scenario s;
  s.robot_configs.clear();
  ObjectReader r(j, "scenario");
  r.read("seed", s.seed);
  r.read("frames_per_config", s.frames_per_config);
  if (auto c = r.child("camera")) {
    double h = rad2deg(s.camera.horizontal_fov), v = rad2deg(s.camera.vertical_fov);
    c->read("horizontal_fov_deg", h);
    c->read("vertical_fov_deg", v);
    s.camera.horizontal_fov = deg2rad(h);
    s.camera.vertical_fov = deg2rad(v);
    c->read("near_clip", s.camera.near_clip);
    c->read("noise_sigma_1m", s.camera.noise_sigma_1m);
    c->read("noise_exponent", s.camera.noise_exponent);
    c->read("dropout", s.camera.dropout);
    if (auto hpr = c->child("hpr")) {
      hpr->read("angular_resolution", s.camera.hpr.angular_resolution);
      hpr->read("depth_margin", s.camera.hpr.depth_margin);
      hpr->finish();
    }
    if (c->has("pose")) s.camera.pose = pose_from_json(c->raw("pose"), c->join("pose"));
    c->finish();
  }
  if (auto m = r.child("model")) read_model_params(*m, s.model);
  if (r.has("robot_configs")) {
    const Json& arr = r.raw("robot_configs");
    if (!arr.is_array()) throw Error(ErrorKind::Config, "scenario.robot_configs must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      ObjectReader rc(arr[i], "scenario.robot_configs[" + std::to_string(i) + "]");
      RobotConfig cfg;
      cfg.config_id = rc.require<int>("config_id");
      cfg.t_b_ee = pose_from_json(rc.raw("t_b_ee"), rc.join("t_b_ee"));
      if (rc.has("hidden_parts")) cfg.hidden_parts = hidden_parts_from_json(rc.raw("hidden_parts"), rc.join("hidden_parts"));
      rc.finish();
      s.robot_configs.push_back(std::move(cfg));
    }
  }
  if (r.has("background")) {
    const Json& arr = r.raw("background");
    if (!arr.is_array()) throw Error(ErrorKind::Config, "scenario.background must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      ObjectReader b(arr[i], "scenario.background[" + std::to_string(i) + "]");
      BackgroundPrimitive p;
      const auto kind = b.require<std::string>("kind");
      if (kind != "plane" && kind != "box") throw Error(ErrorKind::Config, b.join("kind") + " must be plane or box");
      p.kind = kind == "plane" ? BackgroundPrimitive::Kind::Plane : BackgroundPrimitive::Kind::Box;
      p.pose = pose_from_json(b.raw("pose"), b.join("pose"));
      p.size = vec_from_json(b.raw("size"), b.join("size"));
      b.finish();
      s.background.push_back(p);
    }
  }
  r.read("background_spacing", s.background_spacing);
  r.finish();
  return s;
}

// ---------------------------------------------------------------------------
// Pipeline config

inline void read_positive(ObjectReader& r, const std::string& key, double& out) {
  if (r.read(key, out) && !(out > 0.0)) throw Error(ErrorKind::Config, "'" + r.join(key) + "' must be positive");
}

inline void read_nonnegative(ObjectReader& r, const std::string& key, double& out) {
  if (r.read(key, out) && !(out >= 0.0)) {
    throw Error(ErrorKind::Config, "'" + r.join(key) + "' must be non-negative");
  }
}

inline void read_probability(ObjectReader& r, const std::string& key, double& out) {
  if (r.read(key, out) && !(out >= 0.0 && out <= 1.0)) {
    throw Error(ErrorKind::Config, "'" + r.join(key) + "' must lie in [0, 1]");
  }
}

inline PipelineConfig config_from_json(const Json& j) {
  PipelineConfig cfg;
  ObjectReader r(j, "");
  r.read("seed", cfg.seed);
  if (auto s = r.child("simulator")) {
    s->read("frames_per_config", cfg.simulator.frames_per_config);
    if (cfg.simulator.frames_per_config < 1) throw Error(ErrorKind::Config, "'simulator.frames_per_config' must be >= 1");
    read_nonnegative(*s, "noise_sigma_1m", cfg.simulator.noise_sigma_1m);
    read_nonnegative(*s, "noise_exponent", cfg.simulator.noise_exponent);
    read_probability(*s, "dropout", cfg.simulator.dropout);
    if (s->has("hidden_parts")) {
      try {
        cfg.simulator.hidden_parts = hidden_parts_from_json(s->raw("hidden_parts"), s->join("hidden_parts"));
      } catch (const Error& e) {
        throw Error(ErrorKind::Config, std::string("'simulator.hidden_parts': ") + e.what());
      }
    }
    if (auto m = s->child("model")) read_model_params(*m, cfg.simulator.model);
    s->finish();
  }
  if (auto l = r.child("labeling")) {
    read_positive(*l, "background_match_radius", cfg.labeling.background_match_radius);
    read_nonnegative(*l, "keypoint_distance_threshold", cfg.labeling.keypoint_distance_threshold);
    read_nonnegative(*l, "ee_bbox_inflation", cfg.labeling.ee_bbox_inflation);
    l->finish();
  }
  if (auto s = r.child("segmentation")) {
    std::string kind;
    if (s->read("predictor", kind)) {
      if (kind == "ground_truth") {
        cfg.segmentation.predictor = SegmenterKind::GroundTruth;
      } else if (kind == "noisy_oracle") {
        cfg.segmentation.predictor = SegmenterKind::NoisyOracle;
      } else {
        throw Error(ErrorKind::Config, "'segmentation.predictor' must be ground_truth or noisy_oracle");
      }
    }
    read_probability(*s, "flip_probability", cfg.segmentation.flip_probability);
    read_probability(*s, "speckle_rate", cfg.segmentation.speckle_rate);
    read_positive(*s, "linkage_distance", cfg.segmentation.cluster.linkage_distance);
    read_probability(*s, "min_cluster_fraction", cfg.segmentation.cluster.min_cluster_fraction);
    s->finish();
  }
  if (auto p = r.child("predictors")) {
    read_nonnegative(*p, "rotation_sigma_deg", cfg.predictors.rotation_sigma_deg);
    read_nonnegative(*p, "keypoint_sigma_m", cfg.predictors.keypoint_sigma_m);
    read_probability(*p, "keypoint_dropout", cfg.predictors.keypoint_dropout);
    p->finish();
  }
  if (auto p = r.child("rpt")) {
    p->read("enabled", cfg.rpt.enabled);
    read_nonnegative(*p, "trim_fraction", cfg.rpt.trim_fraction);
    if (cfg.rpt.trim_fraction >= 0.5) throw Error(ErrorKind::Config, "'rpt.trim_fraction' must be below 0.5");
    p->read("min_points", cfg.rpt.min_points);
    p->finish();
  }
  if (auto k = r.child("kpm")) {
    k->read("enabled", cfg.kpm.enabled);
    k->read("min_keypoints", cfg.kpm.options.min_keypoints);
    if (cfg.kpm.options.min_keypoints < 3) throw Error(ErrorKind::Config, "'kpm.min_keypoints' must be >= 3");
    read_positive(*k, "quality_radius", cfg.kpm.options.quality_radius);
    read_positive(*k, "collinearity_ratio", cfg.kpm.options.collinearity_ratio);
    k->finish();
  }
  if (auto i = r.child("icp")) {
    IcpConfig& c = cfg.icp.config;
    i->read("enabled", cfg.icp.enabled);
    read_positive(*i, "max_correspondence_distance", c.max_correspondence_distance);
    i->read("max_iterations", c.max_iterations);
    read_positive(*i, "relative_rmse_epsilon", c.relative_rmse_epsilon);
    read_positive(*i, "relative_fitness_epsilon", c.relative_fitness_epsilon);
    i->read("visibility_passes", c.visibility_passes);
    read_positive(*i, "source_voxel_size", c.source_voxel_size);
    i->read("max_source_points", c.max_source_points);
    i->finish();
    try {
      c.validate();
    } catch (const Error& e) {
      throw Error(ErrorKind::Config, std::string("'icp': ") + e.what());
    }
  }
  if (auto c = r.child("calibration")) {
    if (auto s = c->child("sanity")) {
      s->read("min_ee_points", cfg.calibration.sanity.min_ee_points);
      read_positive(*s, "min_bbox_diagonal", cfg.calibration.sanity.min_bbox_diagonal);
      s->finish();
    }
    if (auto o = c->child("outlier")) {
      read_positive(*o, "modified_zscore_threshold", cfg.calibration.outlier.modified_zscore_threshold);
      read_positive(*o, "mad_zero_epsilon", cfg.calibration.outlier.mad_zero_epsilon);
      std::string axes;
      if (o->read("translation_axes", axes)) {
        if (axes == "union") {
          cfg.calibration.outlier.translation_axes = AxisCombine::Union;
        } else if (axes == "intersection") {
          cfg.calibration.outlier.translation_axes = AxisCombine::Intersection;
        } else {
          throw Error(ErrorKind::Config, "'calibration.outlier.translation_axes' must be union or intersection");
        }
      }
      o->finish();
    }
    c->finish();
  }
  if (auto e = r.child("evaluation")) {
    e->read("add_thresholds", cfg.evaluation.add_thresholds);
    for (double t : cfg.evaluation.add_thresholds) {
      if (!(t > 0.0)) throw Error(ErrorKind::Config, "'evaluation.add_thresholds' must be positive");
    }
    e->finish();
  }
  r.finish();
  return cfg;
}

inline Json parse_json_text(const std::string& text, const std::string& name) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Config, name + ": " + e.what());
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
  f << text;
  if (!f) throw Error(ErrorKind::Io, "write failed: " + path);
}

inline PipelineConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.what());
  }
  return config_from_json(parse_json_text(text, path));
}

// ---------------------------------------------------------------------------
// Results

inline Json icp_stats_json(const IcpResult& r) {
  return Json{{"fitness", round9(r.fitness)},
              {"inlier_rmse", round9(r.inlier_rmse)},
              {"iterations", r.iterations_used},
              {"converged", r.converged},
              {"passes", r.pass_rmse_histories.size()}};
}

inline Json calibration_result_json(const CalibrationResult& r) {
  Json groups = Json::array();
  for (const GroupEstimate& g : r.groups) {
    groups.push_back({{"config_id", g.config_id},
                      {"calibration", pose_json(g.calibration)},
                      {"samples", g.samples},
                      {"frames_used", g.frames_used},
                      {"outliers_removed", g.outliers_removed},
                      {"fallback", g.fallback}});
  }
  return Json{{"icp", r.icp},
              {"calibration", pose_json(r.calibration)},
              {"groups", groups},
              {"frames_total", r.frames_total},
              {"frames_rejected", r.frames_rejected},
              {"method_mix", {{"rpt", r.rpt_samples}, {"kpm", r.kpm_samples}}},
              {"frame_errors", r.frame_errors}};
}

inline Json frame_estimate_json(const FrameEstimate& e) {
  Json cands = Json::array();
  for (const PoseCandidate& c : e.candidates) {
    Json cj{{"method", std::string(to_string(c.method))}, {"icp", c.icp}, {"pose", pose_json(c.ee_pose)}};
    if (c.icp_stats) cj["icp_stats"] = icp_stats_json(*c.icp_stats);
    cands.push_back(std::move(cj));
  }
  Json j{{"frame_index", e.frame_index},
         {"config_id", e.config_id},
         {"ee_points", e.ee_points},
         {"sane", e.sane},
         {"keypoints_used", e.keypoints_used},
         {"candidates", cands},
         {"errors", e.errors}};
  if (e.rejection) j["rejection"] = e.rejection_message;
  return j;
}

inline Json errors_json(const PoseErrorReport& e) {
  return Json{{"translation_error_m", round9(e.translation_error)},
              {"rotation_error_deg", round9(rad2deg(e.rotation_error))},
              {"add_m", round9(e.add)}};
}

inline std::string row_name(Method m, bool icp) { return std::string(to_string(m)) + (icp ? "+icp" : ""); }

inline Json calibration_errors_json(const CalibrationErrors& c) {
  if (!c.available) return Json{{"available", false}, {"message", c.message}};
  return Json{{"available", true},
              {"translation_error_m", round9(c.translation_error)},
              {"rotation_error_deg", round9(rad2deg(c.rotation_error))}};
}

inline Json evaluation_report_json(const EvaluationReport& r) {
  Json rows = Json::array();
  for (const MethodRow& row : r.rows) {
    Json acc = Json::array();
    for (double a : row.add_accuracy) acc.push_back(round9(a));
    rows.push_back({{"method", row_name(row.method, row.icp)},
                    {"frames", row.frames},
                    {"translation_error_m", {{"mean", round9(row.translation.mean)}, {"std", round9(row.translation.std)}}},
                    {"rotation_error_deg",
                     {{"mean", round9(rad2deg(row.rotation.mean))}, {"std", round9(rad2deg(row.rotation.std))}}},
                    {"add_m", {{"mean", round9(row.add.mean)}, {"std", round9(row.add.std)}}},
                    {"add_accuracy", acc}});
  }
  Json frames = Json::array();
  for (const FrameReport& f : r.frames) {
    Json cands = Json::array();
    for (const CandidateReport& c : f.candidates) {
      Json cj{{"method", row_name(c.method, c.icp)}, {"errors", errors_json(c.errors)}};
      if (c.icp_stats) cj["icp_stats"] = icp_stats_json(*c.icp_stats);
      cands.push_back(std::move(cj));
    }
    Json fj{{"frame_index", f.frame_index}, {"config_id", f.config_id}, {"sane", f.sane},
            {"ee_points", f.ee_points}, {"keypoints_used", f.keypoints_used}, {"candidates", cands}};
    if (!f.sane) fj["rejection"] = f.rejection;
    frames.push_back(std::move(fj));
  }
  Json thresholds = Json::array();
  for (double t : r.add_thresholds) thresholds.push_back(round9(t));
  return Json{{"add_thresholds_m", thresholds},
              {"sane_frames", r.sane_frames},
              {"rows", rows},
              {"calibration",
               {{"without_icp", calibration_errors_json(r.calibration_without_icp)},
                {"with_icp", calibration_errors_json(r.calibration_with_icp)}}},
              {"frames", frames}};
}

/// Aligned plain-text summary table.
inline std::string evaluation_table(const EvaluationReport& r) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-9s %6s %18s %18s %18s", "method", "frames", "e_t [cm]", "e_R [deg]", "ADD [cm]");
  out += buf;
  for (double t : r.add_thresholds) {
    std::snprintf(buf, sizeof buf, " %9s", ("<=" + std::to_string(static_cast<int>(std::lround(t * 1000))) + "mm").c_str());
    out += buf;
  }
  out += '\n';
  for (const MethodRow& row : r.rows) {
    std::snprintf(buf, sizeof buf, "%-9s %6zu %8.3f +- %6.3f %8.3f +- %6.3f %8.3f +- %6.3f", row_name(row.method, row.icp).c_str(),
                  row.frames, row.translation.mean * 100, row.translation.std * 100, rad2deg(row.rotation.mean),
                  rad2deg(row.rotation.std), row.add.mean * 100, row.add.std * 100);
    out += buf;
    for (double a : row.add_accuracy) {
      std::snprintf(buf, sizeof buf, " %8.1f%%", a * 100);
      out += buf;
    }
    out += '\n';
  }
  const auto calib_line = [&](const char* name, const CalibrationErrors& c) {
    if (c.available) {
      std::snprintf(buf, sizeof buf, "calibration %-8s e_t %.4f cm  e_R %.4f deg\n", name, c.translation_error * 100,
                    rad2deg(c.rotation_error));
    } else {
      std::snprintf(buf, sizeof buf, "calibration %-8s unavailable (%s)\n", name, c.message.c_str());
    }
    out += buf;
  };
  calib_line("no-icp", r.calibration_without_icp);
  calib_line("icp", r.calibration_with_icp);
  return out;
}

inline std::string evaluation_csv(const EvaluationReport& r) {
  std::string out = "frame_index,config_id,sane,method,translation_error_m,rotation_error_deg,add_m\n";
  char buf[256];
  for (const FrameReport& f : r.frames) {
    for (const CandidateReport& c : f.candidates) {
      std::snprintf(buf, sizeof buf, "%zu,%d,%d,%s,%.9g,%.9g,%.9g\n", f.frame_index, f.config_id, f.sane ? 1 : 0,
                    row_name(c.method, c.icp).c_str(), c.errors.translation_error, rad2deg(c.errors.rotation_error),
                    c.errors.add);
      out += buf;
    }
  }
  return out;
}

}  // namespace eecal
