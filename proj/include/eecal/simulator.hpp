#pragma once

// Synthetic depth-camera scenes standing in for a real robot + camera rig.
// Everything here carries full ground truth: labels, keypoint ids, the EE pose
// in the camera and the camera-to-base calibration.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "eecal/ee_model.hpp"
#include "eecal/error.hpp"
#include "eecal/geometry.hpp"
#include "eecal/parallel.hpp"
#include "eecal/random.hpp"
#include "eecal/visibility.hpp"

namespace eecal {

struct CameraModel {
  /// World-to-camera transform; the world is the robot base frame when unset.
  std::optional<Pose> pose;
  double horizontal_fov = deg2rad(57.0);
  double vertical_fov = deg2rad(43.0);
  double near_clip = 0.1;
  double noise_sigma_1m = 0.002;  // depth noise at 1 m
  double noise_exponent = 2.0;
  double dropout = 0.0;
  HprParams hpr;

  Frustum frustum() const { return {horizontal_fov, vertical_fov, near_clip}; }

  void validate() const {
    if (!(horizontal_fov > 0.0 && horizontal_fov < std::numbers::pi) ||
        !(vertical_fov > 0.0 && vertical_fov < std::numbers::pi)) {
      throw Error(ErrorKind::InvalidArgument, "camera field of view must lie in (0, pi)");
    }
    if (!(near_clip > 0.0) || noise_sigma_1m < 0.0 || !(dropout >= 0.0 && dropout <= 1.0) ||
        !(hpr.angular_resolution > 0.0) || hpr.depth_margin < 0.0) {
      throw Error(ErrorKind::InvalidArgument, "invalid camera parameters");
    }
  }
};

/// Standard deviation of the along-ray depth noise at depth z.
inline double depth_noise_sigma(const CameraModel& camera, double z) {
  return camera.noise_sigma_1m * std::pow(std::abs(z), camera.noise_exponent);
}

inline Vec3 perturb_along_ray(const Vec3& p, double sigma, Rng& rng) {
  if (sigma <= 0.0) return p;
  std::normal_distribution<double> n(0.0, sigma);
  return p + n(rng) * p.normalized();
}

struct BackgroundPrimitive {
  enum class Kind { Plane, Box };
  Kind kind = Kind::Plane;
  Pose pose;                       // primitive frame in the world
  Vec3 size = Vec3(1.0, 1.0, 0.0); // plane: extent in local x, y; box: full extents
};

/// World-frame points covering the background primitives at `spacing`.
inline std::vector<Vec3> sample_background(std::span<const BackgroundPrimitive> prims, double spacing) {
  if (!(spacing > 0.0)) throw Error(ErrorKind::InvalidArgument, "background spacing must be positive");
  std::vector<Vec3> out;
  for (const BackgroundPrimitive& prim : prims) {
    std::vector<Vec3> local;
    if (prim.kind == BackgroundPrimitive::Kind::Plane) {
      for (double u : detail::axis_samples(-0.5 * prim.size.x(), 0.5 * prim.size.x(), spacing)) {
        for (double v : detail::axis_samples(-0.5 * prim.size.y(), 0.5 * prim.size.y(), spacing)) {
          local.emplace_back(u, v, 0.0);
        }
      }
    } else {
      const Vec3 h = 0.5 * prim.size;
      for (int axis = 0; axis < 3; ++axis) {
        const int ua = (axis + 1) % 3;
        const int va = (axis + 2) % 3;
        for (double side : {-1.0, 1.0}) {
          for (double u : detail::axis_samples(-h(ua), h(ua), spacing)) {
            for (double v : detail::axis_samples(-h(va), h(va), spacing)) {
              Vec3 p;
              p(axis) = side * h(axis);
              p(ua) = u;
              p(va) = v;
              local.push_back(p);
            }
          }
        }
      }
    }
    for (const Vec3& p : local) out.push_back(prim.pose.apply(p));
  }
  return out;
}

struct RobotConfig {
  int config_id = 0;
  Pose t_b_ee;                    // forward-kinematics EE pose in the base frame
  std::vector<EEPart> hidden_parts; // parts occluded in every frame of this config
};

struct Scenario {
  CameraModel camera;
  EEModelParams model;
  std::vector<RobotConfig> robot_configs;
  int frames_per_config = 10;
  Pose gt_calibration;  // T_C^B
  std::vector<BackgroundPrimitive> background;
  double background_spacing = 0.02;
  std::uint64_t seed = 0;

  Pose world_to_camera() const { return camera.pose.value_or(gt_calibration); }

  void validate() const {
    camera.validate();
    if (frames_per_config < 1) throw Error(ErrorKind::InvalidArgument, "frames_per_config must be >= 1");
    for (std::size_t i = 0; i < robot_configs.size(); ++i) {
      for (std::size_t j = i + 1; j < robot_configs.size(); ++j) {
        if (robot_configs[i].config_id == robot_configs[j].config_id) {
          throw Error(ErrorKind::InvalidArgument,
                      "duplicate config_id " + std::to_string(robot_configs[i].config_id));
        }
      }
    }
  }
};

struct Frame {
  PointCloud cloud;  // camera frame, with ground-truth labels and keypoint ids
  int config_id = 0;
  Pose t_b_ee;
};

struct Dataset {
  Scenario scenario;
  std::optional<Pose> gt_calibration;
  std::vector<Frame> frames;
  PointCloud background_cloud;  // robot-free capture, camera frame
  std::vector<std::string> warnings;
};

struct RenderOptions {
  std::vector<EEPart> hidden_parts;
};

namespace detail {

inline PointCloud render(const EEModel* model, const Pose& ee_pose_in_camera, const CameraModel& camera,
                         std::span<const Vec3> background_world, std::uint64_t seed,
                         const RenderOptions& options) {
  const Frustum frustum = camera.frustum();
  std::vector<Vec3> pts;
  std::vector<Label> labels;
  std::vector<int> kp;

  if (model != nullptr) {
    const Mat3 r = ee_pose_in_camera.rotation.matrix();
    bool any_in_view = false;
    const PointCloud& surf = model->surface_cloud;
    for (std::size_t i = 0; i < surf.size(); ++i) {
      const Vec3 p = r * surf.points[i] + ee_pose_in_camera.translation;
      if (!frustum.contains(p)) continue;
      any_in_view = true;
      const EEPart part = model->part_ids[i];
      if (std::find(options.hidden_parts.begin(), options.hidden_parts.end(), part) !=
          options.hidden_parts.end()) {
        continue;
      }
      pts.push_back(p);
      labels.push_back(Label::EE);
      kp.push_back(surf.keypoint_ids[i]);
    }
    if (!any_in_view) throw Error(ErrorKind::EEOutsideFrustum, "no EE point projects into the field of view");
  }

  const Pose world_to_cam = camera.pose.value_or(Pose::identity());
  const Mat3 rw = world_to_cam.rotation.matrix();
  for (const Vec3& w : background_world) {
    const Vec3 p = rw * w + world_to_cam.translation;
    if (!frustum.contains(p)) continue;
    pts.push_back(p);
    labels.push_back(Label::Background);
    kp.push_back(kNoKeypoint);
  }

  const std::vector<char> visible = visible_mask(pts, camera.hpr);
  Rng rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  PointCloud out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!visible[i]) continue;
    if (camera.dropout > 0.0 && uni(rng) < camera.dropout) continue;
    const Vec3 noisy = perturb_along_ray(pts[i], depth_noise_sigma(camera, pts[i].z()), rng);
    out.push_back(noisy, labels[i], kp[i]);
  }
  return out;
}

}  // namespace detail

/// Renders the EE at `ee_pose_in_camera` plus the background as seen by the
/// camera: frustum culling, hidden-point removal, i.i.d. dropout, then
/// along-ray Gaussian depth noise. `camera.pose` places the world-frame
/// background; the EE pose is already camera-relative.
inline PointCloud render_frame(const EEModel& model, const Pose& ee_pose_in_camera, const CameraModel& camera,
                               std::span<const Vec3> background_world, std::uint64_t seed,
                               const RenderOptions& options = {}) {
  return detail::render(&model, ee_pose_in_camera, camera, background_world, seed, options);
}

/// Robot-free capture used for background subtraction.
inline PointCloud render_background(const CameraModel& camera, std::span<const Vec3> background_world,
                                    std::uint64_t seed) {
  return detail::render(nullptr, Pose::identity(), camera, background_world, seed, {});
}

inline constexpr std::uint64_t kBackgroundFrameIndex = 0xbac6'0000ULL;

/// Renders frames_per_config frames for every robot configuration. Frame seeds
/// depend only on (scenario seed, config position, frame number), so output is
/// identical for any `jobs`.
inline Dataset generate_dataset(const Scenario& scenario, const EEModel& model, unsigned jobs = 1) {
  scenario.validate();
  Dataset ds;
  ds.scenario = scenario;
  ds.gt_calibration = scenario.gt_calibration;

  CameraModel camera = scenario.camera;
  camera.pose = scenario.world_to_camera();
  const std::vector<Vec3> background = sample_background(scenario.background, scenario.background_spacing);
  ds.background_cloud = render_background(camera, background, derive_seed(scenario.seed, {kBackgroundFrameIndex}));

  const auto per = static_cast<std::size_t>(scenario.frames_per_config);
  const std::size_t total = scenario.robot_configs.size() * per;
  std::vector<std::optional<Frame>> slots(total);
  std::vector<char> slot_outside(total, 0);

  parallel_for(total, jobs, [&](std::size_t i) {
    const std::size_t ci = i / per;
    const std::size_t fi = i % per;
    const RobotConfig& rc = scenario.robot_configs[ci];
    const Pose ee_in_cam = compose(scenario.gt_calibration, rc.t_b_ee);
    RenderOptions opts;
    opts.hidden_parts = rc.hidden_parts;
    try {
      Frame f;
      f.cloud = render_frame(model, ee_in_cam, camera, background, derive_seed(scenario.seed, {ci, fi}), opts);
      f.config_id = rc.config_id;
      f.t_b_ee = rc.t_b_ee;
      slots[i] = std::move(f);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::EEOutsideFrustum) throw;
      slot_outside[i] = 1;
    }
  });

  for (std::size_t ci = 0; ci < scenario.robot_configs.size(); ++ci) {
    if (std::any_of(slot_outside.begin() + static_cast<std::ptrdiff_t>(ci * per),
                    slot_outside.begin() + static_cast<std::ptrdiff_t>((ci + 1) * per),
                    [](char c) { return c != 0; })) {
      ds.warnings.push_back("config " + std::to_string(scenario.robot_configs[ci].config_id) +
                            " skipped: EE outside the camera frustum");
    }
  }
  for (auto& slot : slots) {
    if (slot) ds.frames.push_back(std::move(*slot));
  }
  return ds;
}

/// Camera pose at `eye` looking at `target` with base +z up. Returns T_C^B.
inline Pose look_at_calibration(const Vec3& eye, const Vec3& target) {
  const Vec3 forward = (target - eye).normalized();
  const Vec3 right = forward.cross(Vec3::UnitZ()).normalized();
  const Vec3 down = forward.cross(right);
  Mat3 r;
  r.col(0) = right;
  r.col(1) = down;
  r.col(2) = forward;
  return invert(Pose{Quaternion::from_matrix(r), eye});
}

/// Six EE placements roughly 1 m in front of a camera mounted beside a table,
/// 10 frames each, with a table and a back wall as background.
inline Scenario default_scenario() {
  Scenario s;
  s.gt_calibration = look_at_calibration(Vec3(1.3, 0.1, 0.9), Vec3(0.3, 0.0, 0.45));
  const Pose base_from_cam = invert(s.gt_calibration);
  struct Placement {
    Vec3 t;
    double roll, pitch, yaw;  // degrees
  };
  const std::array<Placement, 6> placements{{
      {Vec3(0.00, 0.00, 1.00), 0.0, 0.0, 0.0},
      {Vec3(0.15, 0.05, 0.95), 10.0, -10.0, 20.0},
      {Vec3(-0.15, 0.05, 1.05), -10.0, 15.0, -25.0},
      {Vec3(0.10, -0.10, 0.90), 15.0, 5.0, 45.0},
      {Vec3(-0.10, -0.08, 1.10), -15.0, -5.0, -40.0},
      {Vec3(0.05, 0.12, 1.00), 5.0, 20.0, 90.0},
  }};
  for (std::size_t i = 0; i < placements.size(); ++i) {
    const Placement& p = placements[i];
    const Pose ee_in_cam{Quaternion::from_rpy(deg2rad(p.roll), deg2rad(p.pitch), deg2rad(p.yaw)), p.t};
    s.robot_configs.push_back({static_cast<int>(i), compose(base_from_cam, ee_in_cam), {}});
  }
  BackgroundPrimitive table;
  table.kind = BackgroundPrimitive::Kind::Plane;
  table.pose = Pose::from_translation(Vec3(0.3, 0.0, 0.0));
  table.size = Vec3(1.6, 2.0, 0.0);
  BackgroundPrimitive wall;
  wall.kind = BackgroundPrimitive::Kind::Plane;
  wall.pose = Pose{Quaternion::from_axis_angle(Vec3::UnitY(), std::numbers::pi / 2.0), Vec3(-0.5, 0.0, 0.8)};
  wall.size = Vec3(1.6, 2.4, 0.0);
  s.background = {table, wall};
  return s;
}

}  // namespace eecal
