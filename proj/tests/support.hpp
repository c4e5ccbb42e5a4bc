#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "eecal/ee_model.hpp"
#include "eecal/geometry.hpp"
#include "eecal/pipeline.hpp"
#include "eecal/random.hpp"
#include "eecal/simulator.hpp"

namespace eecal::test {

inline Pose random_pose(Rng& rng, double max_translation = 1.0) {
  std::uniform_real_distribution<double> u(-max_translation, max_translation);
  return {random_rotation(rng), Vec3(u(rng), u(rng), u(rng))};
}

inline std::vector<Vec3> random_points(Rng& rng, std::size_t n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<Vec3> pts(n);
  for (Vec3& p : pts) p = Vec3(u(rng), u(rng), u(rng));
  return pts;
}

/// 4x4 homogeneous matrix of a pose, built from the rotation matrix directly.
inline Mat4 homogeneous(const Pose& p) {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = p.rotation.matrix();
  m.topRightCorner<3, 1>() = p.translation;
  return m;
}

inline const EEModel& default_model() {
  static const EEModel model = build_ee_model();
  return model;
}

/// Default scenario without depth noise.
inline Scenario noiseless_scenario(int frames_per_config = 2) {
  Scenario s = default_scenario();
  s.camera.noise_sigma_1m = 0.0;
  s.frames_per_config = frames_per_config;
  s.seed = 7;
  return s;
}

inline PipelineConfig oracle_config(double rotation_sigma_deg = 0.0, double keypoint_sigma = 0.0,
                                    double keypoint_dropout = 0.0) {
  PipelineConfig cfg;
  cfg.simulator.noise_sigma_1m = 0.0;
  cfg.predictors = {rotation_sigma_deg, keypoint_sigma, keypoint_dropout};
  return cfg;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("eecal_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& leaf = "") const { return leaf.empty() ? path_.string() : (path_ / leaf).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace eecal::test
