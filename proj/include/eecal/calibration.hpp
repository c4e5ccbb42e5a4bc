#pragma once

// Multi-frame extrinsic calibration: per-frame T_C^B from an EE pose and
// forward kinematics, sanity gating, robust averaging within each robot
// configuration and then across configurations.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eecal/error.hpp"
#include "eecal/geometry.hpp"

namespace eecal {

/// T_C^B = T_C^EE * (T_B^EE)^-1
inline Pose frame_calibration(const Pose& t_c_ee, const Pose& t_b_ee) { return compose(t_c_ee, invert(t_b_ee)); }

struct SanityConfig {
  std::size_t min_ee_points = 300;
  double min_bbox_diagonal = 0.04;
};

struct SanityResult {
  bool passed = true;
  ErrorKind reason = ErrorKind::TooFewPoints;
  std::string message;
};

inline SanityResult sanity_check(const PointCloud& ee_points, const SanityConfig& cfg = {}) {
  if (ee_points.size() < cfg.min_ee_points) {
    return {false, ErrorKind::TooFewPoints,
            std::to_string(ee_points.size()) + " EE points, need " + std::to_string(cfg.min_ee_points)};
  }
  const double diag = Aabb::of(ee_points.points).diagonal();
  if (diag < cfg.min_bbox_diagonal) {
    return {false, ErrorKind::TooFewPoints, "EE bounding box diagonal " + std::to_string(diag) + " m is too small"};
  }
  return {};
}

enum class AxisCombine { Union, Intersection };

struct OutlierConfig {
  double modified_zscore_threshold = 3.5;
  double mad_zero_epsilon = 1e-9;
  AxisCombine translation_axes = AxisCombine::Union;
};

namespace detail {

inline double median(std::vector<double> v) {
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2), v.end());
  const double hi = v[n / 2];
  if (n % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2));
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Modified Z-score (Iglewicz and Hoaglin): M = 0.6745 (x - median) / MAD.
/// true marks an outlier.
inline std::vector<bool> mad_outlier_mask(std::span<const double> values, const OutlierConfig& cfg = {}) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "outlier detection needs at least one value");
  if (!(cfg.modified_zscore_threshold > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "modified Z-score threshold must be positive");
  }
  const double med = detail::median({values.begin(), values.end()});
  std::vector<double> dev(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) dev[i] = std::abs(values[i] - med);
  const double mad = detail::median(dev);
  std::vector<bool> mask(values.size(), false);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (mad < cfg.mad_zero_epsilon) {
      mask[i] = dev[i] > cfg.mad_zero_epsilon;
    } else {
      mask[i] = 0.6745 * dev[i] / mad > cfg.modified_zscore_threshold;
    }
  }
  return mask;
}

/// MAD test on the rotation distances to the average quaternion.
inline std::vector<bool> rotation_outlier_mask(std::span<const Quaternion> quats, const OutlierConfig& cfg = {}) {
  if (quats.empty()) throw Error(ErrorKind::EmptyInput, "rotation outlier detection needs at least one rotation");
  const Quaternion ref = quaternion_average(quats);
  std::vector<double> d(quats.size());
  for (std::size_t i = 0; i < quats.size(); ++i) d[i] = rotation_distance(quats[i], ref);
  return mad_outlier_mask(d, cfg);
}

struct AggregateResult {
  Pose pose;
  std::size_t used = 0;
  std::size_t outliers = 0;
  bool fallback = false;  // every input was rejected, so all were averaged
};

inline AggregateResult aggregate_detailed(std::span<const Pose> poses, const OutlierConfig& cfg = {}) {
  if (poses.empty()) throw Error(ErrorKind::EmptyInput, "aggregate needs at least one pose");
  const std::size_t n = poses.size();
  std::vector<bool> translation_out(n, cfg.translation_axes == AxisCombine::Intersection);
  for (int axis = 0; axis < 3; ++axis) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = poses[i].translation[axis];
    const std::vector<bool> m = mad_outlier_mask(v, cfg);
    for (std::size_t i = 0; i < n; ++i) {
      translation_out[i] = cfg.translation_axes == AxisCombine::Union ? (translation_out[i] || m[i])
                                                                       : (translation_out[i] && m[i]);
    }
  }
  std::vector<Quaternion> qs(n);
  for (std::size_t i = 0; i < n; ++i) qs[i] = poses[i].rotation;
  const std::vector<bool> rotation_out = rotation_outlier_mask(qs, cfg);

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n; ++i) {
    if (!translation_out[i] && !rotation_out[i]) keep.push_back(i);
  }
  AggregateResult out;
  out.outliers = n - keep.size();
  if (keep.empty()) {
    out.fallback = true;
    for (std::size_t i = 0; i < n; ++i) keep.push_back(i);
  }
  // Sum in a canonical order so the result does not depend on input order.
  std::sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) {
    const Vec3& ta = poses[a].translation;
    const Vec3& tb = poses[b].translation;
    return std::lexicographical_compare(ta.data(), ta.data() + 3, tb.data(), tb.data() + 3);
  });
  Vec3 t = Vec3::Zero();
  std::vector<Quaternion> kept_q;
  for (std::size_t i : keep) {
    t += poses[i].translation;
    kept_q.push_back(poses[i].rotation.canonical());
  }
  out.pose = {quaternion_average(kept_q), t / static_cast<double>(keep.size())};
  out.used = keep.size();
  return out;
}

inline Pose aggregate(std::span<const Pose> poses, const OutlierConfig& cfg = {}) {
  return aggregate_detailed(poses, cfg).pose;
}

enum class Method { Rpt, Kpm };

inline std::string_view to_string(Method m) { return m == Method::Rpt ? "rpt" : "kpm"; }

/// One per-frame T_C^B sample.
struct CalibrationSample {
  int config_id = 0;
  std::size_t frame_index = 0;
  Method method = Method::Rpt;
  Pose calibration;
};

struct GroupEstimate {
  int config_id = 0;
  Pose calibration;
  std::size_t samples = 0;
  std::size_t frames_used = 0;
  std::size_t outliers_removed = 0;
  bool fallback = false;
};

struct CalibrationResult {
  Pose calibration;
  std::vector<GroupEstimate> groups;
  std::size_t frames_total = 0;
  std::size_t frames_rejected = 0;
  std::size_t rpt_samples = 0;
  std::size_t kpm_samples = 0;
  bool icp = true;
  std::vector<std::string> frame_errors;
};

/// Groups samples by config_id, aggregates each group, then aggregates the
/// group estimates. Samples are reduced in (config_id, frame, method) order.
inline CalibrationResult calibrate_samples(std::vector<CalibrationSample> samples, const OutlierConfig& cfg = {}) {
  if (samples.empty()) throw Error(ErrorKind::NoUsableFrames, "no frame produced a calibration estimate");
  std::sort(samples.begin(), samples.end(), [](const CalibrationSample& a, const CalibrationSample& b) {
    if (a.config_id != b.config_id) return a.config_id < b.config_id;
    if (a.frame_index != b.frame_index) return a.frame_index < b.frame_index;
    return a.method < b.method;
  });
  std::map<int, std::vector<const CalibrationSample*>> groups;
  for (const CalibrationSample& s : samples) groups[s.config_id].push_back(&s);

  CalibrationResult out;
  std::vector<Pose> group_poses;
  for (const auto& [id, members] : groups) {
    std::vector<Pose> poses;
    std::vector<std::size_t> frames;
    for (const CalibrationSample* s : members) {
      poses.push_back(s->calibration);
      frames.push_back(s->frame_index);
      (s->method == Method::Rpt ? out.rpt_samples : out.kpm_samples) += 1;
    }
    std::sort(frames.begin(), frames.end());
    frames.erase(std::unique(frames.begin(), frames.end()), frames.end());
    const AggregateResult agg = aggregate_detailed(poses, cfg);
    out.groups.push_back({id, agg.pose, poses.size(), frames.size(), agg.outliers, agg.fallback});
    group_poses.push_back(agg.pose);
  }
  out.calibration = aggregate(group_poses, cfg);
  return out;
}

}  // namespace eecal
