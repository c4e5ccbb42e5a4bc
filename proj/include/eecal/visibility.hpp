#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "eecal/geometry.hpp"

namespace eecal {

/// Parameters of the hidden-point-removal pass. Points are binned by viewing
/// direction; within a bin only points no farther than the closest range plus
/// `depth_margin` survive.
struct HprParams {
  double angular_resolution = 0.0025;  // rad
  double depth_margin = 0.01;          // m
};

/// Visibility mask for points expressed in a camera frame with the eye at the
/// origin looking down +z. Points at or behind the eye plane are never visible.
inline std::vector<char> visible_mask(std::span<const Vec3> points, const HprParams& hpr) {
  std::vector<char> mask(points.size(), 0);
  std::vector<std::int64_t> keys(points.size());
  std::vector<double> ranges(points.size());
  std::unordered_map<std::int64_t, double> closest;
  closest.reserve(points.size() / 2 + 1);
  const double inv_res = 1.0 / hpr.angular_resolution;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec3& p = points[i];
    if (!(p.z() > 0.0)) {
      keys[i] = std::numeric_limits<std::int64_t>::min();
      continue;
    }
    const auto u = static_cast<std::int64_t>(std::floor(std::atan2(p.x(), p.z()) * inv_res));
    const auto v = static_cast<std::int64_t>(std::floor(std::atan2(p.y(), p.z()) * inv_res));
    keys[i] = (u << 32) ^ (v & 0xffffffffLL);
    ranges[i] = p.norm();
    auto [it, inserted] = closest.try_emplace(keys[i], ranges[i]);
    if (!inserted && ranges[i] < it->second) it->second = ranges[i];
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (keys[i] == std::numeric_limits<std::int64_t>::min()) continue;
    mask[i] = ranges[i] <= closest.at(keys[i]) + hpr.depth_margin ? 1 : 0;
  }
  return mask;
}

struct Frustum {
  double horizontal_fov = deg2rad(57.0);
  double vertical_fov = deg2rad(43.0);
  double near_clip = 0.1;

  bool contains(const Vec3& p) const {
    if (!(p.z() > near_clip)) return false;
    return std::abs(p.x()) <= std::tan(0.5 * horizontal_fov) * p.z() &&
           std::abs(p.y()) <= std::tan(0.5 * vertical_fov) * p.z();
  }
};

}  // namespace eecal
