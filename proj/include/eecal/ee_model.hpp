#pragma once

// Parametric two-finger gripper used as the end-effector (EE) model.
//
// EE frame layout (all in meters):
//   - palm: box x in [inset - body.length_x, inset], |y| <= body.width_y / 2,
//     z in [0, body.height_z]
//   - fingers: boxes centred at y = +/- finger.gap / 2, running from the rear
//     half of the palm towards -x by finger.length, z in [0, finger.thickness]
//   - origin: `origin_inset` inside the max-x face, centred in y, on the min-z
//     face (the face nominally pointing at the camera)
//
// The fingers overhang the palm sideways, so they define the y extent of the
// gripper; hiding one finger shifts the y mid-point used by the transform trick.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "eecal/error.hpp"
#include "eecal/geometry.hpp"
#include "eecal/kdtree.hpp"
#include "eecal/random.hpp"

namespace eecal {

struct BodyDims {
  double length_x = 0.06;
  double width_y = 0.08;
  double height_z = 0.05;
};

struct FingerDims {
  double length = 0.05;     // protrusion beyond the palm along -x
  double width = 0.05;      // along y
  double thickness = 0.025; // along z
  double gap = 0.13;        // centre-to-centre distance along y
};

struct EEModelParams {
  BodyDims body;
  FingerDims finger;
  double density = 6.0e5;      // surface samples per m^2
  double origin_inset = 0.015; // origin distance inside the max-x face
};

enum class EEPart : std::uint8_t { Body = 0, FingerPositive = 1, FingerNegative = 2 };

inline std::string_view to_string(EEPart part) {
  switch (part) {
    case EEPart::Body: return "body";
    case EEPart::FingerPositive: return "finger_pos";
    case EEPart::FingerNegative: return "finger_neg";
  }
  return "unknown";
}

inline EEPart ee_part_from_string(std::string_view name) {
  for (EEPart p : {EEPart::Body, EEPart::FingerPositive, EEPart::FingerNegative}) {
    if (to_string(p) == name) return p;
  }
  throw Error(ErrorKind::Config, "unknown EE part '" + std::string(name) + "'");
}

/// How one coordinate of the EE origin follows from the extent of the
/// unrotated EE points along that axis.
struct RptAxisRule {
  enum class Extreme { Min, Max, Mid };
  Extreme extreme = Extreme::Min;
  double inset = 0.0;  // moves the value inside the surface; ignored for Mid
};

struct RptDescriptor {
  std::array<RptAxisRule, 3> axes{};
};

/// Applies the descriptor to points already rotated into the EE axes.
/// `trim_fraction` drops that fraction of the most extreme values at each end
/// of every axis before taking min/max.
inline Vec3 apply_rpt_descriptor(std::span<const Vec3> points, const RptDescriptor& d,
                                 double trim_fraction = 0.0) {
  if (points.empty()) throw Error(ErrorKind::EmptyCloud, "rpt descriptor on an empty cloud");
  const std::size_t n = points.size();
  std::size_t k = static_cast<std::size_t>(std::floor(static_cast<double>(n) * trim_fraction));
  if (2 * k >= n) k = (n - 1) / 2;
  std::vector<double> values(n);
  Vec3 out;
  for (int a = 0; a < 3; ++a) {
    for (std::size_t i = 0; i < n; ++i) values[i] = points[i](a);
    double lo, hi;
    if (k == 0) {
      const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
      lo = *mn;
      hi = *mx;
    } else {
      std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
      lo = values[k];
      std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(n - 1 - k),
                       values.end());
      hi = values[n - 1 - k];
    }
    const RptAxisRule& rule = d.axes[static_cast<std::size_t>(a)];
    switch (rule.extreme) {
      case RptAxisRule::Extreme::Max: out(a) = hi - rule.inset; break;
      case RptAxisRule::Extreme::Min: out(a) = lo + rule.inset; break;
      case RptAxisRule::Extreme::Mid: out(a) = 0.5 * (hi + lo); break;
    }
  }
  return out;
}

struct EEModel {
  EEModelParams params;
  PointCloud surface_cloud;            // EE frame, labels = EE, keypoint ids set
  std::vector<EEPart> part_ids;        // per surface point
  std::array<Vec3, kNumKeypoints> ref_keypoints{};
  RptDescriptor rpt_descriptor;
  Aabb bbox;
};

namespace detail {

struct SolidBox {
  Vec3 min;
  Vec3 max;
  EEPart part;

  bool contains_closed(const Vec3& p, double tol = 1e-12) const {
    return (p.array() >= min.array() - tol).all() && (p.array() <= max.array() + tol).all();
  }
  bool contains_open(const Vec3& p, double tol = 1e-12) const {
    return (p.array() > min.array() + tol).all() && (p.array() < max.array() - tol).all();
  }
};

inline std::vector<double> axis_samples(double lo, double hi, double spacing) {
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((hi - lo) / spacing - 1e-9)));
  std::vector<double> v(n + 1);
  for (std::size_t i = 0; i <= n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
  v.back() = hi;
  return v;
}

struct QuantizedKey {
  std::int64_t x, y, z;
  bool operator==(const QuantizedKey&) const = default;
};

struct QuantizedKeyHash {
  std::size_t operator()(const QuantizedKey& k) const {
    std::size_t h = std::hash<std::int64_t>{}(k.x);
    h = h * 1000003u ^ std::hash<std::int64_t>{}(k.y);
    return h * 1000003u ^ std::hash<std::int64_t>{}(k.z);
  }
};

inline QuantizedKey quantize(const Vec3& p) {
  return {std::llround(p.x() * 1e8), std::llround(p.y() * 1e8), std::llround(p.z() * 1e8)};
}

}  // namespace detail

/// Samples the union surface of the palm and fingers on a grid per face.
/// Samples are jittered within their cell so a view shifted by one grid step
/// does not line up with the model again. Jitter only moves a sample along
/// face directions in which it is not on the border, so edges and corners
/// stay exact, and it is a hash of the grid position, so faces sharing an
/// edge produce the same edge samples.
/// Faces (or face regions) buried inside the union are skipped.
inline EEModel build_ee_model(const EEModelParams& params = {}) {
  const BodyDims& b = params.body;
  const FingerDims& f = params.finger;
  for (double v : {b.length_x, b.width_y, b.height_z, f.length, f.width, f.thickness, f.gap,
                   params.density}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::InvalidDimensions, "all EE dimensions and the density must be positive");
    }
  }
  if (!(params.origin_inset >= 0.0) || params.origin_inset > b.length_x) {
    throw Error(ErrorKind::InvalidDimensions, "origin inset must lie within the palm length");
  }
  if (f.gap <= f.width) {
    throw Error(ErrorKind::InvalidDimensions, "fingers overlap: gap must exceed finger width");
  }
  if (0.5 * f.gap - 0.5 * f.width > 0.5 * b.width_y + 1e-12) {
    throw Error(ErrorKind::InvalidDimensions, "fingers do not touch the palm");
  }

  const double x_max = params.origin_inset;
  const double x_back = x_max - b.length_x;
  const double x_mount = x_max - 0.5 * b.length_x;
  const double x_tip = x_back - f.length;
  const double yc = 0.5 * f.gap;
  const double hw = 0.5 * f.width;

  const std::array<detail::SolidBox, 3> boxes{{
      {Vec3(x_back, -0.5 * b.width_y, 0.0), Vec3(x_max, 0.5 * b.width_y, b.height_z), EEPart::Body},
      {Vec3(x_tip, yc - hw, 0.0), Vec3(x_mount, yc + hw, f.thickness), EEPart::FingerPositive},
      {Vec3(x_tip, -yc - hw, 0.0), Vec3(x_mount, -yc + hw, f.thickness), EEPart::FingerNegative},
  }};

  const double spacing = 1.0 / std::sqrt(params.density);
  constexpr double kProbe = 1e-7;

  EEModel model;
  model.params = params;
  std::unordered_set<detail::QuantizedKey, detail::QuantizedKeyHash> seen;

  auto add_point = [&](const Vec3& p, EEPart part) {
    if (!seen.insert(detail::quantize(p)).second) return;
    model.surface_cloud.push_back(p, Label::EE);
    model.part_ids.push_back(part);
  };

  const auto jitter = [](const Vec3& grid_point, int along, double step) {
    const detail::QuantizedKey k = detail::quantize(grid_point);
    const std::uint64_t h = derive_seed(static_cast<std::uint64_t>(along),
                                        {static_cast<std::uint64_t>(k.x), static_cast<std::uint64_t>(k.y),
                                         static_cast<std::uint64_t>(k.z)});
    const double u01 = static_cast<double>(h >> 11) * 0x1.0p-53;
    return (u01 - 0.5) * 0.9 * step;
  };

  for (std::size_t bi = 0; bi < boxes.size(); ++bi) {
    const detail::SolidBox& box = boxes[bi];
    for (int axis = 0; axis < 3; ++axis) {
      const int ua = (axis + 1) % 3;
      const int va = (axis + 2) % 3;
      const auto us = detail::axis_samples(box.min(ua), box.max(ua), spacing);
      const auto vs = detail::axis_samples(box.min(va), box.max(va), spacing);
      for (int side = 0; side < 2; ++side) {
        Vec3 normal = Vec3::Zero();
        normal(axis) = side == 0 ? -1.0 : 1.0;
        const double c = side == 0 ? box.min(axis) : box.max(axis);
        const double du = us[1] - us[0];
        const double dv = vs[1] - vs[0];
        for (std::size_t i = 0; i < us.size(); ++i) {
          for (std::size_t j = 0; j < vs.size(); ++j) {
            Vec3 p;
            p(axis) = c;
            p(ua) = us[i];
            p(va) = vs[j];
            const Vec3 grid_point = p;
            if (i > 0 && i + 1 < us.size()) p(ua) += jitter(grid_point, ua, du);
            if (j > 0 && j + 1 < vs.size()) p(va) += jitter(grid_point, va, dv);
            bool buried = false;
            for (std::size_t oi = 0; oi < boxes.size() && !buried; ++oi) {
              if (oi == bi) continue;
              buried = boxes[oi].contains_closed(p + kProbe * normal) || boxes[oi].contains_open(p);
            }
            if (!buried) add_point(p, box.part);
          }
        }
      }
    }
  }

  model.ref_keypoints = {
      Vec3(x_max, -0.5 * b.width_y, 0.0),  Vec3(x_max, 0.5 * b.width_y, 0.0),
      Vec3(x_back, -0.5 * b.width_y, 0.0), Vec3(x_back, 0.5 * b.width_y, 0.0),
      Vec3(x_tip, -yc, 0.0),               Vec3(x_tip, yc, 0.0),
  };
  const std::array<EEPart, kNumKeypoints> keypoint_parts{
      EEPart::Body, EEPart::Body, EEPart::Body, EEPart::Body, EEPart::FingerNegative, EEPart::FingerPositive};

  for (int k = 0; k < kNumKeypoints; ++k) {
    const Vec3& ref = model.ref_keypoints[static_cast<std::size_t>(k)];
    std::size_t idx = model.surface_cloud.size();
    for (std::size_t i = 0; i < model.surface_cloud.size(); ++i) {
      if ((model.surface_cloud.points[i] - ref).squaredNorm() < 1e-18) {
        idx = i;
        break;
      }
    }
    if (idx == model.surface_cloud.size()) {
      model.surface_cloud.push_back(ref, Label::EE);
      model.part_ids.push_back(keypoint_parts[static_cast<std::size_t>(k)]);
    }
    model.surface_cloud.keypoint_ids[idx] = k;
  }

  if (model.surface_cloud.size() < 20000) {
    throw Error(ErrorKind::InvalidDimensions,
                "sampling density yields fewer than 20000 surface points (" +
                    std::to_string(model.surface_cloud.size()) + ")");
  }

  using Extreme = RptAxisRule::Extreme;
  model.rpt_descriptor.axes = {RptAxisRule{Extreme::Max, params.origin_inset},
                               RptAxisRule{Extreme::Mid, 0.0}, RptAxisRule{Extreme::Min, 0.0}};
  model.bbox = Aabb::of(model.surface_cloud.points);
  return model;
}

/// Indices of the model points whose part is not hidden.
inline std::vector<std::size_t> visible_part_indices(const EEModel& model,
                                                     std::span<const EEPart> hidden_parts) {
  std::vector<std::size_t> idx;
  idx.reserve(model.surface_cloud.size());
  for (std::size_t i = 0; i < model.part_ids.size(); ++i) {
    if (std::find(hidden_parts.begin(), hidden_parts.end(), model.part_ids[i]) == hidden_parts.end()) {
      idx.push_back(i);
    }
  }
  return idx;
}

/// One representative model point per voxel (the point closest to the voxel
/// centre, lowest index on ties), in ascending index order.
inline std::vector<std::size_t> voxel_representatives(std::span<const Vec3> points, double voxel) {
  if (!(voxel > 0.0)) throw Error(ErrorKind::InvalidArgument, "voxel size must be positive");
  struct Best {
    std::size_t index;
    double d2;
  };
  std::unordered_map<detail::QuantizedKey, Best, detail::QuantizedKeyHash> cells;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec3 cell = (points[i] / voxel).array().floor();
    const Vec3 centre = (cell.array() + 0.5) * voxel;
    const double d2 = (points[i] - centre).squaredNorm();
    const detail::QuantizedKey key{static_cast<std::int64_t>(cell.x()), static_cast<std::int64_t>(cell.y()),
                                   static_cast<std::int64_t>(cell.z())};
    auto [it, inserted] = cells.try_emplace(key, Best{i, d2});
    if (!inserted && d2 < it->second.d2) it->second = {i, d2};
  }
  std::vector<std::size_t> out;
  out.reserve(cells.size());
  for (const auto& [key, best] : cells) out.push_back(best.index);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace eecal
