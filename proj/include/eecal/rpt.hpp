#pragma once

// Pose route 1: predict the EE rotation, rotate the EE points back into the
// EE axes, and read the origin off the axis extents of the unrotated points.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "eecal/ee_model.hpp"
#include "eecal/error.hpp"
#include "eecal/geometry.hpp"
#include "eecal/random.hpp"

namespace eecal {

class RotationPredictor {
 public:
  virtual ~RotationPredictor() = default;
  /// EE rotation in the camera frame from segmented EE points.
  virtual Quaternion predict(const PointCloud& ee_points) const = 0;
};

/// Ground-truth rotation perturbed by a random rotation about a uniformly
/// distributed axis with angle ~ N(0, sigma).
class NoisyOracleRotation final : public RotationPredictor {
 public:
  NoisyOracleRotation(const Quaternion& truth, double sigma_rad, std::uint64_t seed)
      : truth_(truth), sigma_(sigma_rad), seed_(seed) {}

  Quaternion predict(const PointCloud& /*ee_points*/) const override {
    if (sigma_ <= 0.0) return truth_;
    Rng rng(seed_);
    const Vec3 axis = random_unit_vector(rng);
    std::normal_distribution<double> angle(0.0, sigma_);
    return Quaternion::from_axis_angle(axis, angle(rng)) * truth_;
  }

 private:
  Quaternion truth_;
  double sigma_;
  std::uint64_t seed_;
};

/// Points expressed in the EE axes: p' = R^-1 p. Labels and ids are kept.
inline PointCloud rotate_back(const PointCloud& ee_points, const Quaternion& r_pred) {
  return transform_points(Pose{r_pred.conjugate(), Vec3::Zero()}, ee_points);
}

struct RptOptions {
  /// Fraction of the most extreme points dropped at each end of every axis.
  /// Zero disables trimming (noise-free input).
  double trim_fraction = 0.0;
  std::size_t min_points = 10;
};

/// Origin of the EE in the unrotated camera-aligned frame.
inline Vec3 rpt_unrotated_translation(const PointCloud& rotated_points, const RptDescriptor& descriptor,
                                      const RptOptions& options = {}) {
  if (rotated_points.size() < options.min_points) {
    throw Error(ErrorKind::TooFewPoints, "transform trick needs at least " +
                                             std::to_string(options.min_points) + " EE points");
  }
  return apply_rpt_descriptor(rotated_points.points, descriptor, options.trim_fraction);
}

/// EE translation in the camera frame: t = R_pred * t_unrotated.
inline Vec3 rpt_translation(const PointCloud& rotated_points, const RptDescriptor& descriptor,
                            const Quaternion& r_pred, const RptOptions& options = {}) {
  return r_pred.rotate(rpt_unrotated_translation(rotated_points, descriptor, options));
}

inline Pose rpt_pose(const PointCloud& ee_points, const RotationPredictor& predictor,
                     const RptDescriptor& descriptor, const RptOptions& options = {}) {
  if (ee_points.size() < options.min_points) {
    throw Error(ErrorKind::TooFewPoints, "transform trick needs at least " +
                                             std::to_string(options.min_points) + " EE points");
  }
  const Quaternion r = predictor.predict(ee_points);
  return {r, rpt_translation(rotate_back(ee_points, r), descriptor, r, options)};
}

}  // namespace eecal
