#pragma once

// Rigid-body primitives shared by every stage of the pipeline.
//
// Quaternions are Hamilton, scalar-first (w, x, y, z) and always unit length.
// A Pose maps points from its child frame into its parent frame:
//   apply(x) = R * x + t
// so T_C^EE.apply(p_ee) yields the point in camera coordinates.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "eecal/error.hpp"

namespace eecal {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

class Quaternion {
 public:
  Quaternion() = default;

  Quaternion(double w, double x, double y, double z) : w_(w), x_(x), y_(y), z_(z) {
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    if (!(n > 1e-300) || !std::isfinite(n)) {
      throw Error(ErrorKind::InvalidArgument, "quaternion must have a finite, non-zero norm");
    }
    w_ /= n;
    x_ /= n;
    y_ /= n;
    z_ /= n;
  }

  static Quaternion identity() { return {}; }

  /// Rotation of `angle` radians about `axis` (normalized internally).
  static Quaternion from_axis_angle(const Vec3& axis, double angle) {
    const double n = axis.norm();
    if (!(n > 0.0)) {
      if (angle == 0.0) return identity();
      throw Error(ErrorKind::InvalidArgument, "rotation axis must be non-zero");
    }
    const Vec3 u = axis / n;
    const double s = std::sin(0.5 * angle);
    return {std::cos(0.5 * angle), u.x() * s, u.y() * s, u.z() * s};
  }

  /// Rotation vector (axis * angle) to quaternion.
  static Quaternion from_rotation_vector(const Vec3& v) {
    const double angle = v.norm();
    if (angle == 0.0) return identity();
    return from_axis_angle(v, angle);
  }

  static Quaternion from_matrix(const Mat3& r) {
    const Eigen::Quaterniond q(r);
    return {q.w(), q.x(), q.y(), q.z()};
  }

  /// Intrinsic roll-pitch-yaw about x, then y, then z: R = Rz(yaw) * Ry(pitch) * Rx(roll).
  static Quaternion from_rpy(double roll, double pitch, double yaw) {
    return from_axis_angle(Vec3::UnitZ(), yaw) * from_axis_angle(Vec3::UnitY(), pitch) *
           from_axis_angle(Vec3::UnitX(), roll);
  }

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }

  std::array<double, 4> coeffs() const { return {w_, x_, y_, z_}; }
  Eigen::Vector4d vec() const { return {w_, x_, y_, z_}; }

  Quaternion conjugate() const { return raw(w_, -x_, -y_, -z_); }
  Quaternion negated() const { return raw(-w_, -x_, -y_, -z_); }

  Quaternion operator*(const Quaternion& o) const {
    return {w_ * o.w_ - x_ * o.x_ - y_ * o.y_ - z_ * o.z_,
            w_ * o.x_ + x_ * o.w_ + y_ * o.z_ - z_ * o.y_,
            w_ * o.y_ - x_ * o.z_ + y_ * o.w_ + z_ * o.x_,
            w_ * o.z_ + x_ * o.y_ - y_ * o.x_ + z_ * o.w_};
  }

  Mat3 matrix() const {
    return Eigen::Quaterniond(w_, x_, y_, z_).toRotationMatrix();
  }

  Vec3 rotate(const Vec3& v) const {
    // v' = v + 2w (q x v) + 2 q x (q x v)
    const Vec3 q(x_, y_, z_);
    const Vec3 c = q.cross(v);
    return v + 2.0 * w_ * c + 2.0 * q.cross(c);
  }

  /// Rotation angle in [0, pi].
  double angle() const {
    const double s = std::sqrt(x_ * x_ + y_ * y_ + z_ * z_);
    return 2.0 * std::atan2(s, std::abs(w_));
  }

  /// Flip to the representative with w >= 0 (first non-zero component positive on ties).
  Quaternion canonical() const {
    for (double c : {w_, x_, y_, z_}) {
      if (c > 0.0) return *this;
      if (c < 0.0) return negated();
    }
    return *this;
  }

  bool operator==(const Quaternion&) const = default;

 private:
  static Quaternion raw(double w, double x, double y, double z) {
    Quaternion q;
    q.w_ = w;
    q.x_ = x;
    q.y_ = y;
    q.z_ = z;
    return q;
  }

  double w_ = 1.0;
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
};

struct Pose {
  Quaternion rotation;
  Vec3 translation = Vec3::Zero();

  static Pose identity() { return {}; }
  static Pose from_translation(const Vec3& t) { return {Quaternion::identity(), t}; }

  Vec3 apply(const Vec3& x) const { return rotation.rotate(x) + translation; }

  Mat4 matrix() const {
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = rotation.matrix();
    m.topRightCorner<3, 1>() = translation;
    return m;
  }
};

/// Applies b first, then a.
inline Pose compose(const Pose& a, const Pose& b) {
  return {a.rotation * b.rotation, a.rotation.rotate(b.translation) + a.translation};
}

inline Pose invert(const Pose& p) {
  const Quaternion r = p.rotation.conjugate();
  return {r, -r.rotate(p.translation)};
}

/// Smallest rotation angle taking a onto b, in [0, pi]. Sign invariant.
inline double rotation_distance(const Quaternion& a, const Quaternion& b) {
  return (a.conjugate() * b).angle();
}

// ---------------------------------------------------------------------------
// Point clouds

enum class Label : std::uint8_t { Background = 0, Arm = 1, EE = 2 };

inline constexpr int kNoKeypoint = -1;
inline constexpr int kNumKeypoints = 6;

struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Label> labels;        // empty or points.size()
  std::vector<int> keypoint_ids;    // empty or points.size(); -1 = none

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_labels() const { return !labels.empty(); }
  bool has_keypoints() const { return !keypoint_ids.empty(); }

  /// Throws InvalidArgument when the per-point attributes are inconsistent.
  void validate() const {
    if (has_labels() && labels.size() != points.size()) {
      throw Error(ErrorKind::InvalidArgument, "labels length differs from point count");
    }
    if (has_keypoints()) {
      if (keypoint_ids.size() != points.size()) {
        throw Error(ErrorKind::InvalidArgument, "keypoint_ids length differs from point count");
      }
      std::array<bool, kNumKeypoints> seen{};
      for (int id : keypoint_ids) {
        if (id == kNoKeypoint) continue;
        if (id < 0 || id >= kNumKeypoints) {
          throw Error(ErrorKind::InvalidArgument, "keypoint id out of range");
        }
        if (seen[static_cast<std::size_t>(id)]) {
          throw Error(ErrorKind::InvalidArgument, "duplicate keypoint id in cloud");
        }
        seen[static_cast<std::size_t>(id)] = true;
      }
    }
  }

  void push_back(const Vec3& p, Label label, int keypoint_id = kNoKeypoint) {
    points.push_back(p);
    labels.push_back(label);
    keypoint_ids.push_back(keypoint_id);
  }

  /// Copies the selected points with their attributes, in index order.
  PointCloud subset(std::span<const std::size_t> indices) const {
    PointCloud out;
    out.points.reserve(indices.size());
    if (has_labels()) out.labels.reserve(indices.size());
    if (has_keypoints()) out.keypoint_ids.reserve(indices.size());
    for (std::size_t i : indices) {
      out.points.push_back(points[i]);
      if (has_labels()) out.labels.push_back(labels[i]);
      if (has_keypoints()) out.keypoint_ids.push_back(keypoint_ids[i]);
    }
    return out;
  }

  /// Indices of points carrying `label`.
  std::vector<std::size_t> indices_with(Label label) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == label) idx.push_back(i);
    }
    return idx;
  }
};

inline std::vector<Vec3> transform_points(const Pose& p, std::span<const Vec3> points) {
  std::vector<Vec3> out;
  out.reserve(points.size());
  const Mat3 r = p.rotation.matrix();
  for (const Vec3& x : points) out.push_back(r * x + p.translation);
  return out;
}

inline PointCloud transform_points(const Pose& p, const PointCloud& c) {
  PointCloud out;
  out.points = transform_points(p, std::span<const Vec3>(c.points));
  out.labels = c.labels;
  out.keypoint_ids = c.keypoint_ids;
  return out;
}

struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  static Aabb of(std::span<const Vec3> points) {
    if (points.empty()) return {};
    Aabb box{points.front(), points.front()};
    for (const Vec3& p : points) {
      box.min = box.min.cwiseMin(p);
      box.max = box.max.cwiseMax(p);
    }
    return box;
  }

  Aabb inflated(double margin) const {
    return {Vec3(min.array() - margin), Vec3(max.array() + margin)};
  }
  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  Vec3 extent() const { return max - min; }
  double diagonal() const { return extent().norm(); }
};

inline Vec3 centroid(std::span<const Vec3> points) {
  Vec3 c = Vec3::Zero();
  for (const Vec3& p : points) c += p;
  return points.empty() ? c : Vec3(c / static_cast<double>(points.size()));
}

// ---------------------------------------------------------------------------
// Least-squares rigid fit (Arun / Umeyama without scale)

/// Pose minimizing sum |R s_i + t - t_i|^2 over proper rotations.
/// Optional non-negative weights; uniform when empty.
inline Pose kabsch_fit(std::span<const Vec3> source, std::span<const Vec3> target,
                       std::span<const double> weights = {}) {
  if (source.size() != target.size()) {
    throw Error(ErrorKind::InvalidArgument, "kabsch_fit: source and target sizes differ");
  }
  if (source.size() < 3) {
    throw Error(ErrorKind::DegenerateGeometry, "kabsch_fit needs at least 3 point pairs");
  }
  if (!weights.empty() && weights.size() != source.size()) {
    throw Error(ErrorKind::InvalidArgument, "kabsch_fit: weights size differs");
  }
  auto w = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };

  double wsum = 0.0;
  Vec3 cs = Vec3::Zero();
  Vec3 ct = Vec3::Zero();
  for (std::size_t i = 0; i < source.size(); ++i) {
    wsum += w(i);
    cs += w(i) * source[i];
    ct += w(i) * target[i];
  }
  if (!(wsum > 0.0)) throw Error(ErrorKind::DegenerateGeometry, "kabsch_fit: zero total weight");
  cs /= wsum;
  ct /= wsum;

  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < source.size(); ++i) {
    h += w(i) * (source[i] - cs) * (target[i] - ct).transpose();
  }

  const Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(1) <= 1e-12 * sv(0)) {
    throw Error(ErrorKind::DegenerateGeometry, "kabsch_fit: point sets are collinear or coincident");
  }
  const Mat3& u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  d(2, 2) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  const Mat3 r = v * d * u.transpose();

  Pose out;
  out.rotation = Quaternion::from_matrix(r);
  out.translation = ct - out.rotation.rotate(cs);
  return out;
}

// ---------------------------------------------------------------------------
// Quaternion averaging (Markley et al.): principal eigenvector of sum w q q^T

inline Quaternion quaternion_average(std::span<const Quaternion> qs,
                                     std::span<const double> weights = {}) {
  if (qs.empty()) throw Error(ErrorKind::EmptyInput, "quaternion_average of an empty list");
  if (!weights.empty() && weights.size() != qs.size()) {
    throw Error(ErrorKind::InvalidArgument, "quaternion_average: weights size differs");
  }
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const Eigen::Vector4d v = qs[i].vec();
    m += (weights.empty() ? 1.0 : weights[i]) * v * v.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m);
  const Eigen::Vector4d top = es.eigenvectors().col(3);  // eigenvalues ascending
  return Quaternion(top(0), top(1), top(2), top(3)).canonical();
}

}  // namespace eecal
