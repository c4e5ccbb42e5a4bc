#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "eecal/geometry.hpp"

namespace eecal {

/// Static 3-D kd-tree over a copy of the input points. Indices returned by
/// queries refer to positions in the original span. Equidistant neighbours
/// resolve to the smallest index so results never depend on tree layout.
class KdTree {
 public:
  struct Neighbor {
    std::size_t index;
    double squared_distance;
  };

  KdTree() = default;

  explicit KdTree(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    if (!points_.empty()) build(0, points_.size());
  }

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  /// Nearest neighbour within `max_distance` (unbounded by default).
  std::optional<Neighbor> nearest(const Vec3& q,
                                  double max_distance = std::numeric_limits<double>::infinity()) const {
    if (points_.empty()) return std::nullopt;
    Neighbor best{std::numeric_limits<std::size_t>::max(),
                  std::isinf(max_distance) ? std::numeric_limits<double>::infinity()
                                           : max_distance * max_distance};
    nearest_rec(0, points_.size(), q, best);
    if (best.index == std::numeric_limits<std::size_t>::max()) return std::nullopt;
    return best;
  }

  /// All points within `radius` (inclusive), sorted by index.
  std::vector<std::size_t> radius_search(const Vec3& q, double radius) const {
    std::vector<std::size_t> out;
    if (!points_.empty()) radius_rec(0, points_.size(), q, radius * radius, out);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  static constexpr std::size_t kLeafSize = 8;

  struct Node {
    int axis = -1;
    double split = 0.0;
  };

  // Node for range [lo, hi) is stored at order position mid = (lo + hi) / 2.
  void build(std::size_t lo, std::size_t hi) {
    if (hi - lo <= kLeafSize) return;
    Vec3 mn = points_[order_[lo]];
    Vec3 mx = mn;
    for (std::size_t i = lo; i < hi; ++i) {
      mn = mn.cwiseMin(points_[order_[i]]);
      mx = mx.cwiseMax(points_[order_[i]]);
    }
    int axis = 0;
    (mx - mn).maxCoeff(&axis);
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(lo),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(hi),
                     [&](std::size_t a, std::size_t b) { return points_[a](axis) < points_[b](axis); });
    if (nodes_.size() < points_.size()) nodes_.resize(points_.size());
    nodes_[mid] = {axis, points_[order_[mid]](axis)};
    build(lo, mid);
    build(mid + 1, hi);
  }

  void consider(std::size_t idx, const Vec3& q, Neighbor& best) const {
    const double d2 = (points_[idx] - q).squaredNorm();
    if (d2 < best.squared_distance || (d2 == best.squared_distance && idx < best.index)) {
      best = {idx, d2};
    }
  }

  void nearest_rec(std::size_t lo, std::size_t hi, const Vec3& q, Neighbor& best) const {
    if (hi - lo <= kLeafSize) {
      for (std::size_t i = lo; i < hi; ++i) consider(order_[i], q, best);
      return;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    const Node& node = nodes_[mid];
    const double diff = q(node.axis) - node.split;
    consider(order_[mid], q, best);
    const bool left_first = diff <= 0.0;
    if (left_first) {
      nearest_rec(lo, mid, q, best);
      if (diff * diff <= best.squared_distance) nearest_rec(mid + 1, hi, q, best);
    } else {
      nearest_rec(mid + 1, hi, q, best);
      if (diff * diff <= best.squared_distance) nearest_rec(lo, mid, q, best);
    }
  }

  void radius_rec(std::size_t lo, std::size_t hi, const Vec3& q, double r2,
                  std::vector<std::size_t>& out) const {
    if (hi - lo <= kLeafSize) {
      for (std::size_t i = lo; i < hi; ++i) {
        if ((points_[order_[i]] - q).squaredNorm() <= r2) out.push_back(order_[i]);
      }
      return;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    const Node& node = nodes_[mid];
    const double diff = q(node.axis) - node.split;
    if ((points_[order_[mid]] - q).squaredNorm() <= r2) out.push_back(order_[mid]);
    if (diff <= 0.0 || diff * diff <= r2) radius_rec(lo, mid, q, r2, out);
    if (diff >= 0.0 || diff * diff <= r2) radius_rec(mid + 1, hi, q, r2, out);
  }

  std::vector<Vec3> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace eecal
