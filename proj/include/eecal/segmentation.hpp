#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <unordered_map>
#include <vector>

#include "eecal/ee_model.hpp"
#include "eecal/error.hpp"
#include "eecal/geometry.hpp"
#include "eecal/random.hpp"

namespace eecal {

class SegmentationPredictor {
 public:
  virtual ~SegmentationPredictor() = default;
  /// One label per input point.
  virtual std::vector<Label> predict(const PointCloud& cloud) const = 0;
};

/// Returns the labels stored in the cloud.
class GroundTruthSegmenter final : public SegmentationPredictor {
 public:
  std::vector<Label> predict(const PointCloud& cloud) const override {
    if (!cloud.has_labels()) throw Error(ErrorKind::InvalidArgument, "cloud carries no ground-truth labels");
    return cloud.labels;
  }
};

/// Ground truth corrupted two ways: every label is replaced by one of the other
/// two classes with probability `flip_probability`, then every non-EE point is
/// turned into a false-positive EE point with probability `speckle_rate`.
class NoisyOracleSegmenter final : public SegmentationPredictor {
 public:
  NoisyOracleSegmenter(double flip_probability, double speckle_rate, std::uint64_t seed)
      : flip_(flip_probability), speckle_(speckle_rate), seed_(seed) {}

  std::vector<Label> predict(const PointCloud& cloud) const override {
    std::vector<Label> labels = GroundTruthSegmenter{}.predict(cloud);
    Rng rng(seed_);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::uniform_int_distribution<int> other(1, 2);
    for (Label& l : labels) {
      if (flip_ > 0.0 && uni(rng) < flip_) {
        l = static_cast<Label>((static_cast<int>(l) + other(rng)) % 3);
      }
      if (speckle_ > 0.0 && l != Label::EE && uni(rng) < speckle_) l = Label::EE;
    }
    return labels;
  }

 private:
  double flip_;
  double speckle_;
  std::uint64_t seed_;
};

inline PointCloud predict_labels(const PointCloud& cloud, const SegmentationPredictor& predictor) {
  if (cloud.empty()) throw Error(ErrorKind::EmptyCloud, "segmentation of an empty cloud");
  PointCloud out = cloud;
  out.labels = predictor.predict(cloud);
  if (out.labels.size() != cloud.size()) {
    throw Error(ErrorKind::InvalidArgument, "segmentation predictor returned a wrong number of labels");
  }
  return out;
}

inline PointCloud extract_label(const PointCloud& cloud, Label label) {
  const std::vector<std::size_t> idx = cloud.indices_with(label);
  return cloud.subset(idx);
}

namespace detail {

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

/// Connected components of the graph linking points closer than
/// `linkage_distance` (single-linkage clustering cut at that height).
/// Returns a component id per point; ids are dense and ordered by the
/// smallest point index in each component.
inline std::vector<std::size_t> single_linkage_components(std::span<const Vec3> points, double linkage_distance) {
  if (!(linkage_distance > 0.0)) throw Error(ErrorKind::InvalidArgument, "linkage distance must be positive");
  // Cells of side d / sqrt(3): two points sharing a cell are always linked.
  const double cell = linkage_distance / std::sqrt(3.0);
  const int reach = static_cast<int>(std::ceil(linkage_distance / cell));
  std::unordered_map<detail::QuantizedKey, std::size_t, detail::QuantizedKeyHash> cell_index;
  std::vector<detail::QuantizedKey> cell_keys;
  std::vector<std::vector<std::size_t>> members;
  std::vector<std::size_t> point_cell(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const detail::QuantizedKey key{static_cast<std::int64_t>(std::floor(points[i].x() / cell)),
                                   static_cast<std::int64_t>(std::floor(points[i].y() / cell)),
                                   static_cast<std::int64_t>(std::floor(points[i].z() / cell))};
    auto [it, inserted] = cell_index.try_emplace(key, cell_keys.size());
    if (inserted) {
      cell_keys.push_back(key);
      members.emplace_back();
    }
    members[it->second].push_back(i);
    point_cell[i] = it->second;
  }

  const double d2 = linkage_distance * linkage_distance;
  detail::DisjointSet cells(cell_keys.size());
  for (std::size_t a = 0; a < cell_keys.size(); ++a) {
    const detail::QuantizedKey& ka = cell_keys[a];
    for (int dx = -reach; dx <= reach; ++dx) {
      for (int dy = -reach; dy <= reach; ++dy) {
        for (int dz = -reach; dz <= reach; ++dz) {
          const auto it = cell_index.find({ka.x + dx, ka.y + dy, ka.z + dz});
          if (it == cell_index.end() || it->second <= a) continue;
          const auto gap = [&](int k) { return std::max(0, std::abs(k) - 1) * cell; };
          if (gap(dx) * gap(dx) + gap(dy) * gap(dy) + gap(dz) * gap(dz) > d2) continue;
          const std::size_t b = it->second;
          if (cells.find(a) == cells.find(b)) continue;
          bool linked = false;
          for (std::size_t i : members[a]) {
            for (std::size_t j : members[b]) {
              if ((points[i] - points[j]).squaredNorm() <= d2) {
                linked = true;
                break;
              }
            }
            if (linked) break;
          }
          if (linked) cells.unite(a, b);
        }
      }
    }
  }

  std::vector<std::size_t> component(points.size());
  std::unordered_map<std::size_t, std::size_t> dense;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t root = cells.find(point_cell[i]);
    auto [it, inserted] = dense.try_emplace(root, dense.size());
    component[i] = it->second;
  }
  return component;
}

struct ClusterFilterConfig {
  double linkage_distance = 0.03;
  double min_cluster_fraction = 0.2;
};

/// Keeps the largest single-linkage cluster of the EE points. Clusters smaller
/// than min_cluster_fraction of the input are never returned. Ties go to the
/// cluster with the lower centroid x, then the lower first point index.
inline PointCloud cluster_filter(const PointCloud& ee_points, const ClusterFilterConfig& cfg = {}) {
  if (ee_points.empty()) throw Error(ErrorKind::EmptyCloud, "cluster_filter needs at least one EE point");
  const std::vector<std::size_t> comp = single_linkage_components(ee_points.points, cfg.linkage_distance);
  const std::size_t n_comp = *std::max_element(comp.begin(), comp.end()) + 1;
  std::vector<std::size_t> count(n_comp, 0);
  std::vector<double> sum_x(n_comp, 0.0);
  for (std::size_t i = 0; i < comp.size(); ++i) {
    ++count[comp[i]];
    sum_x[comp[i]] += ee_points.points[i].x();
  }
  // Component ids are ordered by first point index, so a strict comparison
  // keeps the lower-index cluster on full ties.
  std::size_t best = 0;
  for (std::size_t c = 1; c < n_comp; ++c) {
    if (count[c] > count[best]) {
      best = c;
    } else if (count[c] == count[best]) {
      const double cx = sum_x[c] / static_cast<double>(count[c]);
      const double bx = sum_x[best] / static_cast<double>(count[best]);
      if (cx < bx) best = c;
    }
  }
  if (static_cast<double>(count[best]) < cfg.min_cluster_fraction * static_cast<double>(ee_points.size())) {
    throw Error(ErrorKind::NoValidCluster, "every EE cluster is below the minimum cluster fraction");
  }
  std::vector<std::size_t> keep;
  keep.reserve(count[best]);
  for (std::size_t i = 0; i < comp.size(); ++i) {
    if (comp[i] == best) keep.push_back(i);
  }
  return ee_points.subset(keep);
}

}  // namespace eecal
