#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "demogen/pose.hpp"

namespace demogen {

// Point labels.
inline constexpr int32_t kLabelEE = -1;          // end-effector / unassigned
inline constexpr int32_t kLabelBackground = -2;  // removed during preprocessing
inline constexpr int32_t kLabelObstacle = -3;    // static scene additions

/// Point cloud with a per-point semantic label. Points are float32 meters,
/// world frame; labels 0..K-1 name objects, negative labels are special.
struct LabeledCloud {
  std::vector<Eigen::Vector3f> points;
  std::vector<int32_t> labels;
  std::vector<Eigen::Vector3f> colors;  // optional, rgb in [0,1]; empty or size N

  int size() const { return static_cast<int>(points.size()); }
  bool has_colors() const { return !colors.empty(); }

  void push(const Eigen::Vector3f& p, int32_t label) {
    points.push_back(p);
    labels.push_back(label);
  }

  void append(const LabeledCloud& other);
  void check() const;  // throws ValidationError on shape mismatch
};

struct CropBox {
  Eigen::Vector3f lo;
  Eigen::Vector3f hi;

  bool contains(const Eigen::Vector3f& p) const {
    return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y() &&
           p.z() >= lo.z() && p.z() <= hi.z();
  }
};

/// Keeps points inside the box (inclusive). Throws EmptyCloudError if none remain.
LabeledCloud crop(const LabeledCloud& cloud, const CropBox& box);

/// Drops DBSCAN noise: points that are neither core points (>= min_pts
/// neighbors within eps, self included) nor within eps of any core point.
/// Throws EmptyCloudError if everything is noise.
LabeledCloud cluster_filter(const LabeledCloud& cloud, double eps = 0.02, int min_pts = 5);

/// Greedy max-min farthest point sampling, float32 squared distances, ties
/// broken toward the lowest index. For k > N the whole cloud is emitted in
/// sampling order and then repeated cyclically to reach k.
LabeledCloud farthest_point_sample(const LabeledCloud& cloud, int k, int seed_index = 0);

/// Moves each point by the delta of its label: object labels use `deltas`,
/// the end-effector label uses `ee_delta`, background/obstacle stay put.
LabeledCloud transform_labeled(const LabeledCloud& cloud, const ConfigDelta& deltas,
                               const Pose& ee_delta);

/// Symmetric chamfer distance: mean of the two directed mean nearest-neighbor
/// distances, meters.
double chamfer(const LabeledCloud& a, const LabeledCloud& b);

/// Removes scene points that lie within `radius` of any reference point.
LabeledCloud subtract_by_proximity(const LabeledCloud& scene, const LabeledCloud& reference,
                                   double radius = 0.005);

/// ASCII PLY with x,y,z and an int label property (plus rgb if present).
void write_ply(const LabeledCloud& cloud, const std::string& path);

}  // namespace demogen
