#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <array>
#include <cstdint>
#include <vector>

namespace demogen {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

/// A rigid transform in SE(3): position plus unit quaternion, world-frame
/// semantics (maps local coordinates into the world).
///
/// Convention used throughout the toolkit: deltas between configurations are
/// world-frame maps applied on the LEFT, i.e. `delta_between(src, dst)` is
/// the pose D with compose(D, src) == dst. This is the form under which the
/// end-effector pose expressed in an object's frame is preserved when both
/// are moved by the same delta.
struct Pose {
  Vec3 position{0.0, 0.0, 0.0};
  Quat orientation{1.0, 0.0, 0.0, 0.0};  // (w,x,y,z)

  Pose() = default;
  Pose(const Vec3& p, const Quat& q);

  static Pose identity() { return Pose{}; }
  static Pose translation(double x, double y, double z);
  static Pose rotation_z(double yaw_rad);

  /// Rigidly maps a point from the local frame to the world frame.
  Vec3 apply(const Vec3& point) const;

  Eigen::Matrix4d matrix() const;

  bool operator==(const Pose& other) const;

  std::array<double, 7> flat() const;  // (px,py,pz,qw,qx,qy,qz)
  static Pose from_flat(const std::array<double, 7>& v);
};

Pose compose(const Pose& a, const Pose& b);
Pose inverse(const Pose& a);

/// World-frame delta D with compose(D, source) == target.
Pose delta_between(const Pose& source, const Pose& target);

/// Position lerp + shortest-arc slerp; t in [0,1].
Pose interpolate(const Pose& a, const Pose& b, double t);

/// Absolute rotation angle (radians) between the two orientations.
double angle_between(const Pose& a, const Pose& b);

double position_distance(const Pose& a, const Pose& b);

bool is_unit_quaternion(const Quat& q, double tol = 1e-9);

/// Per-object world-frame deltas, indexed by object id. A missing or
/// defaulted entry means the object does not move.
struct ConfigDelta {
  std::vector<Pose> deltas;

  static ConfigDelta identity(int num_objects);
  static ConfigDelta between(const std::vector<Pose>& source,
                             const std::vector<Pose>& target);

  const Pose& of(int object_id) const;
  int size() const { return static_cast<int>(deltas.size()); }
};

}  // namespace demogen
