#include "demogen/pose.hpp"

#include <cmath>

#include "demogen/errors.hpp"

namespace demogen {

namespace {

// Canonical sign: w >= 0; for w == 0 the first nonzero of (x,y,z) is made
// positive so bit-identical quaternions come out of equal rotations. Unit
// quaternions are left untouched apart from the sign flip; renormalizing an
// already-unit value would perturb its bits and break round trips.
Quat canonicalize(const Quat& q) {
  Quat u = q;
  if (std::abs(u.squaredNorm() - 1.0) > 1e-12) u.normalize();
  bool flip = false;
  if (u.w() < 0.0) {
    flip = true;
  } else if (u.w() == 0.0) {
    if (u.x() < 0.0) {
      flip = true;
    } else if (u.x() == 0.0) {
      if (u.y() < 0.0) {
        flip = true;
      } else if (u.y() == 0.0 && u.z() < 0.0) {
        flip = true;
      }
    }
  }
  if (flip) u.coeffs() = -u.coeffs();
  return u;
}

}  // namespace

Pose::Pose(const Vec3& p, const Quat& q) : position(p), orientation(canonicalize(q)) {}

Pose Pose::translation(double x, double y, double z) {
  return Pose{Vec3{x, y, z}, Quat::Identity()};
}

Pose Pose::rotation_z(double yaw_rad) {
  return Pose{Vec3::Zero(), Quat{Eigen::AngleAxisd(yaw_rad, Vec3::UnitZ())}};
}

Vec3 Pose::apply(const Vec3& point) const { return orientation * point + position; }

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = orientation.toRotationMatrix();
  m.topRightCorner<3, 1>() = position;
  return m;
}

bool Pose::operator==(const Pose& other) const {
  return position == other.position &&
         orientation.w() == other.orientation.w() &&
         orientation.x() == other.orientation.x() &&
         orientation.y() == other.orientation.y() &&
         orientation.z() == other.orientation.z();
}

std::array<double, 7> Pose::flat() const {
  return {position.x(),      position.y(),      position.z(),     orientation.w(),
          orientation.x(),   orientation.y(),   orientation.z()};
}

Pose Pose::from_flat(const std::array<double, 7>& v) {
  return Pose{Vec3{v[0], v[1], v[2]}, Quat{v[3], v[4], v[5], v[6]}};
}

Pose compose(const Pose& a, const Pose& b) {
  // Identity short-circuits keep adapted values bitwise equal to their
  // sources when a delta is exactly the identity.
  if (a == Pose{}) return b;
  if (b == Pose{}) return a;
  Pose out;
  out.position = a.orientation * b.position + a.position;
  out.orientation = canonicalize(a.orientation * b.orientation);
  return out;
}

Pose inverse(const Pose& a) {
  Pose out;
  out.orientation = canonicalize(a.orientation.conjugate());
  out.position = -(out.orientation * a.position);
  return out;
}

Pose delta_between(const Pose& source, const Pose& target) {
  if (source == target) return Pose{};
  return compose(target, inverse(source));
}

Pose interpolate(const Pose& a, const Pose& b, double t) {
  if (t <= 0.0) return a;
  if (t >= 1.0) return b;
  Pose out;
  out.position = (1.0 - t) * a.position + t * b.position;
  out.orientation = canonicalize(a.orientation.slerp(t, b.orientation));
  return out;
}

double angle_between(const Pose& a, const Pose& b) {
  double dot = std::abs(a.orientation.dot(b.orientation));
  if (dot > 1.0) dot = 1.0;
  return 2.0 * std::acos(dot);
}

double position_distance(const Pose& a, const Pose& b) {
  return (a.position - b.position).norm();
}

bool is_unit_quaternion(const Quat& q, double tol) {
  return std::abs(q.norm() - 1.0) <= tol;
}

ConfigDelta ConfigDelta::identity(int num_objects) {
  ConfigDelta d;
  d.deltas.assign(static_cast<size_t>(num_objects), Pose{});
  return d;
}

ConfigDelta ConfigDelta::between(const std::vector<Pose>& source,
                                 const std::vector<Pose>& target) {
  if (source.size() != target.size())
    throw ValidationError("config delta: source/target object counts differ");
  ConfigDelta d;
  d.deltas.reserve(source.size());
  for (size_t i = 0; i < source.size(); ++i)
    d.deltas.push_back(delta_between(source[i], target[i]));
  return d;
}

const Pose& ConfigDelta::of(int object_id) const {
  if (object_id < 0 || object_id >= size())
    throw MissingDeltaError("no delta for object id " + std::to_string(object_id));
  return deltas[static_cast<size_t>(object_id)];
}

}  // namespace demogen
