#pragma once

#include "demogen/demo.hpp"
#include "demogen/pose.hpp"

namespace demogen {

/// Arithmetic mean of the points labeled `object_id`. Throws NoSuchObject if
/// the cloud has no such points.
Vec3 object_center(const LabeledCloud& cloud, int object_id);

/// True iff the end effector sits within `threshold` of `center` (inclusive).
bool in_contact(const Pose& ee_pose, const Vec3& center, double threshold);

struct ParseOptions {
  double threshold = 0.10;  // meters
  int hysteresis = 3;       // frames a contact change must persist to count
  Vec3 tool_offset = Vec3::Zero();  // contact reference point in the ee frame
};

/// Splits the demo into alternating motion/skill segments per arm. Contact is
/// measured between the (tool-offset) end effector and each object's frame-0
/// center; after debouncing, the longest contact run per object (earliest on
/// ties) becomes that object's skill segment and the gaps become motions.
/// Objects must be contacted in the arm's task order and the demo must end in
/// its last skill.
SegmentIndex parse(const Demonstration& demo, const ParseOptions& opts = {});

}  // namespace demogen
