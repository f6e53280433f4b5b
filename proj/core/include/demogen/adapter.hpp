#pragma once

#include <vector>

#include "demogen/demo.hpp"
#include "demogen/planner.hpp"
#include "demogen/pose.hpp"

namespace demogen {

enum class FrameTag { Skill, Motion, Inserted };

/// Where an output frame came from: the segment kind, the object the segment
/// belongs to (-1 for inserted frames), and the source frame whose
/// observation best matches this output frame (by normalized arc-length
/// progress for re-timed motions, one-to-one for skills).
struct Provenance {
  FrameTag tag = FrameTag::Motion;
  int object_id = -1;
  int source_frame = 0;

  bool operator==(const Provenance&) const = default;
};

struct ArmPlan {
  std::vector<Pose> arm_actions;
  std::vector<std::vector<double>> hand_actions;
  std::vector<Provenance> provenance;

  int length() const { return static_cast<int>(arm_actions.size()); }
};

struct ActionPlan {
  std::vector<ArmPlan> arms;

  int length() const {
    int n = 0;
    for (const auto& a : arms) n = std::max(n, a.length());
    return n;
  }
};

/// Even-odd point-in-polygon in the x-y plane; points on an edge count as
/// inside so lattice targets at the workspace boundary stay usable.
bool point_in_polygon(const std::vector<Eigen::Vector2d>& polygon, double x, double y);

struct AdaptOptions {
  PlanRequest planner;  // template: step limits, obstacles, clearance, seed
  std::vector<Eigen::Vector2d> workspace;  // empty disables the reach check
};

/// Rigidly carries each action along with the object: the ee pose expressed
/// in the object frame is identical before and after.
std::vector<Pose> adapt_skill(const std::vector<Pose>& segment_actions,
                              const Pose& source_obj, const Pose& target_obj);

/// Hand actions are invariant to the spatial transform: a bitwise copy.
std::vector<std::vector<double>> adapt_hand(
    const std::vector<std::vector<double>>& hand_actions);

/// Full single-arm adaptation: skills via adapt_skill, motions replanned
/// between the adapted skill endpoints, hands held through motions.
ActionPlan adapt_trajectory(const Demonstration& demo, const SegmentIndex& seg,
                            const std::vector<Pose>& target,
                            const AdaptOptions& opts = {});

/// Per-arm independent adaptation; shorter arms are padded by holding their
/// final pose so both sequences share one clock.
ActionPlan adapt_bimanual(const Demonstration& demo, const SegmentIndex& seg,
                          const std::vector<Pose>& target, const AdaptOptions& opts = {});

}  // namespace demogen
