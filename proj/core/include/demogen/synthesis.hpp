#pragma once

#include <utility>

#include "demogen/adapter.hpp"
#include "demogen/demo.hpp"

namespace demogen {

enum class Stage { ToDo, Doing, Done };

/// Skill span per object, derived from a segment index. Objects that never
/// get a skill stay to-do forever.
struct StageMap {
  std::vector<Segment> skill_of;  // indexed by object id; empty = no skill

  Stage of(int object_id, int t) const;
};

StageMap make_stage_map(const SegmentIndex& seg, int num_objects);
Stage stage_of(const SegmentIndex& seg, int object_id, int t);

/// Moves an observed arm state by the same frame change as its action:
/// state ∘ action⁻¹ ∘ adapted. The state is never replaced by the action.
/// Bitwise-identical actions return the state untouched.
Pose adapt_proprio(const Pose& o_arm, const Pose& source_action, const Pose& adapted_action);

/// Splits a skill-stage scene into (mover, static): points within `radius`
/// of any snapshot point belong to the static objects, the remainder is the
/// merged end-effector + carried-object cluster. Empty snapshots attribute
/// the whole scene to the mover. Throws DegenerateSplit when non-empty
/// snapshots claim fewer than 10 points.
std::pair<LabeledCloud, LabeledCloud> split_doing_frame(const LabeledCloud& scene,
                                                        const LabeledCloud& todo_snapshot,
                                                        const LabeledCloud& done_snapshot,
                                                        double radius = 0.005);

/// Per-source-frame point attribution (which static entity, or which arm's
/// mover cluster, owns each point), cached so one parsed source can stamp
/// out many targets. Frame 0 uses its ground-truth labels; later frames are
/// matched geometrically against the frame-0 static snapshot.
class SynthesisContext {
 public:
  static constexpr int32_t kArmOwnerBase = -10;  // arm a owns code -(10 + a)

  SynthesisContext(const Demonstration& source, const SegmentIndex& seg,
                   double radius = 0.005);

  const Demonstration& source() const { return *source_; }
  const SegmentIndex& segments() const { return seg_; }

  /// Owner code per point of source frame t: object id >= 0,
  /// kLabelBackground for static scenery, or kArmOwnerBase - arm.
  const std::vector<int32_t>& owners(int t);

 private:
  const Demonstration* source_;
  SegmentIndex seg_;
  double radius_;
  std::vector<Eigen::Vector3f> static_points_;  // frame-0 snapshot
  std::vector<int32_t> static_owner_;
  std::vector<std::vector<int32_t>> cache_;
  std::vector<char> built_;
};

/// Edits one source frame: static objects move by their config delta, each
/// arm's merged mover cluster (end effector + whatever it carries) by the
/// frame change between that frame's source action and the adapted action.
/// Proprio follows adapt_proprio; identity edits reproduce the frame bitwise.
Frame synthesize_frame(SynthesisContext& ctx, int source_t, const ConfigDelta& deltas,
                       const std::vector<Pose>& adapted_actions,
                       const std::vector<std::vector<double>>& adapted_hands);

/// Full observation synthesis for an adapted plan: one output frame per plan
/// step, source frames chosen by the plan's provenance (skills map 1:1,
/// re-timed motions by matched progress, inserted padding holds the source
/// tail), init_config = target. The result passes validate; identity targets
/// reproduce the source bitwise.
Demonstration synthesize_demo(SynthesisContext& ctx, const std::vector<Pose>& target_config,
                              const ActionPlan& plan);
Demonstration synthesize_demo(const Demonstration& source, const SegmentIndex& seg,
                              const std::vector<Pose>& target_config, const ActionPlan& plan);

}  // namespace demogen
