#include "demogen/synthesis.hpp"

#include <limits>

#include "demogen/errors.hpp"

namespace demogen {

namespace {

// float rigid map; cheap enough to apply to every point of every frame
struct Map3f {
  Eigen::Matrix3f R;
  Eigen::Vector3f t;
  bool identity = true;

  static Map3f of(const Pose& p) {
    Map3f m;
    if (p == Pose{}) return m;
    m.identity = false;
    m.R = p.orientation.toRotationMatrix().cast<float>();
    m.t = p.position.cast<float>();
    return m;
  }

  Eigen::Vector3f apply(const Eigen::Vector3f& v) const {
    return identity ? v : Eigen::Vector3f(R * v + t);
  }
};

int nearest_arm(const Frame& frame, const Eigen::Vector3f& p) {
  int best = 0;
  float best_d = std::numeric_limits<float>::max();
  for (size_t a = 0; a < frame.arm_state.size(); ++a) {
    float d = (frame.arm_state[a].position.cast<float>() - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(a);
    }
  }
  return best;
}

}  // namespace

Stage StageMap::of(int object_id, int t) const {
  if (object_id < 0 || object_id >= static_cast<int>(skill_of.size())) return Stage::ToDo;
  const Segment& s = skill_of[object_id];
  if (s.empty() || t < s.t_start) return Stage::ToDo;
  return t <= s.t_end ? Stage::Doing : Stage::Done;
}

StageMap make_stage_map(const SegmentIndex& seg, int num_objects) {
  StageMap map;
  map.skill_of.assign(num_objects, Segment{SegmentKind::Skill, -1, 0, -1});
  for (const auto& arm : seg.per_arm)
    for (const Segment& s : arm)
      if (s.kind == SegmentKind::Skill && s.object_id >= 0 && s.object_id < num_objects)
        map.skill_of[s.object_id] = s;
  return map;
}

Stage stage_of(const SegmentIndex& seg, int object_id, int t) {
  int n = object_id + 1;
  for (const auto& arm : seg.per_arm)
    for (const Segment& s : arm) n = std::max(n, s.object_id + 1);
  return make_stage_map(seg, n).of(object_id, t);
}

Pose adapt_proprio(const Pose& o_arm, const Pose& source_action, const Pose& adapted_action) {
  if (source_action == adapted_action) return o_arm;
  return compose(delta_between(source_action, adapted_action), o_arm);
}

std::pair<LabeledCloud, LabeledCloud> split_doing_frame(const LabeledCloud& scene,
                                                        const LabeledCloud& todo_snapshot,
                                                        const LabeledCloud& done_snapshot,
                                                        double radius) {
  scene.check();
  std::vector<Eigen::Vector3f> snap;
  snap.reserve(todo_snapshot.size() + done_snapshot.size());
  for (const auto& p : todo_snapshot.points) snap.push_back(p);
  for (const auto& p : done_snapshot.points) snap.push_back(p);

  LabeledCloud mover, objects;
  const float r2 = static_cast<float>(radius * radius);
  for (int i = 0; i < scene.size(); ++i) {
    bool matched = false;
    for (const auto& s : snap)
      if ((scene.points[i] - s).squaredNorm() <= r2) {
        matched = true;
        break;
      }
    (matched ? objects : mover).push(scene.points[i], scene.labels[i]);
  }
  if (!snap.empty() && objects.size() < 10)
    throw DegenerateSplitError("split_doing_frame: only " + std::to_string(objects.size()) +
                               " points matched the object snapshots");
  return {mover, objects};
}

SynthesisContext::SynthesisContext(const Demonstration& source, const SegmentIndex& seg,
                                   double radius)
    : source_(&source), seg_(seg), radius_(radius) {
  if (source.length() == 0) throw ValidationError("synthesis: empty source demo");
  const LabeledCloud& first = source.frames[0].cloud;
  for (int i = 0; i < first.size(); ++i) {
    int32_t l = first.labels[i];
    if (l == kLabelEE) continue;  // the mover is never a static claimant
    static_points_.push_back(first.points[i]);
    static_owner_.push_back(l >= 0 ? l : kLabelBackground);
  }
  cache_.resize(source.length());
  built_.assign(source.length(), 0);
}

const std::vector<int32_t>& SynthesisContext::owners(int t) {
  if (t < 0 || t >= source_->length())
    throw ValidationError("synthesis: source frame out of range");
  if (built_[t]) return cache_[t];

  const Frame& frame = source_->frames[t];
  const LabeledCloud& cloud = frame.cloud;
  std::vector<int32_t> owner(cloud.size());
  const float r2 = static_cast<float>(radius_ * radius_);

  for (int i = 0; i < cloud.size(); ++i) {
    if (t == 0) {
      int32_t l = cloud.labels[i];
      owner[i] = l == kLabelEE ? kArmOwnerBase - nearest_arm(frame, cloud.points[i])
                               : (l >= 0 ? l : kLabelBackground);
      continue;
    }
    float best = r2;
    int32_t who = kArmOwnerBase;  // sentinel: unclaimed
    for (size_t s = 0; s < static_points_.size(); ++s) {
      float d = (cloud.points[i] - static_points_[s]).squaredNorm();
      if (d <= best) {
        best = d;
        who = static_owner_[s];
      }
    }
    owner[i] = who != kArmOwnerBase ? who
                                    : kArmOwnerBase - nearest_arm(frame, cloud.points[i]);
  }
  cache_[t] = std::move(owner);
  built_[t] = 1;
  return cache_[t];
}

namespace {

Frame make_edit(SynthesisContext& ctx, int s_static, const std::vector<int>& s_arm,
                const ConfigDelta& deltas, const std::vector<Pose>& adapted_actions,
                const std::vector<std::vector<double>>& adapted_hands) {
  const Demonstration& src = ctx.source();
  const int arms = src.arm_count();
  const Frame& base = src.frames[s_static];

  std::vector<Map3f> object_map;
  for (int k = 0; k < deltas.size(); ++k) object_map.push_back(Map3f::of(deltas.of(k)));

  std::vector<Map3f> arm_map(arms);
  std::vector<bool> arm_identity(arms);
  for (int a = 0; a < arms; ++a) {
    const Pose& src_action = src.frames[s_arm[a]].arm_action[a];
    arm_identity[a] = src_action == adapted_actions[a];
    if (!arm_identity[a])
      arm_map[a] = Map3f::of(compose(adapted_actions[a], inverse(src_action)));
  }

  Frame out;
  const auto& owner = ctx.owners(s_static);
  out.cloud.points.resize(base.cloud.size());
  out.cloud.labels = base.cloud.labels;
  for (int i = 0; i < base.cloud.size(); ++i) {
    int32_t o = owner[i];
    if (o >= 0) {
      out.cloud.points[i] = object_map[o].apply(base.cloud.points[i]);
    } else if (o == kLabelBackground) {
      out.cloud.points[i] = base.cloud.points[i];
    } else {
      int a = SynthesisContext::kArmOwnerBase - o;
      // the mover's position comes from that arm's own matched frame
      const Eigen::Vector3f& p = src.frames[s_arm[a]].cloud.points[i];
      out.cloud.points[i] = arm_identity[a] ? p : arm_map[a].apply(p);
    }
  }

  for (int a = 0; a < arms; ++a) {
    const Frame& fa = src.frames[s_arm[a]];
    out.arm_state.push_back(adapt_proprio(fa.arm_state[a], fa.arm_action[a], adapted_actions[a]));
    out.hand_state.push_back(fa.hand_state[a]);
    out.arm_action.push_back(adapted_actions[a]);
    out.hand_action.push_back(adapted_hands[a]);
  }
  return out;
}

// Rebuilds a segment index in the plan's timeline from provenance runs,
// mirroring the parser's shape: (possibly empty) Motion before every Skill,
// inserted padding extends the last segment.
std::vector<Segment> segments_from(const ArmPlan& arm) {
  std::vector<Segment> segs;
  int t = 0;
  const int n = arm.length();
  while (t < n) {
    const Provenance& pv = arm.provenance[t];
    int end = t;
    while (end + 1 < n && arm.provenance[end + 1].tag == pv.tag &&
           arm.provenance[end + 1].object_id == pv.object_id)
      ++end;
    if (pv.tag == FrameTag::Inserted && !segs.empty()) {
      segs.back().t_end = end;
    } else if (pv.tag == FrameTag::Skill) {
      if (segs.empty() || segs.back().kind != SegmentKind::Motion ||
          segs.back().object_id != pv.object_id)
        segs.push_back({SegmentKind::Motion, pv.object_id, t, t - 1});
      segs.push_back({SegmentKind::Skill, pv.object_id, t, end});
    } else {
      segs.push_back({SegmentKind::Motion, pv.object_id, t, end});
    }
    t = end + 1;
  }
  return segs;
}

}  // namespace

Frame synthesize_frame(SynthesisContext& ctx, int source_t, const ConfigDelta& deltas,
                       const std::vector<Pose>& adapted_actions,
                       const std::vector<std::vector<double>>& adapted_hands) {
  const Demonstration& src = ctx.source();
  if (source_t < 0 || source_t >= src.length())
    throw ValidationError("synthesize_frame: source frame out of range");
  if (deltas.size() < src.num_objects())
    throw MissingDeltaError("synthesize_frame: " + std::to_string(deltas.size()) +
                            " deltas for " + std::to_string(src.num_objects()) + " objects");
  if (static_cast<int>(adapted_actions.size()) != src.arm_count() ||
      static_cast<int>(adapted_hands.size()) != src.arm_count())
    throw ValidationError("synthesize_frame: adapted actions do not match the arm count");
  std::vector<int> s_arm(src.arm_count(), source_t);
  return make_edit(ctx, source_t, s_arm, deltas, adapted_actions, adapted_hands);
}

Demonstration synthesize_demo(SynthesisContext& ctx, const std::vector<Pose>& target_config,
                              const ActionPlan& plan) {
  const Demonstration& src = ctx.source();
  const int arms = src.arm_count();
  if (static_cast<int>(plan.arms.size()) != arms)
    throw ValidationError("synthesize_demo: plan arm count does not match the source");
  const int length = plan.length();
  if (length == 0) throw ValidationError("synthesize_demo: empty plan");
  for (const auto& arm : plan.arms)
    if (arm.length() != length ||
        static_cast<int>(arm.provenance.size()) != length)
      throw ValidationError("synthesize_demo: plan arms must be provenance-aligned");

  ConfigDelta deltas = ConfigDelta::between(src.init_config, target_config);

  Demonstration out;
  out.task = src.task;
  out.init_config = target_config;
  out.object_names = src.object_names;
  out.camera_pose = src.camera_pose;
  out.arm_object_map = src.arm_object_map;

  std::vector<Pose> actions(arms);
  std::vector<std::vector<double>> hands(arms);
  std::vector<int> s_arm(arms);
  for (int t = 0; t < length; ++t) {
    int s_static = -1;
    for (int a = 0; a < arms; ++a) {
      const Provenance& pv = plan.arms[a].provenance[t];
      s_arm[a] = pv.source_frame;
      if (s_static < 0 && pv.tag != FrameTag::Inserted) s_static = pv.source_frame;
      actions[a] = plan.arms[a].arm_actions[t];
      hands[a] = plan.arms[a].hand_actions[t];
    }
    if (s_static < 0) s_static = src.length() - 1;
    // the output's first frame must carry ground-truth labels even when a
    // re-timed motion matches a later source frame
    if (t == 0) s_static = 0;
    out.frames.push_back(make_edit(ctx, s_static, s_arm, deltas, actions, hands));
  }

  SegmentIndex seg;
  for (const auto& arm : plan.arms) seg.per_arm.push_back(segments_from(arm));
  out.segment_index = seg;

  auto report = validate(out);
  if (!report.empty()) throw ValidationError("synthesize_demo: " + report[0]);
  return out;
}

Demonstration synthesize_demo(const Demonstration& source, const SegmentIndex& seg,
                              const std::vector<Pose>& target_config, const ActionPlan& plan) {
  SynthesisContext ctx(source, seg);
  return synthesize_demo(ctx, target_config, plan);
}

}  // namespace demogen
