#include "demogen/adapter.hpp"

#include <cmath>

#include "demogen/errors.hpp"

namespace demogen {

bool point_in_polygon(const std::vector<Eigen::Vector2d>& polygon, double x, double y) {
  const size_t n = polygon.size();
  if (n < 3) return false;
  bool inside = false;
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = polygon[j];
    const auto& b = polygon[i];
    // on-edge counts as inside
    double cross = (b.x() - a.x()) * (y - a.y()) - (b.y() - a.y()) * (x - a.x());
    if (std::abs(cross) < 1e-12 && x >= std::min(a.x(), b.x()) - 1e-12 &&
        x <= std::max(a.x(), b.x()) + 1e-12 && y >= std::min(a.y(), b.y()) - 1e-12 &&
        y <= std::max(a.y(), b.y()) + 1e-12)
      return true;
    if ((b.y() > y) != (a.y() > y)) {
      double t = (y - b.y()) / (a.y() - b.y());
      if (x < b.x() + t * (a.x() - b.x())) inside = !inside;
    }
  }
  return inside;
}

std::vector<Pose> adapt_skill(const std::vector<Pose>& segment_actions,
                              const Pose& source_obj, const Pose& target_obj) {
  Pose d = delta_between(source_obj, target_obj);
  std::vector<Pose> out;
  out.reserve(segment_actions.size());
  for (const Pose& a : segment_actions) out.push_back(compose(d, a));
  return out;
}

std::vector<std::vector<double>> adapt_hand(
    const std::vector<std::vector<double>>& hand_actions) {
  return hand_actions;
}

namespace {

// Normalized arc-length progress of each vertex along a polyline.
std::vector<double> progress_of(const std::vector<Vec3>& pts) {
  std::vector<double> cum{0.0};
  for (size_t i = 1; i < pts.size(); ++i)
    cum.push_back(cum.back() + (pts[i] - pts[i - 1]).norm());
  double total = cum.back();
  if (total > 0.0)
    for (double& c : cum) c /= total;
  return cum;
}

ArmPlan adapt_arm(const Demonstration& demo, const std::vector<Segment>& segments, int arm,
                  const std::vector<Pose>& target, const AdaptOptions& opts) {
  const auto& frames = demo.frames;
  ArmPlan plan;

  std::vector<Pose> deltas;
  for (int k = 0; k < demo.num_objects(); ++k)
    deltas.push_back(delta_between(demo.init_config[k], target[k]));

  Pose prev_pose = frames[0].arm_state[arm];
  int prev_frame = -1;  // last frame of the previous skill; -1 at the demo start
  std::vector<double> prev_hand = frames[0].hand_action[arm];

  for (size_t si = 0; si < segments.size(); ++si) {
    const Segment& seg = segments[si];
    if (seg.kind == SegmentKind::Skill) {
      const Pose& d = deltas[seg.object_id];
      for (int t = seg.t_start; t <= seg.t_end; ++t) {
        plan.arm_actions.push_back(compose(d, frames[t].arm_action[arm]));
        plan.hand_actions.push_back(frames[t].hand_action[arm]);
        plan.provenance.push_back({FrameTag::Skill, seg.object_id, t});
      }
      prev_pose = plan.arm_actions.back();
      prev_frame = seg.t_end;
      prev_hand = plan.hand_actions.back();
      continue;
    }

    // Motion: find the next skill; without one (an arm that owns no objects)
    // the source actions pass through unchanged.
    const Segment* next = nullptr;
    if (si + 1 < segments.size() && segments[si + 1].kind == SegmentKind::Skill)
      next = &segments[si + 1];
    if (!next) {
      for (int t = seg.t_start; t <= seg.t_end; ++t) {
        plan.arm_actions.push_back(frames[t].arm_action[arm]);
        plan.hand_actions.push_back(frames[t].hand_action[arm]);
        plan.provenance.push_back({FrameTag::Motion, seg.object_id, t});
      }
      if (!seg.empty()) {
        prev_pose = plan.arm_actions.back();
        prev_frame = seg.t_end;
        prev_hand = plan.hand_actions.back();
      }
      continue;
    }

    PlanRequest req = opts.planner;
    req.start = prev_pose;
    req.goal = compose(deltas[next->object_id], frames[next->t_start].arm_action[arm]);
    auto path = rrt_plan(req);

    // Interior poses only: the goal is emitted by the skill itself.
    if (path.size() > 2) {
      // Match each interior pose to the source motion frame of equal
      // normalized progress along [anchor, motion actions..., skill start].
      Vec3 anchor = prev_frame < 0 ? frames[0].arm_state[arm].position
                                   : frames[prev_frame].arm_action[arm].position;
      std::vector<Vec3> src_pts{anchor};
      std::vector<int> src_frames;
      for (int t = seg.t_start; t <= seg.t_end; ++t) {
        src_pts.push_back(frames[t].arm_action[arm].position);
        src_frames.push_back(t);
      }
      src_pts.push_back(frames[next->t_start].arm_action[arm].position);
      auto src_prog = progress_of(src_pts);

      std::vector<Vec3> plan_pts;
      for (const Pose& p : path) plan_pts.push_back(p.position);
      auto plan_prog = progress_of(plan_pts);

      for (size_t j = 1; j + 1 < path.size(); ++j) {
        int matched = seg.empty() ? std::max(prev_frame, 0) : seg.t_start;
        if (!seg.empty()) {
          double best = std::numeric_limits<double>::infinity();
          for (size_t s = 0; s < src_frames.size(); ++s) {
            double diff = std::abs(src_prog[s + 1] - plan_prog[j]);
            if (diff < best) {
              best = diff;
              matched = src_frames[s];
            }
          }
        }
        plan.arm_actions.push_back(path[j]);
        plan.hand_actions.push_back(prev_hand);
        plan.provenance.push_back({FrameTag::Motion, seg.object_id, matched});
      }
    }
  }
  return plan;
}

void check_reachable(const Demonstration& demo, const std::vector<Pose>& target,
                     const AdaptOptions& opts) {
  if (static_cast<int>(target.size()) != demo.num_objects())
    throw ValidationError("adapt: " + std::to_string(target.size()) +
                          " target poses for " + std::to_string(demo.num_objects()) +
                          " objects");
  if (opts.workspace.empty()) return;
  for (int k = 0; k < demo.num_objects(); ++k)
    if (!point_in_polygon(opts.workspace, target[k].position.x(), target[k].position.y()))
      throw UnreachableTargetError("object " + std::to_string(k) + " target (" +
                                   std::to_string(target[k].position.x()) + ", " +
                                   std::to_string(target[k].position.y()) +
                                   ") lies outside the reachable workspace");
}

void check_parsed(const Demonstration& demo, const SegmentIndex& seg) {
  if (static_cast<int>(seg.per_arm.size()) != demo.arm_count())
    throw ValidationError("adapt: segment index does not match the demo's arm count");
  Demonstration probe = demo;
  probe.segment_index = seg;
  auto report = validate(probe);
  if (!report.empty()) throw ValidationError("adapt: " + report[0]);
}

}  // namespace

ActionPlan adapt_trajectory(const Demonstration& demo, const SegmentIndex& seg,
                            const std::vector<Pose>& target, const AdaptOptions& opts) {
  if (demo.arm_count() != 1)
    throw ValidationError("adapt_trajectory handles single-arm demos; use adapt_bimanual");
  check_parsed(demo, seg);
  check_reachable(demo, target, opts);
  ActionPlan plan;
  plan.arms.push_back(adapt_arm(demo, seg.per_arm[0], 0, target, opts));
  return plan;
}

ActionPlan adapt_bimanual(const Demonstration& demo, const SegmentIndex& seg,
                          const std::vector<Pose>& target, const AdaptOptions& opts) {
  check_parsed(demo, seg);
  check_reachable(demo, target, opts);
  ActionPlan plan;
  for (int a = 0; a < demo.arm_count(); ++a)
    plan.arms.push_back(adapt_arm(demo, seg.per_arm[a], a, target, opts));
  int L = plan.length();
  for (auto& arm : plan.arms)
    while (arm.length() < L) {  // hold the final pose on the shorter arm
      arm.arm_actions.push_back(arm.arm_actions.back());
      arm.hand_actions.push_back(arm.hand_actions.back());
      arm.provenance.push_back({FrameTag::Inserted, -1, demo.length() - 1});
    }
  return plan;
}

}  // namespace demogen
