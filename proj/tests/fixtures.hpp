#pragma once

// Hand-rolled demo builders for tests that need a valid container without
// running the simulator.

#include <random>
#include <stdexcept>
#include <vector>

#include "demogen/demo.hpp"
#include "demogen/planner.hpp"
#include "oracles.hpp"

namespace fixtures {

inline demogen::Demonstration make_demo(int L = 6, int N = 32, int K = 2, int A = 1,
                                        int H = 1, uint64_t seed = 1234) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> uf(-0.5f, 0.5f);
  std::uniform_real_distribution<double> ud(0.0, 1.0);

  demogen::Demonstration demo;
  demo.task = "fixture";
  for (int k = 0; k < K; ++k) {
    demo.init_config.push_back(oracles::random_pose(rng, 0.4));
    demo.object_names.push_back("object_" + std::to_string(k));
  }
  demo.camera_pose = oracles::random_pose(rng, 1.0);
  demo.arm_object_map.resize(A);
  for (int k = 0; k < K; ++k) demo.arm_object_map[k % A].push_back(k);

  for (int t = 0; t < L; ++t) {
    demogen::Frame fr;
    for (int i = 0; i < N; ++i) {
      int32_t label = (i % (K + 2)) - 2;  // mix of background, ee, objects
      fr.cloud.push({uf(rng), uf(rng), uf(rng)}, label);
    }
    for (int a = 0; a < A; ++a) {
      fr.arm_state.push_back(oracles::random_pose(rng, 0.4));
      fr.arm_action.push_back(oracles::random_pose(rng, 0.4));
      fr.hand_state.push_back(std::vector<double>(H, ud(rng)));
      fr.hand_action.push_back(std::vector<double>(H, ud(rng)));
    }
    demo.frames.push_back(std::move(fr));
  }
  return demo;
}

// Demo with fully controlled end-effector path and exact object centers:
// each object is a 6-point cross around its center with offsets that cancel
// exactly in float arithmetic.
inline demogen::Demonstration make_path_demo(
    const std::vector<std::vector<demogen::Vec3>>& ee_per_arm,
    const std::vector<demogen::Vec3>& centers,
    std::vector<std::vector<int>> arm_object_map = {}) {
  using namespace demogen;
  const int L = static_cast<int>(ee_per_arm[0].size());
  const int A = static_cast<int>(ee_per_arm.size());
  const int K = static_cast<int>(centers.size());

  Demonstration demo;
  demo.task = "fixture_path";
  LabeledCloud cloud;
  const float d = 0.0078125f;  // 2^-7, exactly representable
  for (int k = 0; k < K; ++k) {
    Eigen::Vector3f c = centers[k].cast<float>();
    for (int axis = 0; axis < 3; ++axis)
      for (float sign : {-1.0f, 1.0f}) {
        Eigen::Vector3f p = c;
        p[axis] += sign * d;
        cloud.push(p, k);
      }
    demo.init_config.push_back(Pose{centers[k], Quat::Identity()});
    demo.object_names.push_back("object_" + std::to_string(k));
  }
  cloud.push({0.0f, 0.0f, 1.0f}, kLabelEE);
  cloud.push({0.0f, 0.0f, 1.1f}, kLabelEE);
  demo.camera_pose = Pose::translation(1.0, 0.0, 1.0);
  if (arm_object_map.empty() && A == 1) {
    arm_object_map.resize(1);
    for (int k = 0; k < K; ++k) arm_object_map[0].push_back(k);
  }
  demo.arm_object_map = arm_object_map;

  for (int t = 0; t < L; ++t) {
    Frame fr;
    fr.cloud = cloud;
    for (int a = 0; a < A; ++a) {
      fr.arm_state.push_back(Pose{ee_per_arm[a][t], Quat::Identity()});
      int next = std::min(t + 1, L - 1);
      fr.arm_action.push_back(Pose{ee_per_arm[a][next], Quat::Identity()});
      fr.hand_state.push_back({0.0});
      fr.hand_action.push_back({0.0});
    }
    demo.frames.push_back(std::move(fr));
  }
  return demo;
}

// A scripted skill phase: explicit in-contact poses (first = entry pose that
// the approach leg aims at) plus matching hand vectors, and an exit pose just
// outside the contact threshold for every phase except the last. For chained
// phases the exit must sit directly above the NEXT phase's object so the
// following approach leg descends radially into its contact sphere.
struct ScriptPhase {
  std::vector<demogen::Pose> poses;
  std::vector<std::vector<double>> hands;
  demogen::Pose exit;
  demogen::Vec3 center{0.0, 0.0, 0.0};  // object the phase works on
};

// Builds a demo the way the simulator scripts one: legs between phases are
// single linear_plan discretizations, frame t carries state q_t / action
// q_{t+1} (the final action holds). With the phase geometry placed so contact
// flips one step inside each leg end, parsing + identity adaptation
// reproduces the action stream frame for frame.
inline demogen::Demonstration make_scripted_demo(const demogen::Pose& home,
                                                 const std::vector<demogen::Vec3>& centers,
                                                 const std::vector<ScriptPhase>& phases,
                                                 double max_step = 0.01,
                                                 double threshold = 0.10) {
  using namespace demogen;
  auto clear_of_all = [&](const Vec3& p) {
    for (const auto& c : centers)
      if ((p - c).norm() <= threshold) return false;
    return true;
  };
  std::vector<Pose> q{home};
  std::vector<std::vector<double>> h{phases.empty() ? std::vector<double>{0.0}
                                                    : phases[0].hands[0]};
  std::vector<double> hand0 = h[0];
  auto cur_hand = hand0;
  for (size_t k = 0; k < phases.size(); ++k) {
    PlanRequest leg;
    leg.start = q.back();
    leg.goal = phases[k].poses[0];
    leg.max_step = max_step;
    auto path = linear_plan(leg);
    // The identity round trip needs contact to flip exactly at the leg's
    // second-to-last pose; verify the geometry instead of trusting callers.
    if (path.size() < 3) throw std::logic_error("scripted leg too short");
    const Vec3& c = phases[k].center;
    if ((path[path.size() - 2].position - c).norm() > threshold)
      throw std::logic_error("scripted leg: penultimate pose not in contact");
    for (size_t i = 0; i + 2 < path.size(); ++i)
      if (!clear_of_all(path[i].position))
        throw std::logic_error("scripted leg grazes a contact sphere early");
    for (size_t i = 1; i < path.size(); ++i) {
      q.push_back(path[i]);
      h.push_back(cur_hand);
    }
    for (size_t i = 1; i < phases[k].poses.size(); ++i) {
      const Vec3& p = phases[k].poses[i].position;
      if ((p - c).norm() > threshold)
        throw std::logic_error("scripted phase pose left its contact sphere");
      for (const auto& other : centers)
        if (other != c && (p - other).norm() <= threshold)
          throw std::logic_error("scripted phase pose inside another sphere");
      q.push_back(phases[k].poses[i]);
      cur_hand = phases[k].hands[i];
      h.push_back(cur_hand);
    }
    if (k + 1 < phases.size()) {
      if (!clear_of_all(phases[k].exit.position))
        throw std::logic_error("scripted exit pose still in contact");
      q.push_back(phases[k].exit);
      h.push_back(cur_hand);
    }
  }

  const int L = static_cast<int>(q.size());
  Demonstration demo;
  demo.task = "fixture_scripted";
  LabeledCloud cloud;
  const float d = 0.0078125f;
  for (size_t k = 0; k < centers.size(); ++k) {
    Eigen::Vector3f c = centers[k].cast<float>();
    for (int axis = 0; axis < 3; ++axis)
      for (float sign : {-1.0f, 1.0f}) {
        Eigen::Vector3f p = c;
        p[axis] += sign * d;
        cloud.push(p, static_cast<int32_t>(k));
      }
    demo.init_config.push_back(Pose{centers[k], Quat::Identity()});
    demo.object_names.push_back("object_" + std::to_string(k));
  }
  cloud.push({0.3f, 0.0f, 0.4f}, kLabelEE);
  cloud.push({0.3f, 0.0f, 0.5f}, kLabelEE);
  demo.camera_pose = Pose::translation(1.1, 0.0, 0.75);
  demo.arm_object_map.resize(1);
  for (size_t k = 0; k < centers.size(); ++k) demo.arm_object_map[0].push_back(k);

  for (int t = 0; t < L; ++t) {
    Frame fr;
    fr.cloud = cloud;
    int next = std::min(t + 1, L - 1);
    fr.arm_state.push_back(q[t]);
    fr.arm_action.push_back(q[next]);
    fr.hand_state.push_back(h[t]);
    fr.hand_action.push_back(h[next]);
    demo.frames.push_back(std::move(fr));
  }
  return demo;
}

// Grasp-and-lift phase over `c`: enter at +8.5 cm, descend, close, lift.
inline ScriptPhase pick_phase(const demogen::Vec3& c, double max_step = 0.01) {
  using namespace demogen;
  ScriptPhase ph;
  auto add_leg = [&](const Pose& goal) {
    PlanRequest req;
    req.start = ph.poses.back();
    req.goal = goal;
    req.max_step = max_step;
    auto path = linear_plan(req);
    for (size_t i = 1; i < path.size(); ++i) {
      ph.poses.push_back(path[i]);
      ph.hands.push_back(ph.hands.back());
    }
  };
  ph.center = c;
  ph.poses.push_back(Pose{c + Vec3{0.0, 0.0, 0.085}, Quat::Identity()});
  ph.hands.push_back({0.0});
  add_leg(Pose{c + Vec3{0.0, 0.0, 0.03}, Quat::Identity()});
  // close the hand over two held frames
  ph.poses.push_back(ph.poses.back());
  ph.hands.push_back({1.0});
  ph.poses.push_back(ph.poses.back());
  ph.hands.push_back({1.0});
  add_leg(Pose{c + Vec3{0.0, 0.0, 0.095}, Quat::Identity()});
  ph.exit = Pose{c + Vec3{0.0, 0.0, 0.1045}, Quat::Identity()};
  return ph;
}

}  // namespace fixtures
