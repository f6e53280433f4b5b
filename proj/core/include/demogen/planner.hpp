#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "demogen/cloud.hpp"
#include "demogen/pose.hpp"

namespace demogen {

struct PlanRequest {
  Pose start;
  Pose goal;
  double max_step = 0.01;                       // meters per frame
  double max_angle_step = 5.0 * 3.14159265358979323846 / 180.0;  // radians per frame
  std::optional<LabeledCloud> obstacles;
  double clearance = 0.06;  // end effector modeled as a sphere of this radius
  uint64_t rng_seed = 0;
  int max_iterations = 50000;
};

struct PlanStats {
  double raw_length = 0.0;       // waypoint path before smoothing
  double smoothed_length = 0.0;  // after shortcut attempts
  int iterations = 0;
};

/// Straight-line interpolation from start to goal obeying both step limits.
/// start == goal collapses to a single pose.
std::vector<Pose> linear_plan(const PlanRequest& req);

/// RRT-Connect in position space with orientation slerped along arc length.
/// Without obstacle points this is exactly linear_plan. Every returned pose
/// keeps at least `clearance` to the obstacle points, endpoints are bitwise
/// the request's start and goal.
std::vector<Pose> rrt_plan(const PlanRequest& req, PlanStats* stats = nullptr);

/// True iff the position keeps at least `clearance` distance to every
/// obstacle point (empty obstacles are always free).
bool collision_free(const Vec3& position, const LabeledCloud& obstacles, double clearance);

double path_length(const std::vector<Pose>& path);

}  // namespace demogen
