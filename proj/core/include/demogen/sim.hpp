#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "demogen/adapter.hpp"
#include "demogen/demo.hpp"
#include "demogen/primitives.hpp"

namespace demogen {

struct ObjectSpec {
  std::string name;
  Primitive prim;  // pose is the task-default placement
  bool graspable = true;
};

/// Success predicate over an execution.
///   lifted        final object z >= value
///   pressed       some frame has the ee within `value` of the object in x-y
///                 and at or below z_max
///   planar_offset final |object - reference| in x-y <= value
///   all_lifted    every object in the task >= value
struct SuccessSpec {
  std::string kind = "lifted";
  int object = 0;
  int reference = -1;
  double value = 0.0;
  double z_max = 0.0;
};

struct RangeRect {
  double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;

  bool contains(double x, double y) const {
    return x >= x_lo && x <= x_hi && y >= y_lo && y <= y_hi;
  }
};

/// Static description of a desk-scale task. The demo range (where source
/// captures may place varied objects) always contains the eval range.
struct TaskSpec {
  std::string name;
  std::vector<ObjectSpec> objects;
  SuccessSpec success;
  std::vector<Eigen::Vector2d> workspace;  // x-y polygon
  RangeRect demo_range;
  RangeRect eval_range;
  std::vector<int> varied;  // objects whose x-y placement is randomized
  std::vector<std::vector<int>> arm_object_map;
  std::vector<Pose> home;  // per arm
  Pose camera;
  std::string script = "pick";  // pick | press | insert | bimanual_pick
  int n_points = 1024;
  double noise_sigma = 0.0015;
  double contact_threshold = 0.10;
  double grasp_tolerance = 0.02;
};

std::vector<std::string> builtin_task_names();
TaskSpec builtin_task(const std::string& name);

void write_task(const TaskSpec& task, const std::filesystem::path& path);
TaskSpec read_task(const std::filesystem::path& path);

/// Near-vertical viewpoint above the workspace center.
Pose birdseye_camera();

/// Kinematic snapshot. Gripper values are normalized aperture: 1 open,
/// 0 closed; an object attaches to an arm when the aperture crosses below
/// 0.5 with the ee within grasp_tolerance, and detaches when it crosses
/// back. While held, object pose == ee pose ∘ grasp_offset exactly.
struct WorldState {
  std::vector<Pose> objects;
  std::vector<Pose> ee;
  std::vector<std::vector<double>> hand;
  std::vector<int> holder;       // per object: arm index or -1
  std::vector<Pose> grasp_offset;
};

WorldState initial_state(const TaskSpec& task, const std::vector<Pose>& config);

/// Surface-samples table, objects and grippers with area-proportional
/// budgets summing to n_points. visibility=true drops points whose segment
/// to the camera position is blocked by any solid, then farthest-point
/// resamples back to n_points. noise_seed != 0 adds per-point Gaussian
/// jitter truncated at 3 sigma (task.noise_sigma); 0 renders noise-free.
LabeledCloud render_cloud(const TaskSpec& task, const WorldState& state, const Pose& camera,
                          int n_points, bool visibility, uint64_t noise_seed);

/// Scripted capture at the given object configuration: builds the action
/// script for the task, steps the world through it, renders every frame
/// (full-surround, ground-truth labels in memory) and returns a valid,
/// parseable demonstration. Same (task, config, noise_seed) is bitwise
/// reproducible.
Demonstration scripted_demo(const TaskSpec& task, const std::vector<Pose>& config,
                            uint64_t noise_seed = 0);

struct TraceRow {
  int frame = 0;
  std::vector<Pose> ee;
  std::vector<Pose> objects;
  std::vector<uint8_t> attached;
};

struct Outcome {
  bool success = false;
  WorldState final_state;
  std::vector<TraceRow> trace;
};

/// Teleports the ee through the plan's absolute poses frame by frame and
/// evaluates the task's success predicate. Failures are outcomes, not errors.
Outcome execute_plan(const TaskSpec& task, const std::vector<Pose>& config,
                     const ActionPlan& plan);

void write_trace_csv(const Outcome& outcome, const std::filesystem::path& path);

}  // namespace demogen
