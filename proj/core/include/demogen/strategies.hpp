#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "demogen/demo.hpp"
#include "demogen/pose.hpp"
#include "demogen/primitives.hpp"

namespace demogen {

struct AdrSpec {
  std::vector<int> disturb_times;
  std::vector<Pose> displacements;  // one per disturbance, applied in order
  int pause = 5;                    // frames the arm freezes before re-approaching
};

struct ObstacleSpec {
  std::vector<Primitive> primitives;
  double clearance = 0.06;  // min distance of the ee path to obstacle points
  int points_per_primitive = 256;
  uint64_t cloud_seed = 0;
  uint64_t plan_seed = 0;
};

/// One dataset's worth of generation work: where to put the objects and which
/// optional augmentations to run. Counts multiply:
/// num_sources * |eval_grid| * |perturb_offsets| demos.
struct GenerationSpec {
  std::vector<std::vector<Pose>> eval_grid;  // one pose tuple per grid cell
  double grid_spacing = 0.15;
  std::vector<Eigen::Vector2d> perturb_offsets{{0.0, 0.0}};
  int num_sources = 1;
  std::optional<AdrSpec> adr;
  std::optional<ObstacleSpec> obstacle;
};

nlohmann::json generation_spec_json(const GenerationSpec& spec);
GenerationSpec json_generation_spec(const nlohmann::json& j);

nlohmann::json adr_spec_json(const AdrSpec& spec);
AdrSpec json_adr_spec(const nlohmann::json& j);
nlohmann::json obstacle_spec_json(const ObstacleSpec& spec);
ObstacleSpec json_obstacle_spec(const nlohmann::json& j);

/// Uniform lattice anchored at the bounding-box corner, row-major (y outer,
/// x fastest), boundary points included. A lattice that misses the polygon
/// entirely degrades to the polygon centroid.
std::vector<Eigen::Vector2d> grid_targets(const std::vector<Eigen::Vector2d>& polygon,
                                          double spacing);

/// Fixed-count lattice over a rectangle, row-major; a 1-count axis sits at
/// the axis midpoint.
std::vector<Eigen::Vector2d> grid_targets_by_count(double x_lo, double x_hi, double y_lo,
                                                   double y_hi, int nx, int ny);

/// n_per_axis^2 offsets on the [-half_extent, +half_extent] lattice,
/// row-major. n_per_axis must be odd so (0,0) is always included.
std::vector<Eigen::Vector2d> perturb_offsets_grid(double half_extent, int n_per_axis);

/// Each target replaced by one copy per offset, target-major. n_per_axis == 1
/// returns the targets unchanged.
std::vector<Eigen::Vector2d> perturb(const std::vector<Eigen::Vector2d>& targets,
                                     double half_extent, int n_per_axis);

struct PlannedTarget {
  int source = 0;                // index of the source demonstration to adapt
  std::vector<Pose> config;      // target pose per object
};

/// Expands the spec into concrete generation jobs: source-major, then grid
/// cell, then perturbation; offsets shift every pose of the cell's tuple in
/// the plane. |result| = num_sources * |eval_grid| * |perturb_offsets|.
std::vector<PlannedTarget> plan_dataset(const GenerationSpec& spec);

struct AdrOptions {
  int pause = 5;
  std::vector<Eigen::Vector2d> workspace;  // empty skips the reach check
  double radius = 0.005;                   // point-ownership attribution radius
};

/// Mid-episode disturbance: at frame t_d (inside a skill segment) the skill's
/// object jumps by `displacement`. The arm freezes for `pause` frames,
/// re-approaches the displaced continuation pose on a straight line, then
/// replays the remaining source actions carried along by the displacement, so
/// the ee-object relative pose after the re-approach matches the moment of
/// the disturbance. Frames before t_d are copied bitwise; hand actions are
/// held through the insertion and preserved afterwards. Expects a
/// kinematically consistent input (action(t) lands on state(t+1)).
Demonstration adr_augment(const Demonstration& demo, int t_d, const Pose& displacement,
                          const AdrOptions& opts = {});

/// Fuses sampled obstacle points (label kLabelObstacle) into every frame and
/// replans all motion segments around them with the configured clearance;
/// skill-segment actions are copied bitwise. Planning uses a 1 mm safety
/// margin on top of the clearance so densely re-sampled paths still clear it.
Demonstration obstacle_augment(const Demonstration& demo, const ObstacleSpec& spec);

/// Surface-sampled obstacle cloud, every point labeled kLabelObstacle.
LabeledCloud sample_primitive(const Primitive& prim, int n, uint64_t seed);

}  // namespace demogen
