#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "demogen/adapter.hpp"
#include "demogen/cloud.hpp"
#include "demogen/demo.hpp"
#include "demogen/kdtree.hpp"
#include "demogen/sim.hpp"

namespace demogen {

/// Per-cell success rates over a planar placement grid.
struct Heatmap {
  std::vector<Eigen::Vector2d> cells;
  std::vector<double> success_rate;  // in [0, 1]
  std::vector<int> trials;           // >= 1 per evaluated cell

  int size() const { return static_cast<int>(cells.size()); }
};

double mean_success(const Heatmap& h);

/// The demo's recorded actions repackaged for execute_plan, verbatim.
ActionPlan replay_plan(const Demonstration& demo);

/// Nearest-neighbor replay baseline: picks the demo whose frame-0 cloud has
/// the smallest chamfer distance to the observation and replays its recorded
/// actions verbatim. Deliberately has zero interpolation ability, so spatial
/// coverage effects show up undamped. Not a learned policy.
class NnReplayPolicy {
 public:
  NnReplayPolicy() = default;

  /// Copies the frame-0 cloud and the full action sequence out of the demo.
  void add(const Demonstration& demo);

  int size() const { return static_cast<int>(entries_.size()); }

  /// Index of the entry with minimal chamfer to the observation; ties go to
  /// the lowest index. Matches chamfer() bit for bit.
  int select(const LabeledCloud& observation) const;

  const ActionPlan& plan(int index) const { return entries_.at(index).plan; }
  const LabeledCloud& frame0(int index) const { return entries_.at(index).cloud; }

 private:
  struct Entry {
    LabeledCloud cloud;
    KdTree3 tree;
    ActionPlan plan;
  };
  std::vector<Entry> entries_;
};

NnReplayPolicy nn_replay_policy(const std::vector<Demonstration>& dataset);

struct EvalOptions {
  int trials_per_cell = 5;
  uint64_t seed = 0;  // 0 renders observations noise-free
};

/// Runs the policy once per trial at every grid cell: the task's first
/// varied object is placed at the cell, the frame-0 scene is rendered, the
/// policy selects and replays a demo, and execute_plan scores it. Cells
/// outside the task's eval range are recorded as 0 without simulation.
/// Deterministic for a fixed seed.
Heatmap grid_eval(const NnReplayPolicy& policy, const TaskSpec& task,
                  const std::vector<Eigen::Vector2d>& grid, const EvalOptions& opts = {});

struct MismatchPoint {
  double displacement = 0.0;
  double chamfer = 0.0;
};

/// Visual-mismatch probe: re-renders the source config under the requested
/// visibility mode, rigidly shifts the varied object's points by each
/// displacement, and measures chamfer against a fresh render at the
/// displaced config. With visibility off the two clouds share one sample
/// set, so the mismatch stays at sampling-noise level; with visibility on
/// self-occlusion changes the visible surface and the mismatch grows with
/// displacement.
std::vector<MismatchPoint> mismatch_curve(const TaskSpec& task, const Demonstration& source,
                                          const std::vector<Eigen::Vector2d>& displacements,
                                          bool visibility);

/// Mean distance from each point to its nearest other point.
double sampling_resolution(const LabeledCloud& cloud);

enum class SweepMode { Coverage, Density };

struct SweepPoint {
  double level = 0.0;
  int demos = 0;
  double success_rate = 0.0;
};

struct SweepOptions {
  SweepMode mode = SweepMode::Coverage;
  double demo_spacing = 0.03;          // fixed lattice pitch for coverage sweeps
  double coverage_half_extent = 0.12;  // fixed lattice extent for density sweeps
  int eval_per_axis = 9;
  int trials_per_cell = 1;
  uint64_t seed = 0;
};

/// Success-vs-dataset-size curve: per level, adapts one scripted source demo
/// onto a generation lattice centered on the source config, then scores the
/// dataset with grid_eval over the task's eval range. Coverage mode grows the
/// lattice half-extent at fixed pitch (so local density never dilutes);
/// density mode grows the per-axis count over a fixed extent. Levels must be
/// strictly ascending. Targets the generator rejects are skipped and simply
/// shrink the dataset.
std::vector<SweepPoint> saturation_sweep(const TaskSpec& task, const std::vector<double>& levels,
                                         const SweepOptions& opts = {});

void write_sweep_csv(const std::vector<SweepPoint>& curve, const std::filesystem::path& path);

/// CSV with header x,y,success_rate,trials; doubles printed so the file
/// round-trips losslessly.
void heatmap_export(const Heatmap& h, const std::filesystem::path& path);
Heatmap read_heatmap(const std::filesystem::path& path);

/// Quick-look raster: cells are snapped onto the lattice of distinct x/y
/// coordinates, red (0) to green (1), gray where the lattice has no cell.
void write_heatmap_ppm(const Heatmap& h, const std::filesystem::path& path);

}  // namespace demogen
