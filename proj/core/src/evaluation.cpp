#include "demogen/evaluation.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include "demogen/errors.hpp"
#include "demogen/strategies.hpp"
#include "demogen/synthesis.hpp"

namespace demogen {
namespace {

uint64_t mix(uint64_t seed, uint64_t salt) {
  uint64_t x = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  return x;
}

std::vector<Pose> default_config(const TaskSpec& task) {
  std::vector<Pose> config;
  config.reserve(task.objects.size());
  for (const auto& o : task.objects) config.push_back(o.prim.pose);
  return config;
}

// Same accumulation order as chamfer() so select() agrees with it exactly.
double directed(const std::vector<Eigen::Vector3f>& from, const KdTree3& to) {
  double sum = 0.0;
  for (const auto& p : from) sum += std::sqrt(to.nearest_sq(p));
  return sum / static_cast<double>(from.size());
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double mean_success(const Heatmap& h) {
  if (h.cells.empty()) return 0.0;
  double sum = 0.0;
  for (double r : h.success_rate) sum += r;
  return sum / static_cast<double>(h.cells.size());
}

ActionPlan replay_plan(const Demonstration& demo) {
  if (demo.length() == 0) throw ValidationError("replay_plan: empty demonstration");
  ActionPlan plan;
  plan.arms.resize(demo.arm_count());
  for (int a = 0; a < demo.arm_count(); ++a) {
    ArmPlan& ap = plan.arms[a];
    ap.arm_actions.reserve(demo.length());
    ap.hand_actions.reserve(demo.length());
    for (const Frame& f : demo.frames) {
      ap.arm_actions.push_back(f.arm_action[a]);
      ap.hand_actions.push_back(f.hand_action[a]);
    }
  }
  return plan;
}

void NnReplayPolicy::add(const Demonstration& demo) {
  if (demo.length() == 0) throw ValidationError("nn_replay: empty demonstration");
  const Frame& f0 = demo.frames[0];
  if (f0.cloud.size() == 0) throw ValidationError("nn_replay: empty frame-0 cloud");
  Entry e;
  e.cloud = f0.cloud;
  e.tree = KdTree3(f0.cloud.points);
  e.plan = replay_plan(demo);
  entries_.push_back(std::move(e));
}

int NnReplayPolicy::select(const LabeledCloud& observation) const {
  if (entries_.empty()) throw EmptyDatasetError("nn_replay: no demonstrations");
  if (observation.size() == 0) throw EmptyCloudError("nn_replay: empty observation");
  KdTree3 obs_tree(observation.points);
  int best = 0;
  double best_d = 0.0;
  for (int i = 0; i < size(); ++i) {
    const Entry& e = entries_[i];
    double d = 0.5 * (directed(observation.points, e.tree) + directed(e.cloud.points, obs_tree));
    if (i == 0 || d < best_d) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

NnReplayPolicy nn_replay_policy(const std::vector<Demonstration>& dataset) {
  if (dataset.empty()) throw EmptyDatasetError("nn_replay: empty dataset");
  NnReplayPolicy policy;
  for (const auto& demo : dataset) policy.add(demo);
  return policy;
}

Heatmap grid_eval(const NnReplayPolicy& policy, const TaskSpec& task,
                  const std::vector<Eigen::Vector2d>& grid, const EvalOptions& opts) {
  if (opts.trials_per_cell < 1) throw ValidationError("grid_eval: trials_per_cell must be >= 1");
  if (policy.size() == 0) throw EmptyDatasetError("grid_eval: policy has no demonstrations");
  if (task.varied.empty()) throw ValidationError("grid_eval: task has no varied object");

  const std::vector<Pose> base = default_config(task);
  const int obj = task.varied[0];

  Heatmap h;
  h.cells = grid;
  h.success_rate.resize(grid.size(), 0.0);
  h.trials.resize(grid.size(), opts.trials_per_cell);

  for (size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i].x(), y = grid[i].y();
    if (!task.eval_range.contains(x, y)) continue;  // recorded as 0

    std::vector<Pose> config = base;
    config[obj].position.x() = x;
    config[obj].position.y() = y;

    int wins = 0;
    for (int r = 0; r < opts.trials_per_cell; ++r) {
      uint64_t obs_seed = opts.seed == 0 ? 0 : mix(opts.seed, i * 1000003ull + r + 1);
      WorldState w = initial_state(task, config);
      LabeledCloud obs =
          render_cloud(task, w, task.camera, task.n_points, /*visibility=*/false, obs_seed);
      int sel = policy.select(obs);
      if (execute_plan(task, config, policy.plan(sel)).success) ++wins;
    }
    h.success_rate[i] = static_cast<double>(wins) / opts.trials_per_cell;
  }
  return h;
}

std::vector<MismatchPoint> mismatch_curve(const TaskSpec& task, const Demonstration& source,
                                          const std::vector<Eigen::Vector2d>& displacements,
                                          bool visibility) {
  if (task.varied.empty()) throw ValidationError("mismatch_curve: task has no varied object");
  if (source.num_objects() != static_cast<int>(task.objects.size()))
    throw ValidationError("mismatch_curve: demo object count does not match task");

  const int obj = task.varied[0];
  WorldState base_state = initial_state(task, source.init_config);
  LabeledCloud base = render_cloud(task, base_state, source.camera_pose, task.n_points,
                                   visibility, /*noise_seed=*/0);

  std::vector<MismatchPoint> curve;
  curve.reserve(displacements.size());
  for (const auto& d : displacements) {
    LabeledCloud edited = base;
    for (size_t i = 0; i < edited.points.size(); ++i) {
      if (edited.labels[i] != obj) continue;
      Eigen::Vector3d p = edited.points[i].cast<double>();
      p.x() += d.x();
      p.y() += d.y();
      edited.points[i] = p.cast<float>();
    }

    std::vector<Pose> displaced = source.init_config;
    displaced[obj].position.x() += d.x();
    displaced[obj].position.y() += d.y();
    LabeledCloud fresh = render_cloud(task, initial_state(task, displaced), source.camera_pose,
                                      task.n_points, visibility, /*noise_seed=*/0);

    curve.push_back({d.norm(), chamfer(edited, fresh)});
  }
  return curve;
}

double sampling_resolution(const LabeledCloud& cloud) {
  const size_t n = cloud.points.size();
  if (n < 2) throw ValidationError("sampling_resolution: needs at least 2 points");
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    float best = std::numeric_limits<float>::max();
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      float d = (cloud.points[i] - cloud.points[j]).squaredNorm();
      if (d < best) best = d;
    }
    sum += std::sqrt(static_cast<double>(best));
  }
  return sum / static_cast<double>(n);
}

std::vector<SweepPoint> saturation_sweep(const TaskSpec& task, const std::vector<double>& levels,
                                         const SweepOptions& opts) {
  if (levels.empty()) throw ValidationError("saturation_sweep: no levels");
  for (size_t i = 1; i < levels.size(); ++i)
    if (levels[i] <= levels[i - 1]) throw ValidationError("saturation_sweep: levels must ascend");
  if (opts.eval_per_axis < 1 || opts.trials_per_cell < 1)
    throw ValidationError("saturation_sweep: counts must be >= 1");
  if (opts.mode == SweepMode::Coverage) {
    if (levels.front() <= 0.0)
      throw ValidationError("saturation_sweep: coverage levels must be positive");
    if (opts.demo_spacing <= 0.0)
      throw ValidationError("saturation_sweep: demo_spacing must be positive");
  } else {
    if (levels.front() < 1.0)
      throw ValidationError("saturation_sweep: density levels must be >= 1");
    if (opts.coverage_half_extent <= 0.0)
      throw ValidationError("saturation_sweep: coverage_half_extent must be positive");
  }
  if (task.varied.empty()) throw ValidationError("saturation_sweep: task has no varied object");

  const std::vector<Pose> base = default_config(task);
  Demonstration source = scripted_demo(task, base, /*noise_seed=*/0);
  const SegmentIndex& seg = *source.segment_index;
  const int obj = task.varied[0];
  const double cx = base[obj].position.x(), cy = base[obj].position.y();

  const std::vector<Eigen::Vector2d> eval_grid =
      grid_targets_by_count(task.eval_range.x_lo, task.eval_range.x_hi, task.eval_range.y_lo,
                            task.eval_range.y_hi, opts.eval_per_axis, opts.eval_per_axis);

  std::vector<SweepPoint> curve;
  curve.reserve(levels.size());
  for (double level : levels) {
    const double half = opts.mode == SweepMode::Coverage ? level : opts.coverage_half_extent;
    const int per_axis =
        opts.mode == SweepMode::Coverage
            ? static_cast<int>(std::floor(2.0 * level / opts.demo_spacing + 1e-9)) + 1
            : static_cast<int>(std::lround(level));

    NnReplayPolicy policy;
    policy.add(source);
    AdaptOptions ao;
    ao.workspace = task.workspace;
    for (const auto& t : grid_targets_by_count(cx - half, cx + half, cy - half, cy + half,
                                               per_axis, per_axis)) {
      std::vector<Pose> config = source.init_config;
      config[obj].position.x() = t.x();
      config[obj].position.y() = t.y();
      try {
        ActionPlan plan = source.arm_count() > 1 ? adapt_bimanual(source, seg, config, ao)
                                                 : adapt_trajectory(source, seg, config, ao);
        policy.add(synthesize_demo(source, seg, config, plan));
      } catch (const Error&) {
        // unreachable or unplannable target: the dataset just stays smaller
      }
    }

    EvalOptions eo;
    eo.trials_per_cell = opts.trials_per_cell;
    eo.seed = opts.seed;
    curve.push_back({level, policy.size(), mean_success(grid_eval(policy, task, eval_grid, eo))});
  }
  return curve;
}

void write_sweep_csv(const std::vector<SweepPoint>& curve, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "level,demos,success_rate\n";
  for (const auto& p : curve)
    out << fmt_double(p.level) << ',' << p.demos << ',' << fmt_double(p.success_rate) << '\n';
  if (!out.flush()) throw IoError("write failed: " + path.string());
}

void heatmap_export(const Heatmap& h, const std::filesystem::path& path) {
  const size_t n = h.cells.size();
  if (h.success_rate.size() != n || h.trials.size() != n)
    throw ValidationError("heatmap_export: field lengths differ");
  for (size_t i = 0; i < n; ++i) {
    if (h.success_rate[i] < 0.0 || h.success_rate[i] > 1.0)
      throw ValidationError("heatmap_export: success rate outside [0, 1]");
    if (h.trials[i] < 1) throw ValidationError("heatmap_export: trials must be >= 1");
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "x,y,success_rate,trials\n";
  for (size_t i = 0; i < n; ++i)
    out << fmt_double(h.cells[i].x()) << ',' << fmt_double(h.cells[i].y()) << ','
        << fmt_double(h.success_rate[i]) << ',' << h.trials[i] << '\n';
  if (!out.flush()) throw IoError("write failed: " + path.string());
}

Heatmap read_heatmap(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError("heatmap: empty file " + path.string());
  if (line == "x,y,success_rate,trials\r") line.pop_back();
  if (line != "x,y,success_rate,trials")
    throw FormatError("heatmap: bad header in " + path.string());

  Heatmap h;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    double vals[3];
    for (int k = 0; k < 3; ++k) {
      if (!std::getline(row, field, ',')) throw FormatError("heatmap: short row: " + line);
      size_t used = 0;
      try {
        vals[k] = std::stod(field, &used);
      } catch (const std::exception&) {
        throw FormatError("heatmap: bad number: " + field);
      }
      if (used != field.size()) throw FormatError("heatmap: bad number: " + field);
    }
    if (!std::getline(row, field)) throw FormatError("heatmap: short row: " + line);
    int trials = 0;
    try {
      size_t used = 0;
      trials = std::stoi(field, &used);
      if (used != field.size()) throw FormatError("heatmap: bad trials: " + field);
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception&) {
      throw FormatError("heatmap: bad trials: " + field);
    }
    h.cells.emplace_back(vals[0], vals[1]);
    h.success_rate.push_back(vals[2]);
    h.trials.push_back(trials);
  }
  return h;
}

void write_heatmap_ppm(const Heatmap& h, const std::filesystem::path& path) {
  if (h.cells.empty()) throw ValidationError("heatmap ppm: empty heatmap");
  std::map<double, int> xs, ys;
  for (const auto& c : h.cells) {
    xs.emplace(c.x(), 0);
    ys.emplace(c.y(), 0);
  }
  int k = 0;
  for (auto& [x, idx] : xs) idx = k++;
  k = 0;
  for (auto& [y, idx] : ys) idx = k++;
  const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());

  std::vector<std::array<int, 3>> img(static_cast<size_t>(nx) * ny, {128, 128, 128});
  for (size_t i = 0; i < h.cells.size(); ++i) {
    int xi = xs[h.cells[i].x()];
    int yi = ys[h.cells[i].y()];
    int row = ny - 1 - yi;  // largest y on top
    double r = h.success_rate[i];
    img[static_cast<size_t>(row) * nx + xi] = {static_cast<int>(255 * (1.0 - r)),
                                               static_cast<int>(255 * r), 40};
  }

  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P3\n" << nx << ' ' << ny << "\n255\n";
  for (const auto& px : img) out << px[0] << ' ' << px[1] << ' ' << px[2] << '\n';
  if (!out.flush()) throw IoError("write failed: " + path.string());
}

}  // namespace demogen
