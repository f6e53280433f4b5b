#include "demogen/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "demogen/adapter.hpp"
#include "demogen/errors.hpp"
#include "demogen/planner.hpp"
#include "demogen/serialize.hpp"
#include "demogen/synthesis.hpp"

namespace demogen {

namespace {

using nlohmann::json;

uint64_t mix(uint64_t seed, uint64_t salt) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// rrt_plan probes edges every millimeter, so a continuous path can dip about
// half a probe below the requested clearance. Planning with this margin keeps
// densely re-sampled paths at or above the configured value.
constexpr double kClearanceMargin = 0.001;

double polygon_area(const std::vector<Eigen::Vector2d>& poly) {
  double area = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    area += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * area;
}

Eigen::Vector2d polygon_centroid(const std::vector<Eigen::Vector2d>& poly) {
  double area = polygon_area(poly);
  Eigen::Vector2d c{0.0, 0.0};
  for (size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    double w = p.x() * q.y() - q.x() * p.y();
    c += w * (p + q);
  }
  return c / (6.0 * area);
}

Vec3 apply_d(const Pose& d, const Eigen::Vector3f& p) { return d.apply(p.cast<double>()); }

bool same_pose(const Pose& a, const Pose& b) {
  return a.position == b.position && a.orientation.coeffs() == b.orientation.coeffs();
}

}  // namespace

json adr_spec_json(const AdrSpec& spec) {
  json a;
  a["disturb_times"] = spec.disturb_times;
  a["displacements"] = json::array();
  for (const auto& d : spec.displacements) a["displacements"].push_back(pose_json(d));
  a["pause"] = spec.pause;
  return a;
}

AdrSpec json_adr_spec(const json& j) {
  AdrSpec adr;
  try {
    adr.disturb_times = j.at("disturb_times").get<std::vector<int>>();
    for (const auto& d : j.at("displacements")) adr.displacements.push_back(json_pose(d));
    adr.pause = j.value("pause", adr.pause);
  } catch (const json::exception& e) {
    throw FormatError(std::string("adr spec: ") + e.what());
  }
  return adr;
}

json obstacle_spec_json(const ObstacleSpec& spec) {
  json o;
  o["primitives"] = json::array();
  for (const auto& p : spec.primitives) o["primitives"].push_back(primitive_json(p));
  o["clearance"] = spec.clearance;
  o["points_per_primitive"] = spec.points_per_primitive;
  o["cloud_seed"] = spec.cloud_seed;
  o["plan_seed"] = spec.plan_seed;
  return o;
}

ObstacleSpec json_obstacle_spec(const json& j) {
  ObstacleSpec obs;
  try {
    for (const auto& p : j.at("primitives")) obs.primitives.push_back(json_primitive(p));
    obs.clearance = j.value("clearance", obs.clearance);
    obs.points_per_primitive = j.value("points_per_primitive", obs.points_per_primitive);
    obs.cloud_seed = j.value("cloud_seed", obs.cloud_seed);
    obs.plan_seed = j.value("plan_seed", obs.plan_seed);
  } catch (const json::exception& e) {
    throw FormatError(std::string("obstacle spec: ") + e.what());
  }
  return obs;
}

json generation_spec_json(const GenerationSpec& spec) {
  json j;
  j["eval_grid"] = json::array();
  for (const auto& cell : spec.eval_grid) {
    json tuple = json::array();
    for (const auto& p : cell) tuple.push_back(pose_json(p));
    j["eval_grid"].push_back(tuple);
  }
  j["grid_spacing"] = spec.grid_spacing;
  j["perturb_offsets"] = json::array();
  for (const auto& o : spec.perturb_offsets)
    j["perturb_offsets"].push_back({o.x(), o.y()});
  j["num_sources"] = spec.num_sources;
  if (spec.adr) j["adr"] = adr_spec_json(*spec.adr);
  if (spec.obstacle) j["obstacle"] = obstacle_spec_json(*spec.obstacle);
  return j;
}

GenerationSpec json_generation_spec(const json& j) {
  GenerationSpec spec;
  try {
    spec.eval_grid.clear();
    for (const auto& tuple : j.at("eval_grid")) {
      std::vector<Pose> cell;
      for (const auto& p : tuple) cell.push_back(json_pose(p));
      spec.eval_grid.push_back(std::move(cell));
    }
    spec.grid_spacing = j.value("grid_spacing", spec.grid_spacing);
    if (j.contains("perturb_offsets")) {
      spec.perturb_offsets.clear();
      for (const auto& o : j.at("perturb_offsets")) {
        auto v = o.get<std::vector<double>>();
        if (v.size() != 2) throw FormatError("perturb offset needs 2 numbers");
        spec.perturb_offsets.push_back({v[0], v[1]});
      }
    }
    spec.num_sources = j.value("num_sources", spec.num_sources);
    if (j.contains("adr")) spec.adr = json_adr_spec(j.at("adr"));
    if (j.contains("obstacle")) spec.obstacle = json_obstacle_spec(j.at("obstacle"));
  } catch (const json::exception& e) {
    throw FormatError(std::string("generation spec: ") + e.what());
  }
  return spec;
}

std::vector<Eigen::Vector2d> grid_targets(const std::vector<Eigen::Vector2d>& polygon,
                                          double spacing) {
  if (spacing <= 0.0) throw ValidationError("grid_targets: spacing must be positive");
  if (polygon.size() < 3)
    throw EmptyWorkspaceError("grid_targets: polygon needs at least 3 vertices");
  if (std::abs(polygon_area(polygon)) < 1e-12)
    throw EmptyWorkspaceError("grid_targets: polygon has no area");

  Eigen::Vector2d lo = polygon[0], hi = polygon[0];
  for (const auto& p : polygon) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  // Lattice centered in the bounding box so margins are symmetric and a
  // spacing wider than the workspace degrades to its middle.
  const double eps = 1e-9;
  const int nx = static_cast<int>(std::floor((hi.x() - lo.x()) / spacing + eps)) + 1;
  const int ny = static_cast<int>(std::floor((hi.y() - lo.y()) / spacing + eps)) + 1;
  const double ax = lo.x() + 0.5 * (hi.x() - lo.x() - (nx - 1) * spacing);
  const double ay = lo.y() + 0.5 * (hi.y() - lo.y() - (ny - 1) * spacing);

  std::vector<Eigen::Vector2d> out;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      double x = ax + ix * spacing;
      double y = ay + iy * spacing;
      if (point_in_polygon(polygon, x, y)) out.push_back({x, y});
    }
  if (out.empty()) out.push_back(polygon_centroid(polygon));
  return out;
}

std::vector<Eigen::Vector2d> grid_targets_by_count(double x_lo, double x_hi, double y_lo,
                                                   double y_hi, int nx, int ny) {
  if (nx < 1 || ny < 1) throw ValidationError("grid_targets_by_count: counts must be >= 1");
  if (x_hi < x_lo || y_hi < y_lo)
    throw EmptyWorkspaceError("grid_targets_by_count: empty rectangle");
  auto coord = [](double lo, double hi, int n, int i) {
    if (n == 1) return 0.5 * (lo + hi);
    return lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  };
  std::vector<Eigen::Vector2d> out;
  out.reserve(static_cast<size_t>(nx) * ny);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      out.push_back({coord(x_lo, x_hi, nx, ix), coord(y_lo, y_hi, ny, iy)});
  return out;
}

std::vector<Eigen::Vector2d> perturb_offsets_grid(double half_extent, int n_per_axis) {
  if (n_per_axis < 1 || n_per_axis % 2 == 0)
    throw ValidationError("perturb: n_per_axis must be odd and positive");
  if (half_extent < 0.0) throw ValidationError("perturb: half_extent must be >= 0");
  if (n_per_axis == 1) return {{0.0, 0.0}};
  std::vector<Eigen::Vector2d> out;
  out.reserve(static_cast<size_t>(n_per_axis) * n_per_axis);
  const double step = 2.0 * half_extent / (n_per_axis - 1);
  for (int iy = 0; iy < n_per_axis; ++iy)
    for (int ix = 0; ix < n_per_axis; ++ix)
      out.push_back({-half_extent + ix * step, -half_extent + iy * step});
  return out;
}

std::vector<Eigen::Vector2d> perturb(const std::vector<Eigen::Vector2d>& targets,
                                     double half_extent, int n_per_axis) {
  auto offsets = perturb_offsets_grid(half_extent, n_per_axis);
  if (n_per_axis == 1) return targets;
  std::vector<Eigen::Vector2d> out;
  out.reserve(targets.size() * offsets.size());
  for (const auto& t : targets)
    for (const auto& o : offsets) out.push_back(t + o);
  return out;
}

std::vector<PlannedTarget> plan_dataset(const GenerationSpec& spec) {
  if (spec.num_sources < 1) throw ValidationError("plan_dataset: num_sources must be >= 1");
  if (spec.eval_grid.empty()) throw ValidationError("plan_dataset: eval_grid is empty");
  if (spec.perturb_offsets.empty())
    throw ValidationError("plan_dataset: perturb_offsets is empty");
  const size_t arity = spec.eval_grid[0].size();
  for (const auto& cell : spec.eval_grid)
    if (cell.size() != arity)
      throw ValidationError("plan_dataset: eval_grid tuples differ in object count");

  std::vector<PlannedTarget> out;
  out.reserve(spec.eval_grid.size() * spec.perturb_offsets.size() * spec.num_sources);
  for (int s = 0; s < spec.num_sources; ++s)
    for (const auto& cell : spec.eval_grid)
      for (const auto& off : spec.perturb_offsets) {
        PlannedTarget job;
        job.source = s;
        job.config = cell;
        for (auto& p : job.config) {
          p.position.x() += off.x();
          p.position.y() += off.y();
        }
        out.push_back(std::move(job));
      }
  return out;
}

Demonstration adr_augment(const Demonstration& demo, int t_d, const Pose& displacement,
                          const AdrOptions& opts) {
  const int L = demo.length();
  if (L < 2) throw ValidationError("adr_augment: demo too short");
  if (!demo.segment_index) throw ValidationError("adr_augment: demo has no segment index");
  if (t_d < 1 || t_d >= L)
    throw ValidationError("adr_augment: t_d " + std::to_string(t_d) + " out of [1, " +
                          std::to_string(L - 1) + "]");
  if (opts.pause < 0) throw ValidationError("adr_augment: pause must be >= 0");

  // The disturbance must land inside a skill: that is the only time the
  // object's position drives the remaining actions.
  int arm = -1, object = -1;
  size_t seg_pos = 0;
  for (size_t a = 0; a < demo.segment_index->per_arm.size() && arm < 0; ++a)
    for (size_t i = 0; i < demo.segment_index->per_arm[a].size(); ++i) {
      const Segment& s = demo.segment_index->per_arm[a][i];
      if (s.kind == SegmentKind::Skill && !s.empty() && s.t_start <= t_d && t_d <= s.t_end) {
        arm = static_cast<int>(a);
        object = s.object_id;
        seg_pos = i;
        break;
      }
    }
  if (arm < 0)
    throw ValidationError("adr_augment: frame " + std::to_string(t_d) +
                          " is not inside any skill segment");

  SynthesisContext ctx(demo, *demo.segment_index, opts.radius);
  const int arm_code = SynthesisContext::kArmOwnerBase - arm;

  // Point attribution. Frames that still carry labels (in-memory demos,
  // including earlier adr outputs whose objects left their frame-0 spots)
  // are authoritative; the frame-0 snapshot then only decides whether a
  // *different* object is riding the disturbed arm. Unlabeled frames fall
  // back to the snapshot entirely.
  auto owner_of = [&](int t, size_t i) -> int32_t {
    const Frame& f = demo.frames[t];
    if (f.cloud.labels.size() != f.cloud.points.size()) return ctx.owners(t)[i];
    int32_t l = f.cloud.labels[i];
    if (l == object) return object;
    if (l == kLabelEE) {
      int best = 0;
      double best_sq = std::numeric_limits<double>::infinity();
      for (int a = 0; a < demo.arm_count(); ++a) {
        double sq = (f.cloud.points[i].cast<double>() - f.arm_state[a].position).squaredNorm();
        if (sq < best_sq) {
          best_sq = sq;
          best = a;
        }
      }
      return SynthesisContext::kArmOwnerBase - best;
    }
    if (l >= 0 && ctx.owners(t)[i] == arm_code) return arm_code;  // carried object
    return kLabelBackground;
  };

  const Frame& fd = demo.frames[t_d];
  Vec3 centroid = Vec3::Zero();
  int hits = 0;
  for (size_t i = 0; i < fd.cloud.points.size(); ++i)
    if (owner_of(t_d, i) == object) {
      centroid += fd.cloud.points[i].cast<double>();
      ++hits;
    }
  if (hits == 0)
    throw ValidationError("adr_augment: disturbed object has no visible points at t_d");
  centroid /= hits;

  const Pose held = fd.arm_state[arm];
  const Pose goal = compose(displacement, held);
  if (!opts.workspace.empty()) {
    Vec3 moved = displacement.apply(centroid);
    if (!point_in_polygon(opts.workspace, moved.x(), moved.y()))
      throw UnreachableTargetError("adr_augment: displaced object leaves the workspace");
    if (!point_in_polygon(opts.workspace, goal.position.x(), goal.position.y()))
      throw UnreachableTargetError("adr_augment: re-approach goal leaves the workspace");
  }

  PlanRequest req;
  req.start = held;
  req.goal = goal;
  std::vector<Pose> path = linear_plan(req);
  std::vector<Pose> interior;
  if (path.size() > 2) interior.assign(path.begin() + 1, path.end() - 1);
  const int shift = opts.pause + static_cast<int>(interior.size());

  const bool disp_id = same_pose(displacement, Pose{});

  // Cloud edit: the disturbed object's points jump by the displacement, the
  // disturbed arm's points follow its (possibly re-planned) pose, the rest of
  // the scene is copied bitwise.
  auto edit_cloud = [&](Frame& g, int src_t, const Pose& arm_pose) {
    const Frame& f = demo.frames[src_t];
    const bool arm_id = same_pose(arm_pose, f.arm_state[arm]);
    if (disp_id && arm_id) return;
    const Pose w = arm_id ? Pose{} : compose(arm_pose, inverse(f.arm_state[arm]));
    for (size_t i = 0; i < g.cloud.points.size(); ++i) {
      int32_t own = owner_of(src_t, i);
      if (own == object && !disp_id)
        g.cloud.points[i] = apply_d(displacement, f.cloud.points[i]).cast<float>();
      else if (own == arm_code && !arm_id)
        g.cloud.points[i] = apply_d(w, f.cloud.points[i]).cast<float>();
    }
  };

  Demonstration out = demo;
  out.frames.clear();
  out.frames.reserve(L + shift);
  for (int t = 0; t < t_d; ++t) out.frames.push_back(demo.frames[t]);

  // Freeze, then walk to the displaced continuation pose. All arms hold; the
  // hand holds its t_d state so grip timing is untouched.
  for (int i = 0; i < shift; ++i) {
    Frame g = fd;
    const Pose p = (i < opts.pause) ? held : interior[i - opts.pause];
    const Pose pn = (i + 1 < shift)
                        ? ((i + 1 < opts.pause) ? held : interior[i + 1 - opts.pause])
                        : goal;
    edit_cloud(g, t_d, p);
    for (int a = 0; a < demo.arm_count(); ++a) {
      g.arm_state[a] = fd.arm_state[a];
      g.arm_action[a] = fd.arm_state[a];
      g.hand_state[a] = fd.hand_state[a];
      g.hand_action[a] = fd.hand_state[a];
    }
    g.arm_state[arm] = p;
    g.arm_action[arm] = pn;
    out.frames.push_back(std::move(g));
  }

  // Resume: remaining source frames carried along by the displacement.
  for (int t = t_d; t < L; ++t) {
    Frame g = demo.frames[t];
    if (!disp_id) {
      const Pose moved = compose(displacement, demo.frames[t].arm_state[arm]);
      edit_cloud(g, t, moved);
      g.arm_state[arm] = moved;
      g.arm_action[arm] = compose(displacement, demo.frames[t].arm_action[arm]);
    }
    out.frames.push_back(std::move(g));
  }

  // The inserted frames join the interrupted skill's interval (the index must
  // stay alternating); disturbing at the skill's first frame stretches the
  // preceding motion instead.
  SegmentIndex idx = *demo.segment_index;
  const bool at_start = idx.per_arm[arm][seg_pos].t_start == t_d;
  for (size_t a = 0; a < idx.per_arm.size(); ++a)
    for (size_t i = 0; i < idx.per_arm[a].size(); ++i) {
      Segment& s = idx.per_arm[a][i];
      if (static_cast<int>(a) == arm) {
        if (i < seg_pos) {
          if (at_start && i + 1 == seg_pos) s.t_end += shift;
          continue;
        }
        if (i == seg_pos && !at_start) {
          s.t_end += shift;
          continue;
        }
        s.t_start += shift;
        s.t_end += shift;
      } else {
        if (s.empty() ? s.t_start < t_d : s.t_end < t_d) continue;
        if (s.t_start <= t_d) {
          s.t_end += shift;
        } else {
          s.t_start += shift;
          s.t_end += shift;
        }
      }
    }
  out.segment_index = idx;

  auto problems = validate(out);
  if (!problems.empty()) throw ValidationError("adr_augment: " + problems.front());
  return out;
}

LabeledCloud sample_primitive(const Primitive& prim, int n, uint64_t seed) {
  LabeledCloud cloud;
  auto pts = surface_sample(prim, n, seed);
  cloud.points.reserve(pts.size());
  for (const auto& p : pts) cloud.points.push_back(p.cast<float>());
  cloud.labels.assign(pts.size(), kLabelObstacle);
  return cloud;
}

Demonstration obstacle_augment(const Demonstration& demo, const ObstacleSpec& spec) {
  if (!demo.segment_index)
    throw ValidationError("obstacle_augment: demo has no segment index");
  if (spec.clearance <= 0.0)
    throw ValidationError("obstacle_augment: clearance must be positive");
  if (spec.points_per_primitive < 1)
    throw ValidationError("obstacle_augment: points_per_primitive must be >= 1");
  const SegmentIndex& seg = *demo.segment_index;

  LabeledCloud obs;
  for (size_t i = 0; i < spec.primitives.size(); ++i) {
    LabeledCloud c = sample_primitive(spec.primitives[i], spec.points_per_primitive,
                                      mix(spec.cloud_seed, i));
    obs.points.insert(obs.points.end(), c.points.begin(), c.points.end());
    obs.labels.insert(obs.labels.end(), c.labels.begin(), c.labels.end());
  }

  // Skill waypoints are replayed verbatim, so an obstacle near them cannot be
  // avoided; refuse instead of emitting a colliding demo.
  const double plan_clear = spec.clearance + kClearanceMargin;
  for (size_t a = 0; a < seg.per_arm.size(); ++a)
    for (const Segment& s : seg.per_arm[a]) {
      if (s.kind != SegmentKind::Skill || s.empty()) continue;
      for (int t = s.t_start; t <= s.t_end; ++t)
        for (const Pose* p : {&demo.frames[t].arm_state[a], &demo.frames[t].arm_action[a]})
          for (const auto& prim : spec.primitives)
            if (distance_to(prim, p->position) < plan_clear)
              throw ObstacleBlocksSkillError(
                  "obstacle_augment: primitive within clearance of skill frame " +
                  std::to_string(t) + " (arm " + std::to_string(a) + ")");
    }

  AdaptOptions ao;
  if (!obs.points.empty()) ao.planner.obstacles = obs;
  ao.planner.clearance = plan_clear;
  ao.planner.rng_seed = spec.plan_seed;
  ActionPlan plan = demo.arm_count() > 1
                        ? adapt_bimanual(demo, seg, demo.init_config, ao)
                        : adapt_trajectory(demo, seg, demo.init_config, ao);

  Demonstration out = synthesize_demo(demo, seg, demo.init_config, plan);

  for (auto& f : out.frames) {
    f.cloud.points.insert(f.cloud.points.end(), obs.points.begin(), obs.points.end());
    if (f.cloud.labels.size() + obs.points.size() == f.cloud.points.size())
      f.cloud.labels.insert(f.cloud.labels.end(), obs.labels.begin(), obs.labels.end());
  }

  auto problems = validate(out);
  if (!problems.empty()) throw ValidationError("obstacle_augment: " + problems.front());
  return out;
}

}  // namespace demogen
