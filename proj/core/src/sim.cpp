#include "demogen/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "demogen/errors.hpp"
#include "demogen/planner.hpp"
#include "demogen/segments.hpp"
#include "demogen/serialize.hpp"

namespace demogen {

namespace {

using nlohmann::json;

constexpr double kEntryHeight = 0.085;   // approach pose above an object center
constexpr double kGraspHeight = 0.015;   // descend depth, inside grasp tolerance
constexpr double kPressHeight = 0.015;
constexpr double kPlaceHeight = 0.075;   // hover while releasing into a receptacle
constexpr double kLiftHeight = 0.095;    // still inside the contact sphere
constexpr double kTransferHeight = 0.305;  // exit pose straight above the next object
constexpr double kMaxStep = 0.01;

uint64_t mix(uint64_t seed, uint64_t salt) {
  uint64_t x = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  return x;
}

// ---------------------------------------------------------------- entities

struct Entity {
  Primitive local;            // pose identity; posed per frame
  int32_t label = kLabelEE;
  int object_id = -1;         // >= 0 when posed from WorldState.objects
  int arm = -1, part = -1;    // gripper: 0 palm, 1/2 fingers
  Pose table_pose;            // only for the table entity
  std::vector<Vec3> samples;  // local frame
};

Pose finger_pose(const Pose& ee, double aperture, int side) {
  double x = (0.010 + 0.015 * std::clamp(aperture, 0.0, 1.0)) * (side == 1 ? -1.0 : 1.0);
  return compose(ee, Pose::translation(x, 0.0, 0.03));
}

Pose palm_pose(const Pose& ee) { return compose(ee, Pose::translation(0.0, 0.0, 0.075)); }

Pose entity_pose(const Entity& e, const WorldState& w) {
  if (e.object_id >= 0) return w.objects[e.object_id];
  if (e.arm >= 0) {
    double ap = w.hand[e.arm].empty() ? 1.0 : w.hand[e.arm][0];
    return e.part == 0 ? palm_pose(w.ee[e.arm]) : finger_pose(w.ee[e.arm], ap, e.part);
  }
  return e.table_pose;
}

std::vector<Entity> make_entities(const TaskSpec& task) {
  std::vector<Entity> out;
  Entity table;
  table.local = {Shape::Box, {0.44, 0.44, 0.004}, Pose{}};
  table.label = kLabelBackground;
  table.table_pose = Pose::translation(0.5, 0.0, -0.002);
  out.push_back(table);

  for (size_t k = 0; k < task.objects.size(); ++k) {
    Entity e;
    e.local = {task.objects[k].prim.shape, task.objects[k].prim.size, Pose{}};
    e.label = static_cast<int32_t>(k);
    e.object_id = static_cast<int>(k);
    out.push_back(e);
  }
  int arms = static_cast<int>(task.home.size());
  for (int a = 0; a < arms; ++a) {
    Entity palm;
    palm.local = {Shape::Box, {0.08, 0.06, 0.03}, Pose{}};
    palm.arm = a;
    palm.part = 0;
    out.push_back(palm);
    for (int side = 1; side <= 2; ++side) {
      Entity finger;
      finger.local = {Shape::Box, {0.012, 0.024, 0.06}, Pose{}};
      finger.arm = a;
      finger.part = side;
      out.push_back(finger);
    }
  }
  return out;
}

// Budgets sum exactly to n_points; object samples are recentered so the
// rendered centroid equals the object pose (contact parsing relies on it).
std::vector<Entity> sampled_entities(const TaskSpec& task, int n_points, uint64_t seed) {
  auto entities = make_entities(task);
  std::vector<double> areas;
  for (const auto& e : entities) areas.push_back(surface_area(e.local));
  auto budget = proportional_budgets(areas, n_points);
  for (size_t i = 0; i < entities.size(); ++i) {
    if (budget[i] <= 0) continue;
    entities[i].samples = surface_sample(entities[i].local, budget[i], mix(seed, i));
    if (entities[i].object_id >= 0) {
      Vec3 mean = Vec3::Zero();
      for (const auto& s : entities[i].samples) mean += s;
      mean /= static_cast<double>(entities[i].samples.size());
      for (auto& s : entities[i].samples) s -= mean;
    }
  }
  return entities;
}

LabeledCloud render_frame(const TaskSpec& task, const std::vector<Entity>& entities,
                          const WorldState& state, const Pose& camera, int n_points,
                          bool visibility, double sigma, uint64_t jitter_seed) {
  std::vector<Pose> poses;
  poses.reserve(entities.size());
  for (const auto& e : entities) poses.push_back(entity_pose(e, state));

  std::vector<Primitive> solids;
  if (visibility) {
    for (size_t i = 0; i < entities.size(); ++i) {
      Primitive p = entities[i].local;
      p.pose = poses[i];
      solids.push_back(p);
    }
  }

  std::mt19937_64 rng(jitter_seed);
  std::normal_distribution<double> gauss(0.0, sigma > 0.0 ? sigma : 1.0);
  auto jitter = [&]() {
    if (sigma <= 0.0) return Vec3{0.0, 0.0, 0.0};
    for (;;) {
      Vec3 d{gauss(rng), gauss(rng), gauss(rng)};
      if (d.norm() <= 3.0 * sigma) return d;
    }
  };

  LabeledCloud cloud;
  for (size_t i = 0; i < entities.size(); ++i) {
    for (const auto& s : entities[i].samples) {
      Vec3 p = poses[i].apply(s);
      if (visibility) {
        // cull on the true surface point; jitter models sensor noise only
        bool blocked = false;
        for (const auto& solid : solids)
          if (segment_hits(solid, p, camera.position)) {
            blocked = true;
            break;
          }
        if (blocked) continue;
      }
      cloud.push((p + jitter()).cast<float>(), entities[i].label);
    }
  }
  if (cloud.size() == 0) cloud.push(camera.position.cast<float>(), kLabelEE);
  if (visibility && cloud.size() != n_points)
    cloud = farthest_point_sample(cloud, n_points);
  return cloud;
}

// ---------------------------------------------------------------- stepping

void step_world(const TaskSpec& task, WorldState& w, const std::vector<Pose>& targets,
                const std::vector<double>& grips) {
  int arms = static_cast<int>(w.ee.size());
  for (int a = 0; a < arms; ++a) {
    w.ee[a] = targets[a];
    for (size_t k = 0; k < w.objects.size(); ++k)
      if (w.holder[k] == a) w.objects[k] = compose(w.ee[a], w.grasp_offset[k]);

    double prev = w.hand[a].empty() ? 1.0 : w.hand[a][0];
    double next = grips[a];
    w.hand[a] = {next};
    if (prev >= 0.5 && next < 0.5) {
      int best = -1;
      double best_d = task.grasp_tolerance;
      for (size_t k = 0; k < w.objects.size(); ++k) {
        if (w.holder[k] >= 0 || !task.objects[k].graspable) continue;
        double d = (w.ee[a].position - w.objects[k].position).norm();
        if (d <= best_d) {
          best_d = d;
          best = static_cast<int>(k);
        }
      }
      if (best >= 0) {
        w.holder[best] = a;
        w.grasp_offset[best] = compose(inverse(w.ee[a]), w.objects[best]);
      }
    } else if (prev < 0.5 && next >= 0.5) {
      for (auto& h : w.holder)
        if (h == a) h = -1;
    }
  }
}

bool evaluate_success(const TaskSpec& task, const WorldState& w,
                      const std::vector<TraceRow>& trace) {
  const SuccessSpec& s = task.success;
  if (s.kind == "lifted") return w.objects[s.object].position.z() >= s.value;
  if (s.kind == "all_lifted") {
    for (const auto& seq : task.arm_object_map)
      for (int k : seq)
        if (w.objects[k].position.z() < s.value) return false;
    return true;
  }
  if (s.kind == "planar_offset") {
    Eigen::Vector2d d = w.objects[s.object].position.head<2>() -
                        w.objects[s.reference].position.head<2>();
    return d.norm() <= s.value;
  }
  if (s.kind == "pressed") {
    for (const auto& row : trace)
      for (const auto& ee : row.ee) {
        Eigen::Vector2d d =
            ee.position.head<2>() - row.objects[s.object].position.head<2>();
        if (d.norm() <= s.value && ee.position.z() <= s.z_max) return true;
      }
    return false;
  }
  throw ValidationError("unknown success predicate: " + s.kind);
}

// ---------------------------------------------------------------- scripting

struct ArmScript {
  std::vector<Pose> q;
  std::vector<double> grip;
};

void check_leg(const std::vector<Pose>& path, const Vec3& target_center,
               const std::vector<Vec3>& arm_centers, double threshold) {
  if (path.size() < 3)
    throw ValidationError("scripted leg too short for contact alignment");
  if ((path[path.size() - 2].position - target_center).norm() > threshold)
    throw ValidationError("scripted leg: contact does not flip at the penultimate pose");
  for (size_t i = 0; i + 2 < path.size(); ++i)
    for (const auto& c : arm_centers)
      if ((path[i].position - c).norm() <= threshold)
        throw ValidationError("scripted leg grazes a contact sphere early");
}

void append_leg(ArmScript& s, const Pose& goal) {
  PlanRequest req;
  req.start = s.q.back();
  req.goal = goal;
  req.max_step = kMaxStep;
  auto path = linear_plan(req);
  for (size_t i = 1; i < path.size(); ++i) {
    s.q.push_back(path[i]);
    s.grip.push_back(s.grip.back());
  }
}

void append_approach(ArmScript& s, const Vec3& center, const std::vector<Vec3>& arm_centers,
                     double threshold) {
  PlanRequest req;
  req.start = s.q.back();
  req.goal = Pose{center + Vec3{0.0, 0.0, kEntryHeight}, Quat::Identity()};
  req.max_step = kMaxStep;
  auto path = linear_plan(req);
  check_leg(path, center, arm_centers, threshold);
  for (size_t i = 1; i < path.size(); ++i) {
    s.q.push_back(path[i]);
    s.grip.push_back(s.grip.back());
  }
}

void append_grip(ArmScript& s, double value) {
  for (int i = 0; i < 2; ++i) {
    s.q.push_back(s.q.back());
    s.grip.push_back(value);
  }
}

ArmScript build_script(const TaskSpec& task, const std::vector<Pose>& config, int arm) {
  ArmScript s;
  s.q.push_back(task.home[arm]);
  s.grip.push_back(1.0);

  const auto& seq = task.arm_object_map[arm];
  std::vector<Vec3> arm_centers;
  for (int k : seq) arm_centers.push_back(config[k].position);

  for (size_t i = 0; i < seq.size(); ++i) {
    Vec3 c = config[seq[i]].position;
    append_approach(s, c, arm_centers, task.contact_threshold);
    if (task.script == "press") {
      append_leg(s, Pose{c + Vec3{0.0, 0.0, kPressHeight}, Quat::Identity()});
      append_grip(s, s.grip.back());  // dwell on the button
      append_leg(s, Pose{c + Vec3{0.0, 0.0, kLiftHeight}, Quat::Identity()});
    } else if (task.script == "insert" && i == 1) {
      append_leg(s, Pose{c + Vec3{0.0, 0.0, kPlaceHeight}, Quat::Identity()});
      append_grip(s, 1.0);  // release into the receptacle
    } else {  // grasp and lift
      append_leg(s, Pose{c + Vec3{0.0, 0.0, kGraspHeight}, Quat::Identity()});
      append_grip(s, 0.0);
      append_leg(s, Pose{c + Vec3{0.0, 0.0, kLiftHeight}, Quat::Identity()});
    }
    if (i + 1 < seq.size()) {
      Vec3 next = config[seq[i + 1]].position;
      s.q.push_back(Pose{next + Vec3{0.0, 0.0, kTransferHeight}, Quat::Identity()});
      s.grip.push_back(s.grip.back());
    }
  }
  return s;
}

std::vector<Eigen::Vector2d> rect_polygon(double x0, double x1, double y0, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

TaskSpec task_base(const std::string& name) {
  TaskSpec t;
  t.name = name;
  t.workspace = rect_polygon(0.3, 0.7, -0.2, 0.2);
  t.demo_range = {0.3, 0.7, -0.2, 0.2};
  t.eval_range = {0.32, 0.68, -0.18, 0.18};
  t.home = {Pose::translation(0.5, 0.0, 0.55)};
  t.camera = Pose::translation(1.1, 0.0, 0.75);
  t.arm_object_map = {{0}};
  t.varied = {0};
  return t;
}

}  // namespace

std::vector<std::string> builtin_task_names() {
  return {"pick_cube", "button_press_large", "button_press_small", "peg_insert",
          "two_object_insert", "bimanual_fruit_basket"};
}

TaskSpec builtin_task(const std::string& name) {
  if (name == "pick_cube") {
    TaskSpec t = task_base(name);
    t.script = "pick";
    t.objects = {{"cube", {Shape::Box, {0.04, 0.04, 0.04}, Pose::translation(0.5, 0.0, 0.02)},
                  true}};
    t.success = {"lifted", 0, -1, 0.06, 0.0};
    return t;
  }
  if (name == "button_press_large" || name == "button_press_small") {
    TaskSpec t = task_base(name);
    t.script = "press";
    double r = name == "button_press_large" ? 0.04 : 0.01;
    t.objects = {{"button", {Shape::Cylinder, {r, 0.0, 0.02}, Pose::translation(0.5, 0.0, 0.01)},
                  false}};
    t.success = {"pressed", 0, -1, r, 0.045};
    return t;
  }
  if (name == "peg_insert") {
    TaskSpec t = task_base(name);
    t.script = "insert";
    t.objects = {{"peg", {Shape::Cylinder, {0.015, 0.0, 0.06}, Pose::translation(0.44, 0.10, 0.03)},
                  true},
                 {"socket", {Shape::Box, {0.06, 0.06, 0.03}, Pose::translation(0.58, -0.08, 0.015)},
                  false}};
    t.success = {"planar_offset", 0, 1, 0.01, 0.0};
    t.arm_object_map = {{0, 1}};
    t.varied = {0, 1};
    return t;
  }
  if (name == "two_object_insert") {
    TaskSpec t = task_base(name);
    t.script = "insert";
    t.objects = {{"flower", {Shape::Cylinder, {0.012, 0.0, 0.08}, Pose::translation(0.44, 0.12, 0.04)},
                  true},
                 {"vase", {Shape::Cylinder, {0.045, 0.0, 0.08}, Pose::translation(0.58, -0.06, 0.04)},
                  false}};
    t.success = {"planar_offset", 0, 1, 0.02, 0.0};
    t.arm_object_map = {{0, 1}};
    t.varied = {0, 1};
    return t;
  }
  if (name == "bimanual_fruit_basket") {
    TaskSpec t = task_base(name);
    t.script = "bimanual_pick";
    t.objects = {{"fruit_0", {Shape::Sphere, {0.025, 0.0, 0.0}, Pose::translation(0.46, 0.12, 0.025)},
                  true},
                 {"fruit_1", {Shape::Sphere, {0.025, 0.0, 0.0}, Pose::translation(0.46, -0.12, 0.025)},
                  true},
                 {"basket", {Shape::Box, {0.12, 0.12, 0.04}, Pose::translation(0.64, 0.0, 0.02)},
                  false}};
    t.success = {"all_lifted", 0, -1, 0.06, 0.0};
    t.home = {Pose::translation(0.46, 0.12, 0.55), Pose::translation(0.46, -0.12, 0.55)};
    t.arm_object_map = {{0}, {1}};
    t.varied = {0, 1};
    return t;
  }
  throw ValidationError("unknown task: " + name);
}

Pose birdseye_camera() { return Pose::translation(0.5, 0.0, 1.2); }

WorldState initial_state(const TaskSpec& task, const std::vector<Pose>& config) {
  if (config.size() != task.objects.size())
    throw ValidationError("config has " + std::to_string(config.size()) + " poses, task has " +
                          std::to_string(task.objects.size()) + " objects");
  WorldState w;
  w.objects = config;
  w.ee = task.home;
  w.hand.assign(task.home.size(), {1.0});
  w.holder.assign(config.size(), -1);
  w.grasp_offset.assign(config.size(), Pose{});
  return w;
}

LabeledCloud render_cloud(const TaskSpec& task, const WorldState& state, const Pose& camera,
                          int n_points, bool visibility, uint64_t noise_seed) {
  if (n_points < 1) throw ValidationError("render_cloud: n_points must be >= 1");
  auto entities = sampled_entities(task, n_points, noise_seed);
  double sigma = noise_seed != 0 ? task.noise_sigma : 0.0;
  return render_frame(task, entities, state, camera, n_points, visibility, sigma,
                      mix(noise_seed, 0x7e47));
}

Demonstration scripted_demo(const TaskSpec& task, const std::vector<Pose>& config,
                            uint64_t noise_seed) {
  for (int k : task.varied) {
    const Vec3& p = config.at(k).position;
    if (!task.demo_range.contains(p.x(), p.y()))
      throw UnreachableTargetError(task.objects[k].name + " at (" + std::to_string(p.x()) +
                                   ", " + std::to_string(p.y()) + ") is outside the demo range");
  }

  int arms = static_cast<int>(task.home.size());
  std::vector<ArmScript> scripts;
  int L = 0;
  for (int a = 0; a < arms; ++a) {
    scripts.push_back(build_script(task, config, a));
    L = std::max(L, static_cast<int>(scripts.back().q.size()));
  }
  for (auto& s : scripts)
    while (static_cast<int>(s.q.size()) < L) {
      s.q.push_back(s.q.back());
      s.grip.push_back(s.grip.back());
    }

  auto entities = sampled_entities(task, task.n_points, noise_seed);
  double sigma = noise_seed != 0 ? task.noise_sigma : 0.0;

  WorldState w = initial_state(task, config);
  Demonstration demo;
  demo.task = task.name;
  demo.init_config = config;
  for (const auto& o : task.objects) demo.object_names.push_back(o.name);
  demo.camera_pose = task.camera;
  demo.arm_object_map = task.arm_object_map;

  for (int t = 0; t < L; ++t) {
    if (t > 0) {
      std::vector<Pose> targets;
      std::vector<double> grips;
      for (int a = 0; a < arms; ++a) {
        targets.push_back(scripts[a].q[t]);
        grips.push_back(scripts[a].grip[t]);
      }
      step_world(task, w, targets, grips);
    }
    Frame fr;
    fr.cloud = render_frame(task, entities, w, task.camera, task.n_points, false, sigma,
                            mix(noise_seed, 0x10000 + t));
    for (int a = 0; a < arms; ++a) {
      int next = std::min(t + 1, L - 1);
      fr.arm_state.push_back(scripts[a].q[t]);
      fr.arm_action.push_back(scripts[a].q[next]);
      fr.hand_state.push_back({scripts[a].grip[t]});
      fr.hand_action.push_back({scripts[a].grip[next]});
    }
    demo.frames.push_back(std::move(fr));
  }

  demo.segment_index = parse(demo, ParseOptions{task.contact_threshold});
  return demo;
}

Outcome execute_plan(const TaskSpec& task, const std::vector<Pose>& config,
                     const ActionPlan& plan) {
  Outcome out;
  WorldState w = initial_state(task, config);
  int arms = static_cast<int>(task.home.size());
  if (static_cast<int>(plan.arms.size()) != arms)
    throw ValidationError("plan has " + std::to_string(plan.arms.size()) + " arms, task has " +
                          std::to_string(arms));

  for (int t = 0; t < plan.length(); ++t) {
    std::vector<Pose> targets;
    std::vector<double> grips;
    for (int a = 0; a < arms; ++a) {
      const ArmPlan& ap = plan.arms[a];
      int ta = std::min(t, ap.length() - 1);
      targets.push_back(ap.arm_actions[ta]);
      grips.push_back(ap.hand_actions[ta].empty() ? 1.0 : ap.hand_actions[ta][0]);
    }
    step_world(task, w, targets, grips);

    TraceRow row;
    row.frame = t;
    row.ee = w.ee;
    row.objects = w.objects;
    for (int h : w.holder) row.attached.push_back(h >= 0 ? 1 : 0);
    out.trace.push_back(std::move(row));
  }
  out.final_state = w;
  out.success = evaluate_success(task, w, out.trace);
  return out;
}

void write_trace_csv(const Outcome& outcome, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  if (outcome.trace.empty()) {
    f << "frame\n";
    return;
  }
  const auto& first = outcome.trace.front();
  f << "frame";
  for (size_t a = 0; a < first.ee.size(); ++a)
    f << ",ee" << a << "_x,ee" << a << "_y,ee" << a << "_z,ee" << a << "_qw,ee" << a
      << "_qx,ee" << a << "_qy,ee" << a << "_qz";
  for (size_t k = 0; k < first.objects.size(); ++k)
    f << ",obj" << k << "_x,obj" << k << "_y,obj" << k << "_z,obj" << k << "_qw,obj" << k
      << "_qx,obj" << k << "_qy,obj" << k << "_qz,obj" << k << "_held";
  f << "\n";
  f.precision(17);
  for (const auto& row : outcome.trace) {
    f << row.frame;
    for (const auto& p : row.ee) {
      auto v = p.flat();
      for (double x : v) f << "," << x;
    }
    for (size_t k = 0; k < row.objects.size(); ++k) {
      auto v = row.objects[k].flat();
      for (double x : v) f << "," << x;
      f << "," << static_cast<int>(row.attached[k]);
    }
    f << "\n";
  }
}

void write_task(const TaskSpec& task, const std::filesystem::path& path) {
  json j;
  j["name"] = task.name;
  j["script"] = task.script;
  j["n_points"] = task.n_points;
  j["noise_sigma"] = task.noise_sigma;
  j["contact_threshold"] = task.contact_threshold;
  j["grasp_tolerance"] = task.grasp_tolerance;
  j["objects"] = json::array();
  for (const auto& o : task.objects) {
    json jo;
    jo["name"] = o.name;
    jo["shape"] = shape_name(o.prim.shape);
    jo["size"] = {o.prim.size.x(), o.prim.size.y(), o.prim.size.z()};
    jo["pose"] = pose_json(o.prim.pose);
    jo["graspable"] = o.graspable;
    j["objects"].push_back(jo);
  }
  j["success"] = {{"kind", task.success.kind},
                  {"object", task.success.object},
                  {"reference", task.success.reference},
                  {"value", task.success.value},
                  {"z_max", task.success.z_max}};
  j["workspace"] = json::array();
  for (const auto& v : task.workspace) j["workspace"].push_back({v.x(), v.y()});
  j["demo_range"] = {task.demo_range.x_lo, task.demo_range.x_hi, task.demo_range.y_lo,
                     task.demo_range.y_hi};
  j["eval_range"] = {task.eval_range.x_lo, task.eval_range.x_hi, task.eval_range.y_lo,
                     task.eval_range.y_hi};
  j["varied"] = task.varied;
  j["arm_object_map"] = task.arm_object_map;
  j["home"] = json::array();
  for (const auto& h : task.home) j["home"].push_back(pose_json(h));
  j["camera"] = pose_json(task.camera);

  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f << j.dump(2) << "\n";
}

TaskSpec read_task(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read " + path.string());
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  try {
    TaskSpec t;
    t.name = j.at("name").get<std::string>();
    t.script = j.at("script").get<std::string>();
    t.n_points = j.at("n_points").get<int>();
    t.noise_sigma = j.at("noise_sigma").get<double>();
    t.contact_threshold = j.at("contact_threshold").get<double>();
    t.grasp_tolerance = j.at("grasp_tolerance").get<double>();
    for (const auto& jo : j.at("objects")) {
      ObjectSpec o;
      o.name = jo.at("name").get<std::string>();
      o.prim.shape = name_shape(jo.at("shape").get<std::string>());
      auto sz = jo.at("size").get<std::vector<double>>();
      if (sz.size() != 3) throw FormatError("size needs 3 numbers");
      o.prim.size = {sz[0], sz[1], sz[2]};
      o.prim.pose = json_pose(jo.at("pose"));
      o.graspable = jo.at("graspable").get<bool>();
      t.objects.push_back(o);
    }
    const auto& js = j.at("success");
    t.success = {js.at("kind").get<std::string>(), js.at("object").get<int>(),
                 js.at("reference").get<int>(), js.at("value").get<double>(),
                 js.at("z_max").get<double>()};
    for (const auto& jv : j.at("workspace")) {
      auto v = jv.get<std::vector<double>>();
      if (v.size() != 2) throw FormatError("workspace vertices are 2d");
      t.workspace.push_back({v[0], v[1]});
    }
    auto dr = j.at("demo_range").get<std::vector<double>>();
    auto er = j.at("eval_range").get<std::vector<double>>();
    if (dr.size() != 4 || er.size() != 4) throw FormatError("ranges need 4 numbers");
    t.demo_range = {dr[0], dr[1], dr[2], dr[3]};
    t.eval_range = {er[0], er[1], er[2], er[3]};
    t.varied = j.at("varied").get<std::vector<int>>();
    t.arm_object_map = j.at("arm_object_map").get<std::vector<std::vector<int>>>();
    for (const auto& jh : j.at("home")) t.home.push_back(json_pose(jh));
    t.camera = json_pose(j.at("camera"));
    return t;
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace demogen
