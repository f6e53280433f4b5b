#include "demogen/planner.hpp"

#include <cmath>
#include <random>

#include "demogen/errors.hpp"
#include "demogen/kdtree.hpp"

namespace demogen {

namespace {

// Spacing of collision probes along an edge. Fine enough that any point of
// the segment is within half a millimeter of a probe, which keeps densely
// re-sampled paths clear at clearance minus one millimeter.
constexpr double kEdgeProbe = 0.001;

bool point_free(const KdTree3& tree, const Vec3& p, double clearance) {
  if (tree.size() == 0) return true;
  return tree.nearest_sq(p.cast<float>()) >= clearance * clearance;
}

bool edge_free(const KdTree3& tree, const Vec3& a, const Vec3& b, double clearance) {
  double len = (b - a).norm();
  int n = std::max(1, static_cast<int>(std::ceil(len / kEdgeProbe)));
  for (int i = 0; i <= n; ++i) {
    double t = static_cast<double>(i) / n;
    if (!point_free(tree, a + t * (b - a), clearance)) return false;
  }
  return true;
}

// Turns a polyline of positions into a pose sequence: positions piecewise
// linear, orientation slerped by cumulative arc length, both step limits
// respected. Endpoints are the exact request poses.
std::vector<Pose> discretize(const std::vector<Vec3>& way, const PlanRequest& req) {
  const double total_angle = angle_between(req.start, req.goal);
  std::vector<double> cum{0.0};
  for (size_t i = 1; i < way.size(); ++i)
    cum.push_back(cum.back() + (way[i] - way[i - 1]).norm());
  const double total = cum.back();

  if (total == 0.0 && total_angle == 0.0) return {req.start};

  std::vector<Pose> out{req.start};
  for (size_t e = 1; e < way.size(); ++e) {
    double len = cum[e] - cum[e - 1];
    double ang = total > 0.0 ? total_angle * len / total
                             : total_angle / static_cast<double>(way.size() - 1);
    int steps = std::max<int>(1, static_cast<int>(std::ceil(len / req.max_step)));
    if (req.max_angle_step > 0.0)
      steps = std::max<int>(steps, static_cast<int>(std::ceil(ang / req.max_angle_step)));
    for (int i = 1; i <= steps; ++i) {
      double t = static_cast<double>(i) / steps;
      Pose p;
      p.position = (1.0 - t) * way[e - 1] + t * way[e];
      double s = total > 0.0 ? (cum[e - 1] + t * len) / total
                             : (static_cast<double>(e - 1) + t) / (way.size() - 1);
      p.orientation = interpolate(req.start, req.goal, s).orientation;
      out.push_back(p);
    }
  }
  out.back() = req.goal;  // exact endpoint
  return out;
}

}  // namespace

bool collision_free(const Vec3& position, const LabeledCloud& obstacles, double clearance) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& q : obstacles.points) {
    double dx = position.x() - q.x(), dy = position.y() - q.y(), dz = position.z() - q.z();
    best = std::min(best, dx * dx + dy * dy + dz * dz);
  }
  return obstacles.points.empty() || best >= clearance * clearance;
}

double path_length(const std::vector<Pose>& path) {
  double len = 0.0;
  for (size_t i = 1; i < path.size(); ++i)
    len += (path[i].position - path[i - 1].position).norm();
  return len;
}

std::vector<Pose> linear_plan(const PlanRequest& req) {
  if (req.max_step <= 0.0) throw ValidationError("linear_plan: max_step must be positive");
  if (req.start == req.goal) return {req.start};
  return discretize({req.start.position, req.goal.position}, req);
}

std::vector<Pose> rrt_plan(const PlanRequest& req, PlanStats* stats) {
  if (req.max_step <= 0.0) throw ValidationError("rrt_plan: max_step must be positive");
  if (!req.obstacles || req.obstacles->size() == 0) return linear_plan(req);

  KdTree3 tree(req.obstacles->points);
  const double clearance = req.clearance;
  if (!point_free(tree, req.start.position, clearance) ||
      !point_free(tree, req.goal.position, clearance))
    throw StartOrGoalInCollisionError("rrt_plan: an endpoint violates clearance " +
                                      std::to_string(clearance));

  std::mt19937_64 rng(req.rng_seed);
  std::vector<Vec3> way;

  if (req.start == req.goal) {
    way = {req.start.position};
    return {req.start};
  } else if (edge_free(tree, req.start.position, req.goal.position, clearance)) {
    way = {req.start.position, req.goal.position};
  } else {
    // Sampling box: everything relevant plus room to maneuver around it.
    Vec3 lo = req.start.position.cwiseMin(req.goal.position);
    Vec3 hi = req.start.position.cwiseMax(req.goal.position);
    for (const auto& p : req.obstacles->points) {
      lo = lo.cwiseMin(p.cast<double>());
      hi = hi.cwiseMax(p.cast<double>());
    }
    const double margin = std::max(0.3, 4.0 * clearance);
    lo.array() -= margin;
    hi.array() += margin;

    struct Node {
      Vec3 p;
      int parent;
    };
    std::vector<Node> ta{{req.start.position, -1}}, tb{{req.goal.position, -1}};
    bool a_is_start = true;
    const double step = std::max(0.05, clearance);
    std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y()),
        uz(lo.z(), hi.z());

    auto nearest_node = [](const std::vector<Node>& t, const Vec3& q) {
      int best = 0;
      double best_sq = (t[0].p - q).squaredNorm();
      for (int i = 1; i < static_cast<int>(t.size()); ++i) {
        double sq = (t[i].p - q).squaredNorm();
        if (sq < best_sq) {
          best_sq = sq;
          best = i;
        }
      }
      return best;
    };
    // Greedy extend toward q; returns the index of the last node added, or -1.
    auto connect = [&](std::vector<Node>& t, const Vec3& q) {
      int cur = nearest_node(t, q);
      int added = -1;
      for (;;) {
        Vec3 from = t[cur].p;
        Vec3 to = q;
        double d = (to - from).norm();
        if (d > step) to = from + (to - from) * (step / d);
        if (!edge_free(tree, from, to, clearance)) return added;
        t.push_back({to, cur});
        cur = static_cast<int>(t.size()) - 1;
        added = cur;
        if (d <= step) return added;  // reached q itself
      }
    };

    int ia = -1, ib = -1;
    int it = 0;
    for (; it < req.max_iterations; ++it) {
      Vec3 q{ux(rng), uy(rng), uz(rng)};
      int na = connect(ta, q);
      if (na >= 0) {
        int nb = connect(tb, ta[na].p);
        if (nb >= 0 && (tb[nb].p - ta[na].p).norm() < 1e-12) {
          ia = na;
          ib = nb;
          break;
        }
      }
      std::swap(ta, tb);
      a_is_start = !a_is_start;
    }
    if (stats) stats->iterations = it;
    if (ia < 0)
      throw PlanningFailedError("rrt_plan: no path after " +
                                std::to_string(req.max_iterations) + " iterations");

    std::vector<Vec3> from_a, from_b;
    for (int i = ia; i >= 0; i = ta[i].parent) from_a.push_back(ta[i].p);
    for (int i = ib; i >= 0; i = tb[i].parent) from_b.push_back(tb[i].p);
    std::reverse(from_a.begin(), from_a.end());
    // from_a runs root(a)->meet, from_b runs meet->root(b); drop duplicate meet.
    way = from_a;
    way.insert(way.end(), from_b.begin() + 1, from_b.end());
    if (!a_is_start) std::reverse(way.begin(), way.end());
  }

  auto polyline_length = [](const std::vector<Vec3>& w) {
    double len = 0.0;
    for (size_t i = 1; i < w.size(); ++i) len += (w[i] - w[i - 1]).norm();
    return len;
  };
  if (stats) stats->raw_length = polyline_length(way);

  // Shortcut smoothing: seeded random attempts to splice out detours.
  if (way.size() > 2) {
    std::mt19937_64 srng(req.rng_seed ^ 0x9e3779b97f4a7c15ull);
    for (int attempt = 0; attempt < 100; ++attempt) {
      if (way.size() <= 2) break;
      std::uniform_int_distribution<size_t> pick(0, way.size() - 1);
      size_t i = pick(srng), j = pick(srng);
      if (i > j) std::swap(i, j);
      if (j - i < 2) continue;
      if (edge_free(tree, way[i], way[j], clearance))
        way.erase(way.begin() + i + 1, way.begin() + j);
    }
  }
  if (stats) stats->smoothed_length = polyline_length(way);

  return discretize(way, req);
}

}  // namespace demogen
