#include "demogen/cloud.hpp"

#include <cmath>
#include <fstream>

#include "demogen/errors.hpp"
#include "demogen/kdtree.hpp"

namespace demogen {

void LabeledCloud::append(const LabeledCloud& other) {
  bool keep_colors = (points.empty() || has_colors()) && other.has_colors();
  keep_colors = keep_colors || (other.points.empty() && has_colors());
  points.insert(points.end(), other.points.begin(), other.points.end());
  labels.insert(labels.end(), other.labels.begin(), other.labels.end());
  if (keep_colors) {
    colors.insert(colors.end(), other.colors.begin(), other.colors.end());
  } else {
    colors.clear();
  }
}

void LabeledCloud::check() const {
  if (labels.size() != points.size())
    throw ValidationError("cloud: " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(points.size()) + " points");
  if (!colors.empty() && colors.size() != points.size())
    throw ValidationError("cloud: color count mismatch");
}

namespace {

LabeledCloud take(const LabeledCloud& cloud, const std::vector<int>& idx) {
  LabeledCloud out;
  out.points.reserve(idx.size());
  out.labels.reserve(idx.size());
  if (cloud.has_colors()) out.colors.reserve(idx.size());
  for (int i : idx) {
    out.points.push_back(cloud.points[i]);
    out.labels.push_back(cloud.labels[i]);
    if (cloud.has_colors()) out.colors.push_back(cloud.colors[i]);
  }
  return out;
}

}  // namespace

LabeledCloud crop(const LabeledCloud& cloud, const CropBox& box) {
  cloud.check();
  if (!(box.lo.x() < box.hi.x() && box.lo.y() < box.hi.y() && box.lo.z() < box.hi.z()))
    throw ValidationError("crop: box min must be below max on every axis");
  std::vector<int> keep;
  for (int i = 0; i < cloud.size(); ++i)
    if (box.contains(cloud.points[i])) keep.push_back(i);
  if (keep.empty()) throw EmptyCloudError("crop: no points inside box");
  return take(cloud, keep);
}

LabeledCloud cluster_filter(const LabeledCloud& cloud, double eps, int min_pts) {
  cloud.check();
  if (eps <= 0.0) throw ValidationError("cluster_filter: eps must be positive");
  if (min_pts < 1) throw ValidationError("cluster_filter: min_pts must be >= 1");
  const int n = cloud.size();
  if (n == 0) throw EmptyCloudError("cluster_filter: empty input");

  KdTree3 tree(cloud.points);
  std::vector<std::vector<int>> nbrs(n);
  std::vector<char> core(n, 0);
  for (int i = 0; i < n; ++i) {
    nbrs[i] = tree.radius(cloud.points[i], eps);  // includes i itself
    core[i] = static_cast<int>(nbrs[i].size()) >= min_pts;
  }
  // Noise = not core and not within eps of any core (never density-reachable).
  std::vector<int> keep;
  for (int i = 0; i < n; ++i) {
    bool reachable = core[i];
    if (!reachable)
      for (int j : nbrs[i])
        if (core[j]) {
          reachable = true;
          break;
        }
    if (reachable) keep.push_back(i);
  }
  if (keep.empty()) throw EmptyCloudError("cluster_filter: every point classified as noise");
  return take(cloud, keep);
}

LabeledCloud farthest_point_sample(const LabeledCloud& cloud, int k, int seed_index) {
  cloud.check();
  const int n = cloud.size();
  if (n == 0) throw EmptyCloudError("farthest_point_sample: empty input");
  if (k < 1) throw ValidationError("farthest_point_sample: k must be >= 1");
  if (seed_index < 0 || seed_index >= n)
    throw ValidationError("farthest_point_sample: seed index out of range");

  const int m = std::min(k, n);
  std::vector<int> picked;
  picked.reserve(k);
  picked.push_back(seed_index);
  std::vector<float> min_sq(n, std::numeric_limits<float>::max());
  int last = seed_index;
  while (static_cast<int>(picked.size()) < m) {
    const Eigen::Vector3f& lp = cloud.points[last];
    int best = -1;
    float best_sq = -1.0f;
    for (int i = 0; i < n; ++i) {
      float sq = (cloud.points[i] - lp).squaredNorm();
      if (sq < min_sq[i]) min_sq[i] = sq;
      if (min_sq[i] > best_sq) {  // strict: ties keep the lowest index
        best_sq = min_sq[i];
        best = i;
      }
    }
    picked.push_back(best);
    last = best;
  }
  for (int i = 0; static_cast<int>(picked.size()) < k; ++i) picked.push_back(picked[i % m]);
  return take(cloud, picked);
}

LabeledCloud transform_labeled(const LabeledCloud& cloud, const ConfigDelta& deltas,
                               const Pose& ee_delta) {
  cloud.check();
  LabeledCloud out = cloud;
  const Pose id;
  for (int i = 0; i < out.size(); ++i) {
    int32_t label = out.labels[i];
    const Pose* d = nullptr;
    if (label >= 0) d = &deltas.of(label);  // throws MissingDelta past the end
    else if (label == kLabelEE) d = &ee_delta;
    else continue;  // background / obstacle points are static
    if (*d == id) continue;  // bitwise no-op for identity deltas
    Vec3 p = d->apply(out.points[i].cast<double>());
    out.points[i] = p.cast<float>();
  }
  return out;
}

namespace {

double directed_mean(const LabeledCloud& from, const KdTree3& to_tree) {
  double sum = 0.0;
  for (const auto& p : from.points) sum += std::sqrt(to_tree.nearest_sq(p));
  return sum / from.size();
}

}  // namespace

double chamfer(const LabeledCloud& a, const LabeledCloud& b) {
  a.check();
  b.check();
  if (a.size() == 0 || b.size() == 0) throw EmptyCloudError("chamfer: empty cloud");
  KdTree3 ta(a.points), tb(b.points);
  return 0.5 * (directed_mean(a, tb) + directed_mean(b, ta));
}

LabeledCloud subtract_by_proximity(const LabeledCloud& scene, const LabeledCloud& reference,
                                   double radius) {
  scene.check();
  reference.check();
  if (radius <= 0.0) throw ValidationError("subtract_by_proximity: radius must be positive");
  if (reference.size() == 0) return scene;
  KdTree3 tree(reference.points);
  std::vector<int> keep;
  for (int i = 0; i < scene.size(); ++i)
    if (!tree.any_within(scene.points[i], radius)) keep.push_back(i);
  return take(scene, keep);
}

void write_ply(const LabeledCloud& cloud, const std::string& path) {
  cloud.check();
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path);
  f << "ply\nformat ascii 1.0\nelement vertex " << cloud.size() << "\n"
    << "property float x\nproperty float y\nproperty float z\n"
    << "property int label\n";
  if (cloud.has_colors())
    f << "property float red\nproperty float green\nproperty float blue\n";
  f << "end_header\n";
  for (int i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.points[i];
    f << p.x() << " " << p.y() << " " << p.z() << " " << cloud.labels[i];
    if (cloud.has_colors()) {
      const auto& c = cloud.colors[i];
      f << " " << c.x() << " " << c.y() << " " << c.z();
    }
    f << "\n";
  }
  if (!f) throw IoError("short write to " + path);
}

}  // namespace demogen
