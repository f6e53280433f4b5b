#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

namespace demogen {

/// Static 3-d KD-tree over float32 points. Median split on the widest axis,
/// leaves of a few points; exact queries (distances compared in double, so
/// results match a brute-force scan bit for bit).
class KdTree3 {
 public:
  KdTree3() = default;

  explicit KdTree3(std::vector<Eigen::Vector3f> pts) : pts_(std::move(pts)) {
    order_.resize(pts_.size());
    std::iota(order_.begin(), order_.end(), 0);
    if (!pts_.empty()) {
      nodes_.reserve(2 * pts_.size() / kLeaf + 2);
      root_ = build(0, static_cast<int>(pts_.size()));
    }
  }

  int size() const { return static_cast<int>(pts_.size()); }
  const std::vector<Eigen::Vector3f>& points() const { return pts_; }

  /// Index of the nearest point; ties by lowest index. -1 on an empty tree.
  int nearest(const Eigen::Vector3f& q, double* sq_out = nullptr) const {
    int best = -1;
    double best_sq = std::numeric_limits<double>::infinity();
    if (root_ >= 0) search_nearest(root_, q, best, best_sq);
    if (sq_out) *sq_out = best_sq;
    return best;
  }

  double nearest_sq(const Eigen::Vector3f& q) const {
    double sq;
    nearest(q, &sq);
    return sq;
  }

  /// All indices with distance <= r, ascending.
  std::vector<int> radius(const Eigen::Vector3f& q, double r) const {
    std::vector<int> out;
    if (root_ >= 0) search_radius(root_, q, r * r, out);
    std::sort(out.begin(), out.end());
    return out;
  }

  bool any_within(const Eigen::Vector3f& q, double r) const {
    return root_ >= 0 && probe(root_, q, r * r);
  }

 private:
  static constexpr int kLeaf = 8;

  struct Node {
    float lo[3], hi[3];  // bounding box
    int left = -1, right = -1;
    int begin = 0, end = 0;  // leaf range into order_
  };

  static double sq_dist(const Eigen::Vector3f& a, const Eigen::Vector3f& b) {
    double dx = static_cast<double>(a.x()) - b.x();
    double dy = static_cast<double>(a.y()) - b.y();
    double dz = static_cast<double>(a.z()) - b.z();
    return dx * dx + dy * dy + dz * dz;
  }

  double box_sq(const Node& n, const Eigen::Vector3f& q) const {
    double s = 0.0;
    for (int a = 0; a < 3; ++a) {
      double d = 0.0;
      if (q[a] < n.lo[a]) d = static_cast<double>(n.lo[a]) - q[a];
      else if (q[a] > n.hi[a]) d = static_cast<double>(q[a]) - n.hi[a];
      s += d * d;
    }
    return s;
  }

  int build(int begin, int end) {
    Node n;
    for (int a = 0; a < 3; ++a) {
      n.lo[a] = std::numeric_limits<float>::max();
      n.hi[a] = std::numeric_limits<float>::lowest();
    }
    for (int i = begin; i < end; ++i) {
      const auto& p = pts_[order_[i]];
      for (int a = 0; a < 3; ++a) {
        n.lo[a] = std::min(n.lo[a], p[a]);
        n.hi[a] = std::max(n.hi[a], p[a]);
      }
    }
    if (end - begin <= kLeaf) {
      n.begin = begin;
      n.end = end;
      nodes_.push_back(n);
      return static_cast<int>(nodes_.size()) - 1;
    }
    int axis = 0;
    float extent = n.hi[0] - n.lo[0];
    for (int a = 1; a < 3; ++a) {
      if (n.hi[a] - n.lo[a] > extent) {
        extent = n.hi[a] - n.lo[a];
        axis = a;
      }
    }
    int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int i, int j) { return pts_[i][axis] < pts_[j][axis]; });
    int self = static_cast<int>(nodes_.size());
    nodes_.push_back(n);
    int l = build(begin, mid);
    int r = build(mid, end);
    nodes_[self].left = l;
    nodes_[self].right = r;
    return self;
  }

  void search_nearest(int ni, const Eigen::Vector3f& q, int& best, double& best_sq) const {
    const Node& n = nodes_[ni];
    if (box_sq(n, q) > best_sq) return;
    if (n.left < 0) {
      for (int i = n.begin; i < n.end; ++i) {
        int idx = order_[i];
        double sq = sq_dist(pts_[idx], q);
        if (sq < best_sq || (sq == best_sq && idx < best)) {
          best_sq = sq;
          best = idx;
        }
      }
      return;
    }
    double dl = box_sq(nodes_[n.left], q);
    double dr = box_sq(nodes_[n.right], q);
    if (dl <= dr) {
      search_nearest(n.left, q, best, best_sq);
      if (dr <= best_sq) search_nearest(n.right, q, best, best_sq);
    } else {
      search_nearest(n.right, q, best, best_sq);
      if (dl <= best_sq) search_nearest(n.left, q, best, best_sq);
    }
  }

  void search_radius(int ni, const Eigen::Vector3f& q, double r_sq,
                     std::vector<int>& out) const {
    const Node& n = nodes_[ni];
    if (box_sq(n, q) > r_sq) return;
    if (n.left < 0) {
      for (int i = n.begin; i < n.end; ++i) {
        int idx = order_[i];
        if (sq_dist(pts_[idx], q) <= r_sq) out.push_back(idx);
      }
      return;
    }
    search_radius(n.left, q, r_sq, out);
    search_radius(n.right, q, r_sq, out);
  }

  bool probe(int ni, const Eigen::Vector3f& q, double r_sq) const {
    const Node& n = nodes_[ni];
    if (box_sq(n, q) > r_sq) return false;
    if (n.left < 0) {
      for (int i = n.begin; i < n.end; ++i)
        if (sq_dist(pts_[order_[i]], q) <= r_sq) return true;
      return false;
    }
    return probe(n.left, q, r_sq) || probe(n.right, q, r_sq);
  }

  std::vector<Eigen::Vector3f> pts_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace demogen
