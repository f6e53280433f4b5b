#include "demogen/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "demogen/errors.hpp"

namespace demogen {

namespace {

constexpr double kPi = 3.14159265358979323846;

// One parametric patch of a primitive's surface.
struct Face {
  double area;
  Vec3 (*map)(const Primitive&, double, double);
};

Vec3 box_face(const Primitive& pr, int axis, int side, double u, double v) {
  Vec3 h = pr.size * 0.5;
  Vec3 p;
  p[axis] = side ? h[axis] : -h[axis];
  int a = (axis + 1) % 3, b = (axis + 2) % 3;
  p[a] = (u * 2.0 - 1.0) * h[a];
  p[b] = (v * 2.0 - 1.0) * h[b];
  return p;
}

template <int Axis, int Side>
Vec3 box_face_t(const Primitive& pr, double u, double v) {
  return box_face(pr, Axis, Side, u, v);
}

Vec3 disk_point(double radius, double z, double u, double v) {
  double r = radius * std::sqrt(u);
  double th = 2.0 * kPi * v;
  return {r * std::cos(th), r * std::sin(th), z};
}

Vec3 cyl_side(const Primitive& pr, double u, double v) {
  double th = 2.0 * kPi * u;
  double z = (v - 0.5) * pr.size.z();
  return {pr.size.x() * std::cos(th), pr.size.x() * std::sin(th), z};
}
Vec3 cyl_top(const Primitive& pr, double u, double v) {
  return disk_point(pr.size.x(), 0.5 * pr.size.z(), u, v);
}
Vec3 cyl_bottom(const Primitive& pr, double u, double v) {
  return disk_point(pr.size.x(), -0.5 * pr.size.z(), u, v);
}

Vec3 cone_side(const Primitive& pr, double u, double v) {
  double s = std::sqrt(u);  // 0 apex, 1 base rim; area grows with s
  double th = 2.0 * kPi * v;
  double r = pr.size.x() * s;
  double z = 0.5 * pr.size.z() - s * pr.size.z();
  return {r * std::cos(th), r * std::sin(th), z};
}
Vec3 cone_base(const Primitive& pr, double u, double v) {
  return disk_point(pr.size.x(), -0.5 * pr.size.z(), u, v);
}

Vec3 sphere_face(const Primitive& pr, double u, double v) {
  double z = 1.0 - 2.0 * u;  // equal-area bands
  double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  double th = 2.0 * kPi * v;
  return Vec3{rho * std::cos(th), rho * std::sin(th), z} * pr.size.x();
}

std::vector<Face> faces_of(const Primitive& pr) {
  double r = pr.size.x(), h = pr.size.z();
  switch (pr.shape) {
    case Shape::Box: {
      Vec3 s = pr.size;
      return {{s.y() * s.z(), &box_face_t<0, 0>}, {s.y() * s.z(), &box_face_t<0, 1>},
              {s.z() * s.x(), &box_face_t<1, 0>}, {s.z() * s.x(), &box_face_t<1, 1>},
              {s.x() * s.y(), &box_face_t<2, 0>}, {s.x() * s.y(), &box_face_t<2, 1>}};
    }
    case Shape::Cylinder:
      return {{2.0 * kPi * r * h, &cyl_side},
              {kPi * r * r, &cyl_top},
              {kPi * r * r, &cyl_bottom}};
    case Shape::Cone:
      return {{kPi * r * std::sqrt(r * r + h * h), &cone_side}, {kPi * r * r, &cone_base}};
    case Shape::Sphere:
      return {{4.0 * kPi * r * r, &sphere_face}};
  }
  return {};
}

}  // namespace

double surface_area(const Primitive& prim) {
  double total = 0.0;
  for (const auto& f : faces_of(prim)) total += f.area;
  return total;
}

std::vector<int> proportional_budgets(const std::vector<double>& weights, int total) {
  int n = static_cast<int>(weights.size());
  std::vector<int> out(n, 0);
  double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (n == 0 || total <= 0 || sum <= 0.0) return out;

  std::vector<double> exact(n), frac(n);
  int used = 0;
  for (int i = 0; i < n; ++i) {
    exact[i] = weights[i] / sum * total;
    out[i] = static_cast<int>(exact[i]);
    frac[i] = exact[i] - out[i];
    used += out[i];
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return frac[a] > frac[b]; });
  for (int i = 0; used < total; i = (i + 1) % n) out[order[i]]++, used++;

  // steal from the largest so every positive weight is represented
  for (int i = 0; i < n; ++i) {
    if (weights[i] <= 0.0 || out[i] > 0) continue;
    int big = static_cast<int>(std::max_element(out.begin(), out.end()) - out.begin());
    if (out[big] > 1) out[big]--, out[i]++;
  }
  return out;
}

std::vector<Vec3> surface_sample(const Primitive& prim, int n, uint64_t seed) {
  if (n < 1) throw ValidationError("surface_sample: n must be >= 1");
  auto faces = faces_of(prim);
  std::vector<double> areas;
  for (const auto& f : faces) areas.push_back(f.area);
  auto budget = proportional_budgets(areas, n);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(0.0, 1.0);
  std::vector<Vec3> out;
  out.reserve(n);
  for (size_t fi = 0; fi < faces.size(); ++fi) {
    int m = budget[fi];
    if (m <= 0) continue;
    int rows = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(m))));
    int cols = (m + rows - 1) / rows;
    for (int k = 0; k < m; ++k) {
      int rr = k / cols, cc = k % cols;
      double u = (cc + jitter(rng)) / cols;
      double v = (rr + jitter(rng)) / rows;
      out.push_back(prim.pose.apply(faces[fi].map(prim, u, v)));
    }
  }
  return out;
}

namespace {

struct Interval {
  double lo, hi;
  bool empty() const { return hi <= lo; }
};

Interval intersect(Interval a, Interval b) {
  return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

// t-interval where a[axis] + t*d[axis] stays within [-half, half]
Interval slab(double a, double d, double half) {
  if (std::abs(d) < 1e-15) {
    // sliding exactly on a face is not passing through the solid
    return std::abs(a) < half ? Interval{-1e30, 1e30} : Interval{1.0, 0.0};
  }
  double t0 = (-half - a) / d, t1 = (half - a) / d;
  if (t0 > t1) std::swap(t0, t1);
  return {t0, t1};
}

// solutions of A t^2 + B t + C <= 0 as up to two intervals
int quadratic_le(double A, double B, double C, Interval out[2]) {
  if (std::abs(A) < 1e-15) {
    if (std::abs(B) < 1e-15) {
      if (C <= 0.0) { out[0] = {-1e30, 1e30}; return 1; }
      return 0;
    }
    double t = -C / B;
    out[0] = B > 0 ? Interval{-1e30, t} : Interval{t, 1e30};
    return 1;
  }
  double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) {
    if (A < 0.0) { out[0] = {-1e30, 1e30}; return 1; }
    return 0;
  }
  double sq = std::sqrt(disc);
  double t0 = (-B - sq) / (2.0 * A), t1 = (-B + sq) / (2.0 * A);
  if (t0 > t1) std::swap(t0, t1);
  if (A > 0.0) { out[0] = {t0, t1}; return 1; }
  out[0] = {-1e30, t0};
  out[1] = {t1, 1e30};
  return 2;
}

}  // namespace

bool segment_hits(const Primitive& prim, const Vec3& from, const Vec3& to) {
  Pose inv = inverse(prim.pose);
  Vec3 a = inv.apply(from), b = inv.apply(to);
  Vec3 d = b - a;
  const Interval span{1e-6, 1.0 - 1e-6};
  auto overlaps = [&](Interval iv) {
    iv = intersect(iv, span);
    return iv.hi - iv.lo > 1e-9;
  };

  switch (prim.shape) {
    case Shape::Box: {
      Interval iv{-1e30, 1e30};
      for (int i = 0; i < 3; ++i) iv = intersect(iv, slab(a[i], d[i], 0.5 * prim.size[i]));
      return overlaps(iv);
    }
    case Shape::Sphere: {
      double r = prim.size.x();
      Interval iv[2];
      int ni = quadratic_le(d.squaredNorm(), 2.0 * a.dot(d), a.squaredNorm() - r * r, iv);
      for (int i = 0; i < ni; ++i)
        if (overlaps(iv[i])) return true;
      return false;
    }
    case Shape::Cylinder: {
      double r = prim.size.x();
      Interval zi = slab(a.z(), d.z(), 0.5 * prim.size.z());
      Interval iv[2];
      int ni = quadratic_le(d.x() * d.x() + d.y() * d.y(),
                            2.0 * (a.x() * d.x() + a.y() * d.y()),
                            a.x() * a.x() + a.y() * a.y() - r * r, iv);
      for (int i = 0; i < ni; ++i)
        if (overlaps(intersect(iv[i], zi))) return true;
      return false;
    }
    case Shape::Cone: {
      double r = prim.size.x(), h = prim.size.z();
      double k = r / h, c = 0.5 * h;
      double w0 = c - a.z();
      double A = d.x() * d.x() + d.y() * d.y() - k * k * d.z() * d.z();
      double B = 2.0 * (a.x() * d.x() + a.y() * d.y()) + 2.0 * k * k * d.z() * w0;
      double C = a.x() * a.x() + a.y() * a.y() - k * k * w0 * w0;
      Interval zi = slab(a.z(), d.z(), c);  // also culls the mirror cone
      Interval iv[2];
      int ni = quadratic_le(A, B, C, iv);
      for (int i = 0; i < ni; ++i)
        if (overlaps(intersect(iv[i], zi))) return true;
      return false;
    }
  }
  return false;
}

double distance_to(const Primitive& prim, const Vec3& point) {
  Vec3 p = inverse(prim.pose).apply(point);
  switch (prim.shape) {
    case Shape::Box: {
      Vec3 h = prim.size * 0.5;
      Vec3 q = p.cwiseAbs() - h;
      return q.cwiseMax(0.0).norm();
    }
    case Shape::Sphere:
      return std::max(0.0, p.norm() - prim.size.x());
    case Shape::Cylinder: {
      double dr = std::max(0.0, std::hypot(p.x(), p.y()) - prim.size.x());
      double dz = std::max(0.0, std::abs(p.z()) - 0.5 * prim.size.z());
      return std::hypot(dr, dz);
    }
    case Shape::Cone: {
      double r = prim.size.x(), c = 0.5 * prim.size.z();
      double rho = std::hypot(p.x(), p.y()), z = p.z();
      if (z >= -c && z <= c && rho <= r * (c - z) / (2.0 * c)) return 0.0;
      // meridian half-plane: lateral edge is the segment apex(0,c) -> rim(r,-c)
      Eigen::Vector2d q{rho, z}, e0{0.0, c}, e1{r, -c};
      Eigen::Vector2d e = e1 - e0;
      double t = std::clamp((q - e0).dot(e) / e.squaredNorm(), 0.0, 1.0);
      double lateral = (q - (e0 + t * e)).norm();
      double base = std::hypot(std::max(0.0, rho - r), std::abs(z + c));
      return std::min(lateral, base);
    }
  }
  return 0.0;
}

}  // namespace demogen
