#pragma once

#include <cstdint>
#include <vector>

#include "demogen/cloud.hpp"
#include "demogen/pose.hpp"

namespace demogen {

enum class Shape { Box, Cylinder, Cone, Sphere };

/// Analytic solid used for rendering, occlusion tests and obstacle clouds.
/// Local frames: box and cylinder are centered at the origin; the cone spans
/// z in [-h/2, +h/2] with the apex up; the sphere is centered.
/// size: box = full extents; cylinder/cone = (radius, -, height); sphere =
/// (radius, -, -).
struct Primitive {
  Shape shape = Shape::Box;
  Vec3 size{0.1, 0.1, 0.1};
  Pose pose;
};

double surface_area(const Primitive& prim);

/// Deterministic stratified surface sampling: the budget is split across the
/// primitive's faces by area (largest remainder), then each face is sampled
/// on a jittered grid. Points come back in the parent frame (pose applied);
/// same (prim, n, seed) always gives the same points.
std::vector<Vec3> surface_sample(const Primitive& prim, int n, uint64_t seed);

/// True when the open segment between `from` and `to` passes through the
/// solid. Endpoints on the surface do not count as hits.
bool segment_hits(const Primitive& prim, const Vec3& from, const Vec3& to);

/// Euclidean distance from a point to the solid (0 inside).
double distance_to(const Primitive& prim, const Vec3& point);

/// Splits `total` into integer budgets proportional to `weights` (largest
/// remainder); every positive weight gets at least one slot when possible.
std::vector<int> proportional_budgets(const std::vector<double>& weights, int total);

}  // namespace demogen
