#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "demogen/cloud.hpp"
#include "demogen/errors.hpp"
#include "demogen/kdtree.hpp"
#include "oracles.hpp"

using namespace demogen;

TEST_CASE("kdtree nearest and radius agree with linear scans") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto c = oracles::random_cloud(rng, 300);
    KdTree3 tree(c.points);
    std::uniform_real_distribution<float> u(-1.2f, 1.2f);
    for (int q = 0; q < 50; ++q) {
      Eigen::Vector3f query{u(rng), u(rng), u(rng)};
      double best = std::numeric_limits<double>::infinity();
      int best_i = -1;
      for (int i = 0; i < c.size(); ++i) {
        double sq = oracles::sq_dist(c.points[i], query);
        if (sq < best) {
          best = sq;
          best_i = i;
        }
      }
      double got_sq;
      int got = tree.nearest(query, &got_sq);
      CHECK(got == best_i);
      CHECK(got_sq == best);

      double r = 0.3;
      std::vector<int> want;
      for (int i = 0; i < c.size(); ++i)
        if (oracles::sq_dist(c.points[i], query) <= r * r) want.push_back(i);
      CHECK(tree.radius(query, r) == want);
      CHECK(tree.any_within(query, r) == !want.empty());
    }
  }
}

TEST_CASE("crop keeps exactly the contained points") {
  CropBox box{{-0.5f, -0.5f, -0.5f}, {0.5f, 0.5f, 0.5f}};
  std::mt19937_64 rng(5);
  auto c = oracles::random_cloud(rng, 500);
  auto got = crop(c, box);
  LabeledCloud want;
  for (int i = 0; i < c.size(); ++i)
    if (box.contains(c.points[i])) want.push(c.points[i], c.labels[i]);
  REQUIRE(got.size() == want.size());
  for (int i = 0; i < got.size(); ++i) CHECK(got.points[i] == want.points[i]);

  SUBCASE("idempotent") {
    auto twice = crop(got, box);
    REQUIRE(twice.size() == got.size());
    for (int i = 0; i < got.size(); ++i) CHECK(twice.points[i] == got.points[i]);
  }
}

TEST_CASE("crop edge cases") {
  CropBox unit{{-0.5f, -0.5f, -0.5f}, {0.5f, 0.5f, 0.5f}};
  LabeledCloud c;
  c.push({0.1f, 0.1f, 0.1f}, 0);
  c.push({10.0f, 10.0f, 10.0f}, 1);
  auto got = crop(c, unit);
  REQUIRE(got.size() == 1);
  CHECK(got.labels[0] == 0);

  LabeledCloud inside;
  inside.push({0.0f, 0.0f, 0.0f}, 2);
  auto same = crop(inside, unit);
  CHECK(same.size() == 1);

  LabeledCloud far;
  far.push({5.0f, 5.0f, 5.0f}, 0);
  CHECK_THROWS_AS(crop(far, unit), EmptyCloudError);

  CropBox bad{{0.5f, 0.0f, 0.0f}, {-0.5f, 1.0f, 1.0f}};
  CHECK_THROWS_AS(crop(c, bad), ValidationError);
}

TEST_CASE("cluster_filter keeps two dense blobs") {
  std::mt19937_64 rng(7);
  std::normal_distribution<float> n(0.0f, 0.01f);
  LabeledCloud c;
  for (int i = 0; i < 100; ++i) c.push({n(rng), n(rng), n(rng)}, 0);
  for (int i = 0; i < 100; ++i) c.push({1.0f + n(rng), n(rng), n(rng)}, 1);
  auto got = cluster_filter(c, 0.05, 5);
  CHECK(got.size() == 200);
}

TEST_CASE("cluster_filter removes an isolated point") {
  std::mt19937_64 rng(9);
  std::normal_distribution<float> n(0.0f, 0.005f);
  LabeledCloud c;
  for (int i = 0; i < 200; ++i) c.push({n(rng), n(rng), n(rng)}, 0);
  c.push({0.5f, 0.5f, 0.5f}, 0);
  auto got = cluster_filter(c, 0.02, 5);
  CHECK(got.size() == 200);
  for (const auto& p : got.points) CHECK(p.x() < 0.4f);
}

TEST_CASE("cluster_filter with min_pts=1 is the identity") {
  std::mt19937_64 rng(11);
  auto c = oracles::random_cloud(rng, 300);
  auto got = cluster_filter(c, 0.02, 1);
  REQUIRE(got.size() == c.size());
  for (int i = 0; i < c.size(); ++i) CHECK(got.points[i] == c.points[i]);
}

TEST_CASE("cluster_filter noise set matches reference DBSCAN") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<int> nd(20, 400);
    auto c = oracles::random_cloud(rng, nd(rng), 0.2);
    double eps = 0.05;
    int min_pts = 4;
    auto noise = oracles::dbscan_noise(c, eps, min_pts);
    std::set<int> kept_want;
    for (int i = 0; i < c.size(); ++i)
      if (!noise.count(i)) kept_want.insert(i);
    if (kept_want.empty()) {
      CHECK_THROWS_AS(cluster_filter(c, eps, min_pts), EmptyCloudError);
      continue;
    }
    auto got = cluster_filter(c, eps, min_pts);
    REQUIRE(got.size() == static_cast<int>(kept_want.size()));
    // Exact set equality against the reference implementation.
    size_t j = 0;
    for (int idx : kept_want) {
      CHECK(got.points[j] == c.points[idx]);
      ++j;
    }
  }
}

TEST_CASE("fps picks the opposite corner of a unit square") {
  LabeledCloud c;
  c.push({0.0f, 0.0f, 0.0f}, 0);
  c.push({1.0f, 0.0f, 0.0f}, 0);
  c.push({0.0f, 1.0f, 0.0f}, 0);
  c.push({1.0f, 1.0f, 0.0f}, 0);
  auto got = farthest_point_sample(c, 2, 0);
  REQUIRE(got.size() == 2);
  CHECK(got.points[0] == Eigen::Vector3f(0.0f, 0.0f, 0.0f));
  CHECK(got.points[1] == Eigen::Vector3f(1.0f, 1.0f, 0.0f));
}

TEST_CASE("fps with k=N is a permutation of the input") {
  std::mt19937_64 rng(17);
  auto c = oracles::random_cloud(rng, 128);
  auto got = farthest_point_sample(c, 128, 0);
  REQUIRE(got.size() == 128);
  std::set<std::array<float, 3>> in, out;
  for (const auto& p : c.points) in.insert({p.x(), p.y(), p.z()});
  for (const auto& p : got.points) out.insert({p.x(), p.y(), p.z()});
  CHECK(in == out);
}

TEST_CASE("fps matches the step-by-step greedy oracle") {
  std::mt19937_64 rng(19);
  auto c = oracles::random_cloud(rng, 1000);
  auto want_idx = oracles::brute_fps(c, 512, 0);
  auto got = farthest_point_sample(c, 512, 0);
  REQUIRE(got.size() == 512);
  for (int i = 0; i < 512; ++i) CHECK(got.points[i] == c.points[want_idx[i]]);
}

TEST_CASE("fps pads cyclically when k exceeds the cloud") {
  LabeledCloud c;
  c.push({0.0f, 0.0f, 0.0f}, 0);
  c.push({1.0f, 0.0f, 0.0f}, 1);
  auto got = farthest_point_sample(c, 5, 0);
  REQUIRE(got.size() == 5);
  CHECK(got.points[2] == got.points[0]);
  CHECK(got.points[3] == got.points[1]);
  CHECK(got.points[4] == got.points[0]);
  CHECK(got.labels[2] == got.labels[0]);
}

TEST_CASE("fps rejects bad arguments") {
  std::mt19937_64 rng(23);
  auto c = oracles::random_cloud(rng, 10);
  CHECK_THROWS_AS(farthest_point_sample(c, 0, 0), ValidationError);
  CHECK_THROWS_AS(farthest_point_sample(c, 5, 10), ValidationError);
  CHECK_THROWS_AS(farthest_point_sample(LabeledCloud{}, 1, 0), EmptyCloudError);
}

TEST_CASE("transform_labeled moves points by their label's delta") {
  std::mt19937_64 rng(29);
  LabeledCloud c;
  for (int i = 0; i < 50; ++i) c.push({0.1f * i, 0.0f, 0.0f}, i % 3);
  for (int i = 0; i < 20; ++i) c.push({0.0f, 0.1f * i, 0.0f}, kLabelEE);
  c.push({9.0f, 9.0f, 9.0f}, kLabelBackground);
  c.push({8.0f, 8.0f, 8.0f}, kLabelObstacle);

  std::vector<Pose> src{Pose{}, Pose{}, Pose{}}, dst;
  for (int i = 0; i < 3; ++i) dst.push_back(oracles::random_pose(rng, 0.3));
  ConfigDelta d = ConfigDelta::between(src, dst);
  Pose ee = oracles::random_pose(rng, 0.3);
  auto got = transform_labeled(c, d, ee);
  REQUIRE(got.size() == c.size());
  for (int i = 0; i < c.size(); ++i) {
    CHECK(got.labels[i] == c.labels[i]);
    Eigen::Matrix4d m;
    int32_t label = c.labels[i];
    if (label >= 0) m = d.of(label).matrix();
    else if (label == kLabelEE) m = ee.matrix();
    else m = Eigen::Matrix4d::Identity();
    Eigen::Vector4d h(c.points[i].x(), c.points[i].y(), c.points[i].z(), 1.0);
    Eigen::Vector3f want = (m * h).head<3>().cast<float>();
    CHECK((got.points[i] - want).norm() < 1e-5f);
  }
}

TEST_CASE("transform_labeled identity is bitwise") {
  std::mt19937_64 rng(31);
  auto c = oracles::random_cloud(rng, 100, 1.0, 1);
  auto got = transform_labeled(c, ConfigDelta::identity(2), Pose{});
  for (int i = 0; i < c.size(); ++i) CHECK(got.points[i] == c.points[i]);
}

TEST_CASE("transform_labeled shifts only the targeted label") {
  LabeledCloud c;
  c.push({0.0f, 0.0f, 0.0f}, 0);
  c.push({0.0f, 0.0f, 0.0f}, 1);
  ConfigDelta d = ConfigDelta::identity(2);
  d.deltas[0] = Pose::translation(0.2, 0.0, 0.0);
  auto got = transform_labeled(c, d, Pose{});
  CHECK(got.points[0] == Eigen::Vector3f(0.2f, 0.0f, 0.0f));
  CHECK(got.points[1] == Eigen::Vector3f(0.0f, 0.0f, 0.0f));
}

TEST_CASE("transform_labeled preserves rigidity within a label") {
  std::mt19937_64 rng(37);
  auto c = oracles::random_cloud(rng, 200, 0.5, 0);
  ConfigDelta d = ConfigDelta::identity(1);
  d.deltas[0] = oracles::random_pose(rng);
  auto got = transform_labeled(c, d, Pose{});
  for (int i = 1; i < c.size(); ++i) {
    float before = (c.points[i] - c.points[0]).norm();
    float after = (got.points[i] - got.points[0]).norm();
    CHECK(std::abs(before - after) < 1e-5f);
  }
}

TEST_CASE("transform_labeled requires a delta per object label") {
  LabeledCloud c;
  c.push({0.0f, 0.0f, 0.0f}, 3);
  CHECK_THROWS_AS(transform_labeled(c, ConfigDelta::identity(2), Pose{}), MissingDeltaError);
}

TEST_CASE("chamfer basics") {
  std::mt19937_64 rng(41);
  auto a = oracles::random_cloud(rng, 200);
  CHECK(chamfer(a, a) == 0.0);

  LabeledCloud p, q;
  p.push({0.0f, 0.0f, 0.0f}, 0);
  q.push({1.0f, 0.0f, 0.0f}, 0);
  CHECK(chamfer(p, q) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(chamfer(LabeledCloud{}, a), EmptyCloudError);
}

TEST_CASE("chamfer matches the brute-force oracle and is symmetric") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    auto a = oracles::random_cloud(rng, 300);
    auto b = oracles::random_cloud(rng, 250);
    for (auto& pt : b.points) pt.x() += 0.15f;
    double got = chamfer(a, b);
    CHECK(got == doctest::Approx(oracles::brute_chamfer(a, b)).epsilon(1e-12));
    CHECK(chamfer(b, a) == got);
    CHECK(got >= 0.0);
  }
}

TEST_CASE("subtract_by_proximity removes near-reference points") {
  std::mt19937_64 rng(47);
  auto scene = oracles::random_cloud(rng, 400);

  SUBCASE("empty reference is a no-op") {
    auto got = subtract_by_proximity(scene, LabeledCloud{}, 0.005);
    CHECK(got.size() == scene.size());
  }

  SUBCASE("subtracting a cloud from itself empties it") {
    auto got = subtract_by_proximity(scene, scene, 0.001);
    CHECK(got.size() == 0);
  }

  SUBCASE("matches the brute-force proximity oracle") {
    auto ref = oracles::random_cloud(rng, 200);
    double radius = 0.1;
    auto got = subtract_by_proximity(scene, ref, radius);
    LabeledCloud want;
    for (int i = 0; i < scene.size(); ++i) {
      bool close = false;
      for (const auto& r : ref.points)
        if (oracles::sq_dist(scene.points[i], r) <= radius * radius) {
          close = true;
          break;
        }
      if (!close) want.push(scene.points[i], scene.labels[i]);
    }
    REQUIRE(got.size() == want.size());
    for (int i = 0; i < got.size(); ++i) CHECK(got.points[i] == want.points[i]);
  }
}

TEST_CASE("ply export writes a parseable header and one row per point") {
  LabeledCloud c;
  c.push({0.5f, -0.25f, 1.0f}, 0);
  c.push({0.0f, 0.0f, 0.0f}, kLabelEE);
  auto path = std::filesystem::temp_directory_path() / "demogen_test_cloud.ply";
  write_ply(c, path.string());
  std::ifstream f(path);
  REQUIRE(f.good());
  std::string line;
  std::getline(f, line);
  CHECK(line == "ply");
  int rows = 0;
  bool saw_header_end = false;
  while (std::getline(f, line)) {
    if (saw_header_end && !line.empty()) ++rows;
    if (line == "end_header") saw_header_end = true;
  }
  CHECK(rows == 2);
  std::filesystem::remove(path);
}
