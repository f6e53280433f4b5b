#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "demogen/demo.hpp"
#include "demogen/errors.hpp"
#include "fixtures.hpp"

using namespace demogen;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("demogen_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<char> slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("write/read round trip is bitwise") {
  TempDir tmp;
  auto demo = fixtures::make_demo(8, 64, 3, 1, 1);
  write_demo(demo, tmp.path / "d0");
  auto back = read_demo(tmp.path / "d0");
  CHECK(bitwise_equal(demo, back));

  // A second write of the reread demo must produce identical bytes.
  write_demo(back, tmp.path / "d1");
  CHECK(slurp(tmp.path / "d0" / "frames.bin") == slurp(tmp.path / "d1" / "frames.bin"));
  CHECK(slurp(tmp.path / "d0" / "meta.json") == slurp(tmp.path / "d1" / "meta.json"));
}

TEST_CASE("bimanual round trip keeps both arms") {
  TempDir tmp;
  auto demo = fixtures::make_demo(5, 48, 2, 2, 2);
  write_demo(demo, tmp.path / "d");
  auto back = read_demo(tmp.path / "d");
  CHECK(back.arm_count() == 2);
  CHECK(back.hand_dim() == 2);
  CHECK(bitwise_equal(demo, back));
}

TEST_CASE("segment index survives the container") {
  TempDir tmp;
  auto demo = fixtures::make_demo(10, 32, 2, 1, 1);
  SegmentIndex idx;
  idx.per_arm.push_back({{SegmentKind::Motion, 0, 0, 3},
                         {SegmentKind::Skill, 0, 4, 6},
                         {SegmentKind::Motion, 1, 7, 6},
                         {SegmentKind::Skill, 1, 7, 9}});
  demo.segment_index = idx;
  write_demo(demo, tmp.path / "d");
  auto back = read_demo(tmp.path / "d");
  REQUIRE(back.segment_index.has_value());
  CHECK(*back.segment_index == idx);
}

TEST_CASE("minimal two-frame demo records its length") {
  TempDir tmp;
  auto demo = fixtures::make_demo(2, 16, 1, 1, 1);
  write_demo(demo, tmp.path / "d");
  std::ifstream f(tmp.path / "d" / "meta.json");
  nlohmann::json meta;
  f >> meta;
  CHECK(meta["frames"] == 2);
  CHECK(meta["points_per_frame"] == 16);
}

TEST_CASE("a dataset directory of demos is fully readable") {
  TempDir tmp;
  DatasetManifest m;
  for (int i = 0; i < 10; ++i) {
    std::string name = "demo_" + std::to_string(i);
    write_demo(fixtures::make_demo(4, 24, 2, 1, 1, 1000 + i), tmp.path / name);
    m.demos.push_back(name);
  }
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(fnv1a64("spec")));
  m.spec_hash = hash;
  write_manifest(m, tmp.path);

  auto back = read_manifest(tmp.path);
  CHECK(back == m);
  for (const auto& name : back.demos) {
    auto d = read_demo(tmp.path / name);
    CHECK(d.length() == 4);
  }
}

TEST_CASE("validate flags a bad quaternion with its frame number") {
  auto demo = fixtures::make_demo(6, 16, 1, 1, 1);
  demo.frames[3].arm_state[0].orientation.coeffs() *= 0.5;
  auto report = validate(demo);
  REQUIRE(report.size() == 1);
  CHECK(report[0].find("frame 3") != std::string::npos);
  CHECK(report[0].find("quaternion") != std::string::npos);
}

TEST_CASE("validate flags overlapping segment intervals naming both") {
  auto demo = fixtures::make_demo(10, 16, 1, 1, 1);
  SegmentIndex idx;
  idx.per_arm.push_back({{SegmentKind::Motion, 0, 0, 5}, {SegmentKind::Skill, 0, 4, 9}});
  demo.segment_index = idx;
  auto report = validate(demo);
  bool named = false;
  for (const auto& line : report)
    if (line.find("[0,5]") != std::string::npos && line.find("[4,9]") != std::string::npos)
      named = true;
  CHECK(named);
}

TEST_CASE("validate accepts a clean demo") {
  CHECK(validate(fixtures::make_demo()).empty());
}

TEST_CASE("validate catches structural problems") {
  auto demo = fixtures::make_demo(6, 16, 2, 1, 1);

  SUBCASE("single frame") {
    demo.frames.resize(1);
    CHECK(!validate(demo).empty());
  }
  SUBCASE("missing frame-0 labels") {
    demo.frames[0].cloud.labels.clear();
    CHECK(!validate(demo).empty());
  }
  SUBCASE("ragged point counts") {
    demo.frames[2].cloud.push({0.0f, 0.0f, 0.0f}, 0);
    CHECK(!validate(demo).empty());
  }
  SUBCASE("label outside object range") {
    demo.frames[0].cloud.labels[0] = 7;
    CHECK(!validate(demo).empty());
  }
  SUBCASE("alternation break") {
    SegmentIndex idx;
    idx.per_arm.push_back({{SegmentKind::Skill, 0, 0, 5}});
    demo.segment_index = idx;
    CHECK(!validate(demo).empty());
  }
}

TEST_CASE("write refuses an invalid demo") {
  TempDir tmp;
  auto demo = fixtures::make_demo();
  demo.frames.resize(1);
  CHECK_THROWS_AS(write_demo(demo, tmp.path / "d"), ValidationError);
}

TEST_CASE("unknown container version is a hard error") {
  TempDir tmp;
  write_demo(fixtures::make_demo(), tmp.path / "d");
  auto meta_path = tmp.path / "d" / "meta.json";
  nlohmann::json meta;
  {
    std::ifstream f(meta_path);
    f >> meta;
  }
  meta["version"] = 99;
  {
    std::ofstream f(meta_path);
    f << meta.dump(2);
  }
  CHECK_THROWS_AS(read_demo(tmp.path / "d"), FormatError);
}

TEST_CASE("truncated frames.bin is a hard error") {
  TempDir tmp;
  write_demo(fixtures::make_demo(), tmp.path / "d");
  auto bin = tmp.path / "d" / "frames.bin";
  auto bytes = slurp(bin);
  std::ofstream f(bin, std::ios::binary | std::ios::trunc);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  f.close();
  CHECK_THROWS_AS(read_demo(tmp.path / "d"), FormatError);
}

TEST_CASE("missing container raises IoError") {
  CHECK_THROWS_AS(read_demo("/nonexistent/demo/path"), IoError);
}

TEST_CASE("fnv1a64 matches published vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}
