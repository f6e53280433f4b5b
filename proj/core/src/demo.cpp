#include "demogen/demo.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

#include "demogen/errors.hpp"

namespace demogen {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

json pose_to_json(const Pose& p) {
  auto v = p.flat();
  return json(std::vector<double>(v.begin(), v.end()));
}

Pose pose_from_json(const json& j) {
  if (!j.is_array() || j.size() != 7) throw FormatError("pose must be a 7-element array");
  std::array<double, 7> v;
  for (int i = 0; i < 7; ++i) v[i] = j[i].get<double>();
  return Pose::from_flat(v);
}

json segments_to_json(const SegmentIndex& idx) {
  json arms = json::array();
  for (const auto& arm : idx.per_arm) {
    json list = json::array();
    for (const auto& s : arm)
      list.push_back({{"kind", s.kind == SegmentKind::Skill ? "skill" : "motion"},
                      {"object", s.object_id},
                      {"start", s.t_start},
                      {"end", s.t_end}});
    arms.push_back(list);
  }
  return arms;
}

SegmentIndex segments_from_json(const json& j) {
  SegmentIndex idx;
  for (const auto& arm : j) {
    std::vector<Segment> list;
    for (const auto& s : arm) {
      Segment seg;
      std::string kind = s.at("kind").get<std::string>();
      if (kind == "skill") seg.kind = SegmentKind::Skill;
      else if (kind == "motion") seg.kind = SegmentKind::Motion;
      else throw FormatError("unknown segment kind '" + kind + "'");
      seg.object_id = s.at("object").get<int>();
      seg.t_start = s.at("start").get<int>();
      seg.t_end = s.at("end").get<int>();
      list.push_back(seg);
    }
    idx.per_arm.push_back(std::move(list));
  }
  return idx;
}

template <typename T>
void put(std::ofstream& f, const T* data, size_t count) {
  f.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(T)));
}

template <typename T>
void get(std::ifstream& f, T* data, size_t count) {
  f.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(T)));
  if (!f) throw FormatError("frames.bin truncated");
}

void check_segments(const SegmentIndex& idx, int arm_count, int length, int num_objects,
                    const std::vector<std::vector<int>>& arm_object_map,
                    std::vector<std::string>& out) {
  if (static_cast<int>(idx.per_arm.size()) != arm_count) {
    out.push_back("segment index covers " + std::to_string(idx.per_arm.size()) +
                  " arms, demo has " + std::to_string(arm_count));
    return;
  }
  for (int a = 0; a < arm_count; ++a) {
    const auto& segs = idx.per_arm[a];
    int cursor = 0;
    for (size_t i = 0; i < segs.size(); ++i) {
      const Segment& s = segs[i];
      bool want_skill = (i % 2) == 1;
      if ((s.kind == SegmentKind::Skill) != want_skill)
        out.push_back("arm " + std::to_string(a) + " segment " + std::to_string(i) +
                      " breaks motion/skill alternation");
      if (s.kind == SegmentKind::Skill &&
          (s.object_id < 0 || s.object_id >= num_objects))
        out.push_back("arm " + std::to_string(a) + " segment " + std::to_string(i) +
                      " names unknown object " + std::to_string(s.object_id));
      if (s.t_start != cursor)
        out.push_back("arm " + std::to_string(a) + " segment " + std::to_string(i) +
                      " starts at " + std::to_string(s.t_start) + ", expected " +
                      std::to_string(cursor));
      if (i > 0 && !segs[i - 1].empty() && !s.empty() && s.t_start <= segs[i - 1].t_end)
        out.push_back("arm " + std::to_string(a) + " segments " + std::to_string(i - 1) +
                      " and " + std::to_string(i) + " overlap: [" +
                      std::to_string(segs[i - 1].t_start) + "," +
                      std::to_string(segs[i - 1].t_end) + "] vs [" +
                      std::to_string(s.t_start) + "," + std::to_string(s.t_end) + "]");
      if (!s.empty()) cursor = s.t_end + 1;
    }
    if (cursor != length)
      out.push_back("arm " + std::to_string(a) + " segments cover [0," +
                    std::to_string(cursor - 1) + "], demo has " + std::to_string(length) +
                    " frames");
    // Skill object ids must follow the arm's task order.
    const std::vector<int>* order = nullptr;
    if (a < static_cast<int>(arm_object_map.size())) order = &arm_object_map[a];
    size_t next = 0;
    for (size_t i = 0; i < segs.size(); ++i) {
      if (segs[i].kind != SegmentKind::Skill) continue;
      if (order) {
        if (next >= order->size() || (*order)[next] != segs[i].object_id)
          out.push_back("arm " + std::to_string(a) + " skill " + std::to_string(i) +
                        " object " + std::to_string(segs[i].object_id) +
                        " is out of task order");
        ++next;
      }
    }
  }
}

}  // namespace

std::vector<std::string> validate(const Demonstration& demo) {
  std::vector<std::string> out;
  const int L = demo.length();
  if (L < 2) out.push_back("demo has " + std::to_string(L) + " frames, need at least 2");
  const int K = demo.num_objects();
  if (K < 1) out.push_back("demo has no objects");
  if (demo.object_names.size() != demo.init_config.size())
    out.push_back(std::to_string(demo.object_names.size()) + " object names for " +
                  std::to_string(demo.init_config.size()) + " init poses");
  if (L == 0) return out;

  const int N = demo.points_per_frame();
  const int A = demo.arm_count();
  const int H = demo.hand_dim();
  if (A < 1 || A > 2)
    out.push_back("arm count " + std::to_string(A) + " unsupported (need 1 or 2)");
  if (demo.frames[0].cloud.labels.size() != demo.frames[0].cloud.points.size())
    out.push_back("frame 0 must label every point");
  else
    for (int32_t l : demo.frames[0].cloud.labels)
      if (l >= K || l < kLabelObstacle) {
        out.push_back("frame 0 contains out-of-range label " + std::to_string(l));
        break;
      }

  for (int t = 0; t < L; ++t) {
    const Frame& fr = demo.frames[t];
    if (fr.cloud.size() != N)
      out.push_back("frame " + std::to_string(t) + " has " + std::to_string(fr.cloud.size()) +
                    " points, expected " + std::to_string(N));
    if (static_cast<int>(fr.arm_state.size()) != A ||
        static_cast<int>(fr.arm_action.size()) != A ||
        static_cast<int>(fr.hand_state.size()) != A ||
        static_cast<int>(fr.hand_action.size()) != A) {
      out.push_back("frame " + std::to_string(t) + " arm data does not match arm count");
      continue;
    }
    for (int a = 0; a < A; ++a) {
      if (static_cast<int>(fr.hand_state[a].size()) != H ||
          static_cast<int>(fr.hand_action[a].size()) != H)
        out.push_back("frame " + std::to_string(t) + " arm " + std::to_string(a) +
                      " hand dim differs from " + std::to_string(H));
      if (!is_unit_quaternion(fr.arm_state[a].orientation, 1e-6))
        out.push_back("frame " + std::to_string(t) + " arm " + std::to_string(a) +
                      " state quaternion is not unit norm");
      if (!is_unit_quaternion(fr.arm_action[a].orientation, 1e-6))
        out.push_back("frame " + std::to_string(t) + " arm " + std::to_string(a) +
                      " action quaternion is not unit norm");
    }
  }
  if (!demo.arm_object_map.empty() &&
      static_cast<int>(demo.arm_object_map.size()) != A)
    out.push_back("arm_object_map covers " + std::to_string(demo.arm_object_map.size()) +
                  " arms, demo has " + std::to_string(A));
  if (demo.segment_index)
    check_segments(*demo.segment_index, A, L, K, demo.arm_object_map, out);
  return out;
}

void write_demo(const Demonstration& demo, const std::filesystem::path& dir) {
  auto report = validate(demo);
  if (!report.empty()) throw ValidationError("refusing to write invalid demo: " + report[0]);

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  const int L = demo.length(), N = demo.points_per_frame();
  const int A = demo.arm_count(), H = demo.hand_dim();

  json meta;
  meta["version"] = kFormatVersion;
  meta["task"] = demo.task;
  meta["frames"] = L;
  meta["points_per_frame"] = N;
  meta["num_objects"] = demo.num_objects();
  meta["hand_dim"] = H;
  meta["arm_count"] = A;
  meta["object_names"] = demo.object_names;
  meta["init_config"] = json::array();
  for (const auto& p : demo.init_config) meta["init_config"].push_back(pose_to_json(p));
  meta["camera_pose"] = pose_to_json(demo.camera_pose);
  meta["segment_index"] =
      demo.segment_index ? segments_to_json(*demo.segment_index) : json(nullptr);
  meta["arm_object_map"] = demo.arm_object_map;

  {
    std::ofstream f(dir / "meta.json");
    if (!f) throw IoError("cannot open " + (dir / "meta.json").string());
    f << meta.dump(2) << "\n";
    if (!f) throw IoError("short write to meta.json");
  }

  std::ofstream f(dir / "frames.bin", std::ios::binary);
  if (!f) throw IoError("cannot open " + (dir / "frames.bin").string());
  for (int t = 0; t < L; ++t) {
    const Frame& fr = demo.frames[t];
    static_assert(sizeof(Eigen::Vector3f) == 12);
    put(f, fr.cloud.points.data(), static_cast<size_t>(N));
    if (t == 0) put(f, fr.cloud.labels.data(), static_cast<size_t>(N));
    for (int a = 0; a < A; ++a) {
      auto sa = fr.arm_state[a].flat();
      put(f, sa.data(), 7);
      put(f, fr.hand_state[a].data(), static_cast<size_t>(H));
      auto aa = fr.arm_action[a].flat();
      put(f, aa.data(), 7);
      put(f, fr.hand_action[a].data(), static_cast<size_t>(H));
    }
  }
  if (!f) throw IoError("short write to frames.bin");
}

Demonstration read_demo(const std::filesystem::path& dir) {
  json meta;
  {
    std::ifstream f(dir / "meta.json");
    if (!f) throw IoError("cannot open " + (dir / "meta.json").string());
    try {
      f >> meta;
    } catch (const json::exception& e) {
      throw FormatError("meta.json: " + std::string(e.what()));
    }
  }
  Demonstration demo;
  int L, N, K, A, H;
  try {
    int version = meta.at("version").get<int>();
    if (version != kFormatVersion)
      throw FormatError("container version " + std::to_string(version) +
                        " not supported (expected " + std::to_string(kFormatVersion) + ")");
    demo.task = meta.at("task").get<std::string>();
    L = meta.at("frames").get<int>();
    N = meta.at("points_per_frame").get<int>();
    K = meta.at("num_objects").get<int>();
    H = meta.at("hand_dim").get<int>();
    A = meta.at("arm_count").get<int>();
    demo.object_names = meta.at("object_names").get<std::vector<std::string>>();
    for (const auto& p : meta.at("init_config")) demo.init_config.push_back(pose_from_json(p));
    demo.camera_pose = pose_from_json(meta.at("camera_pose"));
    if (!meta.at("segment_index").is_null())
      demo.segment_index = segments_from_json(meta.at("segment_index"));
    demo.arm_object_map = meta.at("arm_object_map").get<std::vector<std::vector<int>>>();
  } catch (const json::exception& e) {
    throw FormatError("meta.json: " + std::string(e.what()));
  }
  if (L < 0 || N < 0 || K < 0 || A < 0 || H < 0 ||
      static_cast<int>(demo.init_config.size()) != K)
    throw FormatError("meta.json header fields are inconsistent");

  auto bin = dir / "frames.bin";
  std::error_code ec;
  auto actual = std::filesystem::file_size(bin, ec);
  if (ec) throw IoError("cannot stat " + bin.string());
  uint64_t per_arm = 8ull * (7 + H + 7 + H);
  uint64_t expect = static_cast<uint64_t>(L) * (12ull * N + per_arm * A) + 4ull * N;
  if (actual != expect)
    throw FormatError("frames.bin holds " + std::to_string(actual) + " bytes, expected " +
                      std::to_string(expect));

  std::ifstream f(bin, std::ios::binary);
  if (!f) throw IoError("cannot open " + bin.string());
  demo.frames.resize(static_cast<size_t>(L));
  for (int t = 0; t < L; ++t) {
    Frame& fr = demo.frames[t];
    fr.cloud.points.resize(static_cast<size_t>(N));
    get(f, fr.cloud.points.data(), static_cast<size_t>(N));
    if (t == 0) {
      fr.cloud.labels.resize(static_cast<size_t>(N));
      get(f, fr.cloud.labels.data(), static_cast<size_t>(N));
    } else {
      fr.cloud.labels.assign(static_cast<size_t>(N), kLabelEE);
    }
    fr.arm_state.resize(A);
    fr.hand_state.assign(A, std::vector<double>(static_cast<size_t>(H)));
    fr.arm_action.resize(A);
    fr.hand_action.assign(A, std::vector<double>(static_cast<size_t>(H)));
    for (int a = 0; a < A; ++a) {
      std::array<double, 7> buf;
      get(f, buf.data(), 7);
      fr.arm_state[a] = Pose::from_flat(buf);
      if (H > 0) get(f, fr.hand_state[a].data(), static_cast<size_t>(H));
      get(f, buf.data(), 7);
      fr.arm_action[a] = Pose::from_flat(buf);
      if (H > 0) get(f, fr.hand_action[a].data(), static_cast<size_t>(H));
    }
  }
  auto report = validate(demo);
  if (!report.empty())
    throw ValidationError("container " + dir.string() + " is invalid: " + report[0]);
  return demo;
}

namespace {

bool bits_equal(const Pose& a, const Pose& b) { return a == b; }

bool bits_equal(const std::vector<Eigen::Vector3f>& a, const std::vector<Eigen::Vector3f>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].x() != b[i].x() || a[i].y() != b[i].y() || a[i].z() != b[i].z()) return false;
  return true;
}

}  // namespace

bool bitwise_equal(const Demonstration& a, const Demonstration& b) {
  if (a.task != b.task || a.length() != b.length() || a.num_objects() != b.num_objects() ||
      a.arm_count() != b.arm_count() || a.hand_dim() != b.hand_dim() ||
      a.object_names != b.object_names || a.arm_object_map != b.arm_object_map ||
      a.segment_index != b.segment_index)
    return false;
  if (!bits_equal(a.camera_pose, b.camera_pose)) return false;
  for (int k = 0; k < a.num_objects(); ++k)
    if (!bits_equal(a.init_config[k], b.init_config[k])) return false;
  for (int t = 0; t < a.length(); ++t) {
    const Frame& fa = a.frames[t];
    const Frame& fb = b.frames[t];
    if (!bits_equal(fa.cloud.points, fb.cloud.points)) return false;
    if (t == 0 && fa.cloud.labels != fb.cloud.labels) return false;
    for (int arm = 0; arm < a.arm_count(); ++arm) {
      if (!bits_equal(fa.arm_state[arm], fb.arm_state[arm])) return false;
      if (!bits_equal(fa.arm_action[arm], fb.arm_action[arm])) return false;
      if (fa.hand_state[arm] != fb.hand_state[arm]) return false;
      if (fa.hand_action[arm] != fb.hand_action[arm]) return false;
    }
  }
  return true;
}

uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void write_manifest(const DatasetManifest& m, const std::filesystem::path& dataset_dir) {
  json j;
  j["demos"] = m.demos;
  j["rejected"] = json::array();
  for (const auto& [id, reason] : m.rejected)
    j["rejected"].push_back({{"target", id}, {"reason", reason}});
  j["spec_hash"] = m.spec_hash;
  std::ofstream f(dataset_dir / "dataset.json");
  if (!f) throw IoError("cannot open " + (dataset_dir / "dataset.json").string());
  f << j.dump(2) << "\n";
  if (!f) throw IoError("short write to dataset.json");
}

DatasetManifest read_manifest(const std::filesystem::path& dataset_dir) {
  std::ifstream f(dataset_dir / "dataset.json");
  if (!f) throw IoError("cannot open " + (dataset_dir / "dataset.json").string());
  json j;
  try {
    f >> j;
    DatasetManifest m;
    m.demos = j.at("demos").get<std::vector<std::string>>();
    for (const auto& r : j.at("rejected"))
      m.rejected.emplace_back(r.at("target").get<std::string>(),
                              r.at("reason").get<std::string>());
    m.spec_hash = j.at("spec_hash").get<std::string>();
    return m;
  } catch (const json::exception& e) {
    throw FormatError("dataset.json: " + std::string(e.what()));
  }
}

}  // namespace demogen
