#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "demogen/cloud.hpp"
#include "demogen/pose.hpp"

namespace demogen {

enum class SegmentKind { Motion, Skill };

/// Closed frame interval [t_start, t_end]; t_end < t_start encodes an empty
/// segment that only marks a position in the alternation.
struct Segment {
  SegmentKind kind = SegmentKind::Motion;
  int object_id = -1;
  int t_start = 0;
  int t_end = -1;

  bool empty() const { return t_end < t_start; }
  int length() const { return empty() ? 0 : t_end - t_start + 1; }
  bool operator==(const Segment&) const = default;
};

/// Alternating motion/skill segments, one list per arm, tiling [0, L-1].
struct SegmentIndex {
  std::vector<std::vector<Segment>> per_arm;
  bool operator==(const SegmentIndex&) const = default;
};

struct Frame {
  LabeledCloud cloud;  // labels mandatory only at t=0
  std::vector<Pose> arm_state;
  std::vector<std::vector<double>> hand_state;
  std::vector<Pose> arm_action;
  std::vector<std::vector<double>> hand_action;
};

struct Demonstration {
  std::string task;
  std::vector<Frame> frames;
  std::vector<Pose> init_config;  // one pose per object
  std::vector<std::string> object_names;
  Pose camera_pose;
  std::optional<SegmentIndex> segment_index;
  std::vector<std::vector<int>> arm_object_map;  // per arm, objects in task order

  int length() const { return static_cast<int>(frames.size()); }
  int num_objects() const { return static_cast<int>(init_config.size()); }
  int arm_count() const {
    return frames.empty() ? 0 : static_cast<int>(frames[0].arm_state.size());
  }
  int hand_dim() const {
    if (frames.empty() || frames[0].hand_state.empty()) return 0;
    return static_cast<int>(frames[0].hand_state[0].size());
  }
  int points_per_frame() const { return frames.empty() ? 0 : frames[0].cloud.size(); }
};

/// Every violated invariant as one human-readable line; empty means valid.
std::vector<std::string> validate(const Demonstration& demo);

/// Writes the container directory (meta.json + frames.bin). Labels of frames
/// past t=0 are not persisted; that is the canonical form.
void write_demo(const Demonstration& demo, const std::filesystem::path& dir);

Demonstration read_demo(const std::filesystem::path& dir);

/// Compares canonical forms: everything persisted must match bit for bit
/// (cloud labels past frame 0 are ignored on both sides).
bool bitwise_equal(const Demonstration& a, const Demonstration& b);

uint64_t fnv1a64(std::string_view s);

struct DatasetManifest {
  std::vector<std::string> demos;                          // container dir names
  std::vector<std::pair<std::string, std::string>> rejected;  // target id, reason
  std::string spec_hash;                                   // fnv-1a 64, 16 hex chars

  bool operator==(const DatasetManifest&) const = default;
};

void write_manifest(const DatasetManifest& m, const std::filesystem::path& dataset_dir);
DatasetManifest read_manifest(const std::filesystem::path& dataset_dir);

}  // namespace demogen
