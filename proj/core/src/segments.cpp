#include "demogen/segments.hpp"

#include <algorithm>

#include "demogen/errors.hpp"

namespace demogen {

Vec3 object_center(const LabeledCloud& cloud, int object_id) {
  Vec3 sum = Vec3::Zero();
  int count = 0;
  for (int i = 0; i < cloud.size(); ++i) {
    if (cloud.labels[i] != object_id) continue;
    sum += cloud.points[i].cast<double>();
    ++count;
  }
  if (count == 0)
    throw NoSuchObjectError("no points labeled " + std::to_string(object_id));
  return sum / count;
}

bool in_contact(const Pose& ee_pose, const Vec3& center, double threshold) {
  return (ee_pose.position - center).norm() <= threshold;
}

namespace {

struct Run {
  bool value;
  int start, end;  // inclusive
  int length() const { return end - start + 1; }
};

std::vector<Run> to_runs(const std::vector<char>& seq) {
  std::vector<Run> runs;
  for (int t = 0; t < static_cast<int>(seq.size()); ++t) {
    if (runs.empty() || runs.back().value != static_cast<bool>(seq[t]))
      runs.push_back({static_cast<bool>(seq[t]), t, t});
    else
      runs.back().end = t;
  }
  return runs;
}

// Debounce: interior runs shorter than `hysteresis` frames are absorbed into
// their neighbors (shortest first, earliest on ties) until none remain. Runs
// touching either end of the recording are kept as observed.
std::vector<char> debounce(std::vector<char> seq, int hysteresis) {
  if (hysteresis <= 1) return seq;
  auto runs = to_runs(seq);
  for (;;) {
    int pick = -1;
    for (int i = 1; i + 1 < static_cast<int>(runs.size()); ++i)
      if (runs[i].length() < hysteresis &&
          (pick < 0 || runs[i].length() < runs[pick].length()))
        pick = i;
    if (pick < 0) break;
    runs[pick].value = !runs[pick].value;
    std::vector<Run> merged;
    for (const Run& r : runs) {
      if (!merged.empty() && merged.back().value == r.value)
        merged.back().end = r.end;
      else
        merged.push_back(r);
    }
    runs = std::move(merged);
  }
  std::vector<char> out(seq.size());
  for (const Run& r : runs)
    for (int t = r.start; t <= r.end; ++t) out[t] = r.value;
  return out;
}

// Longest true run, earliest on ties; {-1,-1} when there is none.
std::pair<int, int> maximal_run(const std::vector<char>& seq) {
  std::pair<int, int> best{-1, -1};
  int best_len = 0;
  for (const Run& r : to_runs(seq)) {
    if (!r.value) continue;
    if (r.length() > best_len) {
      best_len = r.length();
      best = {r.start, r.end};
    }
  }
  return best;
}

}  // namespace

SegmentIndex parse(const Demonstration& demo, const ParseOptions& opts) {
  if (opts.threshold <= 0.0) throw ValidationError("parse: threshold must be positive");
  if (opts.hysteresis < 1) throw ValidationError("parse: hysteresis must be >= 1");
  auto report = validate(demo);
  if (!report.empty()) throw ValidationError("parse: " + report[0]);

  const int L = demo.length();
  const int A = demo.arm_count();

  std::vector<std::vector<int>> arm_objects = demo.arm_object_map;
  if (arm_objects.empty()) {
    if (A != 1)
      throw ValidationError("parse: bimanual demo needs an arm_object_map");
    arm_objects.resize(1);
    for (int k = 0; k < demo.num_objects(); ++k) arm_objects[0].push_back(k);
  }

  SegmentIndex idx;
  idx.per_arm.resize(A);
  for (int a = 0; a < A; ++a) {
    std::vector<std::pair<int, int>> runs;  // per object, in the arm's order
    for (int k : arm_objects[a]) {
      Vec3 center = object_center(demo.frames[0].cloud, k);  // frozen frame-0 center
      std::vector<char> contact(L);
      for (int t = 0; t < L; ++t) {
        Vec3 ref = demo.frames[t].arm_state[a].apply(opts.tool_offset);
        contact[t] = (ref - center).norm() <= opts.threshold;
      }
      auto run = maximal_run(debounce(std::move(contact), opts.hysteresis));
      if (run.first < 0)
        throw NoContactDetectedError("arm " + std::to_string(a) + ": object " +
                                     std::to_string(k) + " (" + demo.object_names[k] +
                                     ") never enters the contact threshold");
      runs.push_back(run);
    }
    for (size_t i = 1; i < runs.size(); ++i)
      if (runs[i].first <= runs[i - 1].second)
        throw NonSequentialContactError(
            "arm " + std::to_string(a) + ": object " + std::to_string(arm_objects[a][i]) +
            " is contacted at frame " + std::to_string(runs[i].first) +
            ", before object " + std::to_string(arm_objects[a][i - 1]) +
            " is released at frame " + std::to_string(runs[i - 1].second));
    if (!runs.empty() && runs.back().second != L - 1)
      throw TrailingMotionError("arm " + std::to_string(a) + ": frames " +
                                std::to_string(runs.back().second + 1) + ".." +
                                std::to_string(L - 1) + " trail the final skill");

    auto& segs = idx.per_arm[a];
    if (runs.empty()) {  // arm owns no objects: one long motion
      segs.push_back({SegmentKind::Motion, -1, 0, L - 1});
      continue;
    }
    int cursor = 0;
    for (size_t i = 0; i < runs.size(); ++i) {
      int k = arm_objects[a][i];
      segs.push_back({SegmentKind::Motion, k, cursor, runs[i].first - 1});
      segs.push_back({SegmentKind::Skill, k, runs[i].first, runs[i].second});
      cursor = runs[i].second + 1;
    }
  }
  return idx;
}

}  // namespace demogen
