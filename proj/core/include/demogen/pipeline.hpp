#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "demogen/evaluation.hpp"
#include "demogen/sim.hpp"
#include "demogen/strategies.hpp"

namespace demogen {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Parsed once from DEMOGEN_LOG (error|warn|info|debug); defaults to warn.
LogLevel log_level();
void log_line(LogLevel level, const std::string& msg);  // stderr, level-gated

/// FNV-1a over the compact dump, hex string. Stable across runs/platforms.
std::string config_hash(const nlohmann::json& config);

/// Runs fn(worker, index) for index in [0, n). workers <= 1 is a plain
/// sequential loop. Demogen errors inside items must be handled by fn;
/// other exceptions propagate after all workers join.
void run_parallel(int n, int workers, const std::function<void(int, int)>& fn);

/// Task lookup: a path to a task JSON file if one exists, else a builtin name.
TaskSpec resolve_task(const std::string& name_or_path);

/// Container subdirectories (those holding meta.json), sorted by name.
std::vector<std::filesystem::path> list_containers(const std::filesystem::path& dir);

struct Rejection {
  int index = 0;
  std::string item;
  std::string reason;
};

struct CaptureConfig {
  std::string task;
  std::filesystem::path out = ".";
  int replays = 0;
  uint64_t seed = 0;
};

struct CaptureResult {
  std::vector<std::filesystem::path> containers;
  nlohmann::json manifest;
};

/// Scripted source capture at the task-default configuration plus `replays`
/// re-captures of the same episode under fresh noise seeds. Writes
/// capture_### containers and a manifest.json into `out`.
CaptureResult run_capture(const CaptureConfig& cfg);

struct GenerateConfig {
  std::filesystem::path sources;
  std::filesystem::path out;
  GenerationSpec spec;
  std::string task;  // optional override; default from each source's task field
  int workers = 0;   // 0 = hardware concurrency
  uint64_t seed = 0;
};

struct GenerateResult {
  int planned = 0;
  int written = 0;
  std::vector<Rejection> rejected;
  double total_s = 0.0;
  double mean_s = 0.0, median_s = 0.0, max_s = 0.0;  // per-trajectory
  nlohmann::json manifest;
};

/// Full pipeline over plan_dataset(spec): parse each needed source once,
/// adapt + synthesize every planned target, validate and write demo_#####
/// containers (numbered by planned index, so rejected targets leave gaps)
/// plus a manifest.json with wall-clock stats and the rejection list.
/// Per-target planner seed = hash(seed, target index), so results are
/// identical for any worker count.
GenerateResult run_generate(const GenerateConfig& cfg);

struct ValidateConfig {
  std::filesystem::path dataset;
  std::string task;  // optional override
};

struct ValidateResult {
  int demos = 0;
  int succeeded = 0;
  std::vector<Rejection> flagged;  // unreadable or invalid containers

  double fraction() const { return demos == 0 ? 0.0 : static_cast<double>(succeeded) / demos; }
  bool ok() const { return flagged.empty() && succeeded == demos && demos > 0; }
};

/// Replays every container's recorded actions through execute_plan and
/// reports the success fraction; containers that fail to load or validate
/// are flagged instead of aborting the run.
ValidateResult run_validate(const ValidateConfig& cfg);

struct EvaluateConfig {
  std::filesystem::path dataset;
  std::string task;  // optional; default from the first demo
  std::vector<Eigen::Vector2d> grid;
  int trials_per_cell = 5;
  uint64_t seed = 0;
  std::filesystem::path out;  // heatmap CSV
};

struct EvaluateResult {
  Heatmap heatmap;
  double mean = 0.0;
};

/// nn_replay grid evaluation of a dataset; writes the heatmap CSV to `out`.
EvaluateResult run_evaluate(const EvaluateConfig& cfg);

struct AugmentConfig {
  std::filesystem::path dataset;
  std::filesystem::path out;
  std::optional<AdrSpec> adr;            // exactly one of adr/obstacle
  std::optional<ObstacleSpec> obstacle;
  int workers = 0;
  uint64_t seed = 0;
};

struct AugmentResult {
  int inputs = 0;
  int written = 0;
  std::vector<Rejection> rejected;
  nlohmann::json manifest;
};

/// Applies the chosen augmentation to every container in the dataset and
/// writes same-named containers plus manifest.json into `out`. ADR specs
/// pair disturb_times[i] with displacements[i], applied in order; each time
/// indexes into the already-augmented demo of the previous step.
AugmentResult run_augment(const AugmentConfig& cfg);

}  // namespace demogen
