#include "demogen/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <thread>

#include "demogen/adapter.hpp"
#include "demogen/errors.hpp"
#include "demogen/segments.hpp"
#include "demogen/synthesis.hpp"

namespace demogen {

namespace {

// Same stream splitter the simulator uses, so seeds derived here line up
// with what scripted captures under the same base seed would get.
uint64_t mix(uint64_t seed, uint64_t salt) {
  uint64_t x = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  return x;
}

std::string zero_pad(const char* prefix, int width, int value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%0*d", prefix, width, value);
  return buf;
}

void write_manifest(const std::filesystem::path& dir, const nlohmann::json& manifest) {
  std::filesystem::create_directories(dir);
  const auto path = dir / "manifest.json";
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << manifest.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

nlohmann::json rejections_json(const std::vector<Rejection>& rejected) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rejected) {
    arr.push_back({{"index", r.index}, {"item", r.item}, {"reason", r.reason}});
  }
  return arr;
}

std::vector<Pose> default_config(const TaskSpec& task) {
  std::vector<Pose> config;
  config.reserve(task.objects.size());
  for (const auto& obj : task.objects) config.push_back(obj.prim.pose);
  return config;
}

struct TimingStats {
  double mean_s = 0.0, median_s = 0.0, max_s = 0.0;
};

TimingStats timing_stats(std::vector<double> secs) {
  TimingStats stats;
  if (secs.empty()) return stats;
  std::sort(secs.begin(), secs.end());
  double sum = 0.0;
  for (double s : secs) sum += s;
  stats.mean_s = sum / secs.size();
  stats.median_s = secs[secs.size() / 2];
  stats.max_s = secs.back();
  return stats;
}

}  // namespace

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("DEMOGEN_LOG");
    std::string s = env ? env : "";
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "error") return LogLevel::Error;
    if (s == "info") return LogLevel::Info;
    if (s == "debug") return LogLevel::Debug;
    return LogLevel::Warn;
  }();
  return level;
}

void log_line(LogLevel level, const std::string& msg) {
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  static std::mutex io_mutex;
  std::lock_guard<std::mutex> lock(io_mutex);
  std::cerr << "[demogen] " << names[static_cast<int>(level)] << ": " << msg << "\n";
}

std::string config_hash(const nlohmann::json& config) {
  const std::string dump = config.dump();
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void run_parallel(int n, int workers, const std::function<void(int, int)>& fn) {
  if (n <= 0) return;
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers <= 0) workers = 1;
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(0, i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(w, i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

TaskSpec resolve_task(const std::string& name_or_path) {
  if (name_or_path.empty()) throw ValidationError("no task given");
  std::error_code ec;
  if (std::filesystem::is_regular_file(name_or_path, ec)) return read_task(name_or_path);
  return builtin_task(name_or_path);
}

std::vector<std::filesystem::path> list_containers(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw IoError("not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "meta.json")) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

CaptureResult run_capture(const CaptureConfig& cfg) {
  if (cfg.replays < 0) throw ValidationError("capture: replays must be >= 0");
  const TaskSpec task = resolve_task(cfg.task);
  const std::vector<Pose> config = default_config(task);

  CaptureResult res;
  for (int k = 0; k <= cfg.replays; ++k) {
    const uint64_t noise_seed = k == 0 ? cfg.seed : mix(cfg.seed, k);
    const Demonstration demo = scripted_demo(task, config, noise_seed);
    const auto dir = cfg.out / zero_pad("capture_", 3, k);
    write_demo(demo, dir);
    res.containers.push_back(dir);
    log_line(LogLevel::Info, "captured " + dir.string());
  }

  nlohmann::json config_json{{"task", cfg.task},
                             {"out", cfg.out.string()},
                             {"replays", cfg.replays},
                             {"seed", cfg.seed}};
  nlohmann::json names = nlohmann::json::array();
  for (const auto& p : res.containers) names.push_back(p.filename().string());
  res.manifest = {{"subcommand", "capture"},
                  {"config", config_json},
                  {"config_hash", config_hash(config_json)},
                  {"containers", names}};
  write_manifest(cfg.out, res.manifest);
  return res;
}

GenerateResult run_generate(const GenerateConfig& cfg) {
  const auto t_start = std::chrono::steady_clock::now();
  const std::vector<PlannedTarget> targets = plan_dataset(cfg.spec);
  const auto source_dirs = list_containers(cfg.sources);
  if (static_cast<int>(source_dirs.size()) < cfg.spec.num_sources) {
    throw ValidationError("generate: spec needs " + std::to_string(cfg.spec.num_sources) +
                          " sources, found " + std::to_string(source_dirs.size()) + " in " +
                          cfg.sources.string());
  }

  // Sources are loaded (and parsed, if stored without a segment index) once
  // up front; workers only read them.
  std::vector<Demonstration> sources;
  std::vector<SegmentIndex> segs;
  std::vector<TaskSpec> tasks;
  sources.reserve(cfg.spec.num_sources);
  for (int s = 0; s < cfg.spec.num_sources; ++s) {
    sources.push_back(read_demo(source_dirs[s]));
    const Demonstration& src = sources.back();
    segs.push_back(src.segment_index ? *src.segment_index : parse(src));
    tasks.push_back(resolve_task(cfg.task.empty() ? src.task : cfg.task));
  }

  std::filesystem::create_directories(cfg.out);
  const int n = static_cast<int>(targets.size());
  int workers = cfg.workers;
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers <= 0) workers = 1;
  workers = std::min(workers, std::max(n, 1));

  std::vector<char> written(n, 0);
  std::vector<std::string> reasons(n);
  std::vector<double> secs(n, 0.0);

  // The synthesis cache is not thread safe; one lazily-built context per
  // (worker, source) keeps workers independent.
  std::vector<std::vector<std::unique_ptr<SynthesisContext>>> contexts(workers);
  for (auto& per_worker : contexts) per_worker.resize(sources.size());

  run_parallel(n, workers, [&](int worker, int i) {
    const auto t0 = std::chrono::steady_clock::now();
    const PlannedTarget& target = targets[i];
    try {
      const Demonstration& src = sources[target.source];
      AdaptOptions opts;
      opts.workspace = tasks[target.source].workspace;
      opts.planner.rng_seed = mix(cfg.seed, static_cast<uint64_t>(i));
      const ActionPlan plan =
          src.arm_count() > 1 ? adapt_bimanual(src, segs[target.source], target.config, opts)
                              : adapt_trajectory(src, segs[target.source], target.config, opts);
      auto& ctx = contexts[worker][target.source];
      if (!ctx) ctx = std::make_unique<SynthesisContext>(src, segs[target.source]);
      const Demonstration demo = synthesize_demo(*ctx, target.config, plan);
      write_demo(demo, cfg.out / zero_pad("demo_", 5, i));
      written[i] = 1;
    } catch (const Error& e) {
      reasons[i] = e.what();
      log_line(LogLevel::Info, "rejected target " + std::to_string(i) + ": " + e.what());
    }
    secs[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  });

  GenerateResult res;
  res.planned = n;
  std::vector<double> ok_secs;
  for (int i = 0; i < n; ++i) {
    if (written[i]) {
      ++res.written;
      ok_secs.push_back(secs[i]);
    } else {
      res.rejected.push_back({i, zero_pad("demo_", 5, i), reasons[i]});
    }
  }
  res.total_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  const TimingStats stats = timing_stats(ok_secs);
  res.mean_s = stats.mean_s;
  res.median_s = stats.median_s;
  res.max_s = stats.max_s;

  nlohmann::json config_json{{"sources", cfg.sources.string()},
                             {"out", cfg.out.string()},
                             {"task", cfg.task},
                             {"workers", cfg.workers},
                             {"seed", cfg.seed},
                             {"generation", generation_spec_json(cfg.spec)}};
  res.manifest = {{"subcommand", "generate"},
                  {"config", config_json},
                  {"config_hash", config_hash(config_json)},
                  {"planned", res.planned},
                  {"written", res.written},
                  {"rejected", rejections_json(res.rejected)},
                  {"timings", {{"total_s", res.total_s},
                               {"per_trajectory", {{"mean_s", res.mean_s},
                                                   {"median_s", res.median_s},
                                                   {"max_s", res.max_s}}}}}};
  write_manifest(cfg.out, res.manifest);
  log_line(LogLevel::Info, "generate: wrote " + std::to_string(res.written) + "/" +
                               std::to_string(res.planned) + " in " +
                               std::to_string(res.total_s) + "s");
  return res;
}

ValidateResult run_validate(const ValidateConfig& cfg) {
  const auto dirs = list_containers(cfg.dataset);
  if (dirs.empty()) throw EmptyDatasetError("validate: no containers in " + cfg.dataset.string());

  ValidateResult res;
  for (int i = 0; i < static_cast<int>(dirs.size()); ++i) {
    const std::string name = dirs[i].filename().string();
    try {
      const Demonstration demo = read_demo(dirs[i]);
      const auto problems = validate(demo);
      if (!problems.empty()) {
        res.flagged.push_back({i, name, problems.front()});
        continue;
      }
      const TaskSpec task = resolve_task(cfg.task.empty() ? demo.task : cfg.task);
      ++res.demos;
      if (execute_plan(task, demo.init_config, replay_plan(demo)).success) ++res.succeeded;
    } catch (const Error& e) {
      res.flagged.push_back({i, name, e.what()});
    }
  }
  return res;
}

EvaluateResult run_evaluate(const EvaluateConfig& cfg) {
  const auto dirs = list_containers(cfg.dataset);
  if (dirs.empty()) throw EmptyDatasetError("evaluate: no containers in " + cfg.dataset.string());
  std::vector<Demonstration> demos;
  demos.reserve(dirs.size());
  for (const auto& dir : dirs) demos.push_back(read_demo(dir));

  const TaskSpec task = resolve_task(cfg.task.empty() ? demos.front().task : cfg.task);
  if (cfg.grid.empty()) throw ValidationError("evaluate: empty grid");

  NnReplayPolicy policy = nn_replay_policy(std::move(demos));
  EvalOptions opts;
  opts.trials_per_cell = cfg.trials_per_cell;
  opts.seed = cfg.seed;

  EvaluateResult res;
  res.heatmap = grid_eval(policy, task, cfg.grid, opts);
  res.mean = mean_success(res.heatmap);
  if (!cfg.out.empty()) heatmap_export(res.heatmap, cfg.out);
  return res;
}

AugmentResult run_augment(const AugmentConfig& cfg) {
  if (cfg.adr.has_value() == cfg.obstacle.has_value()) {
    throw ValidationError("augment: exactly one of adr/obstacle must be given");
  }
  if (cfg.adr && cfg.adr->disturb_times.size() != cfg.adr->displacements.size()) {
    throw ValidationError("augment: disturb_times and displacements must pair up");
  }
  const auto dirs = list_containers(cfg.dataset);
  if (dirs.empty()) throw EmptyDatasetError("augment: no containers in " + cfg.dataset.string());
  std::filesystem::create_directories(cfg.out);

  const int n = static_cast<int>(dirs.size());
  std::vector<char> written(n, 0);
  std::vector<std::string> reasons(n);

  run_parallel(n, cfg.workers, [&](int, int i) {
    try {
      Demonstration demo = read_demo(dirs[i]);
      if (cfg.adr) {
        const TaskSpec task = resolve_task(demo.task);
        AdrOptions opts;
        opts.pause = cfg.adr->pause;
        opts.workspace = task.workspace;
        for (size_t k = 0; k < cfg.adr->disturb_times.size(); ++k) {
          demo = adr_augment(demo, cfg.adr->disturb_times[k], cfg.adr->displacements[k], opts);
        }
      } else {
        demo = obstacle_augment(demo, *cfg.obstacle);
      }
      write_demo(demo, cfg.out / dirs[i].filename());
      written[i] = 1;
    } catch (const Error& e) {
      reasons[i] = e.what();
      log_line(LogLevel::Info, "augment rejected " + dirs[i].filename().string() + ": " + e.what());
    }
  });

  AugmentResult res;
  res.inputs = n;
  for (int i = 0; i < n; ++i) {
    if (written[i]) {
      ++res.written;
    } else {
      res.rejected.push_back({i, dirs[i].filename().string(), reasons[i]});
    }
  }

  nlohmann::json config_json{{"dataset", cfg.dataset.string()},
                             {"out", cfg.out.string()},
                             {"workers", cfg.workers},
                             {"seed", cfg.seed}};
  if (cfg.adr) config_json["adr"] = adr_spec_json(*cfg.adr);
  if (cfg.obstacle) config_json["obstacle"] = obstacle_spec_json(*cfg.obstacle);
  res.manifest = {{"subcommand", "augment"},
                  {"config", config_json},
                  {"config_hash", config_hash(config_json)},
                  {"inputs", res.inputs},
                  {"written", res.written},
                  {"rejected", rejections_json(res.rejected)}};
  write_manifest(cfg.out, res.manifest);
  return res;
}

}  // namespace demogen
