// demogen: batch entry points for the demonstration-synthesis toolkit.
//
// Subcommands: capture, generate, validate, evaluate, augment. Each takes a
// JSON config file via --spec; flags given on the command line override file
// values, and unknown file keys are rejected. Exit codes: 0 ok, 1 user error
// or partial success, 2 internal error. DEMOGEN_LOG=error|warn|info|debug
// controls stderr logging.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "demogen/errors.hpp"
#include "demogen/pipeline.hpp"

namespace {

using nlohmann::json;

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw demogen::IoError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw demogen::FormatError(path + ": " + e.what());
  }
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& what) {
  if (!j.is_object()) throw demogen::FormatError(what + ": config must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) throw demogen::FormatError(what + ": unknown key '" + item.key() + "'");
  }
}

template <typename T>
void merge(const json& file, const char* key, T& field) {
  if (file.contains(key)) {
    try {
      field = file.at(key).get<T>();
    } catch (const json::exception& e) {
      throw demogen::FormatError(std::string("config key '") + key + "': " + e.what());
    }
  }
}

void merge_path(const json& file, const char* key, std::filesystem::path& field) {
  std::string s = field.string();
  merge(file, key, s);
  field = s;
}

// Evaluation grid: either an explicit cell list or a counted lattice.
std::vector<Eigen::Vector2d> parse_grid(const json& g) {
  if (g.contains("cells")) {
    check_keys(g, {"cells"}, "grid");
    std::vector<Eigen::Vector2d> cells;
    for (const auto& c : g.at("cells")) {
      if (!c.is_array() || c.size() != 2) {
        throw demogen::FormatError("grid cells must be [x, y] pairs");
      }
      cells.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
    }
    return cells;
  }
  check_keys(g, {"x_lo", "x_hi", "y_lo", "y_hi", "nx", "ny"}, "grid");
  try {
    return demogen::grid_targets_by_count(g.at("x_lo").get<double>(), g.at("x_hi").get<double>(),
                                          g.at("y_lo").get<double>(), g.at("y_hi").get<double>(),
                                          g.at("nx").get<int>(), g.at("ny").get<int>());
  } catch (const json::exception& e) {
    throw demogen::FormatError(std::string("grid: ") + e.what());
  }
}

json grid_json(const std::vector<Eigen::Vector2d>& grid) {
  json cells = json::array();
  for (const auto& c : grid) cells.push_back({c.x(), c.y()});
  return json{{"cells", cells}};
}

void emit(const json& summary, bool as_json, const std::string& human) {
  if (as_json) {
    std::cout << summary.dump(2) << "\n";
  } else {
    std::cout << human << "\n";
  }
}

// Shared flag storage; each subcommand registers only the flags it uses and
// `count()` on the option tells us whether the user set it explicitly.
struct Flags {
  std::string task;
  std::string spec;
  std::string out;
  std::string dir;  // positional: sources or dataset directory
  int replays = 0;
  int workers = 0;
  uint64_t seed = 0;
  bool json_out = false;
};

int cmd_capture(const Flags& f, const CLI::App& cmd) {
  demogen::CaptureConfig cfg;
  json file = json::object();
  if (!f.spec.empty()) {
    file = load_json_file(f.spec);
    check_keys(file, {"task", "out", "replays", "seed"}, "capture");
    merge(file, "task", cfg.task);
    merge_path(file, "out", cfg.out);
    merge(file, "replays", cfg.replays);
    merge(file, "seed", cfg.seed);
  }
  if (cmd.count("--task")) cfg.task = f.task;
  if (cmd.count("--out")) cfg.out = f.out;
  if (cmd.count("--replays")) cfg.replays = f.replays;
  if (cmd.count("--seed")) cfg.seed = f.seed;
  if (cfg.task.empty()) throw demogen::ValidationError("capture: --task is required");

  demogen::log_line(demogen::LogLevel::Info, "capture seed " + std::to_string(cfg.seed));
  demogen::CaptureResult res = demogen::run_capture(cfg);
  json summary = res.manifest;
  summary["ok"] = true;
  emit(summary, f.json_out,
       "capture: " + std::to_string(res.containers.size()) + " containers in " +
           cfg.out.string() + " (config " + summary["config_hash"].get<std::string>() + ")");
  return 0;
}

int cmd_generate(const Flags& f, const CLI::App& cmd) {
  if (f.spec.empty()) throw demogen::ValidationError("generate: --spec is required");
  json file = load_json_file(f.spec);

  demogen::GenerateConfig cfg;
  if (file.contains("generation")) {
    // Full run config with the generation spec nested under "generation".
    check_keys(file, {"sources", "out", "task", "workers", "seed", "generation"}, "generate");
    cfg.spec = demogen::json_generation_spec(file.at("generation"));
    std::string sources;
    merge(file, "sources", sources);
    cfg.sources = sources;
    merge_path(file, "out", cfg.out);
    merge(file, "task", cfg.task);
    merge(file, "workers", cfg.workers);
    merge(file, "seed", cfg.seed);
  } else {
    // Bare generation spec.
    check_keys(file, {"eval_grid", "grid_spacing", "perturb_offsets", "num_sources", "adr",
                      "obstacle"},
               "generate");
    cfg.spec = demogen::json_generation_spec(file);
  }
  if (!f.dir.empty()) cfg.sources = f.dir;
  if (cmd.count("--out")) cfg.out = f.out;
  if (cmd.count("--task")) cfg.task = f.task;
  if (cmd.count("--workers")) cfg.workers = f.workers;
  if (cmd.count("--seed")) cfg.seed = f.seed;
  if (cfg.sources.empty()) throw demogen::ValidationError("generate: sources directory required");
  if (cfg.out.empty()) throw demogen::ValidationError("generate: --out is required");

  demogen::log_line(demogen::LogLevel::Info,
                    "generate seed " + std::to_string(cfg.seed) + ", workers " +
                        std::to_string(cfg.workers));
  demogen::GenerateResult res = demogen::run_generate(cfg);
  json summary = res.manifest;
  summary["ok"] = res.rejected.empty();
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "generate: %d/%d written, %zu rejected, total %.3fs "
                "(per trajectory mean %.4fs median %.4fs max %.4fs)",
                res.written, res.planned, res.rejected.size(), res.total_s, res.mean_s,
                res.median_s, res.max_s);
  emit(summary, f.json_out, buf);
  return res.rejected.empty() ? 0 : 1;
}

int cmd_validate(const Flags& f, const CLI::App& cmd) {
  demogen::ValidateConfig cfg;
  json file = json::object();
  if (!f.spec.empty()) {
    file = load_json_file(f.spec);
    check_keys(file, {"dataset", "task"}, "validate");
    std::string dataset;
    merge(file, "dataset", dataset);
    cfg.dataset = dataset;
    merge(file, "task", cfg.task);
  }
  if (!f.dir.empty()) cfg.dataset = f.dir;
  if (cmd.count("--task")) cfg.task = f.task;
  if (cfg.dataset.empty()) throw demogen::ValidationError("validate: dataset directory required");

  demogen::ValidateResult res = demogen::run_validate(cfg);
  json config_json{{"dataset", cfg.dataset.string()}, {"task", cfg.task}};
  json flagged = json::array();
  for (const auto& r : res.flagged) {
    flagged.push_back({{"index", r.index}, {"item", r.item}, {"reason", r.reason}});
  }
  json summary{{"subcommand", "validate"},
               {"config", config_json},
               {"config_hash", demogen::config_hash(config_json)},
               {"demos", res.demos},
               {"succeeded", res.succeeded},
               {"fraction", res.fraction()},
               {"flagged", flagged},
               {"ok", res.ok()}};
  emit(summary, f.json_out,
       "validate: " + std::to_string(res.succeeded) + "/" + std::to_string(res.demos) +
           " replays succeeded, " + std::to_string(res.flagged.size()) + " flagged");
  return res.ok() ? 0 : 1;
}

int cmd_evaluate(const Flags& f, const CLI::App& cmd) {
  if (f.spec.empty()) throw demogen::ValidationError("evaluate: --spec is required");
  json file = load_json_file(f.spec);
  check_keys(file, {"dataset", "task", "grid", "trials_per_cell", "seed", "out"}, "evaluate");
  if (!file.contains("grid")) throw demogen::ValidationError("evaluate: spec needs a grid");

  demogen::EvaluateConfig cfg;
  cfg.grid = parse_grid(file.at("grid"));
  std::string dataset;
  merge(file, "dataset", dataset);
  cfg.dataset = dataset;
  merge(file, "task", cfg.task);
  merge(file, "trials_per_cell", cfg.trials_per_cell);
  merge(file, "seed", cfg.seed);
  merge_path(file, "out", cfg.out);
  if (!f.dir.empty()) cfg.dataset = f.dir;
  if (cmd.count("--task")) cfg.task = f.task;
  if (cmd.count("--seed")) cfg.seed = f.seed;
  if (cmd.count("--out")) cfg.out = f.out;
  if (cfg.dataset.empty()) throw demogen::ValidationError("evaluate: dataset directory required");

  demogen::log_line(demogen::LogLevel::Info, "evaluate seed " + std::to_string(cfg.seed));
  demogen::EvaluateResult res = demogen::run_evaluate(cfg);
  json config_json{{"dataset", cfg.dataset.string()}, {"task", cfg.task},
                   {"grid", grid_json(cfg.grid)},     {"trials_per_cell", cfg.trials_per_cell},
                   {"seed", cfg.seed},                {"out", cfg.out.string()}};
  json summary{{"subcommand", "evaluate"},
               {"config", config_json},
               {"config_hash", demogen::config_hash(config_json)},
               {"cells", res.heatmap.size()},
               {"mean_success", res.mean}};
  char buf[128];
  std::snprintf(buf, sizeof(buf), "evaluate: mean success %.4f over %d cells", res.mean,
                res.heatmap.size());
  std::string human = buf;
  if (!cfg.out.empty()) human += " -> " + cfg.out.string();
  emit(summary, f.json_out, human);
  return 0;
}

int cmd_augment(const Flags& f, const CLI::App& cmd) {
  if (f.spec.empty()) throw demogen::ValidationError("augment: --spec is required");
  json file = load_json_file(f.spec);
  check_keys(file, {"dataset", "out", "workers", "seed", "adr", "obstacle"}, "augment");

  demogen::AugmentConfig cfg;
  if (file.contains("adr")) cfg.adr = demogen::json_adr_spec(file.at("adr"));
  if (file.contains("obstacle")) cfg.obstacle = demogen::json_obstacle_spec(file.at("obstacle"));
  std::string dataset;
  merge(file, "dataset", dataset);
  cfg.dataset = dataset;
  merge_path(file, "out", cfg.out);
  merge(file, "workers", cfg.workers);
  merge(file, "seed", cfg.seed);
  if (!f.dir.empty()) cfg.dataset = f.dir;
  if (cmd.count("--out")) cfg.out = f.out;
  if (cmd.count("--workers")) cfg.workers = f.workers;
  if (cmd.count("--seed")) cfg.seed = f.seed;
  if (cfg.dataset.empty()) throw demogen::ValidationError("augment: dataset directory required");
  if (cfg.out.empty()) throw demogen::ValidationError("augment: --out is required");

  demogen::log_line(demogen::LogLevel::Info, "augment seed " + std::to_string(cfg.seed));
  demogen::AugmentResult res = demogen::run_augment(cfg);
  json summary = res.manifest;
  summary["ok"] = res.rejected.empty();
  emit(summary, f.json_out,
       "augment: " + std::to_string(res.written) + "/" + std::to_string(res.inputs) +
           " written, " + std::to_string(res.rejected.size()) + " rejected");
  return res.rejected.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"demonstration synthesis toolkit"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* capture = app.add_subcommand("capture", "record scripted source demonstrations");
  capture->add_option("--task", f.task, "builtin task name or task JSON path");
  capture->add_option("--spec", f.spec, "run config JSON file");
  capture->add_option("--out", f.out, "output directory");
  capture->add_option("--replays", f.replays, "extra noise-seed re-captures");
  capture->add_option("--seed", f.seed, "base noise seed");
  capture->add_flag("--json", f.json_out, "JSON summary on stdout");

  CLI::App* generate = app.add_subcommand("generate", "synthesize a dataset from sources");
  generate->add_option("sources", f.dir, "directory of source demo containers");
  generate->add_option("--spec", f.spec, "generation spec / run config JSON file");
  generate->add_option("--out", f.out, "output dataset directory");
  generate->add_option("--task", f.task, "task override");
  generate->add_option("--workers", f.workers, "worker threads (0 = logical cores)");
  generate->add_option("--seed", f.seed, "planner seed");
  generate->add_flag("--json", f.json_out, "JSON summary on stdout");

  CLI::App* validate = app.add_subcommand("validate", "replay a dataset through the simulator");
  validate->add_option("dataset", f.dir, "dataset directory");
  validate->add_option("--spec", f.spec, "run config JSON file");
  validate->add_option("--task", f.task, "task override");
  validate->add_flag("--json", f.json_out, "JSON summary on stdout");

  CLI::App* evaluate = app.add_subcommand("evaluate", "nearest-neighbor replay over a grid");
  evaluate->add_option("dataset", f.dir, "dataset directory");
  evaluate->add_option("--spec", f.spec, "evaluation spec JSON file (grid etc.)");
  evaluate->add_option("--task", f.task, "task override");
  evaluate->add_option("--out", f.out, "heatmap CSV path");
  evaluate->add_option("--seed", f.seed, "observation noise seed");
  evaluate->add_flag("--json", f.json_out, "JSON summary on stdout");

  CLI::App* augment = app.add_subcommand("augment", "apply ADR or obstacle augmentation");
  augment->add_option("dataset", f.dir, "input dataset directory");
  augment->add_option("--spec", f.spec, "augmentation spec JSON file");
  augment->add_option("--out", f.out, "output dataset directory");
  augment->add_option("--workers", f.workers, "worker threads (0 = logical cores)");
  augment->add_option("--seed", f.seed, "seed");
  augment->add_flag("--json", f.json_out, "JSON summary on stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (capture->parsed()) return cmd_capture(f, *capture);
    if (generate->parsed()) return cmd_generate(f, *generate);
    if (validate->parsed()) return cmd_validate(f, *validate);
    if (evaluate->parsed()) return cmd_evaluate(f, *evaluate);
    if (augment->parsed()) return cmd_augment(f, *augment);
  } catch (const demogen::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
