#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ued/archive/archive.hpp"
#include "ued/generator/backend.hpp"
#include "ued/pipeline/config.hpp"
#include "ued/trainer/policy.hpp"
#include "ued/trainer/trainer.hpp"

namespace ued::pipeline {

enum class Mode { DiCode, DiCodeOpenLoop, TargetOnly, DomainRandomization, Plr };

std::string_view name(Mode m);
/// Accepts the CLI spellings: dicode, dicode-ol, target-only, dr, plr.
std::optional<Mode> parse_mode(std::string_view s);

struct MetricsRecord {
  int cycle = 0;
  std::uint64_t env_steps = 0;
  double mean_return = 0.0;
  std::array<double, kNumAchievements> per_achievement_sr{};
  std::size_t archive_size = 0;
  double bonus = 0.0;

  nlohmann::ordered_json to_json() const;
  static MetricsRecord from_json(const nlohmann::json& j);
};

struct RunOptions {
  Mode mode = Mode::DiCode;
  std::uint64_t seed = 0;
  /// Output directory; empty keeps everything in memory.
  std::filesystem::path out;
  bool force = false;
  /// Run generation inline and episodes one after another.
  bool sequential = true;
  std::string backend = "mutation";
  /// Overrides `backend` when set. Must outlive the run.
  gen::Backend* backend_override = nullptr;
  /// Extra cycles an inline ticket waits before it counts as delivered.
  int inline_latency_cycles = 0;
  /// Seed levels used instead of the config's seed directory.
  std::optional<std::vector<dsl::LevelProgram>> seed_programs;
};

struct RunEvent {
  int cycle = 0;
  std::string kind;
  nlohmann::ordered_json detail;
};

struct RunResult {
  std::vector<MetricsRecord> metrics;
  std::vector<RunEvent> events;
  train::EvalResult final_eval;
  train::PolicyTable policy;
  archive::Archive archive;
  /// Env steps of training episodes, the only steps charged to the budget.
  std::uint64_t env_steps = 0;
  std::uint64_t episodes = 0;
  std::uint64_t eval_steps = 0;
  int cycles = 0;
  int blocks = 0;
  int tickets_issued = 0;
  int tickets_failed = 0;
  int levels_generated = 0;
  int levels_rejected = 0;

  int count_events(std::string_view kind) const;
};

/// Trains until the env-step budget is spent, then evaluates on the target.
/// Writes metrics.jsonl, events.jsonl, archive.json, archive.dot, policy.bin and
/// manifest.json when `options.out` is set. Throws std::runtime_error if the output
/// directory already holds a run and `force` is off.
RunResult run_training(const CurriculumConfig& config, const RunOptions& options);

std::vector<MetricsRecord> read_metrics(const std::filesystem::path& run_dir);
/// CSV with one row per metrics record and one column per achievement.
std::string metrics_csv(const std::vector<MetricsRecord>& metrics);

}  // namespace ued::pipeline
