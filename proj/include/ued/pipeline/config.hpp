#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

#include "ued/archive/archive.hpp"
#include "ued/trainer/policy.hpp"
#include "ued/trainer/trainer.hpp"

namespace ued::pipeline {

/// Every scalar the curriculum loop reads. Loaded from JSON with no defaults.
struct CurriculumConfig {
  double tau = 0.3;
  double beta = 1.0;
  double gamma = 0.9;
  int v = 2;
  double d = 1.0;
  int N = 16;
  int min_episodes = 8;
  archive::StatusThresholds status_thresholds;
  double target_fraction = 0.20;
  double replay_fraction = 0.27;
  double new_fraction = 0.53;
  int num_unique_replay = 5;
  int num_unique_new = 10;
  int num_unique_replay_no_new = 15;
  int updates_per_cycle = 100;
  double alpha = 0.1;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  int max_timesteps = 400;
  std::uint64_t budget_env_steps = 200'000;
  int eval_interval = 2;
  int eval_instances = 64;
  double surplus_factor = 1.5;
  int rollout_steps = 32;
  int few_shot_k = 2;
  int dr_pool_size = 64;
  double generator_timeout_s = 120.0;
  /// Directory of seed `.lvl` files; relative paths resolve against the config file.
  std::filesystem::path seed_levels = "levels/seeds";

  /// Throws std::invalid_argument naming the first bad field.
  void validate() const;

  archive::ArchiveParams archive_params() const;
  train::BatchConfig batch_config() const;
  train::LearnerParams learner_params() const;

  nlohmann::ordered_json to_json() const;
  /// Strict: every field must be present and no unknown field is accepted.
  static CurriculumConfig from_json(const nlohmann::json& j);
  static CurriculumConfig load(const std::filesystem::path& path);
};

}  // namespace ued::pipeline
