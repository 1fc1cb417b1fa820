#include "ued/pipeline/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace ued::pipeline {

namespace {

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out, std::set<std::string>& seen) {
  if (!j.contains(key)) throw std::invalid_argument(std::string("config is missing field '") + key + "'");
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw std::invalid_argument(std::string("config field '") + key + "' has the wrong type");
  }
  seen.insert(key);
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument("config: " + msg);
}

}  // namespace

void CurriculumConfig::validate() const {
  require(tau >= 0.0 && tau <= 1.0, "tau must be in [0, 1]");
  require(beta > 0.0, "beta must be > 0");
  require(gamma > 0.0 && gamma <= 1.0, "gamma must be in (0, 1]");
  require(v >= 1, "v must be >= 1");
  require(d >= 0.0, "d must be >= 0");
  require(N >= 1, "N must be >= 1");
  require(min_episodes >= 1, "min_episodes must be >= 1");
  const auto& t = status_thresholds;
  require(t.a > t.b && t.b > t.c && t.c > 0.0 && t.a <= 1.0, "status_thresholds must be strictly decreasing in (0, 1]");
  for (double f : {target_fraction, replay_fraction, new_fraction}) {
    require(f >= 0.0 && f <= 1.0, "batch fractions must be in [0, 1]");
  }
  require(std::abs(target_fraction + replay_fraction + new_fraction - 1.0) < 1e-9,
          "batch fractions must sum to 1");
  require(num_unique_replay >= 1 && num_unique_new >= 1 && num_unique_replay_no_new >= 1,
          "unique level counts must be >= 1");
  require(updates_per_cycle >= 1, "updates_per_cycle must be >= 1");
  require(alpha > 0.0 && alpha <= 1.0, "alpha must be in (0, 1]");
  require(epsilon_start >= 0.0 && epsilon_start <= 1.0 && epsilon_end >= 0.0 && epsilon_end <= 1.0,
          "epsilon values must be in [0, 1]");
  require(max_timesteps >= 1, "max_timesteps must be >= 1");
  require(budget_env_steps >= 1, "budget_env_steps must be >= 1");
  require(eval_interval >= 1, "eval_interval must be >= 1");
  require(eval_instances >= 1, "eval_instances must be >= 1");
  require(surplus_factor >= 1.0, "surplus_factor must be >= 1");
  require(rollout_steps >= 0, "rollout_steps must be >= 0");
  require(few_shot_k >= 0, "few_shot_k must be >= 0");
  require(dr_pool_size >= 1, "dr_pool_size must be >= 1");
  require(generator_timeout_s > 0.0, "generator_timeout_s must be > 0");
}

archive::ArchiveParams CurriculumConfig::archive_params() const {
  archive::ArchiveParams p;
  p.window = static_cast<std::size_t>(N);
  p.min_episodes = min_episodes;
  p.thresholds = status_thresholds;
  p.tau = tau;
  p.beta = beta;
  return p;
}

train::BatchConfig CurriculumConfig::batch_config() const {
  train::BatchConfig b;
  b.updates_per_cycle = updates_per_cycle;
  b.v = v;
  b.target_fraction = target_fraction;
  b.new_fraction = new_fraction;
  b.replay_fraction = replay_fraction;
  b.num_unique_new = num_unique_new;
  b.num_unique_replay = num_unique_replay;
  b.num_unique_replay_no_new = num_unique_replay_no_new;
  return b;
}

train::LearnerParams CurriculumConfig::learner_params() const {
  train::LearnerParams p;
  p.alpha = alpha;
  p.gamma = gamma;
  p.epsilon_start = epsilon_start;
  p.epsilon_end = epsilon_end;
  p.decay_steps = budget_env_steps / 2;
  return p;
}

nlohmann::ordered_json CurriculumConfig::to_json() const {
  nlohmann::ordered_json j;
  j["tau"] = tau;
  j["beta"] = beta;
  j["gamma"] = gamma;
  j["v"] = v;
  j["d"] = d;
  j["N"] = N;
  j["min_episodes"] = min_episodes;
  j["status_thresholds"] = {status_thresholds.a, status_thresholds.b, status_thresholds.c};
  j["target_fraction"] = target_fraction;
  j["replay_fraction"] = replay_fraction;
  j["new_fraction"] = new_fraction;
  j["num_unique_replay"] = num_unique_replay;
  j["num_unique_new"] = num_unique_new;
  j["num_unique_replay_no_new"] = num_unique_replay_no_new;
  j["updates_per_cycle"] = updates_per_cycle;
  j["alpha"] = alpha;
  j["epsilon_start"] = epsilon_start;
  j["epsilon_end"] = epsilon_end;
  j["max_timesteps"] = max_timesteps;
  j["budget_env_steps"] = budget_env_steps;
  j["eval_interval"] = eval_interval;
  j["eval_instances"] = eval_instances;
  j["surplus_factor"] = surplus_factor;
  j["rollout_steps"] = rollout_steps;
  j["few_shot_k"] = few_shot_k;
  j["dr_pool_size"] = dr_pool_size;
  j["generator_timeout_s"] = generator_timeout_s;
  j["seed_levels"] = seed_levels.generic_string();
  return j;
}

CurriculumConfig CurriculumConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  CurriculumConfig c;
  std::set<std::string> seen;
  read(j, "tau", c.tau, seen);
  read(j, "beta", c.beta, seen);
  read(j, "gamma", c.gamma, seen);
  read(j, "v", c.v, seen);
  read(j, "d", c.d, seen);
  read(j, "N", c.N, seen);
  read(j, "min_episodes", c.min_episodes, seen);
  std::vector<double> thresholds;
  read(j, "status_thresholds", thresholds, seen);
  if (thresholds.size() != 3) throw std::invalid_argument("status_thresholds must hold three values");
  c.status_thresholds = {thresholds[0], thresholds[1], thresholds[2]};
  read(j, "target_fraction", c.target_fraction, seen);
  read(j, "replay_fraction", c.replay_fraction, seen);
  read(j, "new_fraction", c.new_fraction, seen);
  read(j, "num_unique_replay", c.num_unique_replay, seen);
  read(j, "num_unique_new", c.num_unique_new, seen);
  read(j, "num_unique_replay_no_new", c.num_unique_replay_no_new, seen);
  read(j, "updates_per_cycle", c.updates_per_cycle, seen);
  read(j, "alpha", c.alpha, seen);
  read(j, "epsilon_start", c.epsilon_start, seen);
  read(j, "epsilon_end", c.epsilon_end, seen);
  read(j, "max_timesteps", c.max_timesteps, seen);
  read(j, "budget_env_steps", c.budget_env_steps, seen);
  read(j, "eval_interval", c.eval_interval, seen);
  read(j, "eval_instances", c.eval_instances, seen);
  read(j, "surplus_factor", c.surplus_factor, seen);
  read(j, "rollout_steps", c.rollout_steps, seen);
  read(j, "few_shot_k", c.few_shot_k, seen);
  read(j, "dr_pool_size", c.dr_pool_size, seen);
  read(j, "generator_timeout_s", c.generator_timeout_s, seen);
  std::string seeds;
  read(j, "seed_levels", seeds, seen);
  c.seed_levels = seeds;
  for (const auto& [key, value] : j.items()) {
    if (!seen.contains(key)) throw std::invalid_argument("unknown config field '" + key + "'");
  }
  c.validate();
  return c;
}

CurriculumConfig CurriculumConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  auto c = from_json(j);
  if (c.seed_levels.is_relative()) c.seed_levels = path.parent_path() / c.seed_levels;
  return c;
}

}  // namespace ued::pipeline
