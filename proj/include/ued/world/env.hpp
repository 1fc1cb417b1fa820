#pragma once

#include <cstdint>
#include <vector>

#include "ued/core/registry.hpp"
#include "ued/dsl/program.hpp"
#include "ued/world/state.hpp"

namespace ued::world {

struct StepResult {
  double native_reward = 0.0;
  AchievementSet newly_unlocked;
  bool done = false;
};

struct WrappedReward {
  double reward = 0.0;
  bool done = false;
};

/// Episode start for level `p`. Throws dsl::CompileError.
WorldState reset(const dsl::LevelProgram& p, std::uint64_t episode_seed,
                 int max_timesteps = kDefaultMaxTimesteps);

/// Advances `s` in place by one action. Unusable actions still advance time.
StepResult step(WorldState& s, Action a,
                const AchievementRegistry& registry = AchievementRegistry::standard());

/// Level reward: native reward with unlocks of initially-satisfied achievements
/// masked out, plus `bonus` on the step the goal becomes satisfied.
WrappedReward wrapped_reward(double native_reward, const AchievementSet& newly_unlocked,
                             const WorldState& s, const AchievementSet& goal, double bonus,
                             const AchievementRegistry& registry = AchievementRegistry::standard());

struct Observation {
  int floor = 0;
  /// Whole current floor, row-major. Blocks use their index; mobs and the player
  /// are overlaid as kCowCode, kZombieCode, kGuardCode and kPlayerCode + facing.
  std::vector<std::int16_t> map;
  std::vector<std::int16_t> inventory;
  int health = 0;
  int food = 0;
  /// One entry per registry achievement, in registry order.
  std::vector<std::uint8_t> goal;

  static constexpr std::int16_t kCowCode = 16;
  static constexpr std::int16_t kZombieCode = 17;
  static constexpr std::int16_t kGuardCode = 18;
  static constexpr std::int16_t kPlayerCode = 20;

  std::vector<std::int16_t> flatten() const;

  bool operator==(const Observation&) const = default;
};

Observation encode_observation(const WorldState& s, const AchievementSet& goal,
                               const AchievementRegistry& registry = AchievementRegistry::standard());

}  // namespace ued::world
