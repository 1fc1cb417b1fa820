#pragma once

#include <optional>

#include "ued/generator/context.hpp"

namespace ued::gen {

/// Decision table mapping parent and target performance to an edit.
Intent choose_intent(const dsl::LevelProgram& parent, const PerformanceProfile& parent_perf,
                     const PerformanceProfile& target_perf,
                     const archive::StatusThresholds& thresholds);

/// Next registry achievement after the highest goal entry that is not already completed.
std::optional<Achievement> next_achievement(const dsl::LevelProgram& p);

/// Goal the offspring of `parent` will carry under `intent`.
AchievementSet planned_goal(const dsl::LevelProgram& parent, Intent intent);

/// Offspring program. Always valid when `parent` is valid.
dsl::LevelProgram mutate(const dsl::LevelProgram& parent, Intent intent, Rng& rng);

/// Scaffolding matching what `a` would have produced if earned in-episode.
void add_scaffold(dsl::LevelProgram& p, Achievement a);

}  // namespace ued::gen
