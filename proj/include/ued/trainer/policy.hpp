#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ued/core/ids.hpp"
#include "ued/core/rng.hpp"
#include "ued/world/state.hpp"

namespace ued::train {

using QValues = std::array<double, kNumActions>;
using StateKey = std::uint64_t;
/// Bit i set allows choice i.
using ChoiceMask = std::uint32_t;

inline constexpr ChoiceMask kAllActions = (ChoiceMask{1} << kNumActions) - 1;

// Option rows reuse QValues, one slot per achievement.
static_assert(kNumAchievements <= kNumActions);

/// Marks the absence of a subgoal in a skill key.
inline constexpr std::uint64_t kNoSubgoal = 15;

/// Skill-level key: position, the subgoal being pursued, whether a hostile mob is
/// adjacent, the bearing of the nearest hostile for combat subgoals, and the inventory
/// and surroundings features that subgoal depends on.
StateKey skill_key(const world::WorldState& s, std::optional<Achievement> subgoal);

/// Option-level key: floor, floor-0 kills (capped at 7), unlocked achievements and goal.
/// Always has the top bit set.
StateKey option_key(const world::WorldState& s, const AchievementSet& goal);

/// Goal achievements still pending, as a choice mask over achievement indices.
/// DEFEAT_ZOMBIE is also open while the goal still asks for DESCEND_FLOOR and the
/// ladder on floor 0 is locked, since each kill counts toward unlocking it.
ChoiceMask pending_mask(const world::WorldState& s, const AchievementSet& goal);

bool is_option_key(StateKey key);

/// Subgoal field of a skill key, or kNoSubgoal.
std::uint64_t key_subgoal(StateKey key);

struct LearnerParams {
  double alpha = 0.1;
  double gamma = 0.9;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  /// Env steps over which epsilon falls linearly to epsilon_end.
  std::uint64_t decay_steps = 100'000;

  bool operator==(const LearnerParams&) const = default;
};

class PolicyTable {
 public:
  explicit PolicyTable(LearnerParams params = {});

  const QValues* find(StateKey key) const;
  /// Best allowed choice; ties (including unseen states) broken uniformly with `rng`.
  std::size_t greedy(StateKey key, Rng& rng, ChoiceMask allowed = kAllActions) const;
  /// Epsilon-greedy over the allowed choices.
  std::size_t choose(StateKey key, double epsilon, Rng& rng, ChoiceMask allowed = kAllActions) const;
  Action act(StateKey key, double epsilon, Rng& rng) const { return action_at(choose(key, epsilon, rng)); }
  double epsilon(std::uint64_t env_steps) const;

  /// Largest allowed value stored for `key`, 0 for an unseen key.
  double max_value(StateKey key, ChoiceMask allowed = kAllActions) const;

  /// Q-learning backup with an explicit discount, used for multi-step option
  /// transitions. `terminal` drops the bootstrap term; the bootstrap maximizes over
  /// `next_allowed`.
  void update(StateKey key, std::size_t choice, double reward, StateKey next, bool terminal,
              double discount, ChoiceMask next_allowed = kAllActions);
  /// One-step backup discounted by gamma.
  void update(StateKey key, Action a, double reward, StateKey next, bool terminal) {
    update(key, index(a), reward, next, terminal, params_.gamma);
  }

  std::size_t size() const { return table_.size(); }
  const LearnerParams& params() const { return params_; }
  /// Keys in ascending order.
  std::vector<StateKey> keys() const;
  /// Order-independent hash of every stored value.
  std::uint64_t fingerprint() const;

  /// Little-endian dump: "UEDQ", u32 version, u32 action count, learner params,
  /// u64 entry count, then per entry a u64 key and one f64 per action, keys ascending.
  void save(const std::filesystem::path& path) const;
  static PolicyTable load(const std::filesystem::path& path);

  bool operator==(const PolicyTable& o) const { return params_ == o.params_ && table_ == o.table_; }

  static constexpr std::uint32_t kFormatVersion = 1;

 private:
  LearnerParams params_;
  std::unordered_map<StateKey, QValues> table_;
};

}  // namespace ued::train
