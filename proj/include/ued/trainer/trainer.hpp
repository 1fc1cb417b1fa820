#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "ued/archive/archive.hpp"
#include "ued/dsl/program.hpp"
#include "ued/trainer/policy.hpp"

namespace ued::train {

/// Evaluation seeds start here; training seeds always stay below it.
inline constexpr std::uint64_t kEvalSeedBase = std::uint64_t{1} << 40;

std::uint64_t training_seed(Rng& rng);
std::uint64_t eval_seed(std::size_t instance);

double update_bonus(double prev_target_return, double floor_d);

struct BonusState {
  double bonus = 1.0;
  double last_target_return = 0.0;
  double floor_d = 1.0;

  /// Sets last_target_return and recomputes bonus.
  void observe(double prev_target_return);
};

/// One backup. Skill transitions pick an action; option transitions pick a subgoal and
/// span several steps, so they carry their own discount and the choices open at `next`.
struct Transition {
  StateKey key;
  std::size_t choice;
  double reward;
  StateKey next;
  bool terminal;
  double discount;
  ChoiceMask next_mask = kAllActions;
};

/// Steps after which an unfinished option is abandoned.
inline constexpr int kMaxOptionSteps = 64;

struct EpisodeSpec {
  const dsl::LevelProgram* program = nullptr;
  /// Target episodes earn native reward only and end only by death or timeout.
  bool is_target = false;
  double bonus = 0.0;
  std::uint64_t seed = 0;
  int max_timesteps = 400;
};

struct EpisodeStats {
  std::optional<archive::NodeId> node;
  bool success = false;
  double ret = 0.0;
  /// Achievements held at the end of the episode.
  AchievementSet achieved;
  /// Achievements unlocked during the episode.
  AchievementSet unlocked;
  int steps = 0;
  /// Goal already satisfied at reset.
  bool degenerate = false;
};

/// How an episode picks actions and what it does with the experience.
struct Exploration {
  /// Env steps taken before this episode; feeds the epsilon schedule.
  std::uint64_t step_offset = 0;
  /// Fixed epsilon overriding the schedule (evaluation uses 0).
  std::optional<double> epsilon;
  /// Apply Q-updates on the fly.
  bool learn = true;
  /// When set, transitions are appended here.
  std::vector<Transition>* record = nullptr;
};

/// Learning applied for one recorded episode: an online pass in step order followed by
/// a backward sweep that carries late rewards to early states.
void apply_trace(PolicyTable& policy, const std::vector<Transition>& trace);

/// Runs one episode. A subgoal is picked among the goal achievements not yet held, then
/// actions are taken toward it until it unlocks, anything else unlocks, kMaxOptionSteps
/// pass or the episode ends. When learning, the result matches apply_trace on its
/// transitions. Throws dsl::CompileError if the level cannot be built.
EpisodeStats run_episode(const EpisodeSpec& spec, PolicyTable& policy, const Exploration& how,
                         Rng& rng);

/// Same, read-only on the policy (no learning).
EpisodeStats run_episode_frozen(const EpisodeSpec& spec, const PolicyTable& policy,
                                const Exploration& how, Rng& rng);

enum class SourceKind { Target, New, Replay };

std::string_view name(SourceKind k);

struct Slot {
  SourceKind kind = SourceKind::Target;
  std::optional<archive::NodeId> node;
  int episodes = 0;
};

struct BatchConfig {
  int updates_per_cycle = 100;
  int v = 2;
  double target_fraction = 0.20;
  double new_fraction = 0.53;
  double replay_fraction = 0.27;
  int num_unique_new = 10;
  int num_unique_replay = 5;
  int num_unique_replay_no_new = 15;
};

struct BatchPlan {
  int cycle = 0;
  std::vector<Slot> slots;
  /// Replay share moved to the target because nothing could be replayed.
  bool folded_replay = false;

  int episodes(SourceKind k) const;
  int unique(SourceKind k) const;
  int total() const;
};

/// Splits one cycle's episodes between target, fresh and replayed levels. Fresh levels
/// are only allowed on cycles divisible by v. Replay ids come from sample_replay,
/// never from `new_levels`.
BatchPlan plan_batch(int cycle, const std::vector<archive::NodeId>& new_levels,
                     archive::Archive& archive, const BatchConfig& config, Rng& rng);

struct EvalResult {
  double mean_return = 0.0;
  std::array<double, kNumAchievements> per_achievement_sr{};
  std::uint64_t steps = 0;
};

/// Greedy rollouts on the target level, one per seed.
EvalResult evaluate_seeds(const PolicyTable& policy, const std::vector<std::uint64_t>& seeds,
                          int max_timesteps = 400);
/// Greedy rollouts on the target level with seeds eval_seed(first_instance + i).
EvalResult evaluate_target(const PolicyTable& policy, int num_instances,
                           std::size_t first_instance = 0, int max_timesteps = 400);

}  // namespace ued::train
