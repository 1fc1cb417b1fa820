#include "ued/trainer/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ued/dsl/parser.hpp"
#include "ued/world/env.hpp"

namespace ued::train {

namespace {

struct ActiveOption {
  bool active = false;
  std::size_t choice = 0;
  StateKey key = 0;
  double ret = 0.0;
  double discount = 1.0;
  int steps = 0;
};

template <typename Policy>
EpisodeStats episode(const EpisodeSpec& spec, Policy& policy, const Exploration& how, Rng& rng,
                     bool can_learn) {
  const auto& p = *spec.program;
  auto s = world::reset(p, spec.seed, spec.max_timesteps);
  EpisodeStats st;
  if (!spec.is_target && is_subset(p.goal, s.achievements)) {
    st.degenerate = true;
    st.success = true;
    st.ret = spec.bonus;
    st.achieved = s.achievements;
    return st;
  }
  const double gamma = policy.params().gamma;
  bool learning = false;
  if constexpr (!std::is_const_v<Policy>) learning = can_learn && how.learn;
  std::vector<Transition> trace;
  auto emit = [&](const Transition& tr) {
    if constexpr (!std::is_const_v<Policy>) {
      if (learning) {
        policy.update(tr.key, tr.choice, tr.reward, tr.next, tr.terminal, tr.discount, tr.next_mask);
        trace.push_back(tr);
      }
    }
    if (how.record) how.record->push_back(tr);
  };

  ActiveOption opt;
  for (;;) {
    const double eps = how.epsilon ? *how.epsilon : policy.epsilon(how.step_offset + st.steps);
    if (!opt.active) {
      const auto mask = pending_mask(s, p.goal);
      if (mask != 0) {
        opt = ActiveOption{true, 0, option_key(s, p.goal)};
        opt.choice = policy.choose(opt.key, eps, rng, mask);
      }
    }
    std::optional<Achievement> sub;
    if (opt.active) sub = achievement_at(opt.choice);
    const auto key = skill_key(s, sub);
    const auto a = policy.choose(key, eps, rng);
    const auto kills_before = s.monsters_killed;
    const auto r = world::step(s, action_at(a));
    ++st.steps;
    double reward = r.native_reward;
    bool done = r.done;
    bool terminal = s.health <= 0;
    if (!spec.is_target) {
      const auto w = world::wrapped_reward(r.native_reward, r.newly_unlocked, s, p.goal, spec.bonus);
      reward = w.reward;
      done = done || w.done;
      terminal = terminal || w.done;
    }
    st.ret += reward;

    if (!sub) {
      emit({key, a, reward, skill_key(s, sub), terminal, gamma});
      if (done) break;
      continue;
    }
    bool reached = r.newly_unlocked.test(opt.choice);
    if (*sub == Achievement::DefeatZombie) reached = reached || s.monsters_killed[0] > kills_before[0];
    if (*sub == Achievement::DefeatGuard) reached = reached || s.monsters_killed[1] > kills_before[1];
    emit({key, a, reached ? 1.0 : (s.health <= 0 ? -1.0 : 0.0), skill_key(s, sub), reached || s.health <= 0, gamma});
    opt.ret += opt.discount * reward;
    opt.discount *= gamma;
    ++opt.steps;
    if (done || reached || r.newly_unlocked.any() || opt.steps >= kMaxOptionSteps) {
      emit({opt.key, opt.choice, opt.ret, option_key(s, p.goal), terminal, opt.discount,
            pending_mask(s, p.goal)});
      opt.active = false;
    }
    if (done) break;
  }
  if constexpr (!std::is_const_v<Policy>) {
    for (auto it = trace.rbegin(); it != trace.rend(); ++it) {
      policy.update(it->key, it->choice, it->reward, it->next, it->terminal, it->discount, it->next_mask);
    }
  }
  st.achieved = s.achievements;
  st.unlocked = s.achievements & ~s.initial_achievements;
  st.success = is_subset(p.goal, s.achievements);
  return st;
}

void spread(std::vector<Slot>& slots, SourceKind kind, const std::vector<archive::NodeId>& ids,
            int episodes) {
  if (ids.empty() || episodes <= 0) return;
  const int k = static_cast<int>(ids.size());
  for (int i = 0; i < k; ++i) {
    const int n = episodes / k + (i < episodes % k ? 1 : 0);
    if (n > 0) slots.push_back({kind, ids[static_cast<std::size_t>(i)], n});
  }
}

}  // namespace

void apply_trace(PolicyTable& policy, const std::vector<Transition>& trace) {
  for (const auto& t : trace) policy.update(t.key, t.choice, t.reward, t.next, t.terminal, t.discount, t.next_mask);
  for (auto it = trace.rbegin(); it != trace.rend(); ++it) {
    policy.update(it->key, it->choice, it->reward, it->next, it->terminal, it->discount, it->next_mask);
  }
}

std::uint64_t training_seed(Rng& rng) { return rng.next() % kEvalSeedBase; }

std::uint64_t eval_seed(std::size_t instance) { return kEvalSeedBase + instance; }

double update_bonus(double prev_target_return, double floor_d) {
  return std::max(floor_d, 2.0 * prev_target_return);
}

void BonusState::observe(double prev_target_return) {
  last_target_return = prev_target_return;
  bonus = update_bonus(prev_target_return, floor_d);
}

EpisodeStats run_episode(const EpisodeSpec& spec, PolicyTable& policy, const Exploration& how,
                         Rng& rng) {
  return episode(spec, policy, how, rng, true);
}

EpisodeStats run_episode_frozen(const EpisodeSpec& spec, const PolicyTable& policy,
                                const Exploration& how, Rng& rng) {
  return episode(spec, policy, how, rng, false);
}

std::string_view name(SourceKind k) {
  switch (k) {
    case SourceKind::Target: return "target";
    case SourceKind::New: return "new";
    case SourceKind::Replay: return "replay";
  }
  return "?";
}

int BatchPlan::episodes(SourceKind k) const {
  int n = 0;
  for (const auto& s : slots) {
    if (s.kind == k) n += s.episodes;
  }
  return n;
}

int BatchPlan::unique(SourceKind k) const {
  std::set<archive::NodeId> ids;
  int target = 0;
  for (const auto& s : slots) {
    if (s.kind != k) continue;
    if (s.node) {
      ids.insert(*s.node);
    } else {
      target = 1;
    }
  }
  return static_cast<int>(ids.size()) + target;
}

int BatchPlan::total() const {
  int n = 0;
  for (const auto& s : slots) n += s.episodes;
  return n;
}

BatchPlan plan_batch(int cycle, const std::vector<archive::NodeId>& new_levels,
                     archive::Archive& archive, const BatchConfig& config, Rng& rng) {
  if (!new_levels.empty() && cycle % config.v != 0) {
    throw std::invalid_argument("fresh levels may only enter on cycles divisible by v");
  }
  const int n = config.updates_per_cycle;
  BatchPlan plan;
  plan.cycle = cycle;
  int n_target = static_cast<int>(std::lround(config.target_fraction * n));
  int n_new = 0;
  int k_replay = config.num_unique_replay_no_new;
  std::vector<archive::NodeId> fresh;
  if (!new_levels.empty()) {
    n_new = static_cast<int>(std::lround(config.new_fraction * n));
    k_replay = config.num_unique_replay;
    const auto k_new = std::min<std::size_t>(new_levels.size(), static_cast<std::size_t>(config.num_unique_new));
    fresh.assign(new_levels.begin(), new_levels.begin() + static_cast<std::ptrdiff_t>(k_new));
  }
  const int n_replay = n - n_target - n_new;

  std::vector<archive::NodeId> replay;
  if (n_replay > 0 && k_replay > 0) {
    const std::set<archive::NodeId> exclude(new_levels.begin(), new_levels.end());
    replay = archive.sample_replay(static_cast<std::size_t>(std::min(k_replay, n_replay)), rng, exclude);
  }
  if (replay.empty() && n_replay > 0) {
    n_target += n_replay;
    plan.folded_replay = true;
  }
  if (n_target > 0) plan.slots.push_back({SourceKind::Target, std::nullopt, n_target});
  spread(plan.slots, SourceKind::New, fresh, n_new);
  spread(plan.slots, SourceKind::Replay, replay, n_replay);
  return plan;
}

EvalResult evaluate_seeds(const PolicyTable& policy, const std::vector<std::uint64_t>& seeds,
                          int max_timesteps) {
  static const dsl::LevelProgram target = dsl::target_program();
  EvalResult out;
  if (seeds.empty()) return out;
  Exploration greedy;
  greedy.epsilon = 0.0;
  greedy.learn = false;
  double total = 0.0;
  for (const auto seed : seeds) {
    EpisodeSpec spec;
    spec.program = &target;
    spec.is_target = true;
    spec.seed = seed;
    spec.max_timesteps = max_timesteps;
    Rng tie_break(Rng::mix(seed));
    const auto st = run_episode_frozen(spec, policy, greedy, tie_break);
    total += st.ret;
    out.steps += static_cast<std::uint64_t>(st.steps);
    for (std::size_t a = 0; a < kNumAchievements; ++a) {
      if (st.achieved.test(a)) out.per_achievement_sr[a] += 1.0;
    }
  }
  const double n = static_cast<double>(seeds.size());
  out.mean_return = total / n;
  for (auto& v : out.per_achievement_sr) v /= n;
  return out;
}

EvalResult evaluate_target(const PolicyTable& policy, int num_instances, std::size_t first_instance,
                           int max_timesteps) {
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < num_instances; ++i) seeds.push_back(eval_seed(first_instance + static_cast<std::size_t>(i)));
  return evaluate_seeds(policy, seeds, max_timesteps);
}

}  // namespace ued::train
