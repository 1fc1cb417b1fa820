#include "ued/generator/mutation.hpp"

#include <algorithm>
#include <cmath>

#include "ued/dsl/parser.hpp"

namespace ued::gen {

namespace {

constexpr double kMultiplierCap = 100.0;

std::optional<Achievement> lowest(const AchievementSet& s) {
  for (std::size_t i = 0; i < kNumAchievements; ++i) {
    if (s.test(i)) return achievement_at(i);
  }
  return std::nullopt;
}

/// Closest earlier achievement that is not already completed.
std::optional<Achievement> predecessor(const dsl::LevelProgram& p, Achievement a) {
  for (std::size_t i = index(a); i-- > 0;) {
    if (!p.completed.test(i)) return achievement_at(i);
  }
  return std::nullopt;
}

std::optional<Achievement> previous(Achievement a) {
  if (index(a) == 0) return std::nullopt;
  return achievement_at(index(a) - 1);
}

bool is_combat(const AchievementSet& goal) {
  return goal.test(index(Achievement::DefeatZombie)) || goal.test(index(Achievement::DefeatGuard));
}

void raise_item(dsl::LevelProgram& p, Item item, int at_least) {
  auto& v = p.inventory[item];
  v = std::max(v, at_least);
}

void remove_scaffold(dsl::LevelProgram& p, Rng& rng) {
  const std::size_t inv = p.inventory.size();
  const std::size_t blocks = p.placements.size();
  const std::size_t total = inv + blocks + p.mobs.size();
  if (total == 0) return;
  std::size_t pick = rng.below(total);
  if (pick < inv) {
    p.inventory.erase(std::next(p.inventory.begin(), static_cast<std::ptrdiff_t>(pick)));
    return;
  }
  pick -= inv;
  if (pick < blocks) {
    p.placements.erase(p.placements.begin() + static_cast<std::ptrdiff_t>(pick));
    return;
  }
  pick -= blocks;
  p.mobs.erase(p.mobs.begin() + static_cast<std::ptrdiff_t>(pick));
}

void jitter(dsl::Region& region, Rng& rng) {
  auto* a = std::get_if<dsl::Annulus>(&region);
  if (!a) return;
  const int dmin = static_cast<int>(rng.below(3)) - 1;
  const int dmax = static_cast<int>(rng.below(3)) - 1;
  a->min_dist = std::max(1, a->min_dist + dmin);
  a->max_dist = std::max(a->min_dist, a->max_dist + dmax);
}

double* multiplier(dsl::MechanicsParams& m, std::size_t which) {
  switch (which) {
    case 0: return &m.melee_spawn_multiplier;
    case 1: return &m.passive_spawn_multiplier;
    case 2: return &m.mob_damage_multiplier;
    default: return &m.needs_depletion_multiplier;
  }
}

/// Four decimals keep serialized levels short.
double tidy(double v) { return std::round(v * 1e4) / 1e4; }

void persist(dsl::LevelProgram& p, Rng& rng) {
  std::vector<double*> options = {&p.mechanics.mob_damage_multiplier,
                                  &p.mechanics.needs_depletion_multiplier};
  if (!is_combat(p.goal)) options.push_back(&p.mechanics.melee_spawn_multiplier);
  double* m = options[rng.below(options.size())];
  *m = tidy(*m * 0.5);
}

void vary(dsl::LevelProgram& p, Rng& rng) {
  for (auto& spec : p.placements) jitter(spec.region, rng);
  for (auto& spec : p.mobs) jitter(spec.region, rng);
  double* m = multiplier(p.mechanics, rng.below(4));
  *m = std::min(kMultiplierCap, tidy(*m * (rng.chance(0.5) ? 1.25 : 0.75)));
}

}  // namespace

std::optional<Achievement> next_achievement(const dsl::LevelProgram& p) {
  std::size_t start = 0;
  for (std::size_t i = 0; i < kNumAchievements; ++i) {
    if (p.goal.test(i)) start = i + 1;
  }
  const auto& reg = AchievementRegistry::standard();
  for (std::size_t i = start; i < kNumAchievements; ++i) {
    const auto a = achievement_at(i);
    if (!p.completed.test(i) && !p.goal.test(i) && reg.contains(a)) return a;
  }
  return std::nullopt;
}

Intent choose_intent(const dsl::LevelProgram& parent, const PerformanceProfile& parent_perf,
                     const PerformanceProfile& target_perf,
                     const archive::StatusThresholds& t) {
  bool overfit = false;
  bool weak_skill = false;
  for (std::size_t i = 0; i < kNumAchievements; ++i) {
    if (!parent.goal.test(i)) continue;
    const auto a = achievement_at(i);
    if (parent_perf.sr(a) < t.c) weak_skill = true;
    const auto prev = previous(a);
    if (prev && parent_perf.sr(a) >= t.a && target_perf.sr(a) < t.c && target_perf.sr(*prev) >= t.b) {
      overfit = true;
    }
  }
  switch (archive::classify(parent_perf.goal_success_rate, t)) {
    case archive::Status::A:
      return overfit || !next_achievement(parent) ? Intent::Vary : Intent::Expand;
    case archive::Status::B:
      if (overfit) return Intent::Vary;
      return weak_skill ? Intent::Persist : Intent::Vary;
    case archive::Status::C:
      return Intent::Persist;
    default:
      return Intent::Simplify;
  }
}

AchievementSet planned_goal(const dsl::LevelProgram& parent, Intent intent) {
  auto goal = parent.goal;
  if (intent == Intent::Expand) {
    if (auto next = next_achievement(parent)) goal.set(index(*next));
  } else if (intent == Intent::Simplify) {
    const auto low = lowest(goal);
    if (!low) return goal;
    if (goal.count() >= 2) {
      goal.reset(index(*low));
    } else if (auto pred = predecessor(parent, *low)) {
      goal.reset();
      goal.set(index(*pred));
    }
  }
  return goal;
}

void add_scaffold(dsl::LevelProgram& p, Achievement a) {
  switch (a) {
    case Achievement::CollectWood: raise_item(p, Item::Wood, 2); break;
    case Achievement::PlaceTable: {
      dsl::PlacementSpec table;
      table.block = Block::Table;
      table.region = dsl::Annulus{1, 2, 1};
      p.placements.push_back(table);
      break;
    }
    case Achievement::MakeWoodPickaxe: raise_item(p, Item::Pickaxe, 1); break;
    case Achievement::CollectStone: raise_item(p, Item::Stone, 2); break;
    case Achievement::MakeStonePickaxe: raise_item(p, Item::Pickaxe, 2); break;
    case Achievement::CollectCoal: raise_item(p, Item::Coal, 1); break;
    case Achievement::CollectIron: raise_item(p, Item::Iron, 1); break;
    case Achievement::MakeIronSword: raise_item(p, Item::IronSword, 1); break;
    case Achievement::DescendFloor: p.floor = 1; break;
    case Achievement::DefeatZombie:
    case Achievement::DefeatGuard:
      break;
  }
}

dsl::LevelProgram mutate(const dsl::LevelProgram& parent, Intent intent, Rng& rng) {
  dsl::LevelProgram p = parent;
  p.positions = {};
  switch (intent) {
    case Intent::Expand: {
      const auto next = next_achievement(p);
      if (!next) {
        vary(p, rng);
        break;
      }
      p.goal.set(index(*next));
      remove_scaffold(p, rng);
      break;
    }
    case Intent::Simplify: {
      const auto low = lowest(p.goal);
      if (p.goal.count() >= 2) {
        p.goal.reset(index(*low));
        p.completed.set(index(*low));
        add_scaffold(p, *low);
      } else if (auto pred = predecessor(p, *low)) {
        p.goal.reset();
        p.goal.set(index(*pred));
      } else {
        persist(p, rng);
      }
      break;
    }
    case Intent::Persist:
      persist(p, rng);
      break;
    case Intent::Vary:
      vary(p, rng);
      break;
  }
  p.source_text = dsl::serialize(p);
  return p;
}

}  // namespace ued::gen
