#include "ued/world/env.hpp"

#include <cmath>
#include <cstdlib>

#include "ued/dsl/compile.hpp"

namespace ued::world {

namespace {

constexpr int kChaseRadius = 6;
constexpr int kSpawnCap = 3;
constexpr int kSpawnMinDist = 4;
constexpr double kZombieSpawn = 0.02;
constexpr double kGuardSpawn = 0.01;
constexpr double kCowSpawn = 0.01;
constexpr double kHungerPeriod = 40.0;
constexpr int kRecoverPeriod = 10;
constexpr int kFoodPerCow = 6;
constexpr int kSwordDamage = 4;

struct Delta {
  int dr;
  int dc;
};

constexpr Delta delta(Direction d) {
  switch (d) {
    case Direction::Left: return {0, -1};
    case Direction::Right: return {0, 1};
    case Direction::Up: return {-1, 0};
    case Direction::Down: return {1, 0};
  }
  return {0, 0};
}

constexpr std::array<Direction, 4> kScanOrder = {Direction::Up, Direction::Right, Direction::Down,
                                                 Direction::Left};

bool in_bounds(int r, int c) { return r >= 0 && r < kRows && c >= 0 && c < kCols; }

int melee_damage(Creature c) { return c == Creature::Guard ? 2 : 1; }
int melee_cooldown(Creature c) { return c == Creature::Guard ? 3 : 5; }

void unlock(WorldState& s, Achievement a) { s.achievements.set(index(a)); }

void add_item(WorldState& s, Item i, int n = 1) {
  auto& v = s.inventory[index(i)];
  v = std::min(kMaxItem, v + n);
}

bool near_table(const WorldState& s) {
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      const int r = s.row + dr;
      const int c = s.col + dc;
      if (in_bounds(r, c) && s.block(s.floor, r, c) == Block::Table) return true;
    }
  }
  return false;
}

// Multiplied damage with stochastic rounding so fractional multipliers keep their mean.
int scaled(WorldState& s, double base, double mult) {
  const double x = base * mult;
  const double whole = std::floor(x);
  return static_cast<int>(whole) + (s.rng.chance(x - whole) ? 1 : 0);
}

void attack_mob(WorldState& s, int idx) {
  auto& m = s.mobs[static_cast<std::size_t>(idx)];
  if (m.kind == Creature::Cow) {
    s.food = std::min(kMaxFood, s.food + kFoodPerCow);
    s.mobs.erase(s.mobs.begin() + idx);
    return;
  }
  m.hp -= s.item(Item::IronSword) > 0 ? kSwordDamage : 1;
  if (m.hp > 0) return;
  const Creature kind = m.kind;
  s.mobs.erase(s.mobs.begin() + idx);
  ++s.monsters_killed[static_cast<std::size_t>(s.floor)];
  unlock(s, kind == Creature::Zombie ? Achievement::DefeatZombie : Achievement::DefeatGuard);
}

bool minable(const WorldState& s, Block b) {
  switch (b) {
    case Block::Tree: return true;
    case Block::Stone:
    case Block::Coal: return s.item(Item::Pickaxe) >= 1;
    case Block::Iron: return s.item(Item::Pickaxe) >= 2;
    default: return false;
  }
}

void mine(WorldState& s, int r, int c) {
  switch (s.block(s.floor, r, c)) {
    case Block::Tree:
      add_item(s, Item::Wood);
      unlock(s, Achievement::CollectWood);
      break;
    case Block::Stone:
      add_item(s, Item::Stone);
      s.set_block(s.floor, r, c, Block::Grass);
      unlock(s, Achievement::CollectStone);
      break;
    case Block::Coal:
      add_item(s, Item::Coal);
      s.set_block(s.floor, r, c, Block::Grass);
      unlock(s, Achievement::CollectCoal);
      break;
    case Block::Iron:
      add_item(s, Item::Iron);
      s.set_block(s.floor, r, c, Block::Grass);
      unlock(s, Achievement::CollectIron);
      break;
    default:
      break;
  }
}

// Facing cell first, then the neighbours in scan order; mobs before blocks.
void interact(WorldState& s) {
  const auto d = delta(s.facing);
  const int fr = s.row + d.dr;
  const int fc = s.col + d.dc;
  int target = in_bounds(fr, fc) ? s.mob_at(s.floor, fr, fc) : -1;
  for (std::size_t k = 0; target < 0 && k < kScanOrder.size(); ++k) {
    const auto o = delta(kScanOrder[k]);
    if (in_bounds(s.row + o.dr, s.col + o.dc)) target = s.mob_at(s.floor, s.row + o.dr, s.col + o.dc);
  }
  if (target >= 0) {
    attack_mob(s, target);
    return;
  }
  if (in_bounds(fr, fc) && minable(s, s.block(s.floor, fr, fc))) {
    mine(s, fr, fc);
    return;
  }
  for (const auto dir : kScanOrder) {
    const auto o = delta(dir);
    const int r = s.row + o.dr;
    const int c = s.col + o.dc;
    if (in_bounds(r, c) && minable(s, s.block(s.floor, r, c))) {
      mine(s, r, c);
      return;
    }
  }
}

bool table_spot(const WorldState& s, int r, int c) {
  return in_bounds(r, c) && s.block(s.floor, r, c) == Block::Grass && s.mob_at(s.floor, r, c) < 0;
}

bool consume(WorldState& s, std::initializer_list<Item> items) {
  for (auto i : items) {
    if (s.item(i) < 1) return false;
  }
  for (auto i : items) --s.inventory[index(i)];
  return true;
}

void player_act(WorldState& s, Action a) {
  switch (a) {
    case Action::Noop:
      break;
    case Action::Left:
    case Action::Right:
    case Action::Up:
    case Action::Down: {
      s.facing = static_cast<Direction>(index(a) - index(Action::Left));
      const auto d = delta(s.facing);
      const int r = s.row + d.dr;
      const int c = s.col + d.dc;
      if (in_bounds(r, c) && player_walkable(s.block(s.floor, r, c)) && s.mob_at(s.floor, r, c) < 0) {
        s.row = r;
        s.col = c;
      }
      break;
    }
    case Action::Interact:
      interact(s);
      break;
    case Action::PlaceTable: {
      const auto d = delta(s.facing);
      int r = s.row + d.dr;
      int c = s.col + d.dc;
      for (std::size_t k = 0; !table_spot(s, r, c) && k < kScanOrder.size(); ++k) {
        const auto o = delta(kScanOrder[k]);
        r = s.row + o.dr;
        c = s.col + o.dc;
      }
      if (!table_spot(s, r, c) || !consume(s, {Item::Wood})) break;
      s.set_block(s.floor, r, c, Block::Table);
      unlock(s, Achievement::PlaceTable);
      break;
    }
    case Action::MakeWoodPickaxe:
      if (s.item(Item::Pickaxe) >= 1 || !near_table(s) || !consume(s, {Item::Wood})) break;
      s.inventory[index(Item::Pickaxe)] = 1;
      unlock(s, Achievement::MakeWoodPickaxe);
      break;
    case Action::MakeStonePickaxe:
      if (s.item(Item::Pickaxe) >= 2 || !near_table(s) || !consume(s, {Item::Wood, Item::Stone}))
        break;
      s.inventory[index(Item::Pickaxe)] = 2;
      unlock(s, Achievement::MakeStonePickaxe);
      break;
    case Action::MakeIronSword:
      if (s.item(Item::IronSword) >= 1 || !near_table(s) ||
          !consume(s, {Item::Wood, Item::Coal, Item::Iron}))
        break;
      s.inventory[index(Item::IronSword)] = 1;
      unlock(s, Achievement::MakeIronSword);
      break;
    case Action::Descend: {
      if (s.floor != 0 || s.block(s.floor, s.row, s.col) != Block::Ladder) break;
      if (s.monsters_killed[0] < s.mechanics.monsters_killed_to_clear) break;
      s.floor = 1;
      const auto start = start_cell(1);
      s.row = start.row;
      s.col = start.col;
      unlock(s, Achievement::DescendFloor);
      break;
    }
  }
}

bool mob_can_enter(const WorldState& s, int f, int r, int c) {
  return in_bounds(r, c) && s.block(f, r, c) == Block::Grass && !(f == s.floor && r == s.row && c == s.col) &&
         s.mob_at(f, r, c) < 0;
}

void move_mob(WorldState& s, Mob& m, Direction d) {
  const auto o = delta(d);
  if (mob_can_enter(s, m.floor, m.row + o.dr, m.col + o.dc)) {
    m.row += o.dr;
    m.col += o.dc;
  }
}

Direction random_direction(WorldState& s) { return static_cast<Direction>(s.rng.below(4)); }

void update_mobs(WorldState& s) {
  for (auto& m : s.mobs) {
    if (m.floor != s.floor) continue;
    const int dr = s.row - m.row;
    const int dc = s.col - m.col;
    const int dist = std::abs(dr) + std::abs(dc);
    if (m.kind == Creature::Cow) {
      if (s.rng.chance(0.3)) move_mob(s, m, random_direction(s));
      continue;
    }
    if (dist == 1) {
      if (m.cooldown > 0) {
        --m.cooldown;
      } else {
        s.health -= scaled(s, melee_damage(m.kind), s.mechanics.mob_damage_multiplier);
        m.cooldown = melee_cooldown(m.kind);
      }
      continue;
    }
    m.cooldown = std::max(0, m.cooldown - 1);
    if (!s.rng.chance(0.5)) continue;
    if (dist <= kChaseRadius) {
      bool vertical = std::abs(dr) > std::abs(dc);
      if (std::abs(dr) == std::abs(dc)) vertical = s.rng.chance(0.5);
      const Direction d = vertical ? (dr > 0 ? Direction::Down : Direction::Up)
                                   : (dc > 0 ? Direction::Right : Direction::Left);
      move_mob(s, m, d);
    } else {
      move_mob(s, m, random_direction(s));
    }
  }
}

void update_needs(WorldState& s) {
  s.hunger += s.mechanics.needs_depletion_multiplier;
  while (s.hunger >= kHungerPeriod) {
    s.hunger -= kHungerPeriod;
    s.food = std::max(0, s.food - 1);
  }
  if (s.food > 0) {
    s.recover_timer = std::max(0, s.recover_timer) + 1;
    if (s.recover_timer >= kRecoverPeriod) {
      s.recover_timer = 0;
      s.health = std::min(kMaxHealth, s.health + 1);
    }
  } else {
    s.recover_timer = std::min(0, s.recover_timer) - 1;
    if (s.recover_timer <= -kRecoverPeriod) {
      s.recover_timer = 0;
      s.health -= 1;
    }
  }
}

void try_spawn(WorldState& s, Creature kind, double p) {
  int count = 0;
  for (const auto& m : s.mobs) {
    if (m.floor == s.floor && m.kind == kind) ++count;
  }
  if (count >= kSpawnCap || !s.rng.chance(p)) return;
  for (int attempt = 0; attempt < 8; ++attempt) {
    const int r = static_cast<int>(s.rng.below(kRows));
    const int c = static_cast<int>(s.rng.below(kCols));
    if (std::abs(r - s.row) + std::abs(c - s.col) < kSpawnMinDist) continue;
    if (!mob_can_enter(s, s.floor, r, c)) continue;
    s.mobs.push_back({kind, s.floor, r, c, creature_hp(kind), 0});
    return;
  }
}

void spawn(WorldState& s) {
  const auto& m = s.mechanics;
  if (s.floor == 0) {
    try_spawn(s, Creature::Zombie, kZombieSpawn * m.melee_spawn_multiplier);
    try_spawn(s, Creature::Cow, kCowSpawn * m.passive_spawn_multiplier);
  } else {
    try_spawn(s, Creature::Guard, kGuardSpawn * m.melee_spawn_multiplier);
  }
}

}  // namespace

WorldState reset(const dsl::LevelProgram& p, std::uint64_t episode_seed, int max_timesteps) {
  auto s = dsl::compile(p, derive_seed(episode_seed, 0x7E5E7));
  s.max_timesteps = max_timesteps;
  return s;
}

StepResult step(WorldState& s, Action a, const AchievementRegistry& registry) {
  const auto before = s.achievements;
  player_act(s, a);
  update_mobs(s);
  update_needs(s);
  spawn(s);
  ++s.timestep;
  s.health = std::max(0, s.health);

  StepResult out;
  out.newly_unlocked = s.achievements & ~before;
  for (const auto& e : registry.entries()) {
    if (out.newly_unlocked.test(index(e.id))) out.native_reward += e.reward;
  }
  out.done = s.health <= 0 || s.timestep >= s.max_timesteps;
  return out;
}

WrappedReward wrapped_reward(double native_reward, const AchievementSet& newly_unlocked,
                             const WorldState& s, const AchievementSet& goal, double bonus,
                             const AchievementRegistry& registry) {
  WrappedReward out;
  out.reward = native_reward;
  const auto masked = newly_unlocked & s.initial_achievements;
  for (const auto& e : registry.entries()) {
    if (masked.test(index(e.id))) out.reward -= e.reward;
  }
  if (is_subset(goal, s.achievements)) {
    out.reward += bonus;
    out.done = true;
  }
  return out;
}

std::vector<std::int16_t> Observation::flatten() const {
  std::vector<std::int16_t> out;
  out.reserve(map.size() + inventory.size() + goal.size() + 3);
  out.push_back(static_cast<std::int16_t>(floor));
  out.insert(out.end(), map.begin(), map.end());
  out.insert(out.end(), inventory.begin(), inventory.end());
  out.push_back(static_cast<std::int16_t>(health));
  out.push_back(static_cast<std::int16_t>(food));
  for (auto g : goal) out.push_back(g);
  return out;
}

Observation encode_observation(const WorldState& s, const AchievementSet& goal,
                               const AchievementRegistry& registry) {
  Observation o;
  o.floor = s.floor;
  o.map.resize(kCellsPerFloor);
  for (int r = 0; r < kRows; ++r) {
    for (int c = 0; c < kCols; ++c) {
      o.map[r * kCols + c] = static_cast<std::int16_t>(index(s.block(s.floor, r, c)));
    }
  }
  for (const auto& m : s.mobs) {
    if (m.floor != s.floor) continue;
    std::int16_t code = Observation::kCowCode;
    if (m.kind == Creature::Zombie) code = Observation::kZombieCode;
    if (m.kind == Creature::Guard) code = Observation::kGuardCode;
    o.map[m.row * kCols + m.col] = code;
  }
  o.map[s.row * kCols + s.col] =
      static_cast<std::int16_t>(Observation::kPlayerCode + static_cast<int>(s.facing));
  o.inventory.assign(s.inventory.begin(), s.inventory.end());
  o.health = s.health;
  o.food = s.food;
  for (const auto& e : registry.entries()) o.goal.push_back(goal.test(index(e.id)) ? 1 : 0);
  return o;
}

}  // namespace ued::world
