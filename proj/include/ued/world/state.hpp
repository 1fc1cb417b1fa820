#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ued/core/dims.hpp"
#include "ued/core/ids.hpp"
#include "ued/core/rng.hpp"
#include "ued/dsl/program.hpp"

namespace ued::world {

enum class Creature : std::uint8_t { Cow, Zombie, Guard };

enum class Direction : std::uint8_t { Left, Right, Up, Down };

struct Mob {
  Creature kind = Creature::Cow;
  int floor = 0;
  int row = 0;
  int col = 0;
  int hp = 1;
  int cooldown = 0;

  bool operator==(const Mob&) const = default;
};

inline constexpr int kMaxHealth = 9;
inline constexpr int kMaxFood = 9;
inline constexpr int kMaxItem = 9;
inline constexpr int kDefaultMaxTimesteps = 400;

struct CellPos {
  int row = 0;
  int col = 0;

  bool operator==(const CellPos&) const = default;
};

/// Full simulator state. A plain value: copy it to branch a trajectory.
struct WorldState {
  std::array<Block, kFloors * kCellsPerFloor> cells{};
  int floor = 0;
  int row = 0;
  int col = 0;
  Direction facing = Direction::Down;
  std::array<int, kNumItems> inventory{};
  int health = kMaxHealth;
  int food = kMaxFood;
  double hunger = 0.0;
  int recover_timer = 0;
  std::vector<Mob> mobs;
  AchievementSet achievements;
  AchievementSet initial_achievements;
  dsl::MechanicsParams mechanics;
  std::array<int, kFloors> monsters_killed{};
  int timestep = 0;
  int max_timesteps = kDefaultMaxTimesteps;
  Rng rng;

  Block block(int f, int r, int c) const { return cells[f * kCellsPerFloor + r * kCols + c]; }
  void set_block(int f, int r, int c, Block b) { cells[f * kCellsPerFloor + r * kCols + c] = b; }
  int item(Item i) const { return inventory[index(i)]; }
  bool has(Achievement a) const { return achievements.test(index(a)); }
  /// Index into `mobs` of the mob at (f, r, c), or -1.
  int mob_at(int f, int r, int c) const;

  bool operator==(const WorldState&) const = default;
};

/// Fixed base terrain of every level before placements are applied.
Block base_block(int floor, int row, int col);

/// Where the player appears on `floor`, both at reset and after descending.
CellPos start_cell(int floor);

/// Cell of the melee mob present on the lower floor of every level.
CellPos guard_cell();

bool player_walkable(Block b);

int creature_hp(Creature c);

std::string_view name(Creature c);

}  // namespace ued::world
