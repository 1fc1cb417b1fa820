#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "ued/core/ids.hpp"

namespace ued::dsl {

struct SourcePos {
  int line = 0;
  int col = 0;

  auto operator<=>(const SourcePos&) const = default;
};

struct Cell {
  int row = 0;
  int col = 0;

  bool operator==(const Cell&) const = default;
};

/// Cells whose Manhattan distance to the player start lies in [min_dist, max_dist].
struct Annulus {
  int min_dist = 1;
  int max_dist = 1;
  int n = 1;

  bool operator==(const Annulus&) const = default;
};

using Region = std::variant<Cell, Annulus>;

using BlockSet = std::bitset<kNumBlocks>;

struct PlacementSpec {
  Block block = Block::Grass;
  Region region = Annulus{};
  BlockSet on_blocks = default_substrate();
  SourcePos pos;

  static BlockSet default_substrate() { return BlockSet{}.set(index(Block::Grass)); }

  /// Number of cells this placement fills.
  int count() const;

  bool operator==(const PlacementSpec& o) const {
    return block == o.block && region == o.region && on_blocks == o.on_blocks;
  }
};

struct MobSpec {
  MobKind kind = MobKind::Passive;
  int count = 1;
  Region region = Annulus{};
  SourcePos pos;

  bool operator==(const MobSpec& o) const {
    return kind == o.kind && count == o.count && region == o.region;
  }
};

inline constexpr int kMobCap = 3;

struct MechanicsParams {
  double melee_spawn_multiplier = 1.0;
  double passive_spawn_multiplier = 1.0;
  double mob_damage_multiplier = 1.0;
  double needs_depletion_multiplier = 1.0;
  int monsters_killed_to_clear = 4;

  bool operator==(const MechanicsParams&) const = default;
};

/// Positions of single-occurrence statements, used to order diagnostics.
struct StatementPositions {
  SourcePos floor;
  SourcePos goal;
  SourcePos completed;
  SourcePos mechanics;
  std::map<Item, SourcePos> inventory;
};

/// A parsed level. Equality is structural: positions and source text are ignored.
struct LevelProgram {
  std::string name;
  int floor = 0;
  std::map<Item, int> inventory;
  std::vector<PlacementSpec> placements;
  std::vector<MobSpec> mobs;
  MechanicsParams mechanics;
  AchievementSet goal;
  AchievementSet completed;
  std::string source_text;
  StatementPositions positions;

  bool operator==(const LevelProgram& o) const {
    return name == o.name && floor == o.floor && inventory == o.inventory &&
           placements == o.placements && mobs == o.mobs && mechanics == o.mechanics &&
           goal == o.goal && completed == o.completed;
  }
};

/// The full task: default world, every registry achievement as the goal.
LevelProgram target_program();

}  // namespace ued::dsl
