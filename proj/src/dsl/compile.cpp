#include "ued/dsl/compile.hpp"

#include <cstdlib>
#include <string>

#include "ued/dsl/errors.hpp"

namespace ued::dsl {

namespace {

using world::CellPos;
using world::Creature;
using world::WorldState;

int manhattan(CellPos a, int row, int col) { return std::abs(a.row - row) + std::abs(a.col - col); }

Creature melee_for_floor(int floor) { return floor == 0 ? Creature::Zombie : Creature::Guard; }

std::string describe(const Region& r) {
  if (const auto* c = std::get_if<Cell>(&r)) {
    return "at (" + std::to_string(c->row) + ", " + std::to_string(c->col) + ")";
  }
  const auto& a = std::get<Annulus>(r);
  return "near {" + std::to_string(a.min_dist) + ".." + std::to_string(a.max_dist) + "}";
}

std::vector<CellPos> pick_cells(WorldState& s, const Region& region, int count,
                                const BlockSet& substrate, const std::string& what) {
  const CellPos start{s.row, s.col};
  if (const auto* c = std::get_if<Cell>(&region)) {
    if (CellPos{c->row, c->col} == start) {
      throw CompileError(what + " " + describe(region) + " overlaps the player start");
    }
    if (!substrate.test(index(s.block(s.floor, c->row, c->col))) ||
        s.mob_at(s.floor, c->row, c->col) >= 0) {
      throw CompileError(what + " " + describe(region) + " is not on an allowed cell");
    }
    return {{c->row, c->col}};
  }
  auto cells = feasible_cells(s, std::get<Annulus>(region), substrate);
  if (static_cast<int>(cells.size()) < count) {
    throw CompileError(what + " " + describe(region) + " needs " + std::to_string(count) +
                       " cells, only " + std::to_string(cells.size()) + " feasible");
  }
  s.rng.shuffle(std::span<CellPos>(cells));
  cells.resize(static_cast<std::size_t>(count));
  return cells;
}

}  // namespace

std::vector<CellPos> feasible_cells(const WorldState& s, const Annulus& a,
                                    const BlockSet& substrate) {
  const CellPos start{s.row, s.col};
  std::vector<CellPos> out;
  for (int r = 0; r < kRows; ++r) {
    for (int c = 0; c < kCols; ++c) {
      const int d = manhattan(start, r, c);
      if (d < a.min_dist || d > a.max_dist) continue;
      if (!substrate.test(index(s.block(s.floor, r, c)))) continue;
      if (s.mob_at(s.floor, r, c) >= 0) continue;
      out.push_back({r, c});
    }
  }
  return out;
}

WorldState compile(const LevelProgram& p, std::uint64_t rng_seed) {
  WorldState s;
  s.rng = Rng(rng_seed);
  for (int f = 0; f < kFloors; ++f) {
    for (int r = 0; r < kRows; ++r) {
      for (int c = 0; c < kCols; ++c) s.set_block(f, r, c, world::base_block(f, r, c));
    }
  }
  s.floor = p.floor;
  const auto start = world::start_cell(p.floor);
  s.row = start.row;
  s.col = start.col;
  for (const auto& [item, count] : p.inventory) s.inventory[index(item)] = count;
  s.achievements = p.completed;
  s.initial_achievements = p.completed;
  s.mechanics = p.mechanics;

  const auto g = world::guard_cell();
  s.mobs.push_back({Creature::Guard, 1, g.row, g.col, world::creature_hp(Creature::Guard), 0});

  for (const auto& spec : p.placements) {
    const auto cells = pick_cells(s, spec.region, spec.count(), spec.on_blocks,
                                  "placement of " + std::string(name(spec.block)));
    for (const auto& c : cells) s.set_block(s.floor, c.row, c.col, spec.block);
  }
  const auto grass = PlacementSpec::default_substrate();
  for (const auto& spec : p.mobs) {
    const Creature kind = spec.kind == MobKind::Passive ? Creature::Cow : melee_for_floor(s.floor);
    const auto cells =
        pick_cells(s, spec.region, spec.count, grass, std::string(name(spec.kind)) + " mobs");
    for (const auto& c : cells) {
      s.mobs.push_back({kind, s.floor, c.row, c.col, world::creature_hp(kind), 0});
    }
  }
  if (!world::player_walkable(s.block(s.floor, s.row, s.col))) {
    throw CompileError("player start cell is not walkable");
  }
  return s;
}

}  // namespace ued::dsl
