#include "ued/world/state.hpp"

#include <string_view>

namespace ued::world {

namespace {

// W wall, . grass, T tree, S stone, C coal, I iron, ~ water, L ladder.
constexpr std::array<std::string_view, kRows> kFloor0 = {
    "WWWWWWWWWWWW",
    "W........SIW",
    "W.TT.....SSW",
    "W.T.......SW",
    "W..........W",
    "W..........W",
    "W..........W",
    "W..~~......W",
    "W..~~......W",
    "W..........W",
    "WC.......L.W",
    "WWWWWWWWWWWW",
};

constexpr std::array<std::string_view, kRows> kFloor1 = {
    "WWWWWWWWWWWW",
    "W..........W",
    "W..SS......W",
    "W..........W",
    "W..........W",
    "W......~~..W",
    "W......~~..W",
    "W..........W",
    "W.S........W",
    "W..........W",
    "W..........W",
    "WWWWWWWWWWWW",
};

Block decode(char c) {
  switch (c) {
    case 'W': return Block::Wall;
    case 'T': return Block::Tree;
    case 'S': return Block::Stone;
    case 'C': return Block::Coal;
    case 'I': return Block::Iron;
    case '~': return Block::Water;
    case 'L': return Block::Ladder;
    default: return Block::Grass;
  }
}

}  // namespace

int WorldState::mob_at(int f, int r, int c) const {
  for (std::size_t i = 0; i < mobs.size(); ++i) {
    const auto& m = mobs[i];
    if (m.floor == f && m.row == r && m.col == c) return static_cast<int>(i);
  }
  return -1;
}

Block base_block(int floor, int row, int col) {
  const auto& rows = floor == 0 ? kFloor0 : kFloor1;
  return decode(rows[row][col]);
}

CellPos start_cell(int floor) { return floor == 0 ? CellPos{5, 5} : CellPos{10, 9}; }

CellPos guard_cell() { return {3, 4}; }

bool player_walkable(Block b) { return b == Block::Grass || b == Block::Ladder; }

int creature_hp(Creature c) {
  switch (c) {
    case Creature::Cow: return 1;
    case Creature::Zombie: return 3;
    case Creature::Guard: return 8;
  }
  return 1;
}

std::string_view name(Creature c) {
  switch (c) {
    case Creature::Cow: return "cow";
    case Creature::Zombie: return "zombie";
    case Creature::Guard: return "guard";
  }
  return "?";
}

}  // namespace ued::world
