#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace ued {

enum class Block : std::uint8_t {
  Grass,
  Tree,
  Stone,
  Coal,
  Iron,
  Table,
  Furnace,
  Ladder,
  Wall,
  Water,
};
inline constexpr std::size_t kNumBlocks = 10;

enum class Item : std::uint8_t {
  Wood,
  Stone,
  Coal,
  Iron,
  Pickaxe,  // tier: 1 = wood, 2 = stone
  IronSword,
};
inline constexpr std::size_t kNumItems = 6;

// Registry order is the prerequisite order of the tech tree.
enum class Achievement : std::uint8_t {
  CollectWood,
  PlaceTable,
  MakeWoodPickaxe,
  CollectStone,
  MakeStonePickaxe,
  CollectCoal,
  CollectIron,
  MakeIronSword,
  DefeatZombie,
  DescendFloor,
  DefeatGuard,
};
inline constexpr std::size_t kNumAchievements = 11;

enum class Action : std::uint8_t {
  Noop,
  Left,
  Right,
  Up,
  Down,
  Interact,
  PlaceTable,
  MakeWoodPickaxe,
  MakeStonePickaxe,
  MakeIronSword,
  Descend,
};
inline constexpr std::size_t kNumActions = 11;

enum class MobKind : std::uint8_t { Passive, Melee };
inline constexpr std::size_t kNumMobKinds = 2;

using AchievementSet = std::bitset<kNumAchievements>;

std::string_view name(Block b);
std::string_view name(Item i);
std::string_view name(Achievement a);
std::string_view name(Action a);
std::string_view name(MobKind k);

std::optional<Block> parse_block(std::string_view s);
std::optional<Item> parse_item(std::string_view s);
std::optional<Achievement> parse_achievement(std::string_view s);
std::optional<Action> parse_action(std::string_view s);
std::optional<MobKind> parse_mob_kind(std::string_view s);

constexpr std::size_t index(Achievement a) { return static_cast<std::size_t>(a); }
constexpr std::size_t index(Item i) { return static_cast<std::size_t>(i); }
constexpr std::size_t index(Block b) { return static_cast<std::size_t>(b); }
constexpr std::size_t index(Action a) { return static_cast<std::size_t>(a); }

constexpr Achievement achievement_at(std::size_t i) { return static_cast<Achievement>(i); }
constexpr Action action_at(std::size_t i) { return static_cast<Action>(i); }

inline AchievementSet make_set(std::initializer_list<Achievement> items) {
  AchievementSet s;
  for (auto a : items) s.set(index(a));
  return s;
}

/// True iff every bit of `sub` is also set in `super`.
inline bool is_subset(const AchievementSet& sub, const AchievementSet& super) {
  return (sub & ~super).none();
}

}  // namespace ued
