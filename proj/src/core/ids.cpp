#include "ued/core/ids.hpp"

namespace ued {

namespace {

constexpr std::array<std::string_view, kNumBlocks> kBlockNames = {
    "GRASS", "TREE", "STONE", "COAL", "IRON", "TABLE", "FURNACE", "LADDER", "WALL", "WATER"};

constexpr std::array<std::string_view, kNumItems> kItemNames = {
    "wood", "stone", "coal", "iron", "pickaxe", "iron_sword"};

constexpr std::array<std::string_view, kNumAchievements> kAchievementNames = {
    "COLLECT_WOOD",  "PLACE_TABLE",     "MAKE_WOOD_PICKAXE", "COLLECT_STONE",
    "MAKE_STONE_PICKAXE", "COLLECT_COAL", "COLLECT_IRON",    "MAKE_IRON_SWORD",
    "DEFEAT_ZOMBIE", "DESCEND_FLOOR",   "DEFEAT_GUARD"};

constexpr std::array<std::string_view, kNumActions> kActionNames = {
    "NOOP",       "LEFT",           "RIGHT",           "UP",
    "DOWN",       "INTERACT",       "PLACE_TABLE",     "MAKE_WOOD_PICKAXE",
    "MAKE_STONE_PICKAXE", "MAKE_IRON_SWORD", "DESCEND"};

constexpr std::array<std::string_view, kNumMobKinds> kMobKindNames = {"passive", "melee"};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

}  // namespace

std::string_view name(Block b) { return kBlockNames[index(b)]; }
std::string_view name(Item i) { return kItemNames[index(i)]; }
std::string_view name(Achievement a) { return kAchievementNames[index(a)]; }
std::string_view name(Action a) { return kActionNames[index(a)]; }
std::string_view name(MobKind k) { return kMobKindNames[static_cast<std::size_t>(k)]; }

std::optional<Block> parse_block(std::string_view s) { return lookup<Block>(kBlockNames, s); }
std::optional<Item> parse_item(std::string_view s) { return lookup<Item>(kItemNames, s); }
std::optional<Achievement> parse_achievement(std::string_view s) {
  return lookup<Achievement>(kAchievementNames, s);
}
std::optional<Action> parse_action(std::string_view s) { return lookup<Action>(kActionNames, s); }
std::optional<MobKind> parse_mob_kind(std::string_view s) {
  return lookup<MobKind>(kMobKindNames, s);
}

}  // namespace ued
