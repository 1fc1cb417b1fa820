#include <doctest.h>

#include <nlohmann/json.hpp>

#include "support.hpp"
#include "ued/core/registry.hpp"
#include "ued/dsl/compile.hpp"
#include "ued/dsl/parser.hpp"
#include "ued/world/env.hpp"

using namespace ued;
using ued::testing::minimal_program;

namespace {

// No spawning so scripted episodes stay exact.
dsl::LevelProgram calm(AchievementSet goal) {
  auto p = minimal_program("calm", goal);
  p.mechanics.melee_spawn_multiplier = 0.0;
  p.mechanics.passive_spawn_multiplier = 0.0;
  p.mechanics.needs_depletion_multiplier = 0.0;
  return p;
}

void place_at(dsl::LevelProgram& p, Block b, int row, int col) {
  dsl::PlacementSpec s;
  s.block = b;
  s.region = dsl::Cell{row, col};
  p.placements.push_back(s);
}

}  // namespace

TEST_SUITE("world") {
  TEST_CASE("registry matches the shipped achievement table") {
    const auto j = nlohmann::json::parse(ued::testing::read_file(ued::testing::source_dir() / "data" / "achievements.json"));
    const auto& reg = AchievementRegistry::standard();
    CHECK(AchievementRegistry::from_json(j) == reg);
    CHECK(AchievementRegistry::from_json(reg.to_json()) == reg);
    CHECK(reg.size() == kNumAchievements);
    CHECK(reg.reward(Achievement::CollectWood) == 1.0);
    CHECK(reg.reward(Achievement::DefeatGuard) == 5.0);
    CHECK(reg.total_reward() == doctest::Approx(19.0));
  }

  TEST_CASE("first unlock pays its reward and repeats pay nothing") {
    auto p = calm(make_set({Achievement::CollectWood, Achievement::PlaceTable}));
    place_at(p, Block::Tree, 5, 6);
    auto s = world::reset(p, 3);
    REQUIRE(s.block(0, 5, 6) == Block::Tree);

    auto r = world::step(s, Action::Interact);
    CHECK(r.native_reward == 1.0);
    CHECK(r.newly_unlocked == make_set({Achievement::CollectWood}));
    CHECK(s.item(Item::Wood) == 1);

    r = world::step(s, Action::Interact);
    CHECK(r.native_reward == 0.0);
    CHECK(r.newly_unlocked.none());
    CHECK(s.item(Item::Wood) == 2);
  }

  TEST_CASE("stone needs a pickaxe and iron a stone pickaxe") {
    auto p = calm(make_set({Achievement::CollectStone}));
    place_at(p, Block::Stone, 5, 6);
    place_at(p, Block::Iron, 4, 5);
    auto s = world::reset(p, 1);
    world::step(s, Action::Interact);
    CHECK(s.item(Item::Stone) == 0);
    CHECK(s.block(0, 5, 6) == Block::Stone);

    s.inventory[index(Item::Pickaxe)] = 1;
    world::step(s, Action::Interact);
    CHECK(s.item(Item::Stone) == 1);
    CHECK(s.item(Item::Iron) == 0);
    CHECK(s.block(0, 5, 6) == Block::Grass);

    s.inventory[index(Item::Pickaxe)] = 2;
    const auto r = world::step(s, Action::Interact);
    CHECK(s.item(Item::Iron) == 1);
    CHECK(r.newly_unlocked == make_set({Achievement::CollectIron}));
  }

  TEST_CASE("crafting chain next to a table") {
    auto p = calm(make_set({Achievement::MakeIronSword}));
    p.inventory[Item::Wood] = 4;
    p.inventory[Item::Stone] = 1;
    p.inventory[Item::Coal] = 1;
    p.inventory[Item::Iron] = 1;
    auto s = world::reset(p, 2);
    CHECK(world::step(s, Action::MakeWoodPickaxe).newly_unlocked.none());
    auto r = world::step(s, Action::PlaceTable);
    CHECK(r.newly_unlocked == make_set({Achievement::PlaceTable}));
    CHECK(s.block(0, 6, 5) == Block::Table);
    CHECK(world::step(s, Action::MakeWoodPickaxe).native_reward == 1.0);
    CHECK(world::step(s, Action::MakeStonePickaxe).native_reward == 1.0);
    CHECK(s.item(Item::Pickaxe) == 2);
    r = world::step(s, Action::MakeIronSword);
    CHECK(r.native_reward == 3.0);
    CHECK(s.item(Item::IronSword) == 1);
    CHECK(s.item(Item::Wood) == 0);
  }

  TEST_CASE("place table falls back to a free neighbour") {
    auto p = calm(make_set({Achievement::PlaceTable}));
    p.inventory[Item::Wood] = 1;
    place_at(p, Block::Stone, 6, 5);
    auto s = world::reset(p, 2);
    REQUIRE(s.facing == world::Direction::Down);
    world::step(s, Action::PlaceTable);
    CHECK(s.block(0, 4, 5) == Block::Table);
    CHECK(s.has(Achievement::PlaceTable));
  }

  TEST_CASE("descending is blocked until enough monsters fall") {
    auto p = calm(make_set({Achievement::DescendFloor}));
    auto s = world::reset(p, 4);
    s.set_block(0, 5, 5, Block::Ladder);
    auto r = world::step(s, Action::Descend);
    CHECK(s.floor == 0);
    CHECK(r.native_reward == 0.0);

    s.monsters_killed[0] = 3;
    world::step(s, Action::Descend);
    CHECK(s.floor == 0);

    s.monsters_killed[0] = 4;
    r = world::step(s, Action::Descend);
    CHECK(s.floor == 1);
    CHECK(world::CellPos{s.row, s.col} == world::start_cell(1));
    CHECK(r.native_reward == 3.0);
  }

  TEST_CASE("a zero clear count opens the ladder at once") {
    auto p = calm(make_set({Achievement::DescendFloor}));
    p.mechanics.monsters_killed_to_clear = 0;
    auto s = world::reset(p, 4);
    s.set_block(0, 5, 5, Block::Ladder);
    world::step(s, Action::Descend);
    CHECK(s.floor == 1);
  }

  TEST_CASE("interact hits an adjacent mob before the faced block") {
    auto p = calm(make_set({Achievement::DefeatZombie}));
    place_at(p, Block::Tree, 6, 5);
    auto s = world::reset(p, 5);
    s.mobs.push_back({world::Creature::Zombie, 0, 4, 5, world::creature_hp(world::Creature::Zombie), 5});
    world::step(s, Action::Interact);
    CHECK(s.item(Item::Wood) == 0);
    bool hurt = false;
    for (const auto& m : s.mobs) hurt = hurt || (m.kind == world::Creature::Zombie && m.hp == 2);
    CHECK(hurt);
  }

  TEST_CASE("a sword kills a zombie in one blow") {
    auto p = calm(make_set({Achievement::DefeatZombie}));
    p.inventory[Item::IronSword] = 1;
    auto s = world::reset(p, 5);
    s.mobs.push_back({world::Creature::Zombie, 0, 5, 4, world::creature_hp(world::Creature::Zombie), 5});
    const auto r = world::step(s, Action::Interact);
    CHECK(r.newly_unlocked == make_set({Achievement::DefeatZombie}));
    CHECK(s.monsters_killed[0] == 1);
    for (const auto& m : s.mobs) CHECK(m.kind != world::Creature::Zombie);
  }

  TEST_CASE("every level has a guard on the lower floor") {
    const auto s = world::reset(calm(make_set({Achievement::CollectWood})), 0);
    const auto g = world::guard_cell();
    const int idx = s.mob_at(1, g.row, g.col);
    REQUIRE(idx >= 0);
    CHECK(s.mobs[static_cast<std::size_t>(idx)].kind == world::Creature::Guard);
  }

  TEST_CASE("wrapped reward masks initial unlocks and adds the bonus") {
    auto p = calm(make_set({Achievement::PlaceTable}));
    p.completed = make_set({Achievement::CollectWood});
    auto s = world::reset(p, 1);

    auto w = world::wrapped_reward(1.0, make_set({Achievement::CollectWood}), s, p.goal, 20.0);
    CHECK(w.reward == 0.0);
    CHECK_FALSE(w.done);

    w = world::wrapped_reward(1.0, make_set({Achievement::CollectStone}), s, p.goal, 20.0);
    CHECK(w.reward == 1.0);
    CHECK_FALSE(w.done);

    s.achievements.set(index(Achievement::PlaceTable));
    w = world::wrapped_reward(1.0, make_set({Achievement::PlaceTable}), s, p.goal, 20.0);
    CHECK(w.reward == 21.0);
    CHECK(w.done);
  }

  TEST_CASE("observation carries the goal bits and the player") {
    const auto goal = make_set({Achievement::CollectCoal, Achievement::DefeatGuard});
    const auto s = world::reset(calm(goal), 1);
    const auto o = world::encode_observation(s, goal);
    REQUIRE(o.goal.size() == kNumAchievements);
    for (std::size_t i = 0; i < kNumAchievements; ++i) CHECK(o.goal[i] == (goal.test(i) ? 1 : 0));
    REQUIRE(o.map.size() == static_cast<std::size_t>(kCellsPerFloor));
    CHECK(o.map[5 * kCols + 5] ==
          world::Observation::kPlayerCode + static_cast<std::int16_t>(s.facing));
    CHECK(o.map[0] == static_cast<std::int16_t>(index(Block::Wall)));
    CHECK(o.inventory.size() == kNumItems);
    CHECK(o.flatten().size() == 1 + o.map.size() + o.inventory.size() + 2 + o.goal.size());
  }

  TEST_CASE("property: random rollouts keep state in range and never lose achievements") {
    const auto seeds = dsl::load_level_dir(ued::testing::seed_dir());
    Rng rng(17);
    for (int ep = 0; ep < 60; ++ep) {
      const auto& p = seeds[static_cast<std::size_t>(ep) % seeds.size()];
      auto s = world::reset(p, static_cast<std::uint64_t>(ep), 200);
      bool done = false;
      while (!done) {
        const auto before = s.achievements;
        const auto r = world::step(s, action_at(rng.below(kNumActions)));
        CHECK((before & ~s.achievements).none());
        CHECK(r.native_reward >= 0.0);
        CHECK(s.health >= 0);
        CHECK(s.health <= world::kMaxHealth);
        CHECK(s.food >= 0);
        CHECK(s.food <= world::kMaxFood);
        for (auto v : s.inventory) {
          CHECK(v >= 0);
          CHECK(v <= world::kMaxItem);
        }
        CHECK(world::player_walkable(s.block(s.floor, s.row, s.col)));
        CHECK(s.mob_at(s.floor, s.row, s.col) < 0);
        done = r.done;
      }
      CHECK(s.timestep <= 200);
    }
  }

  TEST_CASE("same seed and actions give the same trajectory") {
    const auto p = dsl::load_level_file(ued::testing::seed_dir() / "seed_survive.lvl");
    for (std::uint64_t seed : {0ULL, 9ULL, 12345ULL}) {
      auto a = world::reset(p, seed);
      auto b = world::reset(p, seed);
      Rng ra(seed), rb(seed);
      for (int t = 0; t < 150; ++t) {
        world::step(a, action_at(ra.below(kNumActions)));
        world::step(b, action_at(rb.below(kNumActions)));
      }
      CHECK(a == b);
    }
  }
}
