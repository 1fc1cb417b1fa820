#include <doctest.h>

#include <cmath>
#include <fstream>

#include "support.hpp"
#include "ued/dsl/parser.hpp"
#include "ued/trainer/trainer.hpp"
#include "ued/world/env.hpp"

using namespace ued;
using archive::Archive;
using train::SourceKind;
using ued::testing::minimal_program;
using ued::testing::seed_dir;

namespace {

Archive archive_with(int n) {
  Archive ar;
  for (int i = 0; i < n; ++i) {
    ar.insert(minimal_program("n" + std::to_string(i), make_set({Achievement::CollectWood})), std::nullopt, "");
  }
  return ar;
}

std::vector<archive::NodeId> fresh_ids(Archive& ar, int n) {
  std::vector<archive::NodeId> ids;
  for (int i = 0; i < n; ++i) {
    ids.push_back(ar.insert(minimal_program("f" + std::to_string(i), make_set({Achievement::PlaceTable})),
                            std::nullopt, ""));
  }
  return ids;
}

// Two-state chain: left from 0 cashes 0.5, right from 1 cashes 1, both terminal.
struct Chain {
  static constexpr train::StateKey kBase = 1000;
  struct Outcome {
    int next;
    double reward;
    bool terminal;
  };
  static Outcome step(int s, std::size_t a) {
    if (s == 0) return a == 0 ? Outcome{0, 0.5, true} : Outcome{1, 0.0, false};
    return a == 0 ? Outcome{0, 0.0, false} : Outcome{1, 1.0, true};
  }
};

}  // namespace

TEST_SUITE("trainer") {
  TEST_CASE("bonus update examples") {
    CHECK(train::update_bonus(10.0, 1.0) == 20.0);
    CHECK(train::update_bonus(0.3, 1.0) == 1.0);
    CHECK(train::update_bonus(-2.0, 1.0) == 1.0);
    train::BonusState b;
    b.observe(4.0);
    CHECK(b.bonus == 8.0);
    CHECK(b.last_target_return == 4.0);
  }

  TEST_CASE("property: bonus is monotone and floored") {
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
      const double r1 = rng.uniform() * 40 - 10;
      const double r2 = r1 + rng.uniform() * 5;
      const double d = rng.uniform() * 3;
      CHECK(train::update_bonus(r1, d) <= train::update_bonus(r2, d));
      CHECK(train::update_bonus(r1, d) >= d);
    }
  }

  TEST_CASE("batch with fresh levels") {
    auto ar = archive_with(8);
    const auto fresh = fresh_ids(ar, 10);
    Rng rng(1);
    const auto plan = train::plan_batch(4, fresh, ar, {}, rng);
    CHECK(plan.total() == 100);
    CHECK(plan.episodes(SourceKind::Target) == 20);
    CHECK(plan.episodes(SourceKind::New) == 53);
    CHECK(plan.unique(SourceKind::New) == 10);
    CHECK(plan.episodes(SourceKind::Replay) == 27);
    CHECK(plan.unique(SourceKind::Replay) == 5);
    for (const auto& s : plan.slots) {
      if (s.kind == SourceKind::Replay) CHECK(std::find(fresh.begin(), fresh.end(), *s.node) == fresh.end());
    }
  }

  TEST_CASE("batch without fresh levels") {
    auto ar = archive_with(20);
    Rng rng(1);
    const auto plan = train::plan_batch(3, {}, ar, {}, rng);
    CHECK(plan.episodes(SourceKind::Target) == 20);
    CHECK(plan.episodes(SourceKind::New) == 0);
    CHECK(plan.episodes(SourceKind::Replay) == 80);
    CHECK(plan.unique(SourceKind::Replay) == 15);
    CHECK_FALSE(plan.folded_replay);
  }

  TEST_CASE("empty archive folds replay into the target") {
    Archive ar;
    Rng rng(1);
    const auto plan = train::plan_batch(1, {}, ar, {}, rng);
    CHECK(plan.episodes(SourceKind::Target) == 100);
    CHECK(plan.total() == 100);
    CHECK(plan.folded_replay);
  }

  TEST_CASE("fresh levels are refused off cadence") {
    auto ar = archive_with(2);
    const auto fresh = fresh_ids(ar, 2);
    Rng rng(1);
    CHECK_THROWS_AS(train::plan_batch(3, fresh, ar, {}, rng), std::invalid_argument);
  }

  TEST_CASE("target-only is a full target fraction") {
    auto ar = archive_with(5);
    train::BatchConfig c;
    c.target_fraction = 1.0;
    Rng rng(1);
    const auto plan = train::plan_batch(0, {}, ar, c, rng);
    CHECK(plan.episodes(SourceKind::Target) == 100);
    CHECK(plan.slots.size() == 1);
  }

  TEST_CASE("property: batch accounting") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
      auto ar = archive_with(static_cast<int>(rng.below(30)));
      train::BatchConfig c;
      c.updates_per_cycle = 1 + static_cast<int>(rng.below(300));
      c.target_fraction = static_cast<double>(rng.below(101)) / 100.0;
      c.new_fraction = (1.0 - c.target_fraction) * rng.uniform();
      c.replay_fraction = 1.0 - c.target_fraction - c.new_fraction;
      const int n_fresh = static_cast<int>(rng.below(15));
      const auto fresh = fresh_ids(ar, n_fresh);
      const auto plan = train::plan_batch(0, fresh, ar, c, rng);
      const int n = c.updates_per_cycle;
      const int target = static_cast<int>(std::lround(c.target_fraction * n));
      const int fresh_eps = n_fresh > 0 ? static_cast<int>(std::lround(c.new_fraction * n)) : 0;
      CHECK(plan.total() == n);
      CHECK(plan.episodes(SourceKind::New) == fresh_eps);
      if (plan.folded_replay) {
        CHECK(plan.episodes(SourceKind::Target) == n - plan.episodes(SourceKind::New));
      } else {
        CHECK(plan.episodes(SourceKind::Target) == target);
      }
      CHECK(plan.unique(SourceKind::New) <= c.num_unique_new);
      CHECK(plan.unique(SourceKind::Replay) <= (n_fresh > 0 ? c.num_unique_replay : c.num_unique_replay_no_new));
    }
  }

  TEST_CASE("q-update arithmetic") {
    train::PolicyTable q;
    q.update(1, Action::Interact, 1.0, 2, true);
    CHECK((*q.find(1))[index(Action::Interact)] == doctest::Approx(0.1));
    q.update(2, Action::Noop, 0.0, 3, true);
    q.update(3, std::size_t{4}, 2.0, 3, true, 0.9);
    q.update(2, Action::Left, 0.5, 3, false);
    // 0.1 * (0.5 + 0.9 * 0.2)
    CHECK((*q.find(2))[index(Action::Left)] == doctest::Approx(0.068));
    q.update(2, index(Action::Right), 0.0, 3, false, 0.9, 0b1);
    CHECK((*q.find(2))[index(Action::Right)] == 0.0);
    CHECK_THROWS_AS(q.update(1, kNumActions, 0.0, 1, true, 0.9), std::out_of_range);
  }

  TEST_CASE("epsilon schedule") {
    const train::PolicyTable q;
    CHECK(q.epsilon(0) == 1.0);
    CHECK(q.epsilon(50'000) == doctest::Approx(0.525));
    CHECK(q.epsilon(100'000) == 0.05);
    CHECK(q.epsilon(10'000'000) == 0.05);
  }

  TEST_CASE("greedy respects the allowed mask and breaks ties uniformly") {
    train::PolicyTable q;
    q.update(5, Action::Noop, 10.0, 5, true);
    Rng rng(1);
    CHECK(q.greedy(5, rng) == index(Action::Noop));
    CHECK(q.greedy(5, rng, 0b110) != index(Action::Noop));
    std::array<int, kNumActions> seen{};
    for (int i = 0; i < 2000; ++i) ++seen[q.greedy(77, rng)];
    for (auto c : seen) CHECK(c > 100);
  }

  TEST_CASE("chain MDP: learned greedy policy matches value iteration") {
    const train::LearnerParams params;
    // Value iteration oracle over the two live states and two actions.
    std::array<std::array<double, 2>, 2> qstar{};
    for (int it = 0; it < 200; ++it) {
      auto next = qstar;
      for (int s = 0; s < 2; ++s) {
        for (std::size_t a = 0; a < 2; ++a) {
          const auto o = Chain::step(s, a);
          next[s][a] = o.reward + (o.terminal ? 0.0 : params.gamma * std::max(qstar[o.next][0], qstar[o.next][1]));
        }
      }
      qstar = next;
    }
    train::PolicyTable q(params);
    Rng rng(3);
    for (int ep = 0; ep < 500; ++ep) {
      int s = 0;
      for (int t = 0; t < 20; ++t) {
        const auto a = q.choose(Chain::kBase + s, 0.3, rng, 0b11);
        const auto o = Chain::step(s, a);
        q.update(Chain::kBase + s, a, o.reward, Chain::kBase + o.next, o.terminal, params.gamma, 0b11);
        if (o.terminal) break;
        s = o.next;
      }
    }
    for (int s = 0; s < 2; ++s) {
      const std::size_t best = qstar[s][1] > qstar[s][0] ? 1 : 0;
      CHECK(q.greedy(Chain::kBase + s, rng, 0b11) == best);
    }
    CHECK(q.max_value(Chain::kBase + 0, 0b11) == doctest::Approx(qstar[0][1]).epsilon(0.05));
  }

  TEST_CASE("policy file round trip") {
    train::PolicyTable q;
    Rng rng(9);
    for (int i = 0; i < 200; ++i) q.update(rng.below(50), rng.below(kNumActions), rng.uniform(), rng.below(50), rng.chance(0.2), 0.9);
    const auto dir = ued::testing::scratch_dir("policy");
    q.save(dir / "p.bin");
    const auto back = train::PolicyTable::load(dir / "p.bin");
    CHECK(back == q);
    CHECK(back.fingerprint() == q.fingerprint());
    std::ofstream(dir / "bad.bin") << "nope";
    CHECK_THROWS(train::PolicyTable::load(dir / "bad.bin"));
  }

  TEST_CASE("option and skill keys are distinct") {
    const auto s = world::reset(dsl::target_program(), 1);
    const auto goal = dsl::target_program().goal;
    CHECK(train::is_option_key(train::option_key(s, goal)));
    CHECK_FALSE(train::is_option_key(train::skill_key(s, std::nullopt)));
    CHECK(train::key_subgoal(train::skill_key(s, std::nullopt)) == train::kNoSubgoal);
    CHECK(train::key_subgoal(train::skill_key(s, Achievement::CollectCoal)) == index(Achievement::CollectCoal));
    CHECK(train::option_key(s, goal) != train::option_key(s, make_set({Achievement::CollectWood})));
    CHECK(train::pending_mask(s, make_set({Achievement::CollectWood, Achievement::PlaceTable})) == 0b11u);
  }

  TEST_CASE("goal conditioning: training never writes keys for another goal") {
    const auto p = dsl::load_level_file(seed_dir() / "seed_craft.lvl");
    train::PolicyTable q;
    Rng rng(4);
    for (int ep = 0; ep < 40; ++ep) {
      train::EpisodeSpec spec;
      spec.program = &p;
      spec.bonus = 2.0;
      spec.seed = static_cast<std::uint64_t>(ep);
      train::Exploration how;
      how.step_offset = static_cast<std::uint64_t>(ep) * 400;
      train::run_episode(spec, q, how, rng);
    }
    const auto goal_bits = p.goal.to_ulong();
    REQUIRE(q.size() > 0);
    for (auto k : q.keys()) {
      if (train::is_option_key(k)) {
        CHECK((k & 0xFFFF) == goal_bits);
      } else {
        const auto sub = train::key_subgoal(k);
        CHECK((sub == train::kNoSubgoal || p.goal.test(sub)));
      }
    }
  }

  TEST_CASE("degenerate level pays the bonus only") {
    auto p = minimal_program("solved", make_set({Achievement::CollectWood}));
    p.completed = p.goal;  // bypasses validation on purpose
    train::PolicyTable q;
    Rng rng(1);
    train::EpisodeSpec spec;
    spec.program = &p;
    spec.bonus = 7.5;
    const auto st = train::run_episode(spec, q, {}, rng);
    CHECK(st.degenerate);
    CHECK(st.success);
    CHECK(st.ret == 7.5);
    CHECK(st.steps == 0);
    CHECK(q.size() == 0);
  }

  TEST_CASE("target episodes never pay a bonus") {
    const auto target = dsl::target_program();
    train::PolicyTable q;
    Rng rng(2);
    train::EpisodeSpec spec;
    spec.program = &target;
    spec.is_target = true;
    spec.bonus = 1000.0;
    spec.seed = 5;
    spec.max_timesteps = 200;
    const auto st = train::run_episode(spec, q, {}, rng);
    double native = 0;
    for (std::size_t i = 0; i < kNumAchievements; ++i) {
      if (st.unlocked.test(i)) native += AchievementRegistry::standard().reward(achievement_at(i));
    }
    CHECK(st.ret == doctest::Approx(native));
    CHECK(st.steps <= 200);
  }

  TEST_CASE("success matches the goal and fixed seeds repeat exactly") {
    const auto p = dsl::load_level_file(seed_dir() / "seed_survive.lvl");
    auto run = [&](std::uint64_t seed) {
      train::PolicyTable q;
      Rng rng(seed);
      std::vector<train::EpisodeStats> out;
      for (int ep = 0; ep < 10; ++ep) {
        train::EpisodeSpec spec;
        spec.program = &p;
        spec.bonus = 3.0;
        spec.seed = seed * 100 + static_cast<std::uint64_t>(ep);
        out.push_back(train::run_episode(spec, q, {}, rng));
      }
      return std::make_pair(out, q.fingerprint());
    };
    const auto [a, fa] = run(1);
    const auto [b, fb] = run(1);
    CHECK(fa == fb);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].ret == b[i].ret);
      CHECK(a[i].steps == b[i].steps);
      CHECK(a[i].success == is_subset(p.goal, a[i].achieved));
    }
  }

  TEST_CASE("apply_trace reproduces the online learner") {
    const auto p = dsl::load_level_file(seed_dir() / "seed_craft.lvl");
    train::PolicyTable live;
    Rng warm(1);
    for (int ep = 0; ep < 5; ++ep) {
      train::EpisodeSpec spec;
      spec.program = &p;
      spec.seed = static_cast<std::uint64_t>(ep);
      train::run_episode(spec, live, {}, warm);
    }
    auto replica = live;
    std::vector<train::Transition> trace;
    train::Exploration how;
    how.record = &trace;
    train::EpisodeSpec spec;
    spec.program = &p;
    spec.bonus = 2.0;
    spec.seed = 77;
    Rng rng(2);
    train::run_episode(spec, live, how, rng);
    REQUIRE_FALSE(trace.empty());
    train::apply_trace(replica, trace);
    CHECK(replica == live);
  }

  TEST_CASE("frozen episodes and evaluation leave the policy untouched") {
    const auto p = dsl::load_level_file(seed_dir() / "seed_craft.lvl");
    train::PolicyTable q;
    Rng rng(1);
    train::EpisodeSpec spec;
    spec.program = &p;
    train::run_episode(spec, q, {}, rng);
    const auto before = q.fingerprint();
    const auto copy = q;
    train::run_episode_frozen(spec, q, {}, rng);
    train::Exploration no_learn;
    no_learn.learn = false;
    train::run_episode(spec, q, no_learn, rng);
    train::evaluate_target(q, 8);
    CHECK(q.fingerprint() == before);
    CHECK(q == copy);
  }

  TEST_CASE("evaluation seeds are disjoint from training seeds") {
    Rng rng(1);
    for (int i = 0; i < 10000; ++i) CHECK(train::training_seed(rng) < train::kEvalSeedBase);
    for (std::size_t i = 0; i < 1000; ++i) CHECK(train::eval_seed(i) >= train::kEvalSeedBase);
  }

  TEST_CASE("untrained policy never defeats the guard") {
    const train::PolicyTable q;
    const auto r = train::evaluate_target(q, 64);
    CHECK(r.per_achievement_sr[index(Achievement::DefeatGuard)] == 0.0);
    CHECK(r.mean_return >= 0.0);
  }

  TEST_CASE("random-policy oracle: the guard is out of reach") {
    const auto target = dsl::target_program();
    Rng rng(8);
    int guard = 0;
    for (int ep = 0; ep < 200; ++ep) {
      auto s = world::reset(target, train::eval_seed(static_cast<std::size_t>(ep)));
      for (bool done = false; !done;) done = world::step(s, action_at(rng.below(kNumActions))).done;
      guard += s.has(Achievement::DefeatGuard) ? 1 : 0;
    }
    CHECK(guard == 0);
  }

  TEST_CASE("scripted curriculum teaches wood collection") {
    const auto wood = dsl::parse(R"(level "wood" { goal { COLLECT_WOOD } })");
    const auto table = dsl::parse(R"(level "table" { goal { COLLECT_WOOD, PLACE_TABLE } })");
    const auto target = dsl::target_program();
    train::PolicyTable q;
    Rng rng(6);
    Rng seeds(7);
    std::uint64_t steps = 0;
    const std::pair<const dsl::LevelProgram*, int> stages[] = {{&wood, 300}, {&table, 300}, {&target, 300}};
    for (const auto& [prog, episodes] : stages) {
      for (int ep = 0; ep < episodes; ++ep) {
        train::EpisodeSpec spec;
        spec.program = prog;
        spec.is_target = prog == &target;
        spec.bonus = 2.0;
        spec.seed = train::training_seed(seeds);
        train::Exploration how;
        how.step_offset = steps;
        steps += static_cast<std::uint64_t>(train::run_episode(spec, q, how, rng).steps);
      }
    }
    const auto r = train::evaluate_target(q, 64);
    CHECK(r.per_achievement_sr[index(Achievement::CollectWood)] >= 0.9);
  }
}
