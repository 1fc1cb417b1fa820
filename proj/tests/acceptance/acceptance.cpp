// Exit gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "support.hpp"
#include "ued/archive/archive.hpp"
#include "ued/core/registry.hpp"
#include "ued/dsl/parser.hpp"
#include "ued/generator/generate.hpp"
#include "ued/pipeline/channel.hpp"
#include "ued/pipeline/config.hpp"
#include "ued/pipeline/run.hpp"
#include "ued/trainer/trainer.hpp"
#include "ued/world/env.hpp"

using namespace ued;
using archive::Archive;
using archive::NodeId;
using archive::Status;
using ued::testing::minimal_program;
using ued::testing::read_file;
using ued::testing::record_rate;
using ued::testing::source_dir;

namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    if (detail.size() < 400) detail += (detail.empty() ? "" : "; ") + what;
  }
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (secs >= limit_s) o.require(false, "runtime " + std::to_string(secs) + "s over " + std::to_string(limit_s) + "s");
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s (%.2fs)%s%s\n", o.pass ? "PASS" : "FAIL", id, title, secs,
              o.detail.empty() ? "" : " :: ", o.detail.c_str());
  std::fflush(stdout);
}

dsl::LevelProgram prog(const std::string& name) { return minimal_program(name, make_set({Achievement::CollectWood})); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

Outcome replay_exactness() {
  Outcome o;
  const std::vector<double> expected{0.40325, 0.29870, 0.29805};
  const std::vector<double> scores{0.25, 0.09, 0.16};
  const std::vector<std::uint64_t> stamps{9, 2, 5};
  const auto p = archive::replay_probabilities(scores, stamps, 10, 0.3, 1.0);
  for (std::size_t i = 0; i < 3; ++i) {
    o.require(std::abs(p[i] - expected[i]) <= 1e-4, "P[" + std::to_string(i) + "]=" + fmt(p[i]));
  }

  // Same example through a live archive: window 10 with 5, 1 and 2 wins.
  archive::ArchiveParams params;
  params.window = 10;
  Archive worked(params);
  for (const auto* n : {"a", "b", "c"}) worked.insert(prog(n), std::nullopt, "");
  record_rate(worked, 0, 5, 10);
  record_rate(worked, 1, 1, 10);
  record_rate(worked, 2, 2, 10);
  worked.set_replay_state(10, {{0, 9}, {1, 2}, {2, 5}});
  const auto q = worked.replay_distribution();
  for (std::size_t i = 0; i < 3; ++i) o.require(std::abs(q[i] - expected[i]) <= 1e-4, "archive P[" + std::to_string(i) + "]");

  Rng rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    archive::ArchiveParams ap;
    ap.tau = rng.uniform();
    ap.beta = 0.1 + 3.0 * rng.uniform();
    Archive ar(ap);
    const int n = 1 + static_cast<int>(rng.below(30));
    const std::uint64_t c = rng.below(100);
    std::map<NodeId, std::uint64_t> stamps;
    for (int i = 0; i < n; ++i) {
      const auto id = ar.insert(prog("n" + std::to_string(i)), std::nullopt, "");
      const int eps = static_cast<int>(rng.below(17));
      record_rate(ar, id, static_cast<int>(rng.below(static_cast<std::uint64_t>(eps) + 1)), eps);
      stamps[id] = rng.below(c + 1);
    }
    ar.set_replay_state(c, stamps);
    const auto dist = ar.replay_distribution();
    const double sum = std::accumulate(dist.begin(), dist.end(), 0.0);
    o.require(std::abs(sum - 1.0) <= 1e-12, "trial " + std::to_string(trial) + " sums to " + std::to_string(sum));
    for (double v : dist) o.require(v >= 0.0, "negative probability in trial " + std::to_string(trial));
  }
  return o;
}

Outcome sampler_oracle() {
  Outcome o;
  archive::ArchiveParams params;
  params.window = 10;
  Archive ar(params);
  const int wins[10] = {5, 1, 2, 7, 3, 9, 0, 4, 6, 8};
  std::map<NodeId, std::uint64_t> stamps;
  for (int i = 0; i < 10; ++i) {
    const auto id = ar.insert(prog("n" + std::to_string(i)), std::nullopt, "");
    record_rate(ar, id, wins[i], 10);
    stamps[id] = static_cast<std::uint64_t>((i * 7) % 20);
  }
  ar.set_replay_state(20, stamps);
  const auto expected = ar.replay_distribution();
  Rng rng(202);
  std::vector<int> counts(10, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    ar.set_replay_state(20, stamps);
    const auto got = ar.sample_replay(1, rng);
    if (got.size() != 1) {
      o.require(false, "draw returned " + std::to_string(got.size()) + " nodes");
      return o;
    }
    ++counts[got[0]];
  }
  double worst = 0;
  for (std::size_t i = 0; i < 10; ++i) worst = std::max(worst, std::abs(static_cast<double>(counts[i]) / draws - expected[i]));
  o.require(worst <= 0.01, "max deviation " + fmt(worst));
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("max deviation ") + fmt(worst);
  return o;
}

Outcome eligibility_oracle() {
  Outcome o;
  Rng rng(303);
  int vacuous_leaves = 0;
  int unknown_blocks = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Archive ar;
    const int n = 1 + static_cast<int>(rng.below(50));
    std::vector<std::optional<NodeId>> parent_of;
    std::vector<int> w(static_cast<std::size_t>(n));
    std::vector<int> e(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      std::optional<NodeId> parent;
      if (i > 0 && rng.chance(0.7)) parent = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(i)));
      ar.insert(prog("n" + std::to_string(i)), parent, "");
      parent_of.push_back(parent);
      e[i] = static_cast<int>(rng.below(17));
      w[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(e[i]) + 1));
      record_rate(ar, static_cast<NodeId>(i), w[i], e[i]);
    }
    // Window 16 holds every recorded outcome, so the rate is w/e.
    auto status_of = [&](int i) {
      if (e[i] < 8) return Status::Unknown;
      const double sr = static_cast<double>(w[i]) / e[i];
      if (sr >= 0.75) return Status::A;
      if (sr >= 0.5) return Status::B;
      if (sr >= 0.25) return Status::C;
      return Status::D;
    };
    std::vector<NodeId> expected;
    for (int i = 0; i < n; ++i) {
      const auto s = status_of(i);
      if (s != Status::A && s != Status::B) continue;
      bool ok = true;
      bool leaf = true;
      for (int j = 0; j < n; ++j) {
        if (parent_of[j] != static_cast<NodeId>(i)) continue;
        leaf = false;
        if (status_of(j) == Status::Unknown) ++unknown_blocks;
        if (status_of(j) != Status::D) ok = false;
      }
      if (leaf) ++vacuous_leaves;
      if (ok) expected.push_back(static_cast<NodeId>(i));
    }
    o.require(ar.eligible_parents() == expected, "graph " + std::to_string(trial) + " disagrees");
  }
  o.require(vacuous_leaves > 0, "no vacuous leaf exercised");
  o.require(unknown_blocks > 0, "no unknown child exercised");
  if (o.pass) {
    o.detail = std::to_string(vacuous_leaves) + " leaves, " + std::to_string(unknown_blocks) + " unknown children";
  }
  return o;
}

Outcome reward_contract() {
  Outcome o;
  auto p = minimal_program("contract", make_set({Achievement::PlaceTable}));
  p.completed = make_set({Achievement::CollectWood});
  p.mechanics.melee_spawn_multiplier = 0.0;
  p.mechanics.passive_spawn_multiplier = 0.0;
  p.mechanics.needs_depletion_multiplier = 0.0;
  dsl::PlacementSpec tree;
  tree.block = Block::Tree;
  tree.region = dsl::Cell{6, 5};
  p.placements.push_back(tree);
  o.require(dsl::validate(p).empty(), "contract level does not validate");

  const double bonus = train::update_bonus(4.0, 1.0);
  auto s = world::reset(p, 1);
  o.require(s.has(Achievement::CollectWood), "completed achievement not held at reset");

  const Action script[] = {Action::Interact, Action::Interact, Action::Noop, Action::PlaceTable};
  int bonus_paid = 0;
  double total = 0.0;
  bool done = false;
  for (std::size_t t = 0; t < std::size(script) && !done; ++t) {
    const auto r = world::step(s, script[t]);
    const auto w = world::wrapped_reward(r.native_reward, r.newly_unlocked, s, p.goal, bonus);
    total += w.reward;
    if (w.reward >= bonus) ++bonus_paid;
    if (t < 2) o.require(w.reward == 0.0, "wood step " + std::to_string(t) + " paid " + std::to_string(w.reward));
    if (t == 3) {
      o.require(w.done, "goal step does not terminate");
      o.require(w.reward == 1.0 + bonus, "goal step paid " + std::to_string(w.reward));
    } else {
      o.require(!w.done, "early termination at step " + std::to_string(t));
    }
    done = w.done;
  }
  o.require(done, "goal never completed");
  o.require(bonus_paid == 1, "bonus paid " + std::to_string(bonus_paid) + " times");
  o.require(total == 1.0 + bonus, "episode return " + std::to_string(total));

  o.require(train::update_bonus(10.0, 1.0) == 20.0, "R=10");
  o.require(train::update_bonus(0.3, 1.0) == 1.0, "R=0.3");
  o.require(train::update_bonus(-2.0, 1.0) == 1.0, "R=-2");
  return o;
}

Outcome batch_accounting() {
  Outcome o;
  using train::SourceKind;
  Archive ar;
  for (int i = 0; i < 20; ++i) ar.insert(prog("old" + std::to_string(i)), std::nullopt, "");
  std::vector<NodeId> fresh;
  for (int i = 0; i < 10; ++i) fresh.push_back(ar.insert(prog("new" + std::to_string(i)), std::nullopt, ""));
  Rng rng(505);
  const train::BatchConfig cfg;

  const auto with_new = train::plan_batch(2, fresh, ar, cfg, rng);
  o.require(with_new.total() == 100, "total " + std::to_string(with_new.total()));
  o.require(with_new.episodes(SourceKind::Target) == 20, "target");
  o.require(with_new.episodes(SourceKind::New) == 53, "new");
  o.require(with_new.unique(SourceKind::New) == 10, "new uniques");
  o.require(with_new.episodes(SourceKind::Replay) == 27, "replay");
  o.require(with_new.unique(SourceKind::Replay) == 5, "replay uniques");
  for (const auto& s : with_new.slots) {
    if (s.kind == SourceKind::Replay && std::find(fresh.begin(), fresh.end(), *s.node) != fresh.end()) {
      o.require(false, "fresh level replayed");
    }
  }

  const auto without = train::plan_batch(3, {}, ar, cfg, rng);
  o.require(without.total() == 100, "total without new");
  o.require(without.episodes(SourceKind::Target) == 20, "target without new");
  o.require(without.episodes(SourceKind::New) == 0, "new without new");
  o.require(without.episodes(SourceKind::Replay) == 80, "replay without new");
  o.require(without.unique(SourceKind::Replay) <= 15 && without.unique(SourceKind::Replay) > 0, "replay uniques without new");
  return o;
}

std::vector<fs::path> lvl_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".lvl") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Outcome compile_yield() {
  Outcome o;
  Rng rng(606);
  const auto corpus = ued::testing::corpus_dir();
  const auto valid = lvl_files(corpus / "valid");
  const auto malformed = lvl_files(corpus / "malformed");
  o.require(valid.size() == 20 && malformed.size() == 20, "corpus has " + std::to_string(valid.size()) + "/" +
                                                              std::to_string(malformed.size()) + " files");
  for (const auto& [files, want] : {std::pair{&valid, gen::Verdict::Valid}, std::pair{&malformed, gen::Verdict::Rejected}}) {
    for (const auto& f : *files) {
      gen::CandidateLevel c;
      c.program_text = read_file(f);
      o.require(gen::compile_check(c, 32, rng).verdict == want, "misclassified " + f.filename().string());
    }
  }

  Archive ar;
  const auto parent = ar.insert(dsl::load_level_file(ued::testing::seed_dir() / "seed_craft.lvl"), std::nullopt, "seed");
  record_rate(ar, parent, 12, 16);
  ued::testing::StubBackend stub(0.5);
  int full = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng trial_rng(static_cast<std::uint64_t>(7000 + trial));
    const auto batch = gen::generate_batch(parent, ar, 10, 2.0, stub, {}, trial_rng);
    full += batch.valid.size() == 10 ? 1 : 0;
  }
  o.require(full >= 95, "filled " + std::to_string(full) + "/100 trials, need 95");
  if (o.pass) o.detail = "filled " + std::to_string(full) + "/100";
  return o;
}

pipeline::CurriculumConfig small_config() {
  auto c = pipeline::CurriculumConfig::load(source_dir() / "configs" / "default.json");
  c.budget_env_steps = 6000;
  c.updates_per_cycle = 20;
  c.max_timesteps = 40;
  c.eval_instances = 4;
  c.num_unique_new = 4;
  c.num_unique_replay = 2;
  c.num_unique_replay_no_new = 4;
  return c;
}

Outcome async_contract() {
  Outcome o;
  for (int v : {2, 3, 4}) {
    for (int latency = 0; latency <= 4; ++latency) {
      const bool delivered = latency + 1 <= v - 1;
      const bool expect_block = latency >= v - 1;
      const auto rule = pipeline::await_generation(delivered, v - 1, v);
      o.require((rule == pipeline::AwaitDecision::Block) == expect_block,
                "rule v=" + std::to_string(v) + " L=" + std::to_string(latency));

      // Open loop needs no eligible parent, so every cadence slot issues a ticket.
      auto c = small_config();
      c.v = v;
      ued::testing::StubBackend stub;
      pipeline::RunOptions opt;
      opt.mode = pipeline::Mode::DiCodeOpenLoop;
      opt.seed = 77;
      opt.backend_override = &stub;
      opt.inline_latency_cycles = latency;
      const auto r = pipeline::run_training(c, opt);
      const int collected = r.count_events("levels_delivered") + r.tickets_failed;
      o.require(collected > 0, "no ticket collected at v=" + std::to_string(v));
      o.require(r.blocks == (expect_block ? collected : 0),
                "run v=" + std::to_string(v) + " L=" + std::to_string(latency) + " blocks=" + std::to_string(r.blocks));
    }
  }

  ued::testing::FailingBackend dead;
  const auto c = small_config();
  pipeline::RunOptions opt;
  opt.seed = 78;
  opt.backend_override = &dead;
  const auto r = pipeline::run_training(c, opt);
  o.require(r.env_steps >= c.budget_env_steps, "dead-backend run stopped early");
  o.require(r.tickets_failed > 0 && r.tickets_failed == r.tickets_issued - (r.count_events("ticket_discarded")),
            "ticket accounting with a dead backend");
  o.require(!r.metrics.empty(), "dead-backend run wrote no metrics");
  return o;
}

struct Sweep {
  std::map<std::pair<pipeline::Mode, int>, train::EvalResult> evals;
};

Sweep run_sweep() {
  const auto cfg = pipeline::CurriculumConfig::load(source_dir() / "configs" / "acceptance.json");
  const pipeline::Mode modes[] = {pipeline::Mode::DiCode, pipeline::Mode::DiCodeOpenLoop, pipeline::Mode::TargetOnly,
                                  pipeline::Mode::DomainRandomization};
  std::vector<std::pair<std::pair<pipeline::Mode, int>, std::future<train::EvalResult>>> jobs;
  for (auto mode : modes) {
    for (int seed : {1, 2, 3}) {
      jobs.emplace_back(std::pair{mode, seed}, std::async(std::launch::async, [cfg, mode, seed] {
                          pipeline::RunOptions opt;
                          opt.mode = mode;
                          opt.seed = static_cast<std::uint64_t>(seed);
                          opt.sequential = true;
                          opt.backend = "mutation";
                          return pipeline::run_training(cfg, opt).final_eval;
                        }));
    }
  }
  Sweep s;
  for (auto& [key, f] : jobs) s.evals[key] = f.get();
  return s;
}

Outcome curriculum_effect(const Sweep& s) {
  Outcome o;
  const auto guard = index(Achievement::DefeatGuard);
  int dicode_hits = 0;
  std::string numbers;
  for (int seed : {1, 2, 3}) {
    const double d = s.evals.at({pipeline::Mode::DiCode, seed}).per_achievement_sr[guard];
    const double t = s.evals.at({pipeline::Mode::TargetOnly, seed}).per_achievement_sr[guard];
    const double r = s.evals.at({pipeline::Mode::DomainRandomization, seed}).per_achievement_sr[guard];
    dicode_hits += d > 0.0 ? 1 : 0;
    o.require(t == 0.0, "target-only guard SR " + fmt(t) + " on seed " + std::to_string(seed));
    o.require(r == 0.0, "dr guard SR " + fmt(r) + " on seed " + std::to_string(seed));
    numbers += (numbers.empty() ? "" : ", ") + std::string("seed ") + std::to_string(seed) + " guard SR dicode=" + fmt(d) +
               " target-only=" + fmt(t) + " dr=" + fmt(r);
  }
  o.require(dicode_hits >= 2, "dicode beats zero on " + std::to_string(dicode_hits) + "/3 seeds");
  o.detail += (o.detail.empty() ? "" : "; ") + numbers;
  return o;
}

Outcome ablation_direction(const Sweep& s) {
  Outcome o;
  int wins = 0;
  std::string numbers;
  for (int seed : {1, 2, 3}) {
    const double d = s.evals.at({pipeline::Mode::DiCode, seed}).mean_return;
    const double ol = s.evals.at({pipeline::Mode::DiCodeOpenLoop, seed}).mean_return;
    wins += d >= ol ? 1 : 0;
    numbers += (numbers.empty() ? "" : ", ") + std::string("seed ") + std::to_string(seed) + " return dicode=" + fmt(d) +
               " dicode-ol=" + fmt(ol);
  }
  o.require(wins >= 2, "dicode >= dicode-ol on " + std::to_string(wins) + "/3 seeds");
  o.detail += (o.detail.empty() ? "" : "; ") + numbers;
  return o;
}

Outcome determinism() {
  Outcome o;
  const auto dir = ued::testing::scratch_dir("acceptance_determinism");
  const auto cfg = pipeline::CurriculumConfig::load(source_dir() / "configs" / "acceptance.json");
  pipeline::RunOptions first;
  first.seed = 1;
  first.sequential = true;
  first.out = dir / "first";
  pipeline::run_training(cfg, first);

  const auto manifest = nlohmann::json::parse(read_file(first.out / "manifest.json"));
  pipeline::RunOptions second;
  second.mode = *pipeline::parse_mode(manifest.at("mode").get<std::string>());
  second.seed = manifest.at("seed").get<std::uint64_t>();
  second.sequential = manifest.at("sequential").get<bool>();
  second.backend = manifest.at("backend").get<std::string>();
  second.out = dir / "second";
  pipeline::run_training(pipeline::CurriculumConfig::from_json(manifest.at("config")), second);

  const auto a = read_file(first.out / "metrics.jsonl");
  const auto b = read_file(second.out / "metrics.jsonl");
  o.require(!a.empty(), "empty metrics");
  o.require(a == b, "metrics.jsonl differs");
  return o;
}

}  // namespace

int main() {
  report(1, "replay distribution exactness", 1.0, replay_exactness);
  report(2, "replay sampler frequencies", 5.0, sampler_oracle);
  report(3, "parent eligibility oracle", 1.0, eligibility_oracle);
  report(4, "level reward contract and bonus", 1.0, reward_contract);
  report(5, "batch accounting regimes", 1.0, batch_accounting);
  report(6, "compilation check yield", 10.0, compile_yield);
  report(7, "async blocking rule and liveness", 5.0, async_contract);

  Sweep sweep;
  const auto t0 = Clock::now();
  bool swept = true;
  std::string sweep_error;
  try {
    sweep = run_sweep();
  } catch (const std::exception& e) {
    swept = false;
    sweep_error = e.what();
  }
  const double sweep_s = std::chrono::duration<double>(Clock::now() - t0).count();
  std::printf("sweep: 12 runs in %.1fs\n", sweep_s);
  auto from_sweep = [&](auto fn) {
    return [&, fn] {
      if (!swept) throw std::runtime_error(sweep_error);
      auto o = fn(sweep);
      if (sweep_s >= 600.0) o.require(false, "sweep runtime " + std::to_string(sweep_s) + "s over 600s");
      return o;
    };
  };
  report(8, "curriculum effect on the guard", 600.0, from_sweep(curriculum_effect));
  report(9, "closed loop versus open loop", 600.0, from_sweep(ablation_direction));
  report(10, "sequential runs are byte-identical", 120.0, determinism);

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
