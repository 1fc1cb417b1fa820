#include "ued/pipeline/run.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ued/core/registry.hpp"
#include "ued/dsl/parser.hpp"
#include "ued/pipeline/channel.hpp"

namespace ued::pipeline {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kTargetWindow = 64;

bool generates(Mode m) {
  return m == Mode::DiCode || m == Mode::DiCodeOpenLoop || m == Mode::Plr;
}

nlohmann::ordered_json sr_object(const std::array<double, kNumAchievements>& sr) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < kNumAchievements; ++i) j[std::string(name(achievement_at(i)))] = sr[i];
  return j;
}

/// Rolling per-achievement rates over recent target training episodes.
class TargetWindow {
 public:
  void push(const AchievementSet& achieved) {
    if (recent_.size() == kTargetWindow) recent_.pop_front();
    recent_.push_back(achieved);
  }

  gen::PerformanceProfile profile() const {
    gen::PerformanceProfile p;
    if (recent_.empty()) return p;
    const auto all = AchievementRegistry::standard().all();
    int full = 0;
    for (const auto& s : recent_) {
      for (std::size_t i = 0; i < kNumAchievements; ++i) p.per_achievement_sr[i] += s.test(i) ? 1.0 : 0.0;
      if (is_subset(all, s)) ++full;
    }
    const double n = static_cast<double>(recent_.size());
    for (auto& v : p.per_achievement_sr) v /= n;
    p.goal_success_rate = full / n;
    return p;
  }

 private:
  std::deque<AchievementSet> recent_;
};

struct EpisodeJob {
  train::SourceKind kind;
  std::optional<archive::NodeId> node;
  std::uint64_t seed;
  Rng rng;
};

class Outputs {
 public:
  explicit Outputs(const RunOptions& o) : dir_(o.out) {
    if (dir_.empty()) return;
    if (fs::exists(dir_ / "manifest.json") || fs::exists(dir_ / "metrics.jsonl")) {
      if (!o.force) {
        throw std::runtime_error("output directory " + dir_.string() +
                                 " already holds a run; pass --force to overwrite");
      }
    }
    fs::create_directories(dir_);
    metrics_.open(dir_ / "metrics.jsonl", std::ios::trunc);
    events_.open(dir_ / "events.jsonl", std::ios::trunc);
    if (!metrics_ || !events_) throw std::runtime_error("cannot write to " + dir_.string());
  }

  bool enabled() const { return !dir_.empty(); }
  const fs::path& dir() const { return dir_; }

  void metric(const MetricsRecord& m) {
    if (enabled()) metrics_ << m.to_json().dump() << '\n' << std::flush;
  }

  void event(const RunEvent& e) {
    if (!enabled()) return;
    nlohmann::ordered_json j;
    j["cycle"] = e.cycle;
    j["kind"] = e.kind;
    j["detail"] = e.detail;
    events_ << j.dump() << '\n' << std::flush;
  }

  void write(const fs::path& name, const std::string& text) const {
    std::ofstream out(dir_ / name, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    out << text;
  }

 private:
  fs::path dir_;
  std::ofstream metrics_;
  std::ofstream events_;
};

class Runner {
 public:
  Runner(const CurriculumConfig& config, const RunOptions& options)
      : cfg_(config),
        opt_(options),
        out_(options),
        plan_rng_(derive_seed(options.seed, 1)),
        episode_rng_(derive_seed(options.seed, 2)),
        gen_rng_(derive_seed(options.seed, 3)),
        target_(dsl::target_program()) {
    cfg_.validate();
    result_.archive = archive::Archive(cfg_.archive_params());
    result_.policy = train::PolicyTable(cfg_.learner_params());
    bonus_.floor_d = cfg_.d;
    bonus_.bonus = cfg_.d;

    if (opt_.backend_override) {
      backend_ = opt_.backend_override;
    } else if (opt_.mode == Mode::DiCode || opt_.mode == Mode::DiCodeOpenLoop) {
      if (opt_.backend == "remote") {
        auto rc = gen::RemoteConfig::from_env();
        rc.timeout = std::chrono::seconds(static_cast<long>(std::ceil(cfg_.generator_timeout_s)));
        owned_backend_ = std::make_unique<gen::RemoteBackend>(rc);
      } else {
        owned_backend_ = gen::make_backend(opt_.backend);
      }
      backend_ = owned_backend_.get();
    }

    if (opt_.sequential) {
      channel_ = std::make_unique<InlineChannel>(opt_.inline_latency_cycles);
    } else {
      channel_ = std::make_unique<ThreadChannel>();
    }

    if (opt_.mode == Mode::DomainRandomization) {
      Rng pool_rng(derive_seed(opt_.seed, 4));
      for (int i = 0; i < cfg_.dr_pool_size; ++i) dr_pool_.push_back(train::training_seed(pool_rng));
    }

    if (generates(opt_.mode)) {
      seeds_ = opt_.seed_programs ? *opt_.seed_programs : dsl::load_level_dir(cfg_.seed_levels);
      if (seeds_.empty()) throw std::runtime_error("no seed levels found");
      for (const auto& p : seeds_) result_.archive.insert(p, std::nullopt, "seed level", std::nullopt, 0);
    }
  }

  RunResult run() {
    int cycle = 0;
    bool evaluated_last = false;
    while (result_.env_steps < cfg_.budget_env_steps) {
      const auto fresh = collect(cycle);
      const auto plan = make_plan(cycle, fresh);
      if (plan.folded_replay) emit(cycle, "replay_folded", {{"episodes", plan.episodes(train::SourceKind::Target)}});

      const auto cycle_return = opt_.sequential ? run_sequential(plan) : run_parallel(plan);
      if (cycle_return) bonus_.observe(*cycle_return);

      if (generates(opt_.mode) && cycle % cfg_.v == 0 && !channel_->in_flight() &&
          result_.env_steps < cfg_.budget_env_steps) {
        issue(cycle);
      }

      ++result_.cycles;
      evaluated_last = (cycle + 1) % cfg_.eval_interval == 0;
      if (evaluated_last) evaluate(cycle);
      ++cycle;
    }
    if (!evaluated_last) evaluate(cycle - 1);
    if (channel_->in_flight()) {
      auto d = channel_->take();
      emit(cycle, "ticket_discarded", {{"status", name(d.status)}});
    }
    finish();
    return std::move(result_);
  }

 private:
  void emit(int cycle, std::string kind, nlohmann::ordered_json detail = nlohmann::ordered_json::object()) {
    RunEvent e{cycle, std::move(kind), std::move(detail)};
    out_.event(e);
    result_.events.push_back(std::move(e));
  }

  std::vector<archive::NodeId> collect(int cycle) {
    std::vector<archive::NodeId> fresh;
    if (!channel_->in_flight()) return fresh;
    const int issued = *channel_->issued_cycle();
    if (cycle != issued + cfg_.v) return fresh;
    const int elapsed = cycle - issued - 1;
    if (await_generation(channel_->ready(elapsed), elapsed, cfg_.v) == AwaitDecision::Block) {
      ++result_.blocks;
      emit(cycle, "block", {{"issued_cycle", issued}, {"cycles_elapsed", elapsed}});
    }
    auto d = channel_->take();
    result_.levels_rejected += d.batch.rejected;
    if (d.status != TicketStatus::Delivered) {
      ++result_.tickets_failed;
      emit(cycle, "ticket_failed", {{"issued_cycle", issued}, {"error", d.error}});
      return fresh;
    }
    for (auto& c : d.batch.valid) {
      auto id = result_.archive.insert(std::move(*c.program), c.parent, c.description, std::nullopt, cycle);
      fresh.push_back(id);
    }
    result_.levels_generated += static_cast<int>(fresh.size());
    nlohmann::ordered_json ids = fresh;
    emit(cycle, "levels_delivered",
         {{"issued_cycle", issued}, {"attempted", d.batch.attempted}, {"rejected", d.batch.rejected}, {"ids", ids}});
    return fresh;
  }

  train::BatchPlan make_plan(int cycle, const std::vector<archive::NodeId>& fresh) {
    if (!generates(opt_.mode)) {
      train::BatchPlan plan;
      plan.cycle = cycle;
      plan.slots.push_back({train::SourceKind::Target, std::nullopt, cfg_.updates_per_cycle});
      return plan;
    }
    return train::plan_batch(cycle, fresh, result_.archive, cfg_.batch_config(), plan_rng_);
  }

  std::vector<EpisodeJob> expand(const train::BatchPlan& plan) {
    std::vector<EpisodeJob> jobs;
    for (const auto& slot : plan.slots) {
      for (int e = 0; e < slot.episodes; ++e) {
        EpisodeJob j{slot.kind, slot.node, 0, episode_rng_.split()};
        if (!slot.node && opt_.mode == Mode::DomainRandomization) {
          j.seed = dr_pool_[j.rng.below(dr_pool_.size())];
        } else {
          j.seed = train::training_seed(j.rng);
        }
        jobs.push_back(std::move(j));
      }
    }
    return jobs;
  }

  train::EpisodeSpec spec_for(const EpisodeJob& j) const {
    train::EpisodeSpec s;
    s.program = j.node ? &result_.archive.node(*j.node).program : &target_;
    s.is_target = !j.node;
    s.bonus = j.node ? bonus_.bonus : 0.0;
    s.seed = j.seed;
    s.max_timesteps = cfg_.max_timesteps;
    return s;
  }

  void account(const EpisodeJob& j, const train::EpisodeStats& st, int cycle, double& target_sum,
               int& target_n) {
    result_.env_steps += static_cast<std::uint64_t>(st.steps);
    ++result_.episodes;
    if (j.node) {
      result_.archive.record_episode(*j.node, st.success, st.achieved);
      if (st.degenerate && degenerate_.insert(*j.node).second) {
        emit(cycle, "degenerate_level", {{"node", *j.node}});
      }
    } else {
      target_sum += st.ret;
      ++target_n;
      target_window_.push(st.achieved);
    }
  }

  std::optional<double> run_sequential(const train::BatchPlan& plan) {
    double target_sum = 0.0;
    int target_n = 0;
    for (auto& j : expand(plan)) {
      if (result_.env_steps >= cfg_.budget_env_steps) break;
      train::Exploration how;
      how.step_offset = result_.env_steps;
      const auto st = train::run_episode(spec_for(j), result_.policy, how, j.rng);
      account(j, st, plan.cycle, target_sum, target_n);
    }
    if (target_n == 0) return std::nullopt;
    return target_sum / target_n;
  }

  std::optional<double> run_parallel(const train::BatchPlan& plan) {
    auto jobs = expand(plan);
    const std::uint64_t offset = result_.env_steps;
    std::vector<std::vector<train::Transition>> traces(jobs.size());
    std::vector<train::EpisodeStats> stats(jobs.size());
    const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t begin = 0; begin < jobs.size(); begin += width) {
      const std::size_t end = std::min(jobs.size(), begin + width);
      std::vector<std::future<void>> running;
      for (std::size_t i = begin; i < end; ++i) {
        running.push_back(std::async(std::launch::async, [&, i] {
          train::Exploration how;
          how.step_offset = offset;
          how.learn = false;
          how.record = &traces[i];
          stats[i] = train::run_episode_frozen(spec_for(jobs[i]), result_.policy, how, jobs[i].rng);
        }));
      }
      for (auto& f : running) f.get();
    }
    double target_sum = 0.0;
    int target_n = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      train::apply_trace(result_.policy, traces[i]);
      account(jobs[i], stats[i], plan.cycle, target_sum, target_n);
    }
    if (target_n == 0) return std::nullopt;
    return target_sum / target_n;
  }

  void issue(int cycle) {
    std::optional<archive::NodeId> parent;
    if (opt_.mode == Mode::DiCode) {
      parent = result_.archive.sample_parent(gen_rng_);
      if (!parent) {
        emit(cycle, "no_eligible_parent");
        return;
      }
    }
    gen::BatchOptions bo;
    bo.context.few_shot_k = static_cast<std::size_t>(cfg_.few_shot_k);
    bo.context.open_loop = opt_.mode == Mode::DiCodeOpenLoop;
    bo.context.thresholds = cfg_.status_thresholds;
    bo.target_perf = target_window_.profile();
    bo.rollout_steps = cfg_.rollout_steps;
    bo.name_prefix = "c" + std::to_string(cycle);
    bo.parallel = !opt_.sequential;

    const int m = cfg_.num_unique_new;
    const double surplus = cfg_.surplus_factor;
    const bool random_mutation = opt_.mode == Mode::Plr;
    gen::Backend* backend = backend_;
    GenerationChannel::Job job = [view = result_.archive, parent, bo, m, surplus, random_mutation, backend,
                                  rng = gen_rng_.split()]() mutable {
      Delivery d;
      d.batch = random_mutation ? gen::random_mutation_batch(view, m, surplus, bo, rng)
                                : gen::generate_batch(parent, view, m, surplus, *backend, bo, rng);
      if (d.batch.valid.empty()) {
        d.status = TicketStatus::Failed;
        d.error = "no valid candidates";
      } else {
        d.status = TicketStatus::Delivered;
      }
      return d;
    };
    channel_->submit(std::move(job), cycle);
    ++result_.tickets_issued;
    nlohmann::ordered_json detail;
    detail["parent"] = parent ? nlohmann::ordered_json(*parent) : nlohmann::ordered_json(nullptr);
    emit(cycle, "ticket_issued", detail);
  }

  void evaluate(int cycle) {
    const auto ev = train::evaluate_target(result_.policy, cfg_.eval_instances, 0, cfg_.max_timesteps);
    result_.eval_steps += ev.steps;
    result_.final_eval = ev;
    MetricsRecord m;
    m.cycle = cycle;
    m.env_steps = result_.env_steps;
    m.mean_return = ev.mean_return;
    m.per_achievement_sr = ev.per_achievement_sr;
    m.archive_size = result_.archive.size();
    m.bonus = bonus_.bonus;
    out_.metric(m);
    result_.metrics.push_back(m);
  }

  void finish() {
    if (!out_.enabled()) return;
    out_.write("archive.json", result_.archive.to_json().dump(2) + "\n");
    out_.write("archive.dot", result_.archive.to_dot());
    result_.policy.save(out_.dir() / "policy.bin");

    nlohmann::ordered_json m;
    m["mode"] = name(opt_.mode);
    m["seed"] = opt_.seed;
    m["backend"] = backend_ ? backend_->kind() : (opt_.mode == Mode::Plr ? "random-mutation" : "none");
    m["sequential"] = opt_.sequential;
    m["config"] = cfg_.to_json();
    nlohmann::ordered_json seeds = nlohmann::ordered_json::array();
    for (const auto& p : seeds_) seeds.push_back(p.name);
    m["seed_levels"] = seeds;
    m["registry"] = AchievementRegistry::standard().to_json();
    nlohmann::ordered_json s;
    s["cycles"] = result_.cycles;
    s["episodes"] = result_.episodes;
    s["env_steps"] = result_.env_steps;
    s["eval_steps"] = result_.eval_steps;
    s["tickets_issued"] = result_.tickets_issued;
    s["tickets_failed"] = result_.tickets_failed;
    s["blocks"] = result_.blocks;
    s["levels_generated"] = result_.levels_generated;
    s["levels_rejected"] = result_.levels_rejected;
    s["final_mean_return"] = result_.final_eval.mean_return;
    s["final_per_achievement_sr"] = sr_object(result_.final_eval.per_achievement_sr);
    s["policy_fingerprint"] = result_.policy.fingerprint();
    s["policy_states"] = result_.policy.size();
    m["summary"] = s;
    out_.write("manifest.json", m.dump(2) + "\n");
  }

  CurriculumConfig cfg_;
  RunOptions opt_;
  Outputs out_;
  Rng plan_rng_;
  Rng episode_rng_;
  Rng gen_rng_;
  dsl::LevelProgram target_;
  RunResult result_;
  train::BonusState bonus_;
  TargetWindow target_window_;
  std::unique_ptr<gen::Backend> owned_backend_;
  gen::Backend* backend_ = nullptr;
  std::unique_ptr<GenerationChannel> channel_;
  std::vector<std::uint64_t> dr_pool_;
  std::vector<dsl::LevelProgram> seeds_;
  std::set<archive::NodeId> degenerate_;
};

}  // namespace

std::string_view name(Mode m) {
  switch (m) {
    case Mode::DiCode: return "dicode";
    case Mode::DiCodeOpenLoop: return "dicode-ol";
    case Mode::TargetOnly: return "target-only";
    case Mode::DomainRandomization: return "dr";
    case Mode::Plr: return "plr";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view s) {
  for (auto m : {Mode::DiCode, Mode::DiCodeOpenLoop, Mode::TargetOnly, Mode::DomainRandomization, Mode::Plr}) {
    if (name(m) == s) return m;
  }
  return std::nullopt;
}

nlohmann::ordered_json MetricsRecord::to_json() const {
  nlohmann::ordered_json j;
  j["cycle"] = cycle;
  j["env_steps"] = env_steps;
  j["mean_return"] = mean_return;
  j["per_achievement_sr"] = sr_object(per_achievement_sr);
  j["archive_size"] = archive_size;
  j["bonus"] = bonus;
  return j;
}

MetricsRecord MetricsRecord::from_json(const nlohmann::json& j) {
  MetricsRecord m;
  m.cycle = j.at("cycle").get<int>();
  m.env_steps = j.at("env_steps").get<std::uint64_t>();
  m.mean_return = j.at("mean_return").get<double>();
  const auto& sr = j.at("per_achievement_sr");
  for (std::size_t i = 0; i < kNumAchievements; ++i) {
    m.per_achievement_sr[i] = sr.at(std::string(name(achievement_at(i)))).get<double>();
  }
  m.archive_size = j.at("archive_size").get<std::size_t>();
  m.bonus = j.at("bonus").get<double>();
  return m;
}

int RunResult::count_events(std::string_view kind) const {
  return static_cast<int>(std::count_if(events.begin(), events.end(), [&](const RunEvent& e) { return e.kind == kind; }));
}

RunResult run_training(const CurriculumConfig& config, const RunOptions& options) {
  return Runner(config, options).run();
}

std::vector<MetricsRecord> read_metrics(const fs::path& run_dir) {
  std::ifstream in(run_dir / "metrics.jsonl");
  if (!in) throw std::runtime_error("no metrics.jsonl in " + run_dir.string());
  std::vector<MetricsRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(MetricsRecord::from_json(nlohmann::json::parse(line)));
  }
  return out;
}

std::string metrics_csv(const std::vector<MetricsRecord>& metrics) {
  std::ostringstream out;
  out << "cycle,env_steps,mean_return,bonus,archive_size";
  for (std::size_t i = 0; i < kNumAchievements; ++i) out << ',' << name(achievement_at(i));
  out << '\n';
  out.precision(10);
  for (const auto& m : metrics) {
    out << m.cycle << ',' << m.env_steps << ',' << m.mean_return << ',' << m.bonus << ',' << m.archive_size;
    for (double v : m.per_achievement_sr) out << ',' << v;
    out << '\n';
  }
  return out.str();
}

}  // namespace ued::pipeline
