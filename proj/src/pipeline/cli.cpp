#include "ued/pipeline/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

#include "ued/core/registry.hpp"
#include "ued/dsl/parser.hpp"
#include "ued/generator/generate.hpp"
#include "ued/pipeline/run.hpp"

namespace ued::pipeline {

namespace fs = std::filesystem;

namespace {

struct TrainArgs {
  std::string config;
  std::string mode = "dicode";
  std::uint64_t seed = 0;
  std::string out;
  bool sequential = false;
  bool force = false;
  std::string backend = "mutation";
};

struct EvalArgs {
  std::string policy;
  int instances = 64;
  std::string seeds;
  int max_timesteps = world::kDefaultMaxTimesteps;
};

struct GenArgs {
  std::string backend = "mutation";
  std::string parent;
  int n = 10;
  std::string out;
  std::uint64_t seed = 0;
  double parent_sr = 0.75;
  bool open_loop = false;
  double surplus = 1.5;
};

struct ExportArgs {
  std::string run;
  std::string format = "json";
  std::string out;
};

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return nlohmann::json::parse(in);
}

std::vector<std::uint64_t> read_seeds(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open seed file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  for (char& c : text) {
    if (c == ',' || c == '[' || c == ']') c = ' ';
  }
  std::istringstream words(text);
  std::vector<std::uint64_t> seeds;
  std::string w;
  while (words >> w) {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
      v = std::stoull(w, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != w.size()) throw std::runtime_error("bad seed '" + w + "' in " + path);
    if (v < train::kEvalSeedBase) {
      throw std::runtime_error("seed " + w + " lies in the training seed range");
    }
    seeds.push_back(v);
  }
  if (seeds.empty()) throw std::runtime_error("seed file " + path + " lists no seeds");
  return seeds;
}

nlohmann::ordered_json eval_json(const train::EvalResult& r, std::size_t n) {
  nlohmann::ordered_json j;
  j["instances"] = n;
  j["mean_return"] = r.mean_return;
  nlohmann::ordered_json sr = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < kNumAchievements; ++i) sr[std::string(name(achievement_at(i)))] = r.per_achievement_sr[i];
  j["per_achievement_sr"] = sr;
  return j;
}

int do_train(const TrainArgs& a, std::ostream& out) {
  const auto mode = parse_mode(a.mode);
  if (!mode) throw CLI::ValidationError("--mode", "unknown mode " + a.mode);
  const auto cfg = CurriculumConfig::load(a.config);
  RunOptions o;
  o.mode = *mode;
  o.seed = a.seed;
  o.out = a.out;
  o.force = a.force;
  o.sequential = a.sequential;
  o.backend = a.backend;
  const auto r = run_training(cfg, o);
  out << "cycles=" << r.cycles << " env_steps=" << r.env_steps << " archive=" << r.archive.size()
      << " final_mean_return=" << r.final_eval.mean_return << '\n';
  return 0;
}

int do_eval(const EvalArgs& a, std::ostream& out) {
  const auto policy = train::PolicyTable::load(a.policy);
  std::vector<std::uint64_t> seeds;
  if (!a.seeds.empty()) {
    seeds = read_seeds(a.seeds);
    if (static_cast<int>(seeds.size()) > a.instances) seeds.resize(static_cast<std::size_t>(a.instances));
  } else {
    for (int i = 0; i < a.instances; ++i) seeds.push_back(train::eval_seed(static_cast<std::size_t>(i)));
  }
  const auto r = train::evaluate_seeds(policy, seeds, a.max_timesteps);
  out << eval_json(r, seeds.size()).dump(2) << '\n';
  return 0;
}

int do_gen_test(const GenArgs& a, std::ostream& out) {
  auto backend = gen::make_backend(a.backend);
  archive::Archive view;
  std::optional<archive::NodeId> parent;
  if (!a.parent.empty()) {
    auto p = dsl::load_level_file(a.parent);
    const auto goal = p.goal;
    const auto id = view.insert(std::move(p), std::nullopt, "parent");
    const auto window = static_cast<int>(view.params().window);
    const int wins = static_cast<int>(std::lround(a.parent_sr * window));
    for (int i = 0; i < window; ++i) view.record_episode(id, i < wins, i < wins ? goal : AchievementSet{});
    if (!a.open_loop) parent = id;
  } else if (!a.open_loop) {
    throw CLI::ValidationError("--parent", "required unless --open-loop is given");
  } else {
    view.insert(dsl::target_program(), std::nullopt, "target");
  }
  gen::BatchOptions bo;
  bo.context.open_loop = a.open_loop;
  bo.name_prefix = "gen";
  Rng rng(a.seed);
  const auto batch = gen::generate_batch(parent, view, a.n, a.surplus, *backend, bo, rng);
  if (!a.out.empty()) fs::create_directories(a.out);
  for (const auto& c : batch.valid) {
    if (a.out.empty()) {
      out << "# " << c.program->name << '\n' << c.program_text << '\n';
    } else {
      emit(c.program_text, (fs::path(a.out) / (c.program->name + ".lvl")).string(), out);
    }
  }
  out << "attempted=" << batch.attempted << " valid=" << batch.valid.size() << " rejected=" << batch.rejected
      << '\n';
  return batch.valid.empty() ? 1 : 0;
}

archive::Archive load_run_archive(const fs::path& run) {
  const auto manifest = read_json(run / "manifest.json");
  const auto cfg = CurriculumConfig::from_json(manifest.at("config"));
  return archive::Archive::from_json(read_json(run / "archive.json"), cfg.archive_params());
}

int do_export(const ExportArgs& a, std::ostream& out) {
  const auto ar = load_run_archive(a.run);
  if (a.format == "json") {
    emit(ar.to_json().dump(2) + "\n", a.out, out);
  } else {
    emit(ar.to_dot(), a.out, out);
  }
  return 0;
}

int do_plot(const ExportArgs& a, std::ostream& out) {
  emit(metrics_csv(read_metrics(a.run)), a.out, out);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Curriculum training driver for the gridworld"};
  app.name("uedctl");
  app.require_subcommand(1);

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Run a training job");
  train->add_option("--config", ta.config, "JSON config file")->required()->check(CLI::ExistingFile);
  train->add_option("--mode", ta.mode, "dicode, dicode-ol, target-only, dr or plr")
      ->check(CLI::IsMember({"dicode", "dicode-ol", "target-only", "dr", "plr"}));
  train->add_option("--seed", ta.seed, "Master seed");
  train->add_option("--out", ta.out, "Output directory")->required();
  train->add_flag("--sequential", ta.sequential, "Inline generation and one episode at a time");
  train->add_flag("--force", ta.force, "Overwrite an existing run directory");
  train->add_option("--backend", ta.backend, "Level generator backend")
      ->check(CLI::IsMember({"mutation", "remote"}));

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Evaluate a saved policy on the target level");
  eval->add_option("--policy", ea.policy, "policy.bin file")->required()->check(CLI::ExistingFile);
  eval->add_option("--instances", ea.instances, "Number of evaluation episodes")->check(CLI::PositiveNumber);
  eval->add_option("--seeds", ea.seeds, "File of evaluation seeds")->check(CLI::ExistingFile);
  eval->add_option("--max-timesteps", ea.max_timesteps, "Episode length cap")->check(CLI::PositiveNumber);

  GenArgs ga;
  auto* gen_test = app.add_subcommand("gen-test", "Generate levels from one parent and print them");
  gen_test->add_option("--backend", ga.backend, "Level generator backend")
      ->check(CLI::IsMember({"mutation", "remote"}));
  gen_test->add_option("--parent", ga.parent, "Parent level file")->check(CLI::ExistingFile);
  gen_test->add_option("--n", ga.n, "Number of valid levels wanted")->check(CLI::PositiveNumber);
  gen_test->add_option("--out", ga.out, "Directory for the generated .lvl files");
  gen_test->add_option("--seed", ga.seed, "Generator seed");
  gen_test->add_option("--parent-sr", ga.parent_sr, "Success rate credited to the parent")
      ->check(CLI::Range(0.0, 1.0));
  gen_test->add_option("--surplus", ga.surplus, "Candidates per wanted level")->check(CLI::Range(1.0, 100.0));
  gen_test->add_flag("--open-loop", ga.open_loop, "Ignore parent performance");

  ExportArgs xa;
  auto* exp = app.add_subcommand("archive-export", "Export a run's level archive");
  exp->add_option("--run", xa.run, "Run directory")->required()->check(CLI::ExistingDirectory);
  exp->add_option("--format", xa.format, "json or dot")->check(CLI::IsMember({"json", "dot"}));
  exp->add_option("--out", xa.out, "Output file (default stdout)");

  ExportArgs pa;
  auto* plot = app.add_subcommand("plot-data", "Print a run's learning curves as CSV");
  plot->add_option("--run", pa.run, "Run directory")->required()->check(CLI::ExistingDirectory);
  plot->add_option("--out", pa.out, "Output file (default stdout)");

  auto* reg = app.add_subcommand("registry", "Print the achievement registry as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*train) return do_train(ta, out);
    if (*eval) return do_eval(ea, out);
    if (*gen_test) return do_gen_test(ga, out);
    if (*exp) return do_export(xa, out);
    if (*plot) return do_plot(pa, out);
    if (*reg) {
      out << AchievementRegistry::standard().to_json().dump(2) << '\n';
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace ued::pipeline
