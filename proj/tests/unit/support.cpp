#include "support.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ued/dsl/parser.hpp"

namespace ued::testing {

namespace fs = std::filesystem;

fs::path source_dir() { return UED_SOURCE_DIR; }
fs::path seed_dir() { return source_dir() / "levels" / "seeds"; }
fs::path corpus_dir() { return source_dir() / "tests" / "data" / "corpus"; }

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch_dir(const std::string& tag) {
  auto dir = fs::temp_directory_path() / ("ued_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

dsl::LevelProgram minimal_program(const std::string& name, AchievementSet goal) {
  dsl::LevelProgram p;
  p.name = name;
  p.goal = goal;
  return p;
}

void record_rate(archive::Archive& ar, archive::NodeId id, int successes, int episodes) {
  for (int i = 0; i < episodes; ++i) ar.record_episode(id, i < successes);
}

std::string StubBackend::describe(const gen::GenerationContext& ctx, Rng&) {
  const auto& goal = ctx.parent_program ? ctx.parent_program->goal : ctx.few_shot.at(0).goal;
  std::string g;
  for (std::size_t i = 0; i < kNumAchievements; ++i) {
    if (!goal.test(i)) continue;
    if (!g.empty()) g += ",";
    g += name(achievement_at(i));
  }
  return "intent=vary\ngoal=" + g + "\n\nSame level again.";
}

std::string StubBackend::write_program(const gen::GenerationContext& ctx, const std::string&, Rng& rng) {
  const auto& base = ctx.parent_program ? *ctx.parent_program : ctx.few_shot.at(0);
  auto text = dsl::serialize(base);
  if (rng.chance(garbage_)) text = text.substr(0, text.size() / 2) + " ??? ";
  return text;
}

std::string FailingBackend::describe(const gen::GenerationContext&, Rng&) {
  throw gen::BackendError("backend offline");
}

std::string FailingBackend::write_program(const gen::GenerationContext&, const std::string&, Rng&) {
  throw gen::BackendError("backend offline");
}

}  // namespace ued::testing
