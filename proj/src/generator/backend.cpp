#include "ued/generator/backend.hpp"

#include <cstdlib>
#include <sstream>

#include "ued/dsl/parser.hpp"
#include "ued/generator/mutation.hpp"

namespace ued::gen {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string goal_list(const AchievementSet& goal) {
  std::string s;
  for (std::size_t i = 0; i < kNumAchievements; ++i) {
    if (!goal.test(i)) continue;
    if (!s.empty()) s += ",";
    s += name(achievement_at(i));
  }
  return s;
}

std::string prose(Intent intent, const dsl::LevelProgram& base, const AchievementSet& goal) {
  switch (intent) {
    case Intent::Expand:
      return "Builds on " + base.name + ": the goal grows to " + goal_list(goal) +
             " and one piece of starting help is taken away.";
    case Intent::Simplify:
      return "Eases " + base.name + ": the goal becomes " + goal_list(goal) +
             " with the dropped step handed over as completed.";
    case Intent::Persist:
      return "Keeps " + base.name + " and its goal but softens one mechanic.";
    case Intent::Vary:
      return "Keeps the goal of " + base.name + " with a reshuffled layout and one mechanic nudged.";
  }
  return {};
}

std::string header(Intent intent, const AchievementSet& goal, const std::string& base) {
  std::string h = "intent=" + std::string(name(intent)) + "\ngoal=" + goal_list(goal) + "\n";
  if (!base.empty()) h += "base=" + base + "\n";
  return h + "\n";
}

std::string profile_text(const PerformanceProfile& p) {
  std::ostringstream os;
  os << "goal success rate " << p.goal_success_rate << "\n";
  for (const auto& e : AchievementRegistry::standard().entries()) {
    os << "  " << name(e.id) << " " << p.sr(e.id) << "\n";
  }
  return os.str();
}

}  // namespace

DescriptionHeader parse_description(const std::string& text) {
  DescriptionHeader h;
  bool has_intent = false;
  bool has_goal = false;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) {
      if (has_intent || has_goal) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) break;
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "intent") {
      auto i = parse_intent(value);
      if (!i) throw BackendError("unknown intent '" + value + "'");
      h.intent = *i;
      has_intent = true;
    } else if (key == "goal") {
      std::istringstream items(value);
      std::string item;
      while (std::getline(items, item, ',')) {
        auto a = parse_achievement(trim(item));
        if (!a) throw BackendError("unknown achievement '" + trim(item) + "' in goal header");
        h.goal.set(index(*a));
      }
      has_goal = h.goal.any();
    } else if (key == "base") {
      h.base = value;
    }
  }
  if (!has_intent) throw BackendError("description has no intent= header");
  if (!has_goal) throw BackendError("description has no goal= header");
  return h;
}

std::string dream_description(const GenerationContext& ctx, Backend& backend, Rng& rng) {
  auto text = backend.describe(ctx, rng);
  parse_description(text);
  return text;
}

std::string dream_program(const GenerationContext& ctx, const std::string& description,
                          Backend& backend, Rng& rng) {
  return backend.write_program(ctx, description, rng);
}

std::string MutationBackend::describe(const GenerationContext& ctx, Rng& rng) {
  if (ctx.open_loop) {
    if (ctx.few_shot.empty()) throw BackendError("open-loop generation needs examples");
    const auto& base = ctx.few_shot[rng.below(ctx.few_shot.size())];
    const auto intent = static_cast<Intent>(rng.below(4));
    const auto goal = planned_goal(base, intent);
    return header(intent, goal, base.name) + prose(intent, base, goal) + "\n";
  }
  if (!ctx.parent_program || !ctx.parent_perf) {
    throw BackendError("mutation backend needs a parent level");
  }
  const auto& parent = *ctx.parent_program;
  const auto intent = choose_intent(parent, *ctx.parent_perf, ctx.target_perf, ctx.thresholds);
  const auto goal = planned_goal(parent, intent);
  return header(intent, goal, "") + prose(intent, parent, goal) + "\n";
}

std::string MutationBackend::write_program(const GenerationContext& ctx,
                                           const std::string& description, Rng& rng) {
  const auto h = parse_description(description);
  const dsl::LevelProgram* base = nullptr;
  if (ctx.open_loop) {
    for (const auto& e : ctx.few_shot) {
      if (e.name == h.base) {
        base = &e;
        break;
      }
    }
    if (!base) throw BackendError("description names unknown base '" + h.base + "'");
  } else {
    if (!ctx.parent_program) throw BackendError("mutation backend needs a parent level");
    base = &*ctx.parent_program;
  }
  return dsl::serialize(mutate(*base, h.intent, rng));
}

RemoteConfig RemoteConfig::from_env() {
  RemoteConfig c;
  if (const char* v = std::getenv("GENERATOR_URL")) c.url = v;
  if (const char* v = std::getenv("GENERATOR_MODEL")) c.model = v;
  if (const char* v = std::getenv("GENERATOR_API_KEY")) c.api_key = v;
  return c;
}

std::optional<std::string> extract_tag(const std::string& text, const std::string& tag) {
  const std::string open = "<" + tag + ">";
  const std::string close = "</" + tag + ">";
  const auto b = text.find(open);
  if (b == std::string::npos) return std::nullopt;
  const auto e = text.find(close, b + open.size());
  if (e == std::string::npos) return std::nullopt;
  return trim(std::string_view(text).substr(b + open.size(), e - b - open.size()));
}

std::string render_phase1_prompt(const GenerationContext& ctx) {
  std::ostringstream os;
  if (ctx.parent_program) {
    os << "Parent level:\n" << dsl::serialize(*ctx.parent_program) << "\n";
  }
  if (ctx.parent_perf) os << "Parent performance:\n" << profile_text(*ctx.parent_perf) << "\n";
  os << "Full-task performance:\n" << profile_text(ctx.target_perf) << "\n";
  if (ctx.open_loop) {
    os << "Examples:\n";
    for (const auto& e : ctx.few_shot) os << dsl::serialize(e) << "\n";
  }
  os << ctx.mutation_instructions_1;
  return os.str();
}

std::string render_phase2_prompt(const GenerationContext& ctx, const std::string& description) {
  std::ostringstream os;
  os << "Examples:\n";
  for (const auto& e : ctx.few_shot) os << dsl::serialize(e) << "\n";
  if (ctx.parent_program) os << "Parent level:\n" << dsl::serialize(*ctx.parent_program) << "\n";
  os << "Description:\n" << description << "\n\n" << ctx.mutation_instructions_2;
  return os.str();
}

std::unique_ptr<Backend> make_backend(const std::string& kind) {
  if (kind == "mutation") return std::make_unique<MutationBackend>();
  if (kind == "remote") return std::make_unique<RemoteBackend>(RemoteConfig::from_env());
  throw std::invalid_argument("unknown backend '" + kind + "' (expected mutation or remote)");
}

}  // namespace ued::gen
