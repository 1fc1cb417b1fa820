#include "ued/generator/context.hpp"

#include <algorithm>

#include "ued/core/registry.hpp"

namespace ued::gen {

namespace {

constexpr std::array<std::string_view, 4> kIntentNames = {"persist", "simplify", "expand", "vary"};

std::string world_text() {
  std::string s =
      "The world has two 12x12 floors. Floor 0 has trees near the start, a stone outcrop "
      "with iron in the top right corner, coal in the bottom left corner and a ladder. "
      "Zombies spawn on floor 0; a guard waits on floor 1. Descending needs enough zombie "
      "kills and standing on the ladder.\nAchievements in tech-tree order:\n";
  for (const auto& e : AchievementRegistry::standard().entries()) {
    s += "  " + std::string(name(e.id)) + " reward " + std::to_string(static_cast<int>(e.reward)) +
         "\n";
  }
  return s;
}

std::string dsl_text() {
  return "Levels are written in this language:\n"
         "  level \"name\" {\n"
         "    floor = 0\n"
         "    inventory { wood = 2; pickaxe = 1; }\n"
         "    place { block = COAL; on = GRASS, STONE; near { min = 4; max = 8; n = 5 } }\n"
         "    place { block = TABLE; at (4, 5) }\n"
         "    mob { kind = melee; n = 1; near { min = 3; max = 6 } }\n"
         "    mechanics { mob_damage_multiplier = 0.5; monsters_killed_to_clear = 2; }\n"
         "    goal { COLLECT_COAL }\n"
         "    completed { MAKE_WOOD_PICKAXE }\n"
         "  }\n"
         "Distances are Manhattan from the player start. At most 3 mobs of each kind.\n";
}

constexpr std::string_view kEditsClosed =
    "Propose one small edit of the parent level using its success rates and the agent's "
    "rates on the full task.\n"
    "  persist: keep the goal, soften one mechanic\n"
    "  simplify: move a goal achievement to completed and add matching scaffolding\n"
    "  expand: add the next achievement to the goal and remove one scaffolding element\n"
    "  vary: keep the goal, change layout or one mechanic\n"
    "Start your reply with the lines intent=<edit> and goal=<A,B,...>, then a blank line, "
    "then a short description, all inside <docstring></docstring>.\n";

constexpr std::string_view kEditsOpen =
    "Propose a new level by editing one of the example levels.\n"
    "  persist, simplify, expand or vary as usual\n"
    "Start your reply with the lines intent=<edit>, goal=<A,B,...> and base=<example name>, "
    "then a blank line, then a short description, all inside <docstring></docstring>.\n";

constexpr std::string_view kProgramInstructions =
    "Write the level program for the description below, using the examples as a guide. "
    "Reply with the program only, inside <code></code>.\n";

}  // namespace

std::string_view name(Intent i) { return kIntentNames[static_cast<std::size_t>(i)]; }

std::optional<Intent> parse_intent(std::string_view s) {
  for (std::size_t i = 0; i < kIntentNames.size(); ++i) {
    if (kIntentNames[i] == s) return static_cast<Intent>(i);
  }
  return std::nullopt;
}

PerformanceProfile profile_of(const archive::ArchiveNode& node) {
  PerformanceProfile p;
  p.goal_success_rate = node.window_success_rate();
  p.per_achievement_sr = node.achievement_rates();
  return p;
}

double similarity(const dsl::LevelProgram& a, const dsl::LevelProgram& b) {
  const auto sa = a.goal | a.completed;
  const auto sb = b.goal | b.completed;
  const auto uni = (sa | sb).count();
  if (uni == 0) return 1.0;
  return static_cast<double>((sa & sb).count()) / static_cast<double>(uni);
}

GenerationContext build_context(const archive::Archive& view, std::optional<archive::NodeId> parent,
                                const PerformanceProfile& target_perf, const ContextOptions& options,
                                Rng& rng) {
  GenerationContext ctx;
  ctx.domain_context_1 = world_text();
  ctx.domain_context_2 = dsl_text();
  ctx.mutation_instructions_1 = std::string(options.open_loop ? kEditsOpen : kEditsClosed);
  ctx.mutation_instructions_2 = std::string(kProgramInstructions);
  ctx.target_perf = target_perf;
  ctx.open_loop = options.open_loop;
  ctx.thresholds = options.thresholds;

  auto ids = view.ids();
  if (options.open_loop) {
    rng.shuffle(std::span<archive::NodeId>(ids));
    ids.resize(std::min(ids.size(), options.few_shot_k));
    for (auto id : ids) ctx.few_shot.push_back(view.node(id).program);
    return ctx;
  }

  if (parent) {
    const auto& node = view.node(*parent);
    ctx.parent_program = node.program;
    ctx.parent_perf = profile_of(node);
    std::erase(ids, *parent);
  }
  std::vector<std::pair<double, archive::NodeId>> ranked;
  for (auto id : ids) {
    const double s = ctx.parent_program ? similarity(*ctx.parent_program, view.node(id).program) : 0.0;
    ranked.emplace_back(s, id);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; i < ranked.size() && i < options.few_shot_k; ++i) {
    ctx.few_shot.push_back(view.node(ranked[i].second).program);
  }
  return ctx;
}

}  // namespace ued::gen
