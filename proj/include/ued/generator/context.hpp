#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ued/archive/archive.hpp"
#include "ued/core/rng.hpp"
#include "ued/dsl/program.hpp"

namespace ued::gen {

enum class Intent { Persist, Simplify, Expand, Vary };

std::string_view name(Intent i);
std::optional<Intent> parse_intent(std::string_view s);

struct PerformanceProfile {
  double goal_success_rate = 0.0;
  /// Indexed by achievement; entries outside the registry stay 0.
  std::array<double, kNumAchievements> per_achievement_sr{};

  double sr(Achievement a) const { return per_achievement_sr[index(a)]; }
};

PerformanceProfile profile_of(const archive::ArchiveNode& node);

/// Everything a backend may condition on. In open-loop mode the parent fields are empty.
struct GenerationContext {
  std::string domain_context_1;
  std::string domain_context_2;
  std::optional<dsl::LevelProgram> parent_program;
  std::optional<PerformanceProfile> parent_perf;
  PerformanceProfile target_perf;
  std::string mutation_instructions_1;
  std::string mutation_instructions_2;
  std::vector<dsl::LevelProgram> few_shot;
  bool open_loop = false;
  archive::StatusThresholds thresholds;
};

struct ContextOptions {
  std::size_t few_shot_k = 2;
  bool open_loop = false;
  archive::StatusThresholds thresholds;
};

/// Jaccard index of goal-plus-completed sets; 1 when both are empty.
double similarity(const dsl::LevelProgram& a, const dsl::LevelProgram& b);

/// Closed loop: parent, its profile and the few_shot_k most similar other nodes
/// (ties by id). Open loop: no parent data and few_shot_k nodes drawn at random.
GenerationContext build_context(const archive::Archive& view, std::optional<archive::NodeId> parent,
                                const PerformanceProfile& target_perf, const ContextOptions& options,
                                Rng& rng);

}  // namespace ued::gen
