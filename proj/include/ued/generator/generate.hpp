#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ued/generator/backend.hpp"

namespace ued::gen {

enum class Verdict { Pending, Valid, Rejected };

struct CandidateLevel {
  std::string description;
  std::string program_text;
  Verdict verdict = Verdict::Pending;
  /// Stage that rejected the candidate: backend, parse, validate, compile or rollout.
  std::string reject_stage;
  std::string reject_reason;
  std::optional<dsl::LevelProgram> program;
  /// Archive node the candidate was derived from, when there is one.
  std::optional<archive::NodeId> parent;
};

/// Parse, validate, reset and a random-action rollout. Never repairs the text.
CandidateLevel compile_check(CandidateLevel candidate, int rollout_steps, Rng& rng);

struct BatchOptions {
  ContextOptions context;
  PerformanceProfile target_perf;
  int rollout_steps = 32;
  /// Offspring are renamed `<name_prefix>_<index>`.
  std::string name_prefix = "gen";
  bool parallel = false;
};

struct BatchResult {
  std::vector<CandidateLevel> valid;
  int attempted = 0;
  int rejected = 0;
};

/// Runs ceil(m_target * surplus_factor) independent candidates and keeps the first
/// m_target valid ones in generation order.
BatchResult generate_batch(std::optional<archive::NodeId> parent, const archive::Archive& view,
                           int m_target, double surplus_factor, Backend& backend,
                           const BatchOptions& options, Rng& rng);

/// Baseline generator: each candidate mutates a uniformly drawn archive node with a
/// uniformly drawn intent. No description or performance data is involved.
BatchResult random_mutation_batch(const archive::Archive& view, int m_target, double surplus_factor,
                                  const BatchOptions& options, Rng& rng);

}  // namespace ued::gen
