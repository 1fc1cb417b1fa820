#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ued/archive/archive.hpp"
#include "ued/core/rng.hpp"
#include "ued/dsl/program.hpp"
#include "ued/generator/backend.hpp"

namespace ued::testing {

std::filesystem::path source_dir();
std::filesystem::path seed_dir();
std::filesystem::path corpus_dir();
std::string read_file(const std::filesystem::path& p);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& tag);

dsl::LevelProgram minimal_program(const std::string& name, AchievementSet goal);

/// Records `successes` wins out of `episodes` so the window rate is exact.
void record_rate(archive::Archive& ar, archive::NodeId id, int successes, int episodes);

/// Emits the parent verbatim, or a garbled program with probability `garbage`.
class StubBackend : public gen::Backend {
 public:
  explicit StubBackend(double garbage = 0.0) : garbage_(garbage) {}
  std::string describe(const gen::GenerationContext& ctx, Rng& rng) override;
  std::string write_program(const gen::GenerationContext& ctx, const std::string& description,
                            Rng& rng) override;
  std::string kind() const override { return "stub"; }

 private:
  double garbage_;
};

/// Every call throws BackendError.
class FailingBackend : public gen::Backend {
 public:
  std::string describe(const gen::GenerationContext&, Rng&) override;
  std::string write_program(const gen::GenerationContext&, const std::string&, Rng&) override;
  std::string kind() const override { return "failing"; }
};

}  // namespace ued::testing
