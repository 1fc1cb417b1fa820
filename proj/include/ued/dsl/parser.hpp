#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ued/core/dims.hpp"
#include "ued/core/registry.hpp"
#include "ued/dsl/errors.hpp"
#include "ued/dsl/program.hpp"

namespace ued::dsl {

struct UncheckedProgram {
  LevelProgram program;
  /// Unknown identifiers and duplicate statements found while parsing.
  std::vector<SemanticError> errors;
};

/// Grammar-only pass. Throws ParseError; never runs invariant checks.
UncheckedProgram parse_unchecked(std::string_view text);

/// Full parse: grammar, identifier resolution and validate().
/// Throws ParseError or ValidationError.
LevelProgram parse(std::string_view text,
                   const AchievementRegistry& registry = AchievementRegistry::standard(),
                   MapDims dims = {});

/// Returns every invariant violation, ordered by source position.
std::vector<SemanticError> validate(const LevelProgram& p,
                                    const AchievementRegistry& registry = AchievementRegistry::standard(),
                                    MapDims dims = {});

/// Canonical text; parse(serialize(p)) == p for every valid p.
std::string serialize(const LevelProgram& p,
                      const AchievementRegistry& registry = AchievementRegistry::standard());

LevelProgram load_level_file(const std::filesystem::path& path);

/// Every `*.lvl` file under `dir`, sorted by file name.
std::vector<LevelProgram> load_level_dir(const std::filesystem::path& dir);

}  // namespace ued::dsl
