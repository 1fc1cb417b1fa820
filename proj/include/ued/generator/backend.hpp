#pragma once

#include <chrono>
#include <memory>
#include <stdexcept>
#include <string>

#include "ued/generator/context.hpp"

namespace ued::gen {

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two-phase level author: first a description, then a program realizing it.
/// Implementations must tolerate concurrent calls with distinct rngs.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string describe(const GenerationContext& ctx, Rng& rng) = 0;
  virtual std::string write_program(const GenerationContext& ctx, const std::string& description,
                                    Rng& rng) = 0;
  virtual std::string kind() const = 0;
};

/// Parsed `key=value` lines at the top of a description, ended by a blank line.
struct DescriptionHeader {
  Intent intent = Intent::Vary;
  AchievementSet goal;
  /// Name of the few-shot example an open-loop edit starts from.
  std::string base;
};

/// Throws BackendError when `intent` or `goal` is missing or malformed.
DescriptionHeader parse_description(const std::string& text);

std::string dream_description(const GenerationContext& ctx, Backend& backend, Rng& rng);
std::string dream_program(const GenerationContext& ctx, const std::string& description,
                          Backend& backend, Rng& rng);

/// Applies the intent table and mutation operators to the parent program.
class MutationBackend : public Backend {
 public:
  std::string describe(const GenerationContext& ctx, Rng& rng) override;
  std::string write_program(const GenerationContext& ctx, const std::string& description,
                            Rng& rng) override;
  std::string kind() const override { return "mutation"; }
};

struct RemoteConfig {
  std::string url;
  std::string model;
  std::string api_key;
  std::chrono::seconds timeout{120};
  double temperature = 0.7;
  double top_p = 0.8;
  int max_tokens = 2048;

  /// Reads GENERATOR_URL, GENERATOR_MODEL and GENERATOR_API_KEY.
  static RemoteConfig from_env();
};

/// Chat-completion client; replies must wrap the description in <docstring> tags
/// and the program in <code> tags.
class RemoteBackend : public Backend {
 public:
  explicit RemoteBackend(RemoteConfig config);
  std::string describe(const GenerationContext& ctx, Rng& rng) override;
  std::string write_program(const GenerationContext& ctx, const std::string& description,
                            Rng& rng) override;
  std::string kind() const override { return "remote"; }

  /// POSTs one chat request and returns choices[0].message.content.
  std::string complete(const std::string& system, const std::string& user);

 private:
  RemoteConfig config_;
};

/// Text between the first `<tag>` and the following `</tag>`, trimmed.
std::optional<std::string> extract_tag(const std::string& text, const std::string& tag);

std::string render_phase1_prompt(const GenerationContext& ctx);
std::string render_phase2_prompt(const GenerationContext& ctx, const std::string& description);

std::unique_ptr<Backend> make_backend(const std::string& kind);

}  // namespace ued::gen
