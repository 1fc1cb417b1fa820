#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <span>
#include <vector>

#include "ued/core/ids.hpp"

namespace ued {

enum class Tier { Basic, Deep };

struct AchievementInfo {
  Achievement id;
  double reward;
  Tier tier;

  bool operator==(const AchievementInfo&) const = default;
};

/// Ordered list of achievements with their one-shot rewards.
class AchievementRegistry {
 public:
  explicit AchievementRegistry(std::vector<AchievementInfo> entries);

  /// The built-in tech tree used by the gridworld.
  static const AchievementRegistry& standard();

  std::span<const AchievementInfo> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool contains(Achievement a) const;
  double reward(Achievement a) const;
  std::optional<Tier> tier(Achievement a) const;
  double total_reward() const;
  /// Every achievement the registry knows about.
  AchievementSet all() const;

  nlohmann::json to_json() const;
  static AchievementRegistry from_json(const nlohmann::json& j);

  bool operator==(const AchievementRegistry&) const = default;

 private:
  std::vector<AchievementInfo> entries_;
};

std::string_view name(Tier t);

}  // namespace ued
