#include "ued/core/registry.hpp"

#include <set>
#include <stdexcept>
#include <string>

namespace ued {

AchievementRegistry::AchievementRegistry(std::vector<AchievementInfo> entries)
    : entries_(std::move(entries)) {
  std::set<Achievement> seen;
  for (const auto& e : entries_) {
    if (!seen.insert(e.id).second) {
      throw std::invalid_argument("duplicate achievement in registry: " + std::string(name(e.id)));
    }
    if (!(e.reward > 0.0)) {
      throw std::invalid_argument("achievement reward must be positive: " +
                                  std::string(name(e.id)));
    }
  }
}

const AchievementRegistry& AchievementRegistry::standard() {
  static const AchievementRegistry registry({
      {Achievement::CollectWood, 1.0, Tier::Basic},
      {Achievement::PlaceTable, 1.0, Tier::Basic},
      {Achievement::MakeWoodPickaxe, 1.0, Tier::Basic},
      {Achievement::CollectStone, 1.0, Tier::Basic},
      {Achievement::MakeStonePickaxe, 1.0, Tier::Basic},
      {Achievement::CollectCoal, 1.0, Tier::Basic},
      {Achievement::CollectIron, 1.0, Tier::Basic},
      {Achievement::MakeIronSword, 3.0, Tier::Deep},
      {Achievement::DefeatZombie, 1.0, Tier::Basic},
      {Achievement::DescendFloor, 3.0, Tier::Deep},
      {Achievement::DefeatGuard, 5.0, Tier::Deep},
  });
  return registry;
}

bool AchievementRegistry::contains(Achievement a) const {
  for (const auto& e : entries_) {
    if (e.id == a) return true;
  }
  return false;
}

double AchievementRegistry::reward(Achievement a) const {
  for (const auto& e : entries_) {
    if (e.id == a) return e.reward;
  }
  return 0.0;
}

std::optional<Tier> AchievementRegistry::tier(Achievement a) const {
  for (const auto& e : entries_) {
    if (e.id == a) return e.tier;
  }
  return std::nullopt;
}

double AchievementRegistry::total_reward() const {
  double total = 0.0;
  for (const auto& e : entries_) total += e.reward;
  return total;
}

AchievementSet AchievementRegistry::all() const {
  AchievementSet s;
  for (const auto& e : entries_) s.set(index(e.id));
  return s;
}

std::string_view name(Tier t) { return t == Tier::Basic ? "basic" : "deep"; }

nlohmann::json AchievementRegistry::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& e : entries_) {
    arr.push_back({{"id", name(e.id)}, {"reward", e.reward}, {"tier", name(e.tier)}});
  }
  return arr;
}

AchievementRegistry AchievementRegistry::from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("achievement registry must be a JSON array");
  std::vector<AchievementInfo> entries;
  for (const auto& item : j) {
    const auto id_text = item.at("id").get<std::string>();
    auto id = parse_achievement(id_text);
    if (!id) throw std::invalid_argument("unknown achievement id: " + id_text);
    const auto tier_text = item.at("tier").get<std::string>();
    Tier tier;
    if (tier_text == "basic") {
      tier = Tier::Basic;
    } else if (tier_text == "deep") {
      tier = Tier::Deep;
    } else {
      throw std::invalid_argument("unknown tier: " + tier_text);
    }
    entries.push_back({*id, item.at("reward").get<double>(), tier});
  }
  return AchievementRegistry(std::move(entries));
}

}  // namespace ued
