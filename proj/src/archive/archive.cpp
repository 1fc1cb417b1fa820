#include "ued/archive/archive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ued::archive {

std::string_view name(Status s) {
  switch (s) {
    case Status::A: return "A";
    case Status::B: return "B";
    case Status::C: return "C";
    case Status::D: return "D";
    case Status::Unknown: return "unknown";
  }
  return "?";
}

double learnability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("success rate outside [0, 1]");
  return p * (1.0 - p);
}

Status classify(double sr, const StatusThresholds& t) {
  if (sr >= t.a) return Status::A;
  if (sr >= t.b) return Status::B;
  if (sr >= t.c) return Status::C;
  return Status::D;
}

std::vector<double> replay_probabilities(std::span<const double> scores,
                                         std::span<const std::uint64_t> last_replayed,
                                         std::uint64_t counter, double tau, double beta) {
  const std::size_t n = scores.size();
  if (n == 0) return {};
  if (last_replayed.size() != n) throw std::invalid_argument("score/staleness size mismatch");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<double> rank_weight(n);
  for (std::size_t r = 0; r < n; ++r) {
    rank_weight[order[r]] = std::pow(1.0 / static_cast<double>(r + 1), 1.0 / beta);
  }
  const double rank_total = std::accumulate(rank_weight.begin(), rank_weight.end(), 0.0);

  std::vector<double> stale(n);
  double stale_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    stale[i] = static_cast<double>(counter - std::min(counter, last_replayed[i]));
    stale_total += stale[i];
  }

  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = stale_total > 0.0 ? stale[i] / stale_total : 1.0 / static_cast<double>(n);
    p[i] = (1.0 - tau) * rank_weight[i] / rank_total + tau * s;
  }
  return p;
}

double ArchiveNode::window_success_rate() const {
  if (outcomes.empty()) return 0.0;
  const auto wins = std::count(outcomes.begin(), outcomes.end(), true);
  return static_cast<double>(wins) / static_cast<double>(outcomes.size());
}

std::array<double, kNumAchievements> ArchiveNode::achievement_rates() const {
  std::array<double, kNumAchievements> out{};
  if (achieved.empty()) return out;
  for (const auto& set : achieved) {
    for (std::size_t i = 0; i < kNumAchievements; ++i) out[i] += set.test(i) ? 1.0 : 0.0;
  }
  for (auto& v : out) v /= static_cast<double>(achieved.size());
  return out;
}

Archive::Archive(ArchiveParams params) : params_(params) {
  if (params_.window == 0) throw std::invalid_argument("archive window must be positive");
}

NodeId Archive::insert(dsl::LevelProgram program, std::optional<NodeId> parent,
                       std::string description, std::optional<NodeId> id, int created_cycle) {
  const NodeId nid = id.value_or(next_id_);
  if (nodes_.contains(nid)) throw std::invalid_argument("node id already in archive");
  if (parent) {
    if (*parent == nid) throw std::invalid_argument("node cannot be its own parent");
    if (!nodes_.contains(*parent)) throw std::invalid_argument("unknown parent node");
  }
  ArchiveNode n;
  n.id = nid;
  n.program = std::move(program);
  n.parent = parent;
  n.outcomes = RingBuffer<bool>(params_.window);
  n.achieved = RingBuffer<AchievementSet>(params_.window);
  n.last_replayed_at = counter_;
  n.description = std::move(description);
  n.created_cycle = created_cycle;
  nodes_.emplace(nid, std::move(n));
  if (parent) nodes_.at(*parent).children.insert(nid);
  next_id_ = std::max(next_id_, nid + 1);
  return nid;
}

ArchiveNode& Archive::mut(NodeId id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw std::out_of_range("unknown archive node " + std::to_string(id));
  return it->second;
}

const ArchiveNode& Archive::node(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw std::out_of_range("unknown archive node " + std::to_string(id));
  return it->second;
}

void Archive::record_episode(NodeId id, bool success, const AchievementSet& achieved) {
  auto& n = mut(id);
  n.outcomes.push(success);
  n.achieved.push(achieved);
  ++n.episodes_seen;
}

std::vector<NodeId> Archive::ids() const {
  std::vector<NodeId> out;
  out.reserve(nodes_.size());
  for (const auto& [id, n] : nodes_) out.push_back(id);
  return out;
}

std::optional<double> Archive::success_rate(NodeId id) const {
  const auto& n = node(id);
  if (n.episodes_seen < params_.min_episodes) return std::nullopt;
  return n.window_success_rate();
}

Status Archive::status(NodeId id) const {
  const auto sr = success_rate(id);
  return sr ? classify(*sr, params_.thresholds) : Status::Unknown;
}

double Archive::score(NodeId id) const { return learnability(node(id).window_success_rate()); }

std::vector<NodeId> Archive::eligible_parents() const {
  std::vector<NodeId> out;
  for (const auto& [id, n] : nodes_) {
    const auto s = status(id);
    if (s != Status::A && s != Status::B) continue;
    const bool frontier = std::all_of(n.children.begin(), n.children.end(),
                                      [&](NodeId c) { return status(c) == Status::D; });
    if (frontier) out.push_back(id);
  }
  return out;
}

std::optional<NodeId> Archive::sample_parent(Rng& rng) const {
  const auto eligible = eligible_parents();
  if (eligible.empty()) return std::nullopt;
  std::vector<double> w;
  w.reserve(eligible.size());
  for (auto id : eligible) w.push_back(score(id));
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (total <= 0.0) return eligible[rng.below(eligible.size())];
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < eligible.size(); ++i) {
    if (u < w[i]) return eligible[i];
    u -= w[i];
  }
  // Rounding can leave u just past the last positive weight.
  for (std::size_t i = eligible.size(); i-- > 0;) {
    if (w[i] > 0.0) return eligible[i];
  }
  return eligible.back();
}

std::vector<double> Archive::replay_distribution() const {
  std::vector<double> scores;
  std::vector<std::uint64_t> stamps;
  scores.reserve(nodes_.size());
  stamps.reserve(nodes_.size());
  for (const auto& [id, n] : nodes_) {
    scores.push_back(score(id));
    stamps.push_back(n.last_replayed_at);
  }
  return replay_probabilities(scores, stamps, counter_, params_.tau, params_.beta);
}

std::vector<NodeId> Archive::sample_replay(std::size_t k, Rng& rng, const std::set<NodeId>& exclude) {
  const auto all = ids();
  auto p = replay_distribution();
  std::vector<bool> taken(all.size(), false);
  std::size_t available = all.size();
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (exclude.contains(all[i])) {
      taken[i] = true;
      --available;
    }
  }
  k = std::min(k, available);
  std::vector<NodeId> out;
  out.reserve(k);
  for (std::size_t draw = 0; draw < k; ++draw) {
    double total = 0.0;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (!taken[i]) total += p[i];
    }
    std::size_t pick = all.size();
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (std::size_t i = 0; i < all.size(); ++i) {
        if (taken[i]) continue;
        pick = i;
        if (u < p[i]) break;
        u -= p[i];
      }
    } else {
      auto remaining = rng.below(available - draw);
      for (std::size_t i = 0; i < all.size(); ++i) {
        if (taken[i]) continue;
        if (remaining-- == 0) {
          pick = i;
          break;
        }
      }
    }
    taken[pick] = true;
    ++counter_;
    nodes_.at(all[pick]).last_replayed_at = counter_;
    out.push_back(all[pick]);
  }
  return out;
}

void Archive::set_replay_state(std::uint64_t counter, const std::map<NodeId, std::uint64_t>& stamps) {
  for (const auto& [id, c] : stamps) {
    if (c > counter) throw std::invalid_argument("replay stamp exceeds counter");
    node(id);
  }
  counter_ = counter;
  for (auto& [id, n] : nodes_) {
    auto it = stamps.find(id);
    n.last_replayed_at = it != stamps.end() ? it->second : std::min(n.last_replayed_at, counter);
  }
}

std::string_view goal_category(const AchievementSet& goal) {
  int top = -1;
  for (std::size_t i = 0; i < kNumAchievements; ++i) {
    if (goal.test(i)) top = static_cast<int>(i);
  }
  if (top < 0) return "none";
  switch (achievement_at(static_cast<std::size_t>(top))) {
    case Achievement::CollectWood:
    case Achievement::CollectStone:
    case Achievement::CollectCoal:
    case Achievement::CollectIron:
      return "collect";
    case Achievement::PlaceTable:
    case Achievement::MakeWoodPickaxe:
    case Achievement::MakeStonePickaxe:
    case Achievement::MakeIronSword:
      return "craft";
    case Achievement::DescendFloor:
      return "explore";
    case Achievement::DefeatZombie:
    case Achievement::DefeatGuard:
      return "combat";
  }
  return "none";
}

}  // namespace ued::archive
