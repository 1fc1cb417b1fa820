#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ued/core/rng.hpp"
#include "ued/dsl/program.hpp"

namespace ued::archive {

using NodeId = std::uint32_t;

enum class Status { A, B, C, D, Unknown };

std::string_view name(Status s);

struct StatusThresholds {
  double a = 0.75;
  double b = 0.50;
  double c = 0.25;

  bool operator==(const StatusThresholds&) const = default;
};

struct ArchiveParams {
  std::size_t window = 16;
  int min_episodes = 8;
  StatusThresholds thresholds;
  double tau = 0.3;
  double beta = 1.0;
};

/// p(1-p). Throws std::domain_error outside [0, 1].
double learnability(double p);

Status classify(double success_rate, const StatusThresholds& t);

/// Replay probabilities for nodes given in a fixed order. Ranks break score ties by
/// position, so callers pass nodes sorted by id. When every node is equally fresh the
/// staleness term is uniform.
std::vector<double> replay_probabilities(std::span<const double> scores,
                                         std::span<const std::uint64_t> last_replayed,
                                         std::uint64_t counter, double tau, double beta);

/// Fixed-capacity FIFO; the oldest entry is evicted when full.
template <typename T>
class RingBuffer {
 public:
  explicit RingBuffer(std::size_t capacity = 1) : capacity_(capacity == 0 ? 1 : capacity) {}

  void push(T v) {
    if (items_.size() == capacity_) items_.pop_front();
    items_.push_back(std::move(v));
  }
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

 private:
  std::size_t capacity_;
  std::deque<T> items_;
};

struct ArchiveNode {
  NodeId id = 0;
  dsl::LevelProgram program;
  std::optional<NodeId> parent;
  std::set<NodeId> children;
  RingBuffer<bool> outcomes;
  RingBuffer<AchievementSet> achieved;
  int episodes_seen = 0;
  std::uint64_t last_replayed_at = 0;
  std::string description;
  int created_cycle = 0;

  /// Success rate over the recency window; 0 before any episode.
  double window_success_rate() const;
  /// Fraction of window episodes that ended with each achievement unlocked.
  std::array<double, kNumAchievements> achievement_rates() const;
};

class Archive {
 public:
  explicit Archive(ArchiveParams params = {});

  /// Adds a node and links it under `parent`. Throws std::invalid_argument for an
  /// unknown parent, a reused id, or a link that would close a cycle.
  NodeId insert(dsl::LevelProgram program, std::optional<NodeId> parent, std::string description,
                std::optional<NodeId> id = std::nullopt, int created_cycle = 0);

  /// Throws std::out_of_range for an unknown node.
  void record_episode(NodeId id, bool success, const AchievementSet& achieved = {});

  const ArchiveNode& node(NodeId id) const;
  bool contains(NodeId id) const { return nodes_.contains(id); }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  /// Node ids in ascending order.
  std::vector<NodeId> ids() const;
  const ArchiveParams& params() const { return params_; }

  /// Success rate once min_episodes have been seen.
  std::optional<double> success_rate(NodeId id) const;
  Status status(NodeId id) const;
  /// Learnability of the windowed success rate.
  double score(NodeId id) const;

  std::vector<NodeId> eligible_parents() const;
  /// Draw proportional to learnability over the eligible set; nullopt when it is empty.
  /// Falls back to uniform when every eligible node has zero learnability.
  std::optional<NodeId> sample_parent(Rng& rng) const;

  /// Replay probabilities aligned with ids().
  std::vector<double> replay_distribution() const;
  /// k distinct nodes, drawn in sequence with the remaining probabilities renormalized.
  /// Each draw advances the counter and stamps the drawn node with it. Nodes in
  /// `exclude` are never drawn.
  std::vector<NodeId> sample_replay(std::size_t k, Rng& rng, const std::set<NodeId>& exclude = {});

  std::uint64_t counter() const { return counter_; }
  /// Restores replay bookkeeping. Throws std::invalid_argument if a stamp exceeds `counter`.
  void set_replay_state(std::uint64_t counter, const std::map<NodeId, std::uint64_t>& stamps);

  nlohmann::json to_json() const;
  static Archive from_json(const nlohmann::json& j, ArchiveParams params);
  std::string to_dot() const;

 private:
  ArchiveNode& mut(NodeId id);

  ArchiveParams params_;
  std::map<NodeId, ArchiveNode> nodes_;
  NodeId next_id_ = 0;
  std::uint64_t counter_ = 0;
};

/// Coarse family of a goal set, used to colour lineage graphs.
std::string_view goal_category(const AchievementSet& goal);

}  // namespace ued::archive
