#include <cstdio>
#include <sstream>

#include "ued/archive/archive.hpp"
#include "ued/dsl/parser.hpp"

namespace ued::archive {

namespace {

std::vector<std::string> achievement_names(const AchievementSet& set) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < kNumAchievements; ++i) {
    if (set.test(i)) out.emplace_back(name(achievement_at(i)));
  }
  return out;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

const char* category_color(std::string_view category) {
  if (category == "collect") return "#8fbc8f";
  if (category == "craft") return "#deb887";
  if (category == "combat") return "#cd5c5c";
  if (category == "explore") return "#6495ed";
  return "#d3d3d3";
}

}  // namespace

nlohmann::json Archive::to_json() const {
  auto nodes = nlohmann::json::array();
  for (const auto& [id, n] : nodes_) {
    nlohmann::json j;
    j["id"] = id;
    j["parent"] = n.parent ? nlohmann::json(*n.parent) : nlohmann::json(nullptr);
    j["children"] = n.children;
    j["status"] = name(status(id));
    const auto sr = success_rate(id);
    j["success_rate"] = sr ? nlohmann::json(*sr) : nlohmann::json(nullptr);
    j["window_success_rate"] = n.window_success_rate();
    j["learnability"] = score(id);
    j["episodes_seen"] = n.episodes_seen;
    j["last_replayed_at"] = n.last_replayed_at;
    j["created_cycle"] = n.created_cycle;
    j["name"] = n.program.name;
    j["goal"] = achievement_names(n.program.goal);
    j["completed"] = achievement_names(n.program.completed);
    j["category"] = goal_category(n.program.goal);
    j["source"] = dsl::serialize(n.program);
    j["description"] = n.description;
    j["outcomes"] = std::vector<bool>(n.outcomes.begin(), n.outcomes.end());
    auto achieved = nlohmann::json::array();
    for (const auto& set : n.achieved) achieved.push_back(set.to_ulong());
    j["achieved"] = achieved;
    nodes.push_back(std::move(j));
  }
  return {{"counter", counter_}, {"nodes", std::move(nodes)}};
}

Archive Archive::from_json(const nlohmann::json& j, ArchiveParams params) {
  Archive a(params);
  std::map<NodeId, std::uint64_t> stamps;
  // Insert in rounds so parents exist before their children.
  std::vector<const nlohmann::json*> pending;
  for (const auto& n : j.at("nodes")) pending.push_back(&n);
  while (!pending.empty()) {
    std::vector<const nlohmann::json*> next;
    for (const auto* n : pending) {
      std::optional<NodeId> parent;
      if (!n->at("parent").is_null()) parent = n->at("parent").get<NodeId>();
      if (parent && !a.contains(*parent)) {
        next.push_back(n);
        continue;
      }
      const auto id = n->at("id").get<NodeId>();
      a.insert(dsl::parse(n->at("source").get<std::string>()), parent,
               n->at("description").get<std::string>(), id, n->value("created_cycle", 0));
      auto& node = a.mut(id);
      for (bool o : n->at("outcomes")) node.outcomes.push(o);
      for (const auto& bits : n->at("achieved")) node.achieved.push(AchievementSet(bits.get<unsigned long>()));
      node.episodes_seen = n->at("episodes_seen").get<int>();
      stamps[id] = n->at("last_replayed_at").get<std::uint64_t>();
    }
    if (next.size() == pending.size()) throw std::invalid_argument("archive JSON has dangling parents");
    pending = std::move(next);
  }
  a.set_replay_state(j.at("counter").get<std::uint64_t>(), stamps);
  return a;
}

std::string Archive::to_dot() const {
  std::ostringstream os;
  os << "digraph archive {\n";
  os << "  rankdir=TB;\n";
  os << "  node [shape=circle, style=filled, fontsize=10];\n";
  for (const auto& [id, n] : nodes_) {
    const double sr = n.window_success_rate();
    char size[32];
    std::snprintf(size, sizeof size, "%.2f", 0.5 + sr);
    char sr_text[32];
    std::snprintf(sr_text, sizeof sr_text, "%.2f", sr);
    os << "  n" << id << " [label=\"" << id << "\\n" << dot_escape(n.program.name) << "\\nSR "
       << sr_text << "\", width=" << size << ", height=" << size << ", fixedsize=true, fillcolor=\""
       << category_color(goal_category(n.program.goal)) << "\", tooltip=\"status "
       << name(status(id)) << "\"];\n";
  }
  for (const auto& [id, n] : nodes_) {
    for (auto c : n.children) os << "  n" << id << " -> n" << c << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace ued::archive
