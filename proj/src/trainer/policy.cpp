#include "ued/trainer/policy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ued::train {

namespace {

enum Feature : unsigned {
  kWood = 1u << 0,
  kStone = 1u << 1,
  kCoal = 1u << 2,
  kIron = 1u << 3,
  kPickaxe = 3u << 4,  // two-bit tier
  kSword = 1u << 6,
  kTable = 1u << 7,
  kLadder = 1u << 8,
};

constexpr unsigned kCrafting = kWood | kTable | kPickaxe;

unsigned relevant(std::optional<Achievement> sub) {
  if (!sub) return 0;
  switch (*sub) {
    case Achievement::CollectWood: return 0;
    case Achievement::PlaceTable: return kWood;
    case Achievement::MakeWoodPickaxe:
    case Achievement::CollectStone:
    case Achievement::CollectCoal: return kCrafting;
    case Achievement::MakeStonePickaxe:
    case Achievement::CollectIron: return kCrafting | kStone;
    case Achievement::MakeIronSword: return kCrafting | kStone | kCoal | kIron;
    case Achievement::DefeatZombie:
    case Achievement::DefeatGuard: return 0;
    case Achievement::DescendFloor: return kLadder;
  }
  return 0;
}

bool table_near(const world::WorldState& s) {
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      const int r = s.row + dr;
      const int c = s.col + dc;
      if (r >= 0 && r < kRows && c >= 0 && c < kCols && s.block(s.floor, r, c) == Block::Table) {
        return true;
      }
    }
  }
  return false;
}

bool combat(std::optional<Achievement> sub) {
  return sub == Achievement::DefeatZombie || sub == Achievement::DefeatGuard;
}

// 0 when no hostile mob shares the floor, else 1 + the dominant direction to the nearest.
unsigned hostile_bearing(const world::WorldState& s) {
  int best = -1;
  unsigned dir = 0;
  for (const auto& m : s.mobs) {
    if (m.floor != s.floor || m.kind == world::Creature::Cow) continue;
    const int dr = m.row - s.row;
    const int dc = m.col - s.col;
    const int d = std::abs(dr) + std::abs(dc);
    if (best >= 0 && d >= best) continue;
    best = d;
    if (std::abs(dr) >= std::abs(dc)) {
      dir = dr < 0 ? 1 : 3;
    } else {
      dir = dc > 0 ? 2 : 4;
    }
  }
  return dir;
}

bool melee_adjacent(const world::WorldState& s) {
  for (const auto& m : s.mobs) {
    if (m.floor != s.floor || m.kind == world::Creature::Cow) continue;
    if (std::abs(m.row - s.row) + std::abs(m.col - s.col) == 1) return true;
  }
  return false;
}

void put_u32(std::ostream& os, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::ostream& os, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_bytes(std::istream& is, int n) {
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) {
    const int c = is.get();
    if (c == EOF) throw std::runtime_error("policy file truncated");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_bytes(is, 8)); }

}  // namespace

StateKey skill_key(const world::WorldState& s, std::optional<Achievement> sub) {
  unsigned f = 0;
  if (s.item(Item::Wood) > 0) f |= kWood;
  if (s.item(Item::Stone) > 0) f |= kStone;
  if (s.item(Item::Coal) > 0) f |= kCoal;
  if (s.item(Item::Iron) > 0) f |= kIron;
  f |= static_cast<unsigned>(std::min(s.item(Item::Pickaxe), 2)) << 4;
  if (s.item(Item::IronSword) > 0) f |= kSword;
  if (table_near(s)) f |= kTable;
  if (s.monsters_killed[0] >= s.mechanics.monsters_killed_to_clear) f |= kLadder;
  f &= relevant(sub);

  StateKey k = static_cast<StateKey>(s.floor);
  k = (k << 4) | static_cast<StateKey>(s.row);
  k = (k << 4) | static_cast<StateKey>(s.col);
  k = (k << 4) | (sub ? static_cast<StateKey>(index(*sub)) : kNoSubgoal);
  k = (k << 1) | (melee_adjacent(s) ? 1u : 0u);
  k = (k << 3) | (combat(sub) ? hostile_bearing(s) : 0u);
  k = (k << 9) | f;
  return k;
}

StateKey option_key(const world::WorldState& s, const AchievementSet& goal) {
  StateKey k = StateKey{1} << 63;
  k |= static_cast<StateKey>(s.floor) << 32;
  k |= static_cast<StateKey>(std::min(s.monsters_killed[0], 7)) << 33;
  k |= static_cast<StateKey>((s.achievements & goal).to_ulong()) << 16;
  k |= static_cast<StateKey>(goal.to_ulong());
  return k;
}

ChoiceMask pending_mask(const world::WorldState& s, const AchievementSet& goal) {
  auto open = goal & ~s.achievements;
  const auto zombie = index(Achievement::DefeatZombie);
  if (open.test(index(Achievement::DescendFloor)) && s.floor == 0 &&
      s.monsters_killed[0] < s.mechanics.monsters_killed_to_clear) {
    open.set(zombie);
  }
  return static_cast<ChoiceMask>(open.to_ulong());
}

bool is_option_key(StateKey key) { return (key >> 63) != 0; }

std::uint64_t key_subgoal(StateKey key) { return is_option_key(key) ? kNoSubgoal : (key >> 13) & 0xF; }

PolicyTable::PolicyTable(LearnerParams params) : params_(params) {
  if (!(params_.epsilon_start >= 0.0 && params_.epsilon_start <= 1.0) ||
      !(params_.epsilon_end >= 0.0 && params_.epsilon_end <= 1.0)) {
    throw std::invalid_argument("epsilon must lie in [0, 1]");
  }
}

const QValues* PolicyTable::find(StateKey key) const {
  auto it = table_.find(key);
  return it == table_.end() ? nullptr : &it->second;
}

std::size_t PolicyTable::greedy(StateKey key, Rng& rng, ChoiceMask allowed) const {
  if ((allowed & kAllActions) == 0) throw std::invalid_argument("no allowed choice");
  std::array<std::size_t, kNumActions> ties{};
  std::size_t n = 0;
  const auto* q = find(key);
  double best = 0.0;
  for (std::size_t a = 0; a < kNumActions; ++a) {
    if (!(allowed >> a & 1u)) continue;
    const double v = q ? (*q)[a] : 0.0;
    if (n == 0 || v > best) {
      best = v;
      n = 0;
    }
    if (v == best) ties[n++] = a;
  }
  return n == 1 ? ties[0] : ties[rng.below(n)];
}

std::size_t PolicyTable::choose(StateKey key, double epsilon, Rng& rng, ChoiceMask allowed) const {
  if (rng.chance(epsilon)) {
    const auto n = static_cast<std::size_t>(std::popcount(allowed & kAllActions));
    if (n == 0) throw std::invalid_argument("no allowed choice");
    auto pick = rng.below(n);
    for (std::size_t a = 0; a < kNumActions; ++a) {
      if ((allowed >> a & 1u) && pick-- == 0) return a;
    }
  }
  return greedy(key, rng, allowed);
}

double PolicyTable::max_value(StateKey key, ChoiceMask allowed) const {
  const auto* q = find(key);
  if (!q) return 0.0;
  bool any = false;
  double best = 0.0;
  for (std::size_t a = 0; a < kNumActions; ++a) {
    if (!(allowed >> a & 1u)) continue;
    if (!any || (*q)[a] > best) best = (*q)[a];
    any = true;
  }
  return best;
}

double PolicyTable::epsilon(std::uint64_t env_steps) const {
  if (params_.decay_steps == 0 || env_steps >= params_.decay_steps) return params_.epsilon_end;
  const double frac = static_cast<double>(env_steps) / static_cast<double>(params_.decay_steps);
  return params_.epsilon_start + (params_.epsilon_end - params_.epsilon_start) * frac;
}

void PolicyTable::update(StateKey key, std::size_t choice, double reward, StateKey next, bool terminal,
                         double discount, ChoiceMask next_allowed) {
  if (choice >= kNumActions) throw std::out_of_range("choice index out of range");
  double target = reward;
  if (!terminal && next_allowed != 0) target += discount * max_value(next, next_allowed);
  auto& q = table_[key];
  q[choice] += params_.alpha * (target - q[choice]);
}

std::vector<StateKey> PolicyTable::keys() const {
  std::vector<StateKey> out;
  out.reserve(table_.size());
  for (const auto& [k, v] : table_) out.push_back(k);
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t PolicyTable::fingerprint() const {
  std::uint64_t h = Rng::mix(table_.size());
  for (const auto& [k, q] : table_) {
    std::uint64_t e = Rng::mix(k);
    for (double v : q) e = Rng::mix(e ^ std::bit_cast<std::uint64_t>(v));
    h ^= e;
  }
  return h;
}

void PolicyTable::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write policy file: " + path.string());
  os.write("UEDQ", 4);
  put_u32(os, kFormatVersion);
  put_u32(os, static_cast<std::uint32_t>(kNumActions));
  put_f64(os, params_.alpha);
  put_f64(os, params_.gamma);
  put_f64(os, params_.epsilon_start);
  put_f64(os, params_.epsilon_end);
  put_u64(os, params_.decay_steps);
  put_u64(os, table_.size());
  for (auto k : keys()) {
    put_u64(os, k);
    for (double v : table_.at(k)) put_f64(os, v);
  }
  if (!os) throw std::runtime_error("failed writing policy file: " + path.string());
}

PolicyTable PolicyTable::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open policy file: " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "UEDQ", 4) != 0) throw std::runtime_error("not a policy file: " + path.string());
  const auto version = get_bytes(is, 4);
  if (version != kFormatVersion) {
    throw std::runtime_error("unsupported policy format version " + std::to_string(version));
  }
  if (get_bytes(is, 4) != kNumActions) throw std::runtime_error("policy action count mismatch");
  LearnerParams p;
  p.alpha = get_f64(is);
  p.gamma = get_f64(is);
  p.epsilon_start = get_f64(is);
  p.epsilon_end = get_f64(is);
  p.decay_steps = get_bytes(is, 8);
  PolicyTable t(p);
  const auto n = get_bytes(is, 8);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto k = get_bytes(is, 8);
    QValues q;
    for (auto& v : q) {
      v = get_f64(is);
      if (!std::isfinite(v)) throw std::runtime_error("policy file holds a non-finite value");
    }
    t.table_.emplace(k, q);
  }
  return t;
}

}  // namespace ued::train
