#include "ued/dsl/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ued::dsl {

namespace {

enum class Tok { Ident, String, Number, LBrace, RBrace, LParen, RParen, Comma, Semi, Equals, End };

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

std::string_view describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::String: return "string";
    case Tok::Number: return "number";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Equals: return "'='";
    case Tok::End: return "end of input";
  }
  return "?";
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      const SourcePos start{line_, col_};
      if (i_ >= src_.size()) {
        out.push_back({Tok::End, "", start});
        return out;
      }
      const char c = src_[i_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i_;
        while (j < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_')) {
          ++j;
        }
        out.push_back({Tok::Ident, std::string(src_.substr(i_, j - i_)), start});
        advance(j - i_);
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+') {
        out.push_back({Tok::Number, number(start), start});
      } else if (c == '"') {
        out.push_back({Tok::String, string(start), start});
      } else {
        Tok kind;
        switch (c) {
          case '{': kind = Tok::LBrace; break;
          case '}': kind = Tok::RBrace; break;
          case '(': kind = Tok::LParen; break;
          case ')': kind = Tok::RParen; break;
          case ',': kind = Tok::Comma; break;
          case ';': kind = Tok::Semi; break;
          case '=': kind = Tok::Equals; break;
          default:
            throw ParseError(start.line, start.col,
                             std::string("unexpected character '") + c + "'");
        }
        out.push_back({kind, std::string(1, c), start});
        advance(1);
      }
    }
  }

 private:
  void advance(std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src_[i_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++i_;
    }
  }

  void skip_space_and_comments() {
    while (i_ < src_.size()) {
      const char c = src_[i_];
      if (c == '#') {
        while (i_ < src_.size() && src_[i_] != '\n') advance(1);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
      } else {
        break;
      }
    }
  }

  std::string number(SourcePos start) {
    std::size_t j = i_;
    if (src_[j] == '-' || src_[j] == '+') ++j;
    const std::size_t digits_start = j;
    while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
    if (j == digits_start) throw ParseError(start.line, start.col, "malformed number");
    if (j < src_.size() && src_[j] == '.') {
      ++j;
      const std::size_t frac = j;
      while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
      if (j == frac) throw ParseError(start.line, start.col, "malformed number");
    }
    if (j < src_.size() && (src_[j] == 'e' || src_[j] == 'E')) {
      ++j;
      if (j < src_.size() && (src_[j] == '-' || src_[j] == '+')) ++j;
      const std::size_t exp = j;
      while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
      if (j == exp) throw ParseError(start.line, start.col, "malformed number");
    }
    std::string text(src_.substr(i_, j - i_));
    advance(j - i_);
    return text;
  }

  std::string string(SourcePos start) {
    std::size_t j = i_ + 1;
    while (j < src_.size() && src_[j] != '"') {
      if (src_[j] == '\n') throw ParseError(start.line, start.col, "unterminated string");
      ++j;
    }
    if (j >= src_.size()) throw ParseError(start.line, start.col, "unterminated string");
    std::string text(src_.substr(i_ + 1, j - i_ - 1));
    advance(j - i_ + 1);
    return text;
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  UncheckedProgram run(std::string_view source) {
    const Token head = expect_keyword("level");
    prog_.positions.goal = head.pos;
    prog_.name = expect(Tok::String).text;
    expect(Tok::LBrace);
    while (peek().kind != Tok::RBrace) {
      if (peek().kind == Tok::End) fail(peek(), "expected '}' to close level");
      statement();
    }
    expect(Tok::RBrace);
    if (peek().kind != Tok::End) fail(peek(), "unexpected content after level block");
    prog_.source_text = std::string(source);
    return {std::move(prog_), std::move(errors_)};
  }

 private:
  [[noreturn]] void fail(const Token& t, const std::string& msg) {
    throw ParseError(t.pos.line, t.pos.col, msg);
  }

  const Token& peek() const { return toks_[i_]; }

  Token take() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }

  Token expect(Tok kind) {
    if (peek().kind != kind) {
      fail(peek(), "expected " + std::string(describe(kind)) + ", found " +
                       std::string(describe(peek().kind)));
    }
    return take();
  }

  bool at_keyword(std::string_view kw) const {
    return peek().kind == Tok::Ident && peek().text == kw;
  }

  Token expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) {
      fail(peek(), "expected '" + std::string(kw) + "'");
    }
    return take();
  }

  bool accept(Tok kind) {
    if (peek().kind == kind) {
      take();
      return true;
    }
    return false;
  }

  void error(SourcePos pos, std::string msg) { errors_.push_back({pos, std::move(msg)}); }

  int integer() {
    const Token t = expect(Tok::Number);
    long long v = 0;
    const char* first = t.text.data();
    const char* last = first + t.text.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail(t, "expected integer, found '" + t.text + "'");
    if (v < -1'000'000 || v > 1'000'000) {
      error(t.pos, "integer out of range: " + t.text);
      return 0;
    }
    return static_cast<int>(v);
  }

  double real() {
    const Token t = expect(Tok::Number);
    double v = 0.0;
    const char* first = t.text.data();
    const char* last = first + t.text.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail(t, "malformed number '" + t.text + "'");
    return v;
  }

  void statement() {
    const Token& t = peek();
    if (t.kind != Tok::Ident) fail(t, "expected statement");
    if (t.text == "floor") {
      floor_stmt();
    } else if (t.text == "inventory") {
      inventory_stmt();
    } else if (t.text == "place") {
      place_stmt();
    } else if (t.text == "mob") {
      mob_stmt();
    } else if (t.text == "mechanics") {
      mechanics_stmt();
    } else if (t.text == "goal") {
      achievement_list_stmt(prog_.goal, prog_.positions.goal, seen_goal_);
    } else if (t.text == "completed") {
      achievement_list_stmt(prog_.completed, prog_.positions.completed, seen_completed_);
    } else {
      fail(t, "unknown statement '" + t.text + "'");
    }
  }

  void floor_stmt() {
    const Token kw = take();
    if (seen_floor_) error(kw.pos, "duplicate floor statement");
    seen_floor_ = true;
    prog_.positions.floor = kw.pos;
    expect(Tok::Equals);
    prog_.floor = integer();
    accept(Tok::Semi);
  }

  void inventory_stmt() {
    const Token kw = take();
    if (seen_inventory_) error(kw.pos, "duplicate inventory statement");
    seen_inventory_ = true;
    expect(Tok::LBrace);
    while (peek().kind != Tok::RBrace) {
      const Token key = expect(Tok::Ident);
      expect(Tok::Equals);
      const int count = integer();
      expect(Tok::Semi);
      const auto item = parse_item(key.text);
      if (!item) {
        error(key.pos, "unknown item '" + key.text + "'");
        continue;
      }
      if (prog_.inventory.contains(*item)) {
        error(key.pos, "duplicate inventory entry '" + key.text + "'");
        continue;
      }
      prog_.inventory[*item] = count;
      prog_.positions.inventory[*item] = key.pos;
    }
    expect(Tok::RBrace);
  }

  std::optional<Block> block_name() {
    const Token t = expect(Tok::Ident);
    auto b = parse_block(t.text);
    if (!b) error(t.pos, "unknown block '" + t.text + "'");
    return b;
  }

  // region = "at" "(" INT "," INT ")" | "near" "{" "min" "=" INT ";" "max" "=" INT ";" "n" "=" INT "}"
  // `allow_missing_n` lets mob regions omit the count, which the mob statement already carries.
  Region region(bool allow_missing_n, int default_n) {
    if (at_keyword("at")) {
      take();
      expect(Tok::LParen);
      Cell c;
      c.row = integer();
      expect(Tok::Comma);
      c.col = integer();
      expect(Tok::RParen);
      return c;
    }
    if (at_keyword("near")) {
      take();
      expect(Tok::LBrace);
      Annulus a;
      expect_keyword("min");
      expect(Tok::Equals);
      a.min_dist = integer();
      expect(Tok::Semi);
      expect_keyword("max");
      expect(Tok::Equals);
      a.max_dist = integer();
      a.n = default_n;
      if (allow_missing_n && peek().kind == Tok::Semi && toks_[i_ + 1].kind == Tok::RBrace) {
        take();
      } else if (!(allow_missing_n && peek().kind == Tok::RBrace)) {
        expect(Tok::Semi);
        expect_keyword("n");
        expect(Tok::Equals);
        a.n = integer();
        accept(Tok::Semi);
      }
      expect(Tok::RBrace);
      return a;
    }
    fail(peek(), "expected region ('at' or 'near')");
  }

  void place_stmt() {
    const Token kw = take();
    PlacementSpec spec;
    spec.pos = kw.pos;
    expect(Tok::LBrace);
    expect_keyword("block");
    expect(Tok::Equals);
    const auto block = block_name();
    expect(Tok::Semi);
    if (at_keyword("on")) {
      take();
      expect(Tok::Equals);
      spec.on_blocks.reset();
      do {
        if (auto b = block_name()) spec.on_blocks.set(index(*b));
      } while (accept(Tok::Comma));
      expect(Tok::Semi);
    }
    spec.region = region(false, 1);
    expect(Tok::RBrace);
    if (block) {
      spec.block = *block;
      prog_.placements.push_back(spec);
    }
  }

  void mob_stmt() {
    const Token kw = take();
    MobSpec spec;
    spec.pos = kw.pos;
    expect(Tok::LBrace);
    expect_keyword("kind");
    expect(Tok::Equals);
    const Token kind_tok = expect(Tok::Ident);
    const auto kind = parse_mob_kind(kind_tok.text);
    if (!kind) error(kind_tok.pos, "unknown mob kind '" + kind_tok.text + "'");
    expect(Tok::Semi);
    expect_keyword("n");
    expect(Tok::Equals);
    spec.count = integer();
    expect(Tok::Semi);
    spec.region = region(true, spec.count);
    expect(Tok::RBrace);
    if (kind) {
      spec.kind = *kind;
      prog_.mobs.push_back(spec);
    }
  }

  void mechanics_stmt() {
    const Token kw = take();
    if (seen_mechanics_) error(kw.pos, "duplicate mechanics statement");
    seen_mechanics_ = true;
    prog_.positions.mechanics = kw.pos;
    expect(Tok::LBrace);
    std::vector<std::string> seen;
    while (peek().kind != Tok::RBrace) {
      const Token key = expect(Tok::Ident);
      expect(Tok::Equals);
      const Token value_tok = peek();
      const double value = real();
      expect(Tok::Semi);
      if (std::find(seen.begin(), seen.end(), key.text) != seen.end()) {
        error(key.pos, "duplicate mechanics entry '" + key.text + "'");
        continue;
      }
      seen.push_back(key.text);
      auto& m = prog_.mechanics;
      if (key.text == "melee_spawn_multiplier") {
        m.melee_spawn_multiplier = value;
      } else if (key.text == "passive_spawn_multiplier") {
        m.passive_spawn_multiplier = value;
      } else if (key.text == "mob_damage_multiplier") {
        m.mob_damage_multiplier = value;
      } else if (key.text == "needs_depletion_multiplier") {
        m.needs_depletion_multiplier = value;
      } else if (key.text == "monsters_killed_to_clear") {
        if (value != static_cast<double>(static_cast<long long>(value)) || value > 1e6 ||
            value < -1e6) {
          error(value_tok.pos, "monsters_killed_to_clear must be an integer");
        } else {
          m.monsters_killed_to_clear = static_cast<int>(value);
        }
      } else {
        error(key.pos, "unknown mechanics parameter '" + key.text + "'");
      }
    }
    expect(Tok::RBrace);
  }

  void achievement_list_stmt(AchievementSet& target, SourcePos& pos, bool& seen) {
    const Token kw = take();
    if (seen) error(kw.pos, "duplicate '" + kw.text + "' statement");
    seen = true;
    pos = kw.pos;
    expect(Tok::LBrace);
    if (peek().kind != Tok::RBrace) {
      do {
        const Token t = expect(Tok::Ident);
        const auto a = parse_achievement(t.text);
        if (!a) {
          error(t.pos, "unknown achievement '" + t.text + "'");
        } else if (target.test(index(*a))) {
          error(t.pos, "duplicate achievement '" + t.text + "'");
        } else {
          target.set(index(*a));
        }
      } while (accept(Tok::Comma));
    }
    expect(Tok::RBrace);
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  LevelProgram prog_;
  std::vector<SemanticError> errors_;
  bool seen_floor_ = false;
  bool seen_inventory_ = false;
  bool seen_mechanics_ = false;
  bool seen_goal_ = false;
  bool seen_completed_ = false;
};

int item_cap(Item item) {
  switch (item) {
    case Item::Pickaxe: return 2;
    case Item::IronSword: return 1;
    default: return 9;
  }
}

bool valid_name(const std::string& name) {
  if (name.empty() || name.size() > 128) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

void check_region(const Region& region, SourcePos pos, MapDims dims,
                  std::vector<SemanticError>& out) {
  if (const auto* c = std::get_if<Cell>(&region)) {
    if (c->row < 0 || c->row >= dims.rows || c->col < 0 || c->col >= dims.cols) {
      out.push_back({pos, "cell (" + std::to_string(c->row) + ", " + std::to_string(c->col) +
                              ") is outside the map"});
    }
    return;
  }
  const auto& a = std::get<Annulus>(region);
  if (a.min_dist < 1) out.push_back({pos, "near.min must be >= 1"});
  if (a.max_dist < a.min_dist) out.push_back({pos, "near.max must be >= near.min"});
  if (a.n < 1) out.push_back({pos, "near.n must be >= 1"});
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_region(const Region& region, bool with_n) {
  if (const auto* c = std::get_if<Cell>(&region)) {
    return "at (" + std::to_string(c->row) + ", " + std::to_string(c->col) + ")";
  }
  const auto& a = std::get<Annulus>(region);
  std::string s = "near { min = " + std::to_string(a.min_dist) + "; max = " +
                  std::to_string(a.max_dist) + ";";
  if (with_n) s += " n = " + std::to_string(a.n);
  return s + " }";
}

std::string format_achievements(const AchievementSet& set, const AchievementRegistry& registry) {
  std::string s;
  for (const auto& e : registry.entries()) {
    if (!set.test(index(e.id))) continue;
    if (!s.empty()) s += ", ";
    s += name(e.id);
  }
  // Ids absent from the registry still serialize, after the registry-ordered ones.
  for (std::size_t i = 0; i < kNumAchievements; ++i) {
    if (set.test(i) && !registry.contains(achievement_at(i))) {
      if (!s.empty()) s += ", ";
      s += name(achievement_at(i));
    }
  }
  return s;
}

}  // namespace

int PlacementSpec::count() const {
  if (std::holds_alternative<Cell>(region)) return 1;
  return std::get<Annulus>(region).n;
}

LevelProgram target_program() {
  LevelProgram p;
  p.name = "target";
  p.goal = AchievementRegistry::standard().all();
  p.source_text = serialize(p);
  return p;
}

UncheckedProgram parse_unchecked(std::string_view text) {
  Lexer lexer(text);
  Parser parser(lexer.run());
  return parser.run(text);
}

LevelProgram parse(std::string_view text, const AchievementRegistry& registry, MapDims dims) {
  auto unchecked = parse_unchecked(text);
  auto errors = std::move(unchecked.errors);
  auto more = validate(unchecked.program, registry, dims);
  errors.insert(errors.end(), more.begin(), more.end());
  if (!errors.empty()) {
    std::stable_sort(errors.begin(), errors.end(),
                     [](const SemanticError& a, const SemanticError& b) { return a.pos < b.pos; });
    throw ValidationError(std::move(errors));
  }
  return std::move(unchecked.program);
}

std::vector<SemanticError> validate(const LevelProgram& p, const AchievementRegistry& registry,
                                    MapDims dims) {
  std::vector<SemanticError> out;
  const auto& pos = p.positions;

  if (!valid_name(p.name)) {
    out.push_back({{}, "level name must be 1-128 characters of [A-Za-z0-9_.-]"});
  }
  if (p.floor < 0 || p.floor >= dims.floors) {
    out.push_back({pos.floor, "floor must be in [0, " + std::to_string(dims.floors) + ")"});
  }
  for (const auto& [item, count] : p.inventory) {
    const auto it = pos.inventory.find(item);
    const SourcePos ipos = it == pos.inventory.end() ? SourcePos{} : it->second;
    if (count < 0 || count > item_cap(item)) {
      out.push_back({ipos, "inventory count for '" + std::string(name(item)) + "' must be in [0, " +
                               std::to_string(item_cap(item)) + "]"});
    }
  }
  for (const auto& spec : p.placements) {
    check_region(spec.region, spec.pos, dims, out);
    if (spec.on_blocks.none()) out.push_back({spec.pos, "placement substrate set is empty"});
  }
  std::array<int, kNumMobKinds> per_kind{};
  for (const auto& spec : p.mobs) {
    check_region(spec.region, spec.pos, dims, out);
    if (spec.count < 1) {
      out.push_back({spec.pos, "mob count must be >= 1"});
    } else if (spec.count > kMobCap) {
      out.push_back({spec.pos, "at most " + std::to_string(kMobCap) + " " +
                                   std::string(name(spec.kind)) + " mobs may be placed"});
    } else {
      auto& total = per_kind[static_cast<std::size_t>(spec.kind)];
      total += spec.count;
      if (total > kMobCap) {
        out.push_back({spec.pos, "at most " + std::to_string(kMobCap) + " " +
                                     std::string(name(spec.kind)) + " mobs may be placed in total"});
      }
    }
    if (const auto* a = std::get_if<Annulus>(&spec.region); a && a->n != spec.count) {
      out.push_back({spec.pos, "near.n must equal the mob count"});
    }
    if (std::holds_alternative<Cell>(spec.region) && spec.count != 1) {
      out.push_back({spec.pos, "a mob placed 'at' a cell must have n = 1"});
    }
  }
  const auto& m = p.mechanics;
  const std::pair<const char*, double> multipliers[] = {
      {"melee_spawn_multiplier", m.melee_spawn_multiplier},
      {"passive_spawn_multiplier", m.passive_spawn_multiplier},
      {"mob_damage_multiplier", m.mob_damage_multiplier},
      {"needs_depletion_multiplier", m.needs_depletion_multiplier},
  };
  for (const auto& [key, value] : multipliers) {
    if (!std::isfinite(value) || value < 0.0 || value > 100.0) {
      out.push_back({pos.mechanics, std::string(key) + " must be in [0, 100]"});
    }
  }
  if (m.monsters_killed_to_clear < 0 || m.monsters_killed_to_clear > 99) {
    out.push_back({pos.mechanics, "monsters_killed_to_clear must be in [0, 99]"});
  }
  if (p.goal.none()) out.push_back({pos.goal, "goal must name at least one achievement"});
  const auto overlap = p.goal & p.completed;
  if (overlap.any()) {
    out.push_back({pos.completed, "achievements cannot be both goal and completed: " +
                                      format_achievements(overlap, registry)});
  }
  for (std::size_t i = 0; i < kNumAchievements; ++i) {
    const auto a = achievement_at(i);
    if (registry.contains(a)) continue;
    if (p.goal.test(i)) {
      out.push_back({pos.goal, "achievement not in registry: " + std::string(name(a))});
    }
    if (p.completed.test(i)) {
      out.push_back({pos.completed, "achievement not in registry: " + std::string(name(a))});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SemanticError& a, const SemanticError& b) { return a.pos < b.pos; });
  return out;
}

std::string serialize(const LevelProgram& p, const AchievementRegistry& registry) {
  std::ostringstream os;
  os << "level \"" << p.name << "\" {\n";
  if (p.floor != 0) os << "  floor = " << p.floor << "\n";
  if (!p.inventory.empty()) {
    os << "  inventory {";
    for (const auto& [item, count] : p.inventory) os << " " << name(item) << " = " << count << ";";
    os << " }\n";
  }
  for (const auto& spec : p.placements) {
    os << "  place { block = " << name(spec.block) << ";";
    if (spec.on_blocks != PlacementSpec::default_substrate()) {
      os << " on = ";
      bool first = true;
      for (std::size_t b = 0; b < kNumBlocks; ++b) {
        if (!spec.on_blocks.test(b)) continue;
        if (!first) os << ", ";
        os << name(static_cast<Block>(b));
        first = false;
      }
      os << ";";
    }
    os << " " << format_region(spec.region, true) << " }\n";
  }
  for (const auto& spec : p.mobs) {
    os << "  mob { kind = " << name(spec.kind) << "; n = " << spec.count << "; "
       << format_region(spec.region, true) << " }\n";
  }
  const MechanicsParams defaults;
  const auto& m = p.mechanics;
  if (m != defaults) {
    os << "  mechanics {";
    if (m.melee_spawn_multiplier != defaults.melee_spawn_multiplier)
      os << " melee_spawn_multiplier = " << format_number(m.melee_spawn_multiplier) << ";";
    if (m.passive_spawn_multiplier != defaults.passive_spawn_multiplier)
      os << " passive_spawn_multiplier = " << format_number(m.passive_spawn_multiplier) << ";";
    if (m.mob_damage_multiplier != defaults.mob_damage_multiplier)
      os << " mob_damage_multiplier = " << format_number(m.mob_damage_multiplier) << ";";
    if (m.needs_depletion_multiplier != defaults.needs_depletion_multiplier)
      os << " needs_depletion_multiplier = " << format_number(m.needs_depletion_multiplier) << ";";
    if (m.monsters_killed_to_clear != defaults.monsters_killed_to_clear)
      os << " monsters_killed_to_clear = " << m.monsters_killed_to_clear << ";";
    os << " }\n";
  }
  os << "  goal { " << format_achievements(p.goal, registry) << " }\n";
  if (p.completed.any()) {
    os << "  completed { " << format_achievements(p.completed, registry) << " }\n";
  }
  os << "}\n";
  return os.str();
}

LevelProgram load_level_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open level file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.col(), path.string() + ": " + e.message());
  }
}

std::vector<LevelProgram> load_level_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error("level directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".lvl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<LevelProgram> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(load_level_file(f));
  return out;
}

}  // namespace ued::dsl
