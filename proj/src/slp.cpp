#include "slpspan/slp.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>
#include <limits>
#include <sstream>

namespace slpspan {

namespace {

constexpr Position kMaxLength = std::numeric_limits<Position>::max() >> 1;

std::string default_leaf_name(Label label) {
  if (label.is_terminal()) {
    const auto c = static_cast<unsigned char>(label.terminal());
    if (std::isalnum(c) != 0) return std::string("T_") + label.terminal();
    static const char* hex = "0123456789abcdef";
    return std::string("T_x") + hex[c >> 4] + hex[c & 15];
  }
  return "T_m" + std::to_string(label.marker_set().bits());
}

}  // namespace

std::optional<SymbolId> Slp::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::size_t Slp::size() const noexcept {
  std::size_t n = 0;
  for (const auto& r : rules_) n += r.leaf ? 2 : 3;
  return n;
}

std::optional<SymbolId> Slp::leaf_of(Label label) const {
  auto it = leaves_.find(label);
  if (it == leaves_.end()) return std::nullopt;
  return it->second;
}

std::vector<Label> Slp::alphabet() const {
  std::vector<Label> out;
  for (const auto& [label, id] : leaves_) out.push_back(label);
  return out;
}

SlpBuilder::SlpBuilder(const Slp& base) : slp_(base) {}

std::string SlpBuilder::unique_name(std::string base) {
  if (base.empty()) {
    std::string candidate;
    do {
      candidate = "N" + std::to_string(fresh_++);
    } while (slp_.by_name_.count(candidate) != 0);
    return candidate;
  }
  if (slp_.by_name_.count(base) == 0) return base;
  std::string candidate;
  do {
    candidate = base + "_" + std::to_string(fresh_++);
  } while (slp_.by_name_.count(candidate) != 0);
  return candidate;
}

SymbolId SlpBuilder::leaf(Label label, std::string name) {
  if (label.is_epsilon()) throw InvalidArgument("a leaf rule cannot derive the empty word");
  if (auto it = slp_.leaves_.find(label); it != slp_.leaves_.end()) return it->second;
  const auto id = static_cast<SymbolId>(slp_.rules_.size());
  Rule r;
  r.leaf = true;
  r.label = label;
  slp_.rules_.push_back(r);
  slp_.lengths_.push_back(1);
  slp_.depths_.push_back(1);
  name = unique_name(name.empty() ? default_leaf_name(label) : std::move(name));
  slp_.by_name_.emplace(name, id);
  slp_.names_.push_back(std::move(name));
  slp_.leaves_.emplace(label, id);
  return id;
}

SymbolId SlpBuilder::pair(SymbolId left, SymbolId right, std::string name) {
  if (left >= slp_.rules_.size() || right >= slp_.rules_.size()) throw InvalidArgument("pair: unknown symbol");
  const Position a = slp_.lengths_[left];
  const Position b = slp_.lengths_[right];
  if (a > kMaxLength - b) throw LimitExceeded("derived length exceeds 2^63-1");
  const auto id = static_cast<SymbolId>(slp_.rules_.size());
  Rule r;
  r.leaf = false;
  r.left = left;
  r.right = right;
  slp_.rules_.push_back(r);
  slp_.lengths_.push_back(a + b);
  slp_.depths_.push_back(1 + std::max(slp_.depths_[left], slp_.depths_[right]));
  name = unique_name(std::move(name));
  slp_.by_name_.emplace(name, id);
  slp_.names_.push_back(std::move(name));
  return id;
}

Slp SlpBuilder::build(SymbolId start) const {
  if (start >= slp_.rules_.size()) throw InvalidArgument("build: unknown start symbol");
  Slp out = slp_;
  out.start_ = start;
  return out;
}

std::size_t RawGrammar::size() const noexcept {
  std::size_t n = names.size();
  for (const auto& r : rules) n += r.size();
  return n;
}

namespace {

struct Token {
  std::string text;
  bool quoted = false;
  std::size_t column = 0;
};

std::vector<Token> tokenize_line(std::string_view line, std::size_t line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      ++i;
      continue;
    }
    if (c == '\'') {
      if (i + 2 >= line.size() || line[i + 2] != '\'') {
        throw ParseError("expected a single-quoted terminal", line_no, i + 1);
      }
      out.push_back({std::string(1, line[i + 1]), true, i + 1});
      i += 3;
      continue;
    }
    const std::size_t begin = i;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])) == 0 && line[i] != '\'') ++i;
    out.push_back({std::string(line.substr(begin, i - begin)), false, begin + 1});
  }
  return out;
}

}  // namespace

RawGrammar parse_slp(std::string_view text) {
  RawGrammar g;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<bool> defined;
  std::vector<std::size_t> rule_line;
  struct Reference {
    std::size_t symbol, line, column;
  };
  std::vector<Reference> references;
  std::optional<Reference> start;

  auto intern = [&](const std::string& name) {
    auto [it, inserted] = index.emplace(name, g.names.size());
    if (inserted) {
      g.names.push_back(name);
      g.rules.emplace_back();
      defined.push_back(false);
      rule_line.push_back(0);
    }
    return it->second;
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') continue;

    const auto tokens = tokenize_line(line, line_no);
    if (!tokens[0].quoted && tokens[0].text == "start") {
      if (tokens.size() != 2 || tokens[1].quoted) throw ParseError("expected 'start <symbol>'", line_no, tokens[0].column);
      if (start) throw ParseError("duplicate start declaration", line_no, tokens[0].column);
      start = Reference{intern(tokens[1].text), line_no, tokens[1].column};
      continue;
    }
    if (tokens[0].quoted) throw ParseError("a rule must start with a nonterminal", line_no, tokens[0].column);
    if (tokens.size() < 2 || tokens[1].quoted || tokens[1].text != "->") {
      throw ParseError("expected '->'", line_no, tokens.size() < 2 ? line.size() + 1 : tokens[1].column);
    }
    const std::size_t lhs = intern(tokens[0].text);
    if (defined[lhs]) {
      throw ParseError("duplicate rule for '" + tokens[0].text + "' (first defined on line " +
                           std::to_string(rule_line[lhs]) + ")",
                       line_no, tokens[0].column);
    }
    defined[lhs] = true;
    rule_line[lhs] = line_no;
    std::vector<RawGrammar::Item> items;
    for (std::size_t t = 2; t < tokens.size(); ++t) {
      RawGrammar::Item item;
      if (tokens[t].quoted) {
        item.terminal = true;
        item.character = tokens[t].text[0];
      } else {
        if (tokens[t].text == "->") throw ParseError("unexpected '->'", line_no, tokens[t].column);
        item.symbol = intern(tokens[t].text);
        references.push_back({item.symbol, line_no, tokens[t].column});
      }
      items.push_back(item);
    }
    g.rules[lhs] = std::move(items);
  }

  if (!start) throw ParseError("missing 'start <symbol>' declaration", 0, 0);
  if (!defined[start->symbol]) {
    throw ParseError("undefined start symbol '" + g.names[start->symbol] + "'", start->line, start->column);
  }
  for (const auto& r : references) {
    if (!defined[r.symbol]) throw ParseError("undefined symbol '" + g.names[r.symbol] + "'", r.line, r.column);
  }
  g.start = start->symbol;

  // Cycle check: iterative DFS with white/grey/black colouring.
  std::vector<std::uint8_t> colour(g.names.size(), 0);
  for (std::size_t root = 0; root < g.names.size(); ++root) {
    if (colour[root] != 0) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    colour[root] = 1;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next == g.rules[node].size()) {
        colour[node] = 2;
        stack.pop_back();
        continue;
      }
      const auto item = g.rules[node][next++];
      if (item.terminal) continue;
      if (colour[item.symbol] == 1) {
        throw ParseError("cyclic rule graph through '" + g.names[item.symbol] + "'", rule_line[node], 1);
      }
      if (colour[item.symbol] == 0) {
        colour[item.symbol] = 1;
        stack.emplace_back(item.symbol, 0);
      }
    }
  }
  return g;
}

RawGrammar parse_slp(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_slp(std::string_view(text));
}

Slp normalize(const RawGrammar& grammar) {
  SlpBuilder b;
  std::vector<std::optional<SymbolId>> id(grammar.names.size());
  // Rules of the form X -> 'a' name their leaf.
  std::vector<std::pair<std::size_t, std::size_t>> stack{{grammar.start, 0}};
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    const auto& rhs = grammar.rules[node];
    if (rhs.empty()) throw InvalidArgument("empty right-hand side for '" + grammar.names[node] + "'");
    if (next < rhs.size()) {
      const auto item = rhs[next++];
      if (!item.terminal && !id[item.symbol]) stack.emplace_back(item.symbol, 0);
      continue;
    }
    auto resolve = [&](const RawGrammar::Item& item, const std::string& name) {
      return item.terminal ? b.leaf(Label::terminal(item.character), name) : *id[item.symbol];
    };
    if (rhs.size() == 1) {
      id[node] = resolve(rhs[0], grammar.names[node]);
    } else {
      SymbolId cur = resolve(rhs[0], {});
      for (std::size_t t = 1; t < rhs.size(); ++t) {
        cur = b.pair(cur, resolve(rhs[t], {}), t + 1 == rhs.size() ? grammar.names[node] : std::string{});
      }
      id[node] = cur;
    }
    stack.pop_back();
  }
  return b.build(*id[grammar.start]);
}

Slp load_slp(std::string_view text) { return normalize(parse_slp(text)); }

std::string format_slp(const Slp& slp) {
  std::ostringstream out;
  out << "start " << slp.name(slp.start()) << '\n';
  for (SymbolId a = 0; a < slp.symbol_count(); ++a) {
    const Rule& r = slp.rule(a);
    out << slp.name(a) << " ->";
    if (r.leaf) {
      if (!r.label.is_terminal()) throw InvalidArgument("format_slp: marker-set leaves have no text form");
      out << " '" << r.label.terminal() << "'";
    } else {
      out << ' ' << slp.name(r.left) << ' ' << slp.name(r.right);
    }
    out << '\n';
  }
  return out.str();
}

namespace {

template <class Visit>
void walk_leaves(const Slp& slp, SymbolId root, Visit&& visit) {
  std::vector<SymbolId> stack{root};
  while (!stack.empty()) {
    const SymbolId a = stack.back();
    stack.pop_back();
    const Rule& r = slp.rule(a);
    if (r.leaf) {
      visit(r.label);
    } else {
      stack.push_back(r.right);
      stack.push_back(r.left);
    }
  }
}

}  // namespace

std::string expand(const Slp& slp, SymbolId a, Position limit) {
  if (slp.length(a) > limit) {
    throw LimitExceeded("derived document has length " + std::to_string(slp.length(a)) + " > limit " +
                        std::to_string(limit));
  }
  std::string out;
  out.reserve(static_cast<std::size_t>(slp.length(a)));
  walk_leaves(slp, a, [&](const Label& l) {
    if (!l.is_terminal()) throw InvalidArgument("expand: program contains marker-set symbols");
    out.push_back(l.terminal());
  });
  return out;
}

std::string expand(const Slp& slp, Position limit) { return expand(slp, slp.start(), limit); }

std::vector<Label> expand_labels(const Slp& slp, Position limit) {
  if (slp.document_length() > limit) throw LimitExceeded("derived word longer than limit");
  std::vector<Label> out;
  out.reserve(static_cast<std::size_t>(slp.document_length()));
  walk_leaves(slp, slp.start(), [&](const Label& l) { out.push_back(l); });
  return out;
}

Label char_at(const Slp& slp, Position i) {
  if (i < 1 || i > slp.document_length()) {
    throw InvalidArgument("position " + std::to_string(i) + " outside [1, " + std::to_string(slp.document_length()) + "]");
  }
  SymbolId a = slp.start();
  while (!slp.is_leaf(a)) {
    const Rule& r = slp.rule(a);
    if (i <= slp.length(r.left)) {
      a = r.left;
    } else {
      i -= slp.length(r.left);
      a = r.right;
    }
  }
  return slp.rule(a).label;
}

Slp insert_markers_into_slp(const Slp& slp, const PartialMarkerSet& markers) {
  const Position n = slp.document_length();
  std::map<Position, MarkerSet, std::greater<>> groups;
  for (const auto& e : markers.entries()) {
    if (e.position < 1 || e.position > n + 1) {
      throw InvalidArgument("marker position " + std::to_string(e.position) + " incompatible with document length " +
                            std::to_string(n));
    }
    groups[e.position].insert(Marker::from_code(e.marker));
  }
  SlpBuilder b(slp);
  SymbolId root = slp.start();
  std::vector<std::pair<SymbolId, bool>> path;  // (inner symbol, descended left)
  for (const auto& [position, set] : groups) {
    const SymbolId marks = b.leaf(Label::markers(set));
    if (position == n + 1) {
      root = b.pair(root, marks);
      continue;
    }
    path.clear();
    SymbolId a = root;
    Position i = position;
    while (!b.rule(a).leaf) {
      const Rule r = b.rule(a);
      if (i <= b.length(r.left)) {
        path.emplace_back(a, true);
        a = r.left;
      } else {
        i -= b.length(r.left);
        path.emplace_back(a, false);
        a = r.right;
      }
    }
    SymbolId cur = b.pair(marks, a);
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      const Rule r = b.rule(it->first);
      cur = it->second ? b.pair(cur, r.right) : b.pair(r.left, cur);
    }
    root = cur;
  }
  return b.build(root);
}

Slp append_sentinel(const Slp& slp, char sentinel) {
  if (slp.leaf_of(Label::terminal(sentinel))) {
    throw InvalidArgument(std::string("sentinel '") + sentinel + "' occurs in the document");
  }
  SlpBuilder b(slp);
  const SymbolId s = b.leaf(Label::terminal(sentinel));
  return b.build(b.pair(slp.start(), s));
}

Slp build_test_slp(std::string_view document) {
  if (document.empty()) throw InvalidArgument("build_test_slp: empty document");
  SlpBuilder b;
  std::unordered_map<std::string_view, SymbolId> memo;
  auto build = [&](auto&& self, std::string_view part) -> SymbolId {
    if (part.size() == 1) return b.leaf(Label::terminal(part[0]));
    if (auto it = memo.find(part); it != memo.end()) return it->second;
    const std::size_t mid = part.size() / 2;
    const SymbolId left = self(self, part.substr(0, mid));
    const SymbolId right = self(self, part.substr(mid));
    const SymbolId id = b.pair(left, right);
    memo.emplace(part, id);
    return id;
  };
  return b.build(build(build, document));
}

Slp power_of_two_slp(char c, unsigned exponent) {
  SlpBuilder b;
  SymbolId cur = b.leaf(Label::terminal(c));
  for (unsigned e = 0; e < exponent; ++e) cur = b.pair(cur, cur);
  return b.build(cur);
}

}  // namespace slpspan
