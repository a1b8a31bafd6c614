#include "slpspan/spanner.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace slpspan {

// ---------------------------------------------------------------------------
// Marked words

std::vector<Label> MarkedWord::labels() const {
  std::vector<Label> out;
  out.reserve(document.size() * 2 + 1);
  for (std::size_t i = 0; i <= document.size(); ++i) {
    if (i < sets.size() && !sets[i].empty()) out.push_back(Label::markers(sets[i]));
    if (i < document.size()) out.push_back(Label::terminal(document[i]));
  }
  return out;
}

std::string word_of(const MarkedWord& w) { return w.document; }

PartialMarkerSet markers_of(const MarkedWord& w) {
  std::vector<MarkerEntry> entries;
  for (std::size_t i = 0; i < w.sets.size(); ++i) {
    for (Marker m : w.sets[i].markers()) entries.push_back({static_cast<Position>(i + 1), m.code()});
  }
  return PartialMarkerSet::from_sorted(std::move(entries));
}

MarkedWord insert_markers(std::string_view document, const PartialMarkerSet& markers) {
  MarkedWord w{std::string(document), std::vector<MarkerSet>(document.size() + 1)};
  for (const auto& e : markers.entries()) {
    if (e.position < 1 || e.position > document.size() + 1) {
      throw InvalidArgument("marker position " + std::to_string(e.position) + " incompatible with document length " +
                            std::to_string(document.size()));
    }
    w.sets[e.position - 1].insert(Marker::from_code(e.marker));
  }
  return w;
}

std::string format_marked_word(const MarkedWord& w, const VariableSet& variables) {
  std::string out;
  for (const Label& l : w.labels()) out += l.is_terminal() ? std::string(1, l.terminal()) : format_label(l, variables);
  return out;
}

std::vector<Violation> validate_subword_marked(const MarkedWord& w, bool require_non_tail_spanning) {
  std::vector<Violation> out;
  std::map<std::uint32_t, std::size_t> open, close;
  for (std::size_t i = 0; i < w.sets.size(); ++i) {
    for (Marker m : w.sets[i].markers()) {
      auto& seen = m.close ? close : open;
      if (!seen.emplace(m.variable, i + 1).second) {
        out.push_back({"disjointness", std::string(m.close ? "close" : "open") + " marker of variable #" +
                                           std::to_string(m.variable) + " occurs in two sets"});
      }
    }
  }
  for (const auto& [v, i] : open) {
    auto it = close.find(v);
    if (it == close.end()) {
      out.push_back({"pairing", "variable #" + std::to_string(v) + " is opened but never closed"});
    } else if (it->second < i) {
      out.push_back({"order", "variable #" + std::to_string(v) + " is closed before it is opened"});
    }
  }
  for (const auto& [v, j] : close) {
    if (open.count(v) == 0) out.push_back({"pairing", "variable #" + std::to_string(v) + " is closed but never opened"});
  }
  if (require_non_tail_spanning && !w.sets.empty() && !w.sets.back().empty()) {
    out.push_back({"tail", "markers after the last character"});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Automata

SpannerAutomaton::SpannerAutomaton(std::size_t state_count, VariableSet variables, std::string alphabet)
    : accepting_(std::max<std::size_t>(state_count, 1), false), variables_(std::move(variables)) {
  for (char c : alphabet) add_terminal(c);
  reindex();
}

SpannerAutomaton SpannerAutomaton::from_parts(std::vector<bool> accepting, std::vector<Transition> transitions,
                                              VariableSet variables, std::string alphabet) {
  SpannerAutomaton m(accepting.size(), std::move(variables), std::move(alphabet));
  m.accepting_ = std::move(accepting);
  if (m.accepting_.empty()) m.accepting_.push_back(false);
  for (const auto& t : transitions) {
    if (t.from >= m.accepting_.size() || t.to >= m.accepting_.size()) throw InvalidArgument("transition state out of range");
    if (t.label.is_terminal()) m.add_terminal(t.label.terminal());
  }
  std::sort(transitions.begin(), transitions.end());
  transitions.erase(std::unique(transitions.begin(), transitions.end()), transitions.end());
  m.transitions_ = std::move(transitions);
  m.reindex();
  return m;
}

StateId SpannerAutomaton::add_state() {
  accepting_.push_back(false);
  reindex();
  return static_cast<StateId>(accepting_.size() - 1);
}

void SpannerAutomaton::set_accepting(StateId s, bool accepting) { accepting_.at(s) = accepting; }

void SpannerAutomaton::add_terminal(char c) {
  auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), c);
  if (it == alphabet_.end() || *it != c) alphabet_.insert(it, c);
}

void SpannerAutomaton::add_transition(StateId from, Label label, StateId to) {
  if (from >= state_count() || to >= state_count()) throw InvalidArgument("transition state out of range");
  if (label.is_markers() && label.marker_set().empty()) throw InvalidArgument("empty marker set label");
  if (label.is_terminal()) add_terminal(label.terminal());
  const Transition t{from, label, to};
  auto it = std::lower_bound(transitions_.begin(), transitions_.end(), t);
  if (it != transitions_.end() && *it == t) return;
  transitions_.insert(it, t);
  reindex();
}

std::span<const Transition> SpannerAutomaton::transitions_from(StateId s) const {
  return std::span<const Transition>(transitions_).subspan(offsets_.at(s), offsets_.at(s + 1) - offsets_.at(s));
}

bool SpannerAutomaton::has_epsilon() const noexcept {
  return std::any_of(transitions_.begin(), transitions_.end(), [](const Transition& t) { return t.label.is_epsilon(); });
}

void SpannerAutomaton::reindex() {
  offsets_.assign(accepting_.size() + 1, 0);
  for (const auto& t : transitions_) ++offsets_[t.from + 1];
  for (std::size_t s = 0; s < accepting_.size(); ++s) offsets_[s + 1] += offsets_[s];
  deterministic_ = true;
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    if (transitions_[i].label.is_epsilon()) deterministic_ = false;
    if (i > 0 && transitions_[i - 1].from == transitions_[i].from && transitions_[i - 1].label == transitions_[i].label) {
      deterministic_ = false;
    }
  }
}

std::string format_label(const Label& label, const VariableSet& variables) {
  if (label.is_epsilon()) return "eps";
  if (label.is_terminal()) return std::string(1, label.terminal());
  return format_marker_set(label.marker_set(), variables);
}

namespace {

std::vector<std::pair<std::string, std::size_t>> split_words(std::string_view line) {
  std::vector<std::pair<std::string, std::size_t>> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i])) != 0) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])) == 0) ++i;
    out.emplace_back(std::string(line.substr(begin, i - begin)), begin + 1);
  }
  return out;
}

std::size_t parse_count(const std::string& s, std::size_t line, std::size_t column) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) ||
      s.size() > 9) {
    throw ParseError("expected a number, got '" + s + "'", line, column);
  }
  return std::stoul(s);
}

Label parse_label(const std::string& text, const VariableSet& variables, std::size_t line, std::size_t column) {
  if (text == "eps") return Label::epsilon();
  if (text.size() == 1) return Label::terminal(text[0]);
  if (text.size() < 2 || text.front() != '{' || text.back() != '}') {
    throw ParseError("expected a terminal, 'eps' or '{...}', got '" + text + "'", line, column);
  }
  MarkerSet set;
  std::string_view body(text);
  body = body.substr(1, body.size() - 2);
  std::size_t i = 0;
  while (i < body.size()) {
    const std::size_t end = body.find(')', i);
    if (end == std::string_view::npos) throw ParseError("unterminated marker in '" + text + "'", line, column + i + 1);
    std::string_view item = body.substr(i, end - i + 1);
    bool close;
    if (item.rfind("open(", 0) == 0) {
      close = false;
      item.remove_prefix(5);
    } else if (item.rfind("close(", 0) == 0) {
      close = true;
      item.remove_prefix(6);
    } else {
      throw ParseError("expected open(<var>) or close(<var>)", line, column + i + 1);
    }
    item.remove_suffix(1);
    const auto v = variables.find(item);
    if (!v) throw ParseError("unknown variable '" + std::string(item) + "'", line, column + i + 1);
    const Marker m{*v, close};
    if (set.contains(m)) throw ParseError("marker listed twice in '" + text + "'", line, column + i + 1);
    set.insert(m);
    i = end + 1;
    if (i < body.size()) {
      if (body[i] != ',') throw ParseError("expected ',' between markers", line, column + i + 1);
      ++i;
    }
  }
  if (set.empty()) throw ParseError("marker-set label must be non-empty", line, column);
  return Label::markers(set);
}

}  // namespace

SpannerAutomaton parse_automaton(std::string_view text) {
  std::optional<std::size_t> states;
  std::vector<StateId> accepting;
  std::string alphabet;
  VariableSet variables;
  std::vector<Transition> transitions;
  bool saw_start = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto words = split_words(line);
    if (words.empty() || words[0].first[0] == '#') continue;
    const std::string& key = words[0].first;

    auto state = [&](std::size_t w) -> StateId {
      if (!states) throw ParseError("'states' must come first", line_no, words[0].second);
      const std::size_t s = parse_count(words[w].first, line_no, words[w].second);
      if (s < 1 || s > *states) {
        throw ParseError("state " + words[w].first + " out of range 1.." + std::to_string(*states), line_no,
                         words[w].second);
      }
      return static_cast<StateId>(s - 1);
    };

    if (key == "states") {
      if (words.size() != 2) throw ParseError("expected 'states <q>'", line_no, 1);
      if (states) throw ParseError("duplicate 'states'", line_no, 1);
      states = parse_count(words[1].first, line_no, words[1].second);
      if (*states == 0) throw ParseError("an automaton needs at least one state", line_no, words[1].second);
    } else if (key == "start") {
      if (words.size() != 2) throw ParseError("expected 'start 1'", line_no, 1);
      if (state(1) != 0) throw ParseError("the start state must be 1", line_no, words[1].second);
      saw_start = true;
    } else if (key == "accept") {
      for (std::size_t w = 1; w < words.size(); ++w) accepting.push_back(state(w));
    } else if (key == "alphabet") {
      for (std::size_t w = 1; w < words.size(); ++w) {
        if (words[w].first.size() != 1) throw ParseError("terminals are single characters", line_no, words[w].second);
        alphabet += words[w].first;
      }
    } else if (key == "vars") {
      if (!variables.empty()) throw ParseError("duplicate 'vars'", line_no, 1);
      std::vector<std::string> names;
      for (std::size_t w = 1; w < words.size(); ++w) names.push_back(words[w].first);
      try {
        variables = VariableSet(std::move(names));
      } catch (const InvalidArgument& e) {
        throw ParseError(e.what(), line_no, 1);
      }
    } else if (key == "trans") {
      if (words.size() < 4) throw ParseError("expected 'trans <p> <label> <q>'", line_no, 1);
      const StateId from = state(1);
      const StateId to = state(words.size() - 1);
      std::string label_text;
      for (std::size_t w = 2; w + 1 < words.size(); ++w) label_text += words[w].first;
      const Label label = parse_label(label_text, variables, line_no, words[2].second);
      if (label.is_terminal() && alphabet.find(label.terminal()) == std::string::npos) {
        throw ParseError(std::string("terminal '") + label.terminal() + "' not in the declared alphabet", line_no,
                         words[2].second);
      }
      transitions.push_back({from, label, to});
    } else {
      throw ParseError("unknown declaration '" + key + "'", line_no, 1);
    }
  }
  if (!states) throw ParseError("missing 'states' declaration", 0, 0);
  (void)saw_start;
  std::vector<bool> acc(*states, false);
  for (StateId s : accepting) acc[s] = true;
  return SpannerAutomaton::from_parts(std::move(acc), std::move(transitions), std::move(variables), alphabet);
}

std::string format_automaton(const SpannerAutomaton& m) {
  std::ostringstream out;
  out << "states " << m.state_count() << "\nstart 1\naccept";
  for (StateId s = 0; s < m.state_count(); ++s) {
    if (m.is_accepting(s)) out << ' ' << s + 1;
  }
  out << "\nalphabet";
  for (char c : m.alphabet()) out << ' ' << c;
  out << "\nvars";
  for (const auto& v : m.variables().names()) out << ' ' << v;
  out << '\n';
  for (const auto& t : m.transitions()) {
    out << "trans " << t.from + 1 << ' ' << format_label(t.label, m.variables()) << ' ' << t.to + 1 << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Acceptance

Acceptor::Acceptor(const SpannerAutomaton& input) {
  const SpannerAutomaton m = input.has_epsilon() ? remove_epsilon(input) : input;
  states_ = m.state_count();
  std::fill(std::begin(terminal_index_), std::end(terminal_index_), -1);
  for (const auto& t : m.transitions()) {
    if (t.label.is_terminal()) {
      auto& slot = terminal_index_[static_cast<unsigned char>(t.label.terminal())];
      if (slot < 0) slot = static_cast<std::int32_t>(labels_++);
    } else if (set_index_.emplace(t.label.marker_set().bits(), labels_).second) {
      ++labels_;
    }
  }
  deterministic_ = m.is_deterministic();
  accepting_ = BitSet(states_);
  for (StateId s = 0; s < states_; ++s) {
    if (m.is_accepting(s)) accepting_.set(s);
  }
  if (deterministic_) {
    next_.assign(states_ * labels_, -1);
    for (const auto& t : m.transitions()) next_[t.from * labels_ + label_index(t.label)] = static_cast<std::int32_t>(t.to);
  } else {
    step_.assign(states_ * labels_, BitSet(states_));
    for (const auto& t : m.transitions()) step_[t.from * labels_ + label_index(t.label)].set(t.to);
  }
}

std::size_t Acceptor::label_index(const Label& l) const {
  if (l.is_terminal()) {
    const auto i = terminal_index_[static_cast<unsigned char>(l.terminal())];
    return i < 0 ? labels_ : static_cast<std::size_t>(i);
  }
  if (l.is_markers()) {
    auto it = set_index_.find(l.marker_set().bits());
    return it == set_index_.end() ? labels_ : it->second;
  }
  return labels_;
}

bool Acceptor::accepts(std::span<const Label> word) const {
  if (deterministic_) {
    std::int64_t s = 0;
    for (const Label& l : word) {
      const std::size_t li = label_index(l);
      if (li == labels_) return false;
      s = next_[static_cast<std::size_t>(s) * labels_ + li];
      if (s < 0) return false;
    }
    return accepting_.test(static_cast<std::size_t>(s));
  }
  BitSet cur(states_);
  cur.set(0);
  for (const Label& l : word) {
    const std::size_t li = label_index(l);
    if (li == labels_) return false;
    BitSet nxt(states_);
    cur.for_each([&](std::size_t s) { nxt |= step_[s * labels_ + li]; });
    if (!nxt.any()) return false;
    cur = std::move(nxt);
  }
  return cur.intersects(accepting_);
}

bool Acceptor::accepts(const MarkedWord& w) const {
  const auto labels = w.labels();
  return accepts(std::span<const Label>(labels));
}

bool Acceptor::accepts(std::string_view document, std::span<const MarkerSet> sets) const {
  if (deterministic_) {
    std::int64_t s = 0;
    auto step = [&](std::size_t li) {
      if (li == labels_) return false;
      s = next_[static_cast<std::size_t>(s) * labels_ + li];
      return s >= 0;
    };
    for (std::size_t i = 0; i <= document.size(); ++i) {
      if (i < sets.size() && !sets[i].empty()) {
        auto it = set_index_.find(sets[i].bits());
        if (!step(it == set_index_.end() ? labels_ : it->second)) return false;
      }
      if (i < document.size()) {
        const auto ti = terminal_index_[static_cast<unsigned char>(document[i])];
        if (!step(ti < 0 ? labels_ : static_cast<std::size_t>(ti))) return false;
      }
    }
    return accepting_.test(static_cast<std::size_t>(s));
  }
  const MarkedWord w{std::string(document), std::vector<MarkerSet>(sets.begin(), sets.end())};
  return accepts(w);
}

bool accepts(const SpannerAutomaton& m, const MarkedWord& w) { return Acceptor(m).accepts(w); }

// ---------------------------------------------------------------------------
// Transformations

SpannerAutomaton remove_epsilon(const SpannerAutomaton& m) {
  const std::size_t q = m.state_count();
  std::vector<BitSet> closure(q, BitSet(q));
  for (StateId p = 0; p < q; ++p) {
    std::vector<StateId> stack{p};
    closure[p].set(p);
    while (!stack.empty()) {
      const StateId s = stack.back();
      stack.pop_back();
      for (const auto& t : m.transitions_from(s)) {
        if (t.label.is_epsilon() && !closure[p].test(t.to)) {
          closure[p].set(t.to);
          stack.push_back(t.to);
        }
      }
    }
  }
  std::vector<bool> accepting(q, false);
  std::vector<Transition> transitions;
  for (StateId p = 0; p < q; ++p) {
    closure[p].for_each([&](std::size_t s) {
      if (m.is_accepting(static_cast<StateId>(s))) accepting[p] = true;
      for (const auto& t : m.transitions_from(static_cast<StateId>(s))) {
        if (!t.label.is_epsilon()) transitions.push_back({p, t.label, t.to});
      }
    });
  }
  return SpannerAutomaton::from_parts(std::move(accepting), std::move(transitions), m.variables(), m.alphabet());
}

SpannerAutomaton determinize(const SpannerAutomaton& input, std::size_t state_cap) {
  const SpannerAutomaton m = input.has_epsilon() ? remove_epsilon(input) : input;
  const std::size_t q = m.state_count();
  std::map<BitSet, StateId> ids;
  std::vector<BitSet> subsets;
  BitSet start(q);
  start.set(0);
  ids.emplace(start, 0);
  subsets.push_back(start);
  std::vector<Transition> transitions;
  for (std::size_t cur = 0; cur < subsets.size(); ++cur) {
    std::map<Label, BitSet> successors;
    const BitSet here = subsets[cur];
    here.for_each([&](std::size_t s) {
      for (const auto& t : m.transitions_from(static_cast<StateId>(s))) {
        auto it = successors.try_emplace(t.label, q).first;
        it->second.set(t.to);
      }
    });
    for (auto& [label, target] : successors) {
      auto [it, inserted] = ids.emplace(target, static_cast<StateId>(subsets.size()));
      if (inserted) {
        if (subsets.size() >= state_cap) {
          throw LimitExceeded("determinization exceeds " + std::to_string(state_cap) + " states");
        }
        subsets.push_back(target);
      }
      transitions.push_back({static_cast<StateId>(cur), label, it->second});
    }
  }
  BitSet final_states(q);
  for (StateId s = 0; s < q; ++s) {
    if (m.is_accepting(s)) final_states.set(s);
  }
  std::vector<bool> accepting(subsets.size(), false);
  for (std::size_t i = 0; i < subsets.size(); ++i) accepting[i] = subsets[i].intersects(final_states);
  return SpannerAutomaton::from_parts(std::move(accepting), std::move(transitions), m.variables(), m.alphabet());
}

SpannerAutomaton make_non_tail_spanning(const SpannerAutomaton& m, char sentinel) {
  if (m.alphabet().find(sentinel) != std::string::npos) {
    throw InvalidArgument(std::string("sentinel '") + sentinel + "' is a letter of the automaton");
  }
  const std::size_t q = m.state_count();
  std::vector<bool> accepting(q + 1, false);
  accepting[q] = true;
  std::vector<Transition> transitions(m.transitions().begin(), m.transitions().end());
  for (StateId s = 0; s < q; ++s) {
    if (m.is_accepting(s)) transitions.push_back({s, Label::terminal(sentinel), static_cast<StateId>(q)});
  }
  return SpannerAutomaton::from_parts(std::move(accepting), std::move(transitions), m.variables(), m.alphabet());
}

SpannerAutomaton trim(const SpannerAutomaton& m) {
  const std::size_t q = m.state_count();
  std::vector<bool> forward(q, false), backward(q, false);
  std::vector<StateId> stack{0};
  forward[0] = true;
  while (!stack.empty()) {
    const StateId s = stack.back();
    stack.pop_back();
    for (const auto& t : m.transitions_from(s)) {
      if (!forward[t.to]) {
        forward[t.to] = true;
        stack.push_back(t.to);
      }
    }
  }
  std::vector<std::vector<StateId>> reverse(q);
  for (const auto& t : m.transitions()) reverse[t.to].push_back(t.from);
  for (StateId s = 0; s < q; ++s) {
    if (m.is_accepting(s)) {
      backward[s] = true;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    const StateId s = stack.back();
    stack.pop_back();
    for (StateId p : reverse[s]) {
      if (!backward[p]) {
        backward[p] = true;
        stack.push_back(p);
      }
    }
  }
  std::vector<std::int64_t> renumber(q, -1);
  std::vector<bool> accepting;
  for (StateId s = 0; s < q; ++s) {
    if (s == 0 || (forward[s] && backward[s])) {
      renumber[s] = static_cast<std::int64_t>(accepting.size());
      accepting.push_back(m.is_accepting(s) && forward[s] && backward[s]);
    }
  }
  std::vector<Transition> transitions;
  for (const auto& t : m.transitions()) {
    if (renumber[t.from] >= 0 && renumber[t.to] >= 0 && forward[t.from] && backward[t.to]) {
      transitions.push_back({static_cast<StateId>(renumber[t.from]), t.label, static_cast<StateId>(renumber[t.to])});
    }
  }
  return SpannerAutomaton::from_parts(std::move(accepting), std::move(transitions), m.variables(), m.alphabet());
}

// ---------------------------------------------------------------------------
// Regex compiler

namespace {

struct RegexNode {
  enum class Kind { Empty, Literal, Any, Concat, Alt, Star, Plus, Optional, Capture };
  Kind kind = Kind::Empty;
  char literal = 0;
  std::uint32_t variable = 0;
  std::vector<RegexNode> children;
};

bool is_identifier_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

class RegexParser {
 public:
  RegexParser(std::string_view text, VariableSet& variables) : text_(text), variables_(variables) {}

  RegexNode parse() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError("empty pattern", 1, 1);
    RegexNode root = parse_alt();
    skip_space();
    if (pos_ < text_.size()) {
      if (text_[pos_] == ')') fail("unbalanced ')'");
      if (text_[pos_] == '}') fail("unbalanced variable bracket '}'");
      fail("unexpected character");
    }
    return root;
  }

  const std::string& literals() const { return literals_; }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, 1, pos_ + 1); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) ++pos_;
  }

  RegexNode parse_alt() {
    RegexNode first = parse_concat();
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != '|') return first;
    RegexNode alt;
    alt.kind = RegexNode::Kind::Alt;
    alt.children.push_back(std::move(first));
    while (pos_ < text_.size() && text_[pos_] == '|') {
      ++pos_;
      alt.children.push_back(parse_concat());
      skip_space();
    }
    return alt;
  }

  RegexNode parse_concat() {
    RegexNode seq;
    seq.kind = RegexNode::Kind::Concat;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) break;
      const char c = text_[pos_];
      if (c == '|' || c == ')' || c == '}') break;
      seq.children.push_back(parse_repeat());
    }
    if (seq.children.empty()) return RegexNode{};
    if (seq.children.size() == 1) return std::move(seq.children[0]);
    return seq;
  }

  RegexNode parse_repeat() {
    RegexNode atom = parse_atom();
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) break;
      RegexNode::Kind kind;
      switch (text_[pos_]) {
        case '*': kind = RegexNode::Kind::Star; break;
        case '+': kind = RegexNode::Kind::Plus; break;
        case '?': kind = RegexNode::Kind::Optional; break;
        default: return atom;
      }
      ++pos_;
      RegexNode wrap;
      wrap.kind = kind;
      wrap.children.push_back(std::move(atom));
      atom = std::move(wrap);
    }
    return atom;
  }

  RegexNode literal(char c) {
    RegexNode n;
    n.kind = RegexNode::Kind::Literal;
    n.literal = c;
    if (literals_.find(c) == std::string::npos) literals_ += c;
    return n;
  }

  RegexNode parse_atom() {
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      RegexNode inner = parse_alt();
      skip_space();
      if (pos_ >= text_.size() || text_[pos_] != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (c == '.') {
      ++pos_;
      RegexNode n;
      n.kind = RegexNode::Kind::Any;
      return n;
    }
    if (c == '\\') {
      if (pos_ + 1 >= text_.size()) fail("dangling escape");
      pos_ += 2;
      return literal(text_[pos_ - 1]);
    }
    if (c == '*' || c == '+' || c == '?') fail("repetition without operand");
    if (c == '{') fail("'{' must follow a variable name");
    if (is_identifier_char(c)) {
      std::size_t end = pos_;
      while (end < text_.size() && is_identifier_char(text_[end])) ++end;
      if (end < text_.size() && text_[end] == '{') return parse_capture(end);
    }
    ++pos_;
    return literal(c);
  }

  RegexNode parse_capture(std::size_t brace) {
    const std::string name(text_.substr(pos_, brace - pos_));
    const std::size_t name_pos = pos_;
    std::uint32_t var;
    if (declared_) {
      const auto v = variables_.find(name);
      if (!v) throw ParseError("unknown variable '" + name + "'", 1, name_pos + 1);
      var = *v;
    } else {
      var = variables_.add(name);
    }
    pos_ = brace + 1;
    RegexNode body = parse_alt();
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != '}') {
      throw ParseError("unbalanced variable brackets: '" + name + "{' is not closed", 1, name_pos + 1);
    }
    if (text_.substr(pos_ + 1, name.size()) != name) {
      fail("unbalanced variable brackets: expected '}" + name + "'");
    }
    pos_ += 1 + name.size();
    RegexNode n;
    n.kind = RegexNode::Kind::Capture;
    n.variable = var;
    n.children.push_back(std::move(body));
    return n;
  }

  std::string_view text_;
  VariableSet& variables_;
  bool declared_ = !variables_.empty();
  std::size_t pos_ = 0;
  std::string literals_;
};

// Variables used by a subexpression; rejects any variable that could be
// used twice in one accepted word.
std::uint64_t check_variables(const RegexNode& n, const VariableSet& vars) {
  auto reuse = [&](std::uint64_t mask) -> std::string {
    for (std::uint32_t v = 0; v < vars.size(); ++v) {
      if ((mask >> v) & 1U) return vars.name(v);
    }
    return "?";
  };
  switch (n.kind) {
    case RegexNode::Kind::Empty:
    case RegexNode::Kind::Literal:
    case RegexNode::Kind::Any:
      return 0;
    case RegexNode::Kind::Concat: {
      std::uint64_t mask = 0;
      for (const auto& c : n.children) {
        const std::uint64_t m = check_variables(c, vars);
        if ((mask & m) != 0) throw ParseError("variable reuse: '" + reuse(mask & m) + "'", 0, 0);
        mask |= m;
      }
      return mask;
    }
    case RegexNode::Kind::Alt: {
      std::uint64_t mask = 0;
      for (const auto& c : n.children) mask |= check_variables(c, vars);
      return mask;
    }
    case RegexNode::Kind::Star:
    case RegexNode::Kind::Plus: {
      const std::uint64_t m = check_variables(n.children[0], vars);
      if (m != 0) throw ParseError("variable reuse: '" + reuse(m) + "' under repetition", 0, 0);
      return 0;
    }
    case RegexNode::Kind::Optional:
      return check_variables(n.children[0], vars);
    case RegexNode::Kind::Capture: {
      const std::uint64_t m = check_variables(n.children[0], vars);
      const std::uint64_t self = std::uint64_t{1} << n.variable;
      if ((m & self) != 0) throw ParseError("variable reuse: '" + vars.name(n.variable) + "' nested in itself", 0, 0);
      return m | self;
    }
  }
  return 0;
}

class Thompson {
 public:
  explicit Thompson(std::string alphabet) : alphabet_(std::move(alphabet)) {}

  std::pair<StateId, StateId> build(const RegexNode& n) {
    const StateId s = fresh();
    const StateId e = fresh();
    switch (n.kind) {
      case RegexNode::Kind::Empty:
        edge(s, Label::epsilon(), e);
        break;
      case RegexNode::Kind::Literal:
        edge(s, Label::terminal(n.literal), e);
        break;
      case RegexNode::Kind::Any:
        for (char c : alphabet_) edge(s, Label::terminal(c), e);
        break;
      case RegexNode::Kind::Concat: {
        StateId cur = s;
        for (const auto& c : n.children) {
          auto [cs, ce] = build(c);
          edge(cur, Label::epsilon(), cs);
          cur = ce;
        }
        edge(cur, Label::epsilon(), e);
        break;
      }
      case RegexNode::Kind::Alt:
        for (const auto& c : n.children) {
          auto [cs, ce] = build(c);
          edge(s, Label::epsilon(), cs);
          edge(ce, Label::epsilon(), e);
        }
        break;
      case RegexNode::Kind::Star:
      case RegexNode::Kind::Plus:
      case RegexNode::Kind::Optional: {
        auto [cs, ce] = build(n.children[0]);
        edge(s, Label::epsilon(), cs);
        edge(ce, Label::epsilon(), e);
        if (n.kind != RegexNode::Kind::Plus) edge(s, Label::epsilon(), e);
        if (n.kind != RegexNode::Kind::Optional) edge(ce, Label::epsilon(), cs);
        break;
      }
      case RegexNode::Kind::Capture: {
        auto [cs, ce] = build(n.children[0]);
        edge(s, Label::markers(MarkerSet::of({Marker{n.variable, false}})), cs);
        edge(ce, Label::markers(MarkerSet::of({Marker{n.variable, true}})), e);
        break;
      }
    }
    return {s, e};
  }

  std::size_t state_count() const noexcept { return states_; }
  std::vector<Transition>& transitions() noexcept { return transitions_; }

 private:
  StateId fresh() { return static_cast<StateId>(states_++); }
  void edge(StateId a, Label l, StateId b) { transitions_.push_back({a, l, b}); }

  std::string alphabet_;
  std::size_t states_ = 0;
  std::vector<Transition> transitions_;
};

// Adds p -(S1 u S2)-> r for p -S1-> q -S2-> r with disjoint marker sets,
// up to a fixpoint. Singleton transitions stay.
SpannerAutomaton saturate_marker_sets(const SpannerAutomaton& m) {
  std::set<Transition> all(m.transitions().begin(), m.transitions().end());
  std::vector<std::vector<Transition>> marker_out(m.state_count());
  for (const auto& t : all) {
    if (t.label.is_markers()) marker_out[t.from].push_back(t);
  }
  std::vector<Transition> work;
  for (const auto& t : all) {
    if (t.label.is_markers()) work.push_back(t);
  }
  while (!work.empty()) {
    const Transition t = work.back();
    work.pop_back();
    // t as the first half.
    for (std::size_t i = 0; i < marker_out[t.to].size(); ++i) {
      const Transition u = marker_out[t.to][i];
      if (t.label.marker_set().intersects(u.label.marker_set())) continue;
      const Transition joined{t.from, Label::markers(t.label.marker_set() | u.label.marker_set()), u.to};
      if (all.insert(joined).second) {
        marker_out[joined.from].push_back(joined);
        work.push_back(joined);
      }
    }
    // t as the second half.
    for (StateId p = 0; p < m.state_count(); ++p) {
      for (std::size_t i = 0; i < marker_out[p].size(); ++i) {
        const Transition u = marker_out[p][i];
        if (u.to != t.from || u.label.marker_set().intersects(t.label.marker_set())) continue;
        const Transition joined{u.from, Label::markers(u.label.marker_set() | t.label.marker_set()), t.to};
        if (all.insert(joined).second) {
          marker_out[joined.from].push_back(joined);
          work.push_back(joined);
        }
      }
    }
  }
  std::vector<bool> accepting(m.state_count());
  for (StateId s = 0; s < m.state_count(); ++s) accepting[s] = m.is_accepting(s);
  return SpannerAutomaton::from_parts(std::move(accepting), std::vector<Transition>(all.begin(), all.end()),
                                      m.variables(), m.alphabet());
}

}  // namespace

SpannerAutomaton compile_spanner_regex(std::string_view pattern, std::string_view alphabet,
                                       const VariableSet& variables) {
  VariableSet vars = variables;
  RegexParser parser(pattern, vars);
  const RegexNode root = parser.parse();
  std::string sigma(alphabet);
  if (sigma.empty()) {
    sigma = parser.literals();
  } else {
    for (char c : parser.literals()) {
      if (sigma.find(c) == std::string::npos) {
        throw ParseError(std::string("terminal '") + c + "' not in the alphabet", 0, 0);
      }
    }
  }
  std::sort(sigma.begin(), sigma.end());
  sigma.erase(std::unique(sigma.begin(), sigma.end()), sigma.end());
  check_variables(root, vars);

  Thompson builder(sigma);
  const auto [s, e] = builder.build(root);
  // State 0 is the fragment start by construction.
  std::vector<bool> accepting(builder.state_count(), false);
  accepting[e] = true;
  (void)s;
  const auto nfa = SpannerAutomaton::from_parts(std::move(accepting), std::move(builder.transitions()), vars, sigma);
  return trim(saturate_marker_sets(remove_epsilon(nfa)));
}

}  // namespace slpspan
