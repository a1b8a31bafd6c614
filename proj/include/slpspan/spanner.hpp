#pragma once

// Marked words and spanner automata over terminals and marker-set letters.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "slpspan/bits.hpp"
#include "slpspan/types.hpp"

namespace slpspan {

/// A1 b1 A2 b2 ... An bn A(n+1): the document plus one (possibly empty)
/// marker set before each character and one after the last.
struct MarkedWord {
  std::string document;
  std::vector<MarkerSet> sets;  // size document.size() + 1

  /// The alternating letter sequence with empty sets omitted.
  std::vector<Label> labels() const;
  friend bool operator==(const MarkedWord&, const MarkedWord&) = default;
};

std::string word_of(const MarkedWord& w);
PartialMarkerSet markers_of(const MarkedWord& w);
/// Requires every position <= |doc| + 1.
MarkedWord insert_markers(std::string_view document, const PartialMarkerSet& markers);
/// "{open(x)}ab{open(y),close(x)}b..."
std::string format_marked_word(const MarkedWord& w, const VariableSet& variables);

struct Violation {
  std::string kind;  // "disjointness", "order", "pairing" or "tail"
  std::string detail;
};

/// Checks that w encodes a span-tuple: every marker occurs at most once,
/// open and close come in pairs, and open(x) is not after close(x).
/// With require_non_tail_spanning the last set must be empty as well.
std::vector<Violation> validate_subword_marked(const MarkedWord& w, bool require_non_tail_spanning = false);

struct Transition {
  StateId from = 0;
  Label label;
  StateId to = 0;
  friend constexpr auto operator<=>(const Transition&, const Transition&) noexcept = default;
};

/// NFA over terminals, non-empty marker sets and epsilon. State 0 is the
/// start state (printed as 1).
class SpannerAutomaton {
 public:
  SpannerAutomaton() : SpannerAutomaton(1) {}
  explicit SpannerAutomaton(std::size_t state_count, VariableSet variables = {}, std::string alphabet = {});
  /// Bulk construction; sorts and deduplicates once.
  static SpannerAutomaton from_parts(std::vector<bool> accepting, std::vector<Transition> transitions,
                                     VariableSet variables, std::string alphabet);

  std::size_t state_count() const noexcept { return accepting_.size(); }
  StateId add_state();
  void set_accepting(StateId s, bool accepting = true);
  bool is_accepting(StateId s) const { return accepting_.at(s); }
  /// Terminals are added to the alphabet.
  void add_transition(StateId from, Label label, StateId to);

  /// Sorted, duplicate-free.
  std::span<const Transition> transitions() const noexcept { return transitions_; }
  std::span<const Transition> transitions_from(StateId s) const;
  /// Number of transitions (|delta|).
  std::size_t size() const noexcept { return transitions_.size(); }

  /// Sorted terminals.
  const std::string& alphabet() const noexcept { return alphabet_; }
  void add_terminal(char c);
  const VariableSet& variables() const noexcept { return variables_; }

  bool has_epsilon() const noexcept;
  /// No epsilon and at most one successor per (state, label).
  bool is_deterministic() const noexcept { return deterministic_; }

  friend bool operator==(const SpannerAutomaton& a, const SpannerAutomaton& b) {
    return a.accepting_ == b.accepting_ && a.transitions_ == b.transitions_ && a.alphabet_ == b.alphabet_ &&
           a.variables_ == b.variables_;
  }

 private:
  void reindex();
  std::vector<bool> accepting_;
  std::vector<Transition> transitions_;
  std::vector<std::size_t> offsets_;
  std::string alphabet_;
  VariableSet variables_;
  bool deterministic_ = true;
};

SpannerAutomaton parse_automaton(std::string_view text);
std::string format_automaton(const SpannerAutomaton& m);
std::string format_label(const Label& label, const VariableSet& variables);

/// Runs an automaton on letter sequences (epsilon removed up front).
class Acceptor {
 public:
  explicit Acceptor(const SpannerAutomaton& m);
  bool accepts(std::span<const Label> word) const;
  bool accepts(const MarkedWord& w) const;
  /// Document plus one marker set per position 1..|doc|+1 (sets[0] is
  /// position 1).
  bool accepts(std::string_view document, std::span<const MarkerSet> sets) const;

 private:
  std::size_t label_index(const Label& l) const;
  std::size_t states_ = 0;
  std::size_t labels_ = 0;
  std::int32_t terminal_index_[256];
  std::unordered_map<std::uint64_t, std::size_t> set_index_;
  // DFA path: successor per (state, label), -1 if none.
  bool deterministic_ = false;
  std::vector<std::int32_t> next_;
  // NFA path: successor set per (state, label).
  std::vector<BitSet> step_;
  BitSet accepting_;
};

bool accepts(const SpannerAutomaton& m, const MarkedWord& w);

/// Language-preserving epsilon elimination: p -l-> r whenever some q in the
/// epsilon closure of p has q -l-> r; p accepts if its closure meets F.
SpannerAutomaton remove_epsilon(const SpannerAutomaton& m);

/// Subset construction over the occurring letters; no dead state.
SpannerAutomaton determinize(const SpannerAutomaton& m, std::size_t state_cap = std::size_t{1} << 20);

/// L(M') = { w s | w in L(M) } for the sentinel letter s.
SpannerAutomaton make_non_tail_spanning(const SpannerAutomaton& m, char sentinel);

/// Removes states not on a path from the start to an accepting state and
/// renumbers the rest in order (the start stays 0).
SpannerAutomaton trim(const SpannerAutomaton& m);

/// Regex syntax: terminals, '.', '|', '*', '+', '?', '(' ')', and captures
/// name{ ... }name. Backslash escapes a special character; whitespace is
/// ignored. An empty `variables` set declares variables in order of use.
SpannerAutomaton compile_spanner_regex(std::string_view pattern, std::string_view alphabet,
                                       const VariableSet& variables = {});

}  // namespace slpspan
