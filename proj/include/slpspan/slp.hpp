#pragma once

// Straight-line programs in normal form: leaf rules T -> x and inner rules
// A -> B C. Symbols are numbered so that children precede their parents.

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "slpspan/types.hpp"

namespace slpspan {

using SymbolId = std::uint32_t;

struct Rule {
  bool leaf = true;
  Label label;          // leaf rules
  SymbolId left = 0;    // inner rules
  SymbolId right = 0;
};

class Slp {
 public:
  std::size_t symbol_count() const noexcept { return rules_.size(); }
  const Rule& rule(SymbolId a) const { return rules_.at(a); }
  bool is_leaf(SymbolId a) const { return rules_.at(a).leaf; }
  /// |D(A)|
  Position length(SymbolId a) const { return lengths_.at(a); }
  /// depth(T_x) = 1, depth(A) = 1 + max(depth(B), depth(C)).
  std::uint32_t depth(SymbolId a) const { return depths_.at(a); }
  const std::string& name(SymbolId a) const { return names_.at(a); }
  std::optional<SymbolId> find(std::string_view name) const;

  SymbolId start() const noexcept { return start_; }
  Position document_length() const { return lengths_.at(start_); }
  std::uint32_t depth() const { return depths_.at(start_); }
  /// |N| + total right-hand-side length.
  std::size_t size() const noexcept;
  std::optional<SymbolId> leaf_of(Label label) const;
  /// Labels of all leaf rules, sorted.
  std::vector<Label> alphabet() const;

 private:
  friend class SlpBuilder;
  std::vector<Rule> rules_;
  std::vector<Position> lengths_;
  std::vector<std::uint32_t> depths_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, SymbolId> by_name_;
  std::map<Label, SymbolId> leaves_;
  SymbolId start_ = 0;
};

class SlpBuilder {
 public:
  SlpBuilder() = default;
  /// Continue from an existing program (its symbols keep their ids).
  explicit SlpBuilder(const Slp& base);

  /// The unique leaf for `label`, created on first use.
  SymbolId leaf(Label label, std::string name = {});
  SymbolId pair(SymbolId left, SymbolId right, std::string name = {});
  Position length(SymbolId a) const { return slp_.lengths_.at(a); }
  const Rule& rule(SymbolId a) const { return slp_.rules_.at(a); }
  std::size_t symbol_count() const noexcept { return slp_.rules_.size(); }

  /// Keeps every symbol (the program may contain unreachable rules).
  Slp build(SymbolId start) const;

 private:
  std::string unique_name(std::string base);
  Slp slp_;
  std::uint64_t fresh_ = 0;
};

/// A grammar as written in the text format, before normalization.
struct RawGrammar {
  struct Item {
    bool terminal = false;
    char character = 0;
    std::size_t symbol = 0;  // index into names
  };
  std::vector<std::string> names;
  std::vector<std::vector<Item>> rules;  // parallel to names
  std::size_t start = 0;

  /// |N| + total right-hand-side length.
  std::size_t size() const noexcept;
};

/// Parses the SLP text format. Checks for duplicate rules, undefined
/// symbols, a missing start and cycles.
RawGrammar parse_slp(std::string_view text);
RawGrammar parse_slp(std::istream& in);

/// Normal form: leaves shared per terminal, long rules binarized
/// left-to-right, unit rules aliased. Only rules reachable from the start
/// are kept.
Slp normalize(const RawGrammar& grammar);

/// parse_slp followed by normalize.
Slp load_slp(std::string_view text);

/// Text format of a normal-form program (terminal leaves only).
std::string format_slp(const Slp& slp);

/// The derived document. Throws LimitExceeded if longer than `limit`;
/// InvalidArgument if it contains marker-set leaves.
std::string expand(const Slp& slp, Position limit);
std::string expand(const Slp& slp, SymbolId a, Position limit);
std::vector<Label> expand_labels(const Slp& slp, Position limit);

/// D(S)[i], 1-based, by descending through the derived lengths.
Label char_at(const Slp& slp, Position i);

/// A program deriving insert_markers(D(S), markers): copies one root-to-leaf
/// path per marked position and replaces the leaf T_x by a pair
/// (T_markers, T_x). Tail markers are appended after the last leaf.
Slp insert_markers_into_slp(const Slp& slp, const PartialMarkerSet& markers);

/// New start S' -> S T_sentinel. The sentinel must not occur in S.
Slp append_sentinel(const Slp& slp, char sentinel);

/// Balanced binary splitting with identical substrings shared.
Slp build_test_slp(std::string_view document);

/// a^(2^exponent) with exponent + 1 rules.
Slp power_of_two_slp(char c, unsigned exponent);

}  // namespace slpspan
