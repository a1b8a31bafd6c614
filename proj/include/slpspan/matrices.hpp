#pragma once

// Per-symbol relation tables shared by computation and enumeration:
// three-valued reachability, intermediate states of inner rules, and the
// marker-set lists of leaf symbols.

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "slpspan/bits.hpp"
#include "slpspan/slp.hpp"
#include "slpspan/spanner.hpp"

namespace slpspan {

/// No marked word / only the unmarked word / some word with markers.
enum class Reach : std::uint8_t { Bottom, Empty, Nonempty };

char reach_symbol(Reach r);

class RelationTables {
 public:
  struct Counters {
    std::uint64_t products = 0;
    std::uint64_t word_operations = 0;
    std::uint64_t leaf_entries = 0;
  };

  /// The automaton should be non-tail-spanning; epsilon transitions are
  /// removed here. The program must have terminal leaves only.
  static RelationTables build(const Slp& slp, const SpannerAutomaton& m);

  const Slp& slp() const noexcept { return slp_; }
  const SpannerAutomaton& automaton() const noexcept { return automaton_; }
  std::size_t states() const noexcept { return automaton_.state_count(); }

  Reach reach(SymbolId a, StateId i, StateId j) const;
  /// States k with reach(B,i,k) and reach(C,k,j) both non-bottom, for an
  /// inner rule A -> B C.
  BitSet inter(SymbolId a, StateId i, StateId j) const;
  /// True when enumeration treats (A,i,j) as a leaf: A is a leaf symbol or
  /// reach(A,i,j) is Empty.
  bool is_base(SymbolId a, StateId i, StateId j) const;
  /// Sorted (by compare_marker_sets) marker sets of a leaf symbol; every
  /// entry is at position 1.
  const std::vector<PartialMarkerSet>& leaf_sets(SymbolId leaf, StateId i, StateId j) const;
  /// Accepting states j with reach(S, start, j) non-bottom, ascending.
  const std::vector<StateId>& accepting_reachable() const noexcept { return accepting_reachable_; }

  const Counters& counters() const noexcept { return counters_; }

 private:
  Slp slp_;
  SpannerAutomaton automaton_;
  std::vector<BitMatrix> nonbottom_;
  std::vector<BitMatrix> nonbottom_t_;
  std::vector<BitMatrix> nonempty_;
  std::unordered_map<std::uint64_t, std::vector<PartialMarkerSet>> leaf_sets_;
  std::vector<StateId> accepting_reachable_;
  Counters counters_;
};

/// A terminal occurring neither in the program nor in the automaton.
char pick_sentinel(const Slp& slp, const SpannerAutomaton& m);

/// Tables for (D(S) s, M') where s is a fresh sentinel and M' accepts
/// { w s | w in L(M) }. Positions are unchanged; the original document
/// length is tables.slp().document_length() - 1.
RelationTables build_sentinel_tables(const Slp& slp, const SpannerAutomaton& m);

}  // namespace slpspan
