#pragma once

// Enumeration of a spanner's relation through trees over the relation
// tables: every tree stands for a set of marker sets (its yield), trees are
// produced one at a time, and each tree's yield is walked by an odometer.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "slpspan/compute.hpp"
#include "slpspan/matrices.hpp"

namespace slpspan {

/// Counts units of work so delays can be measured without a clock.
struct StepCounter {
  std::uint64_t steps = 0;
  void tick(std::uint64_t n = 1) noexcept { steps += n; }
};

struct MTreeNode {
  enum class Kind : std::uint8_t { Inner, EmptyLeaf, TerminalLeaf };
  Kind kind = Kind::EmptyLeaf;
  SymbolId symbol = 0;
  StateId from = 0;
  StateId middle = 0;  // inner nodes only
  StateId to = 0;
  Position shift = 0;  // arc label to the right child: |D(left symbol)|
  std::shared_ptr<const MTreeNode> left;
  std::shared_ptr<const MTreeNode> right;
};

using MTree = std::shared_ptr<const MTreeNode>;

struct TreeShape {
  std::size_t nodes = 0;
  std::size_t terminal_leaves = 0;
  std::size_t empty_leaves = 0;
  std::size_t height = 0;
};
TreeShape tree_shape(const MTree& tree);

/// The yield by direct recursion over its definition (reference
/// implementation for tests).
SortedRelation tree_yield(const MTree& tree, const RelationTables& tables);

/// Produces the trees rooted at (A, i, k, j), each once. k == kBaseCase
/// asks for the single-node tree of a leaf symbol or an Empty entry.
class TreeEnumerator {
 public:
  static constexpr StateId kBaseCase = static_cast<StateId>(-1);

  TreeEnumerator(const RelationTables& tables, SymbolId a, StateId i, StateId k, StateId j,
                 StepCounter* counter = nullptr);
  /// nullptr once exhausted.
  MTree next();

 private:
  std::vector<StateId> choices(SymbolId a, StateId i, StateId j) const;

  const RelationTables& tables_;
  StepCounter* counter_;
  SymbolId symbol_;
  StateId i_, k_, j_;
  bool done_ = false;
  // Inner case: states loop over (left choice, right choice).
  std::vector<StateId> left_choices_, right_choices_;
  std::size_t pair_ = 0;
  std::unique_ptr<TreeEnumerator> left_;
  std::unique_ptr<TreeEnumerator> right_;
  MTree left_tree_;
};

/// Produces yield(tree): preprocessing collects the terminal leaves with
/// their total shifts, then an odometer runs over the leaves' lists.
class YieldEnumerator {
 public:
  YieldEnumerator(const MTree& tree, const RelationTables& tables, StepCounter* counter = nullptr);
  std::optional<PartialMarkerSet> next();

 private:
  struct Leaf {
    const std::vector<PartialMarkerSet>* list;
    Position shift;
  };
  std::vector<Leaf> leaves_;
  std::vector<std::size_t> odometer_;
  StepCounter* counter_;
  bool done_ = false;
};

struct EnumerateOptions {
  /// Determinize the automaton first (duplicate-free output).
  bool determinize = true;
  std::size_t determinize_cap = std::size_t{1} << 20;
  /// Called for every tree before its yield is walked.
  std::function<void(const MTree&)> tree_observer;
};

struct DelayStats {
  std::uint64_t outputs = 0;
  std::uint64_t preprocessing_steps = 0;  // steps before the first output
  std::uint64_t max_delay = 0;            // steps between consecutive outputs
  std::uint64_t final_delay = 0;          // steps after the last output
  std::map<std::uint64_t, std::uint64_t> histogram;  // delay -> count
  std::uint64_t trees = 0;
};

/// Streams [[M]](D(S)) as span-tuples. Roots are taken by accepting state,
/// then intermediate state, ascending.
class RelationEnumerator {
 public:
  RelationEnumerator(const Slp& slp, const SpannerAutomaton& m, EnumerateOptions options = {});
  RelationEnumerator(const RelationEnumerator&) = delete;
  RelationEnumerator& operator=(const RelationEnumerator&) = delete;

  /// Next complete marker set (positions refer to D(S)); nullopt at the end.
  std::optional<PartialMarkerSet> next_marker_set();
  std::optional<SpanTuple> next();

  const RelationTables& tables() const noexcept { return tables_; }
  const DelayStats& delay_stats() const noexcept { return delay_; }
  std::uint64_t steps() const noexcept { return counter_.steps; }
  std::size_t variable_count() const noexcept { return variables_; }
  Position document_length() const noexcept { return document_length_; }

 private:
  void record_output();

  EnumerateOptions options_;
  std::size_t variables_;
  Position document_length_;
  RelationTables tables_;
  StepCounter counter_;
  std::vector<std::pair<StateId, StateId>> roots_;  // (k, j)
  std::size_t root_ = 0;
  std::unique_ptr<TreeEnumerator> trees_;
  std::unique_ptr<YieldEnumerator> yield_;
  DelayStats delay_;
  std::uint64_t last_output_steps_ = 0;
  bool finished_ = false;
};

/// Tables for enumeration: determinized (unless disabled) and with the
/// sentinel transform applied.
RelationTables prepare_enumeration_tables(const Slp& slp, const SpannerAutomaton& m, const EnumerateOptions& options);

}  // namespace slpspan
