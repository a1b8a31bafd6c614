#pragma once

// Full materialization of a spanner's relation over a compressed document,
// keeping every intermediate set of marker sets as a sorted list.

#include <cstdint>
#include <vector>

#include "slpspan/matrices.hpp"

namespace slpspan {

/// Strictly increasing under compare_marker_sets.
using SortedRelation = std::vector<PartialMarkerSet>;

/// { b join_shift c } for b in left, c in right, produced in order by the
/// nested loop (outer left, inner right). Every position of `left` must be
/// <= shift.
SortedRelation merge_product(const SortedRelation& left, const SortedRelation& right, Position shift);

/// k-way merge of sorted lists, dropping duplicates.
SortedRelation merge_union(const std::vector<const SortedRelation*>& lists);
SortedRelation merge_union(const std::vector<SortedRelation>& lists);

struct ComputeOptions {
  /// Rough byte budget for memoized lists; 0 means unlimited.
  std::uint64_t memory_cap = 0;
};

struct ComputeStats {
  std::uint64_t entries_computed = 0;
  std::uint64_t max_list_size = 0;
  std::uint64_t stored_bytes = 0;
};

/// Union over accepting j of M_S[start, j] on prepared tables.
SortedRelation compute_marker_sets(const RelationTables& tables, const ComputeOptions& options = {},
                                   ComputeStats* stats = nullptr);

struct ComputedRelation {
  SortedRelation marker_sets;
  std::vector<SpanTuple> tuples;  // same order as marker_sets
  ComputeStats stats;
};

/// [[M]](D(S)) via the sentinel transform; positions refer to D(S).
ComputedRelation compute_relation(const Slp& slp, const SpannerAutomaton& m, const ComputeOptions& options = {});

}  // namespace slpspan
