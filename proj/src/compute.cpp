#include "slpspan/compute.hpp"

#include <algorithm>
#include <queue>
#include <unordered_map>

namespace slpspan {

SortedRelation merge_product(const SortedRelation& left, const SortedRelation& right, Position shift) {
  SortedRelation out;
  out.reserve(left.size() * right.size());
  for (const auto& b : left) {
    if (b.max_position() > shift) throw InvalidArgument("merge_product: left element extends past the shift");
    for (const auto& c : right) out.push_back(join(b, c, shift));
  }
  return out;
}

SortedRelation merge_union(const std::vector<const SortedRelation*>& lists) {
  if (lists.size() == 1) return *lists[0];
  struct Cursor {
    const SortedRelation* list;
    std::size_t index;
  };
  auto greater = [](const Cursor& a, const Cursor& b) {
    return compare_marker_sets((*a.list)[a.index], (*b.list)[b.index]) > 0;
  };
  std::priority_queue<Cursor, std::vector<Cursor>, decltype(greater)> heap(greater);
  std::size_t total = 0;
  for (const auto* l : lists) {
    if (!l->empty()) heap.push({l, 0});
    total += l->size();
  }
  SortedRelation out;
  out.reserve(total);
  while (!heap.empty()) {
    Cursor c = heap.top();
    heap.pop();
    const auto& value = (*c.list)[c.index];
    if (out.empty() || !(out.back() == value)) out.push_back(value);
    if (++c.index < c.list->size()) heap.push(c);
  }
  return out;
}

SortedRelation merge_union(const std::vector<SortedRelation>& lists) {
  std::vector<const SortedRelation*> ptrs;
  for (const auto& l : lists) ptrs.push_back(&l);
  return merge_union(ptrs);
}

namespace {

class Evaluator {
 public:
  Evaluator(const RelationTables& tables, const ComputeOptions& options, ComputeStats& stats)
      : tables_(tables), options_(options), stats_(stats) {
    empty_set_.push_back(PartialMarkerSet{});
  }

  const SortedRelation& get(SymbolId a, StateId i, StateId j) {
    switch (tables_.reach(a, i, j)) {
      case Reach::Bottom: return none_;
      case Reach::Empty: return empty_set_;
      case Reach::Nonempty: break;
    }
    const Slp& slp = tables_.slp();
    if (slp.is_leaf(a)) return tables_.leaf_sets(a, i, j);
    const std::size_t q = tables_.states();
    const std::uint64_t key = (static_cast<std::uint64_t>(a) * q + i) * q + j;
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    const Rule& r = slp.rule(a);
    const Position shift = slp.length(r.left);
    std::vector<SortedRelation> parts;
    tables_.inter(a, i, j).for_each([&](std::size_t k) {
      const auto kk = static_cast<StateId>(k);
      const SortedRelation& left = get(r.left, i, kk);
      const SortedRelation& right = get(r.right, kk, j);
      parts.push_back(merge_product(left, right, shift));
      stats_.max_list_size = std::max<std::uint64_t>(stats_.max_list_size, parts.back().size());
    });
    SortedRelation result = merge_union(parts);
    ++stats_.entries_computed;
    stats_.max_list_size = std::max<std::uint64_t>(stats_.max_list_size, result.size());
    for (const auto& s : result) stats_.stored_bytes += sizeof(PartialMarkerSet) + s.size() * sizeof(MarkerEntry);
    if (options_.memory_cap != 0 && stats_.stored_bytes > options_.memory_cap) {
      throw LimitExceeded("relation computation exceeds the memory cap of " + std::to_string(options_.memory_cap) +
                          " bytes");
    }
    return memo_.emplace(key, std::move(result)).first->second;
  }

 private:
  const RelationTables& tables_;
  const ComputeOptions& options_;
  ComputeStats& stats_;
  SortedRelation none_;
  SortedRelation empty_set_;
  std::unordered_map<std::uint64_t, SortedRelation> memo_;
};

}  // namespace

SortedRelation compute_marker_sets(const RelationTables& tables, const ComputeOptions& options, ComputeStats* stats) {
  ComputeStats local;
  ComputeStats& s = stats ? *stats : local;
  Evaluator eval(tables, options, s);
  std::vector<SortedRelation> tops;
  for (StateId j : tables.accepting_reachable()) tops.push_back(eval.get(tables.slp().start(), 0, j));
  return merge_union(tops);
}

ComputedRelation compute_relation(const Slp& slp, const SpannerAutomaton& m, const ComputeOptions& options) {
  const RelationTables tables = build_sentinel_tables(slp, m);
  ComputedRelation out;
  try {
    out.marker_sets = compute_marker_sets(tables, options, &out.stats);
    out.tuples.reserve(out.marker_sets.size());
    for (const auto& set : out.marker_sets) {
      out.tuples.push_back(marker_set_to_tuple(set, m.variables().size(), slp.document_length()));
    }
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(std::string("automaton accepts a word that is not subword-marked: ") + e.what());
  }
  return out;
}

}  // namespace slpspan
