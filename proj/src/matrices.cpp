#include "slpspan/matrices.hpp"

#include <algorithm>

namespace slpspan {

namespace {

std::uint64_t leaf_key(SymbolId a, StateId i, StateId j, std::size_t q) {
  return (static_cast<std::uint64_t>(a) * q + i) * q + j;
}

const std::vector<PartialMarkerSet> kNoSets;

}  // namespace

char reach_symbol(Reach r) {
  switch (r) {
    case Reach::Bottom: return '.';
    case Reach::Empty: return 'o';
    case Reach::Nonempty: return '*';
  }
  return '?';
}

RelationTables RelationTables::build(const Slp& slp, const SpannerAutomaton& m) {
  RelationTables t;
  t.slp_ = slp;
  t.automaton_ = m.has_epsilon() ? remove_epsilon(m) : m;
  const SpannerAutomaton& a = t.automaton_;
  const std::size_t q = a.state_count();

  // Marker-set predecessors of every state.
  std::vector<std::vector<std::pair<StateId, MarkerSet>>> set_preds(q);
  for (const auto& tr : a.transitions()) {
    if (tr.label.is_markers()) set_preds[tr.to].emplace_back(tr.from, tr.label.marker_set());
  }

  const std::size_t n = slp.symbol_count();
  t.nonbottom_.assign(n, BitMatrix());
  t.nonbottom_t_.assign(n, BitMatrix());
  t.nonempty_.assign(n, BitMatrix());
  for (SymbolId s = 0; s < n; ++s) {
    const Rule& r = slp.rule(s);
    if (r.leaf) {
      if (!r.label.is_terminal()) throw InvalidArgument("relation tables need a program over terminals only");
      BitMatrix nb(q), ne(q);
      for (const auto& tr : a.transitions()) {
        if (tr.label != r.label) continue;
        auto add = [&](StateId i, std::vector<MarkerEntry> entries) {
          auto& list = t.leaf_sets_[leaf_key(s, i, tr.to, q)];
          if (!entries.empty()) ne.set(i, tr.to);
          nb.set(i, tr.to);
          list.push_back(PartialMarkerSet::from_sorted(std::move(entries)));
        };
        add(tr.from, {});
        for (const auto& [i, set] : set_preds[tr.from]) {
          std::vector<MarkerEntry> entries;
          for (Marker mk : set.markers()) entries.push_back({1, mk.code()});
          add(i, std::move(entries));
        }
      }
      t.nonbottom_[s] = std::move(nb);
      t.nonempty_[s] = std::move(ne);
    } else {
      auto* ops = &t.counters_.word_operations;
      t.nonbottom_[s] = BitMatrix::multiply(t.nonbottom_[r.left], t.nonbottom_[r.right], ops);
      BitMatrix ne = BitMatrix::multiply(t.nonempty_[r.left], t.nonbottom_[r.right], ops);
      ne |= BitMatrix::multiply(t.nonbottom_[r.left], t.nonempty_[r.right], ops);
      t.nonempty_[s] = std::move(ne);
      t.counters_.products += 3;
    }
    t.nonbottom_t_[s] = t.nonbottom_[s].transposed();
  }
  for (auto& [key, list] : t.leaf_sets_) {
    std::sort(list.begin(), list.end(), MarkerSetLess{});
    list.erase(std::unique(list.begin(), list.end()), list.end());
    t.counters_.leaf_entries += list.size();
  }
  for (StateId j = 0; j < q; ++j) {
    if (a.is_accepting(j) && t.nonbottom_[slp.start()].test(0, j)) t.accepting_reachable_.push_back(j);
  }
  return t;
}

Reach RelationTables::reach(SymbolId a, StateId i, StateId j) const {
  if (!nonbottom_.at(a).test(i, j)) return Reach::Bottom;
  return nonempty_[a].test(i, j) ? Reach::Nonempty : Reach::Empty;
}

BitSet RelationTables::inter(SymbolId a, StateId i, StateId j) const {
  const Rule& r = slp_.rule(a);
  if (r.leaf) throw InvalidArgument("inter: leaf symbol has no intermediate states");
  const std::size_t q = states();
  BitSet out(q);
  const BitMatrix& left = nonbottom_[r.left];
  const BitMatrix& right_t = nonbottom_t_[r.right];
  for (std::size_t w = 0; w < left.stride(); ++w) out.words()[w] = left.row(i)[w] & right_t.row(j)[w];
  return out;
}

bool RelationTables::is_base(SymbolId a, StateId i, StateId j) const {
  return slp_.is_leaf(a) || reach(a, i, j) == Reach::Empty;
}

const std::vector<PartialMarkerSet>& RelationTables::leaf_sets(SymbolId leaf, StateId i, StateId j) const {
  auto it = leaf_sets_.find(leaf_key(leaf, i, j, states()));
  return it == leaf_sets_.end() ? kNoSets : it->second;
}

char pick_sentinel(const Slp& slp, const SpannerAutomaton& m) {
  for (int c : {'#', '$', '%', '&', '@', '!', '~', '^'}) {
    const char ch = static_cast<char>(c);
    if (!slp.leaf_of(Label::terminal(ch)) && m.alphabet().find(ch) == std::string::npos) return ch;
  }
  for (int c = 1; c < 256; ++c) {
    const char ch = static_cast<char>(c);
    if (!slp.leaf_of(Label::terminal(ch)) && m.alphabet().find(ch) == std::string::npos) return ch;
  }
  throw InvalidArgument("no free character for the end-of-document sentinel");
}

RelationTables build_sentinel_tables(const Slp& slp, const SpannerAutomaton& m) {
  const char sentinel = pick_sentinel(slp, m);
  return RelationTables::build(append_sentinel(slp, sentinel), make_non_tail_spanning(m, sentinel));
}

}  // namespace slpspan
