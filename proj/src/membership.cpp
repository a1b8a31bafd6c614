#include "slpspan/membership.hpp"

#include <map>

namespace slpspan {

namespace {

std::map<Label, BitMatrix> letter_matrices(const SpannerAutomaton& m) {
  std::map<Label, BitMatrix> out;
  for (const auto& t : m.transitions()) {
    auto it = out.try_emplace(t.label, m.state_count()).first;
    it->second.set(t.from, t.to);
  }
  return out;
}

// Leaf matrices supplied by the caller, products for inner rules.
template <class LeafMatrix>
std::vector<BitMatrix> fold(const Slp& slp, LeafMatrix&& leaf, MatrixStats* stats) {
  std::vector<BitMatrix> mats(slp.symbol_count());
  for (SymbolId a = 0; a < slp.symbol_count(); ++a) {
    const Rule& r = slp.rule(a);
    if (r.leaf) {
      mats[a] = leaf(r.label);
    } else {
      mats[a] = BitMatrix::multiply(mats[r.left], mats[r.right], stats ? &stats->word_operations : nullptr);
      if (stats) ++stats->products;
    }
  }
  return mats;
}

}  // namespace

std::vector<BitMatrix> transition_matrices(const Slp& slp, const SpannerAutomaton& input, MatrixStats* stats) {
  const SpannerAutomaton m = input.has_epsilon() ? remove_epsilon(input) : input;
  const auto letters = letter_matrices(m);
  const BitMatrix zero(m.state_count());
  return fold(slp,
              [&](const Label& l) {
                auto it = letters.find(l);
                return it == letters.end() ? zero : it->second;
              },
              stats);
}

bool slp_membership(const Slp& slp, const SpannerAutomaton& input, MatrixStats* stats) {
  const SpannerAutomaton m = input.has_epsilon() ? remove_epsilon(input) : input;
  const auto mats = transition_matrices(slp, m, stats);
  const BitMatrix& top = mats[slp.start()];
  for (StateId j = 0; j < m.state_count(); ++j) {
    if (top.test(0, j) && m.is_accepting(j)) return true;
  }
  return false;
}

// Every terminal may be preceded by at most one marker-set letter, and one
// more may follow the last terminal: exactly the shape of the words
// insert_markers produces.
bool check_nonempty(const Slp& slp, const SpannerAutomaton& input, MatrixStats* stats) {
  const SpannerAutomaton m = input.has_epsilon() ? remove_epsilon(input) : input;
  const std::size_t q = m.state_count();
  const auto letters = letter_matrices(m);
  BitMatrix optional_set = BitMatrix::identity(q);
  for (const auto& [label, mat] : letters) {
    if (label.is_markers()) optional_set |= mat;
  }
  const BitMatrix zero(q);
  const auto mats = fold(slp,
                         [&](const Label& l) {
                           auto it = letters.find(l);
                           if (it == letters.end()) return zero;
                           if (!l.is_terminal()) return it->second;
                           return BitMatrix::multiply(optional_set, it->second);
                         },
                         stats);
  const BitMatrix& top = mats[slp.start()];
  for (StateId k = 0; k < q; ++k) {
    if (!top.test(0, k)) continue;
    for (StateId j = 0; j < q; ++j) {
      if (optional_set.test(k, j) && m.is_accepting(j)) return true;
    }
  }
  return false;
}

bool model_check(const Slp& slp, const SpannerAutomaton& m, const SpanTuple& tuple, MatrixStats* stats) {
  if (tuple.variable_count() != m.variables().size()) {
    throw InvalidArgument("tuple has " + std::to_string(tuple.variable_count()) + " variables, automaton has " +
                          std::to_string(m.variables().size()));
  }
  const PartialMarkerSet markers = tuple_to_marker_set(tuple);
  if (markers.max_position() > slp.document_length() + 1) {
    throw InvalidArgument("tuple incompatible with a document of length " + std::to_string(slp.document_length()));
  }
  return slp_membership(insert_markers_into_slp(slp, markers), m, stats);
}

}  // namespace slpspan
