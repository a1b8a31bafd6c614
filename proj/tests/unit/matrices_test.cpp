#include <doctest.h>

#include <map>

#include "fixtures.hpp"
#include "instances.hpp"
#include "slpspan/matrices.hpp"

using namespace slpspan;

namespace {

// States reached from `from` reading `word` (no epsilon arcs).
std::vector<bool> run(const SpannerAutomaton& m, StateId from, const std::vector<Label>& word) {
  std::vector<bool> cur(m.state_count(), false);
  cur[from] = true;
  for (const Label& l : word) {
    std::vector<bool> next(m.state_count(), false);
    for (StateId s = 0; s < m.state_count(); ++s) {
      if (!cur[s]) continue;
      for (const auto& t : m.transitions_from(s)) {
        if (t.label == l) next[t.to] = true;
      }
    }
    cur = std::move(next);
  }
  return cur;
}

// Every partial marker set over `variables` with positions in [1, length].
std::vector<PartialMarkerSet> all_partial_sets(std::size_t variables, Position length) {
  std::vector<PartialMarkerSet> out;
  const std::size_t codes = 2 * variables;
  std::vector<Position> pos(codes, 0);  // 0 = absent
  for (;;) {
    std::vector<MarkerEntry> e;
    for (std::uint32_t c = 0; c < codes; ++c) {
      if (pos[c]) e.push_back({pos[c], c});
    }
    out.push_back(PartialMarkerSet::from_entries(std::move(e)));
    std::size_t c = 0;
    while (c < codes && ++pos[c] > length) pos[c++] = 0;
    if (c == codes) break;
  }
  return out;
}

// Exhaustive M_A[i,j] for one symbol.
std::map<std::pair<StateId, StateId>, std::vector<PartialMarkerSet>> exhaustive(const RelationTables& t, SymbolId a) {
  const SpannerAutomaton& m = t.automaton();
  const std::string text = expand(t.slp(), a, 64);
  std::map<std::pair<StateId, StateId>, std::vector<PartialMarkerSet>> out;
  for (const auto& lambda : all_partial_sets(m.variables().size(), text.size())) {
    const auto word = insert_markers(text, lambda).labels();
    for (StateId i = 0; i < m.state_count(); ++i) {
      const auto reached = run(m, i, word);
      for (StateId j = 0; j < m.state_count(); ++j) {
        if (reached[j]) out[{i, j}].push_back(lambda);
      }
    }
  }
  for (auto& [key, list] : out) std::sort(list.begin(), list.end(), MarkerSetLess{});
  return out;
}

Reach classify(const std::vector<PartialMarkerSet>* sets) {
  if (sets == nullptr || sets->empty()) return Reach::Bottom;
  for (const auto& s : *sets) {
    if (!s.empty()) return Reach::Nonempty;
  }
  return Reach::Empty;
}

}  // namespace

TEST_SUITE("matrices") {
  TEST_CASE("tables for the run-of-c automaton") {
    const Slp slp = load_slp(testing::kSmallGrammar);
    const RelationTables t = RelationTables::build(slp, testing::run_of_c_dfa());
    // aab from state 1 back to state 1 only unmarked.
    CHECK(t.reach(*slp.find("C"), 0, 0) == Reach::Empty);
    const auto& sets = t.leaf_sets(*slp.find("Tc"), 0, 4);
    REQUIRE(sets.size() == 1);
    CHECK(sets.front() == PartialMarkerSet::from_entries({{1, Marker{1, false}.code()}}));
    CHECK(t.leaf_sets(*slp.find("Ta"), 4, 5) == std::vector{PartialMarkerSet::from_entries({{1, Marker{1, true}.code()}})});
    CHECK(t.reach(*slp.find("A"), 0, 4) == Reach::Nonempty);
    CHECK(t.inter(*slp.find("A"), 0, 4).test(0));
    CHECK(t.accepting_reachable() == std::vector<StateId>{5});
    CHECK(t.is_base(*slp.find("C"), 0, 0));
    CHECK_FALSE(t.is_base(*slp.find("A"), 0, 4));
    CHECK_THROWS_AS(t.inter(*slp.find("Ta"), 0, 0), InvalidArgument);
  }

  TEST_CASE("without marker labels every entry is bottom or empty") {
    const Slp slp = build_test_slp("abcabcab");
    const RelationTables t = RelationTables::build(slp, compile_spanner_regex("(a b c)* a b", "abc"));
    for (SymbolId a = 0; a < slp.symbol_count(); ++a) {
      for (StateId i = 0; i < t.states(); ++i) {
        for (StateId j = 0; j < t.states(); ++j) {
          CHECK(t.reach(a, i, j) != Reach::Nonempty);
          if (slp.is_leaf(a)) {
            const auto& sets = t.leaf_sets(a, i, j);
            CHECK((sets.empty() || sets == std::vector{PartialMarkerSet{}}));
          }
        }
      }
    }
  }

  TEST_CASE("tables match exhaustive marked-word search") {
    for (std::uint64_t seed = 300; seed < 340; ++seed) {
      const auto in = testing::random_instance(seed, {8, 2, 64});
      const RelationTables t = build_sentinel_tables(in.slp, in.automaton);
      const Slp& slp = t.slp();
      for (SymbolId a = 0; a < slp.symbol_count(); ++a) {
        if (slp.length(a) > 5) continue;
        const auto sets = exhaustive(t, a);
        for (StateId i = 0; i < t.states(); ++i) {
          for (StateId j = 0; j < t.states(); ++j) {
            auto it = sets.find({i, j});
            const auto* found = it == sets.end() ? nullptr : &it->second;
            REQUIRE(t.reach(a, i, j) == classify(found));
            if (slp.is_leaf(a)) {
              REQUIRE(t.leaf_sets(a, i, j) == (found ? *found : std::vector<PartialMarkerSet>{}));
            } else {
              const Rule& r = slp.rule(a);
              const BitSet k = t.inter(a, i, j);
              for (StateId s = 0; s < t.states(); ++s) {
                REQUIRE(k.test(s) ==
                        (t.reach(r.left, i, s) != Reach::Bottom && t.reach(r.right, s, j) != Reach::Bottom));
              }
            }
          }
        }
      }
    }
  }

  TEST_CASE("accepting states are kept only when reachable") {
    const RelationTables t = build_sentinel_tables(build_test_slp("aaa"), compile_spanner_regex("b | a a a", "ab"));
    REQUIRE(t.accepting_reachable().size() == 1);
    const RelationTables none = build_sentinel_tables(build_test_slp("aa"), compile_spanner_regex("b | a a a", "ab"));
    CHECK(none.accepting_reachable().empty());
  }

  TEST_CASE("three products per pair rule") {
    const Slp slp = build_test_slp("abcabcabcabc");
    const RelationTables t = RelationTables::build(slp, compile_spanner_regex(testing::kIntroPattern, "abc"));
    std::size_t pairs = 0;
    for (SymbolId a = 0; a < slp.symbol_count(); ++a) pairs += !slp.is_leaf(a);
    CHECK(t.counters().products == 3 * pairs);
  }

  TEST_CASE("the sentinel is a fresh character") {
    const Slp slp = build_test_slp("a#b");
    const char s = pick_sentinel(slp, compile_spanner_regex(".*", "ab#$"));
    CHECK(s == '%');
    const RelationTables t = build_sentinel_tables(slp, compile_spanner_regex(".*", "ab#$"));
    CHECK(expand(t.slp(), 10) == "a#b%");
  }
}
