#include <doctest.h>

#include <algorithm>
#include <set>

#include "fixtures.hpp"
#include "instances.hpp"
#include "slpspan/enumerate.hpp"
#include "slpspan/oracle.hpp"

using namespace slpspan;

namespace {

constexpr StateId kBase = TreeEnumerator::kBaseCase;

std::string serialize(const MTree& t) {
  const auto& n = *t;
  const std::string tail = std::to_string(n.symbol) + " " + std::to_string(n.from) + " " + std::to_string(n.to);
  switch (n.kind) {
    case MTreeNode::Kind::EmptyLeaf: return "E" + tail;
    case MTreeNode::Kind::TerminalLeaf: return "T" + tail;
    case MTreeNode::Kind::Inner: break;
  }
  return "(" + tail + " via " + std::to_string(n.middle) + " " + serialize(n.left) + " " + serialize(n.right) + ")";
}

std::vector<StateId> choices(const RelationTables& t, SymbolId a, StateId i, StateId j) {
  if (t.is_base(a, i, j)) return {kBase};
  std::vector<StateId> out;
  t.inter(a, i, j).for_each([&](std::size_t k) { out.push_back(static_cast<StateId>(k)); });
  return out;
}

// All trees by direct recursion over the definition.
std::vector<std::string> all_trees(const RelationTables& t, SymbolId a, StateId i, StateId k, StateId j) {
  const std::string tail = std::to_string(a) + " " + std::to_string(i) + " " + std::to_string(j);
  if (k == kBase) return {(t.reach(a, i, j) == Reach::Empty ? "E" : "T") + tail};
  const Rule& r = t.slp().rule(a);
  std::vector<std::string> out;
  for (StateId kb : choices(t, r.left, i, k)) {
    for (StateId kc : choices(t, r.right, k, j)) {
      for (const auto& l : all_trees(t, r.left, i, kb, k)) {
        for (const auto& rt : all_trees(t, r.right, k, kc, j)) {
          out.push_back("(" + tail + " via " + std::to_string(k) + " " + l + " " + rt + ")");
        }
      }
    }
  }
  return out;
}

std::vector<MTree> drain(TreeEnumerator& e) {
  std::vector<MTree> out;
  while (MTree t = e.next()) out.push_back(t);
  return out;
}

}  // namespace

TEST_SUITE("enumerate") {
  TEST_CASE("the run of c's tree and its yield") {
    const Slp slp = load_slp(testing::kSmallGrammar);
    const RelationTables t = RelationTables::build(slp, testing::run_of_c_dfa());
    const SymbolId s0 = slp.start();
    // States 1, 4, 5, 6 of the text format are 0, 3, 4, 5 here.
    REQUIRE(t.inter(s0, 0, 5).test(4));
    TreeEnumerator e(t, s0, 0, 4, 5);
    const auto trees = drain(e);
    const auto wanted = PartialMarkerSet::from_entries({{4, Marker{1, false}.code()}, {6, Marker{1, true}.code()}});
    bool found = false;
    for (const auto& tree : trees) {
      const auto& root = *tree;
      // D = cc read from 1 to 5 with y opened before its first c.
      if (root.left->symbol == *slp.find("A") && root.left->middle == 0 && root.left->right->middle == 4 &&
          root.right->symbol == *slp.find("B") && root.right->middle == 5) {
        found = true;
        CHECK(root.right->kind == MTreeNode::Kind::Inner);
        CHECK(root.right->from == 4);
        CHECK(root.left->left->kind == MTreeNode::Kind::EmptyLeaf);  // C from 1 to 1
        CHECK(tree_yield(tree, t) == SortedRelation{wanted});
        YieldEnumerator y(tree, t);
        auto first = y.next();
        REQUIRE(first.has_value());
        CHECK(*first == wanted);
        CHECK_FALSE(y.next().has_value());
        const TreeShape shape = tree_shape(tree);
        CHECK(shape.terminal_leaves == 2);
      }
    }
    CHECK(found);
    CHECK(trees.size() == 2);  // the other one opens y before the second c
  }

  TEST_CASE("base case yields a single node") {
    const Slp slp = load_slp(testing::kSmallGrammar);
    const RelationTables t = RelationTables::build(slp, testing::run_of_c_dfa());
    TreeEnumerator leaf(t, *slp.find("Ta"), 0, kBase, 0);
    const auto trees = drain(leaf);
    REQUIRE(trees.size() == 1);
    CHECK(trees.front()->kind == MTreeNode::Kind::EmptyLeaf);
    YieldEnumerator y(trees.front(), t);
    CHECK(y.next() == PartialMarkerSet{});
    CHECK_FALSE(y.next().has_value());
    CHECK_THROWS_AS(TreeEnumerator(t, *slp.find("A"), 0, 1, 4), InvalidArgument);
    CHECK_THROWS_AS(TreeEnumerator(t, *slp.find("A"), 0, kBase, 4), InvalidArgument);
  }

  TEST_CASE("trees match the recursive construction, yields are disjoint") {
    for (std::uint64_t seed = 500; seed < 580; ++seed) {
      const auto in = testing::random_instance(seed, {12, 2, 64});
      const RelationTables t = build_sentinel_tables(in.slp, in.automaton);
      const SymbolId s = t.slp().start();
      std::set<std::vector<MarkerEntry>> seen;
      for (StateId j : t.accepting_reachable()) {
        for (StateId k : choices(t, s, 0, j)) {
          TreeEnumerator e(t, s, 0, k, j);
          std::vector<std::string> got;
          for (const auto& tree : drain(e)) {
            got.push_back(serialize(tree));
            const SortedRelation reference = tree_yield(tree, t);
            SortedRelation walked;
            YieldEnumerator y(tree, t);
            while (auto set = y.next()) walked.push_back(*set);
            std::sort(walked.begin(), walked.end(), MarkerSetLess{});
            REQUIRE(walked == reference);
            for (const auto& set : walked) {
              auto entries = set.entries();
              REQUIRE(seen.emplace(entries.begin(), entries.end()).second);
            }
          }
          auto expected = all_trees(t, s, 0, k, j);
          std::sort(got.begin(), got.end());
          std::sort(expected.begin(), expected.end());
          REQUIRE(std::adjacent_find(got.begin(), got.end()) == got.end());
          REQUIRE(got == expected);
        }
      }
    }
  }

  TEST_CASE("introductory relation, each tuple once") {
    RelationEnumerator e(build_test_slp("abcca"), compile_spanner_regex(testing::kIntroPattern, "abc"));
    std::set<std::string> out;
    int count = 0;
    while (auto t = e.next()) {
      out.insert(format_tuple(*t, VariableSet({"x", "y"})));
      ++count;
    }
    CHECK(count == 3);
    CHECK(out == std::set<std::string>{"x=[1,2> y=[3,4>", "x=[1,2> y=[4,5>", "x=[1,2> y=[3,5>"});
    CHECK(e.delay_stats().outputs == 3);
    std::uint64_t histogram_total = 0;
    for (const auto& [delay, n] : e.delay_stats().histogram) histogram_total += n;
    CHECK(histogram_total == 2);
    CHECK_FALSE(e.next().has_value());
  }

  TEST_CASE("nothing to extract ends at once") {
    RelationEnumerator e(build_test_slp("bbbb"), compile_spanner_regex(".* x{ a }x .*", "ab"));
    CHECK_FALSE(e.next().has_value());
    CHECK(e.delay_stats().outputs == 0);
    CHECK(e.delay_stats().trees == 0);
  }

  TEST_CASE("enumerating on the NFA gives the same set, maybe repeated") {
    for (std::uint64_t seed = 700; seed < 760; ++seed) {
      const auto in = testing::random_instance(seed, {20, 2, 64});
      const SpannerAutomaton nfa = compile_spanner_regex(in.pattern, "abc");
      EnumerateOptions raw;
      raw.determinize = false;
      RelationEnumerator e(in.slp, nfa, raw);
      std::set<SpanTuple> got;
      while (auto t = e.next()) got.insert(*t);
      const auto oracle = brute_force_relation(in.document, nfa);
      REQUIRE(std::vector<SpanTuple>(got.begin(), got.end()) == oracle);
    }
  }

  TEST_CASE("determinization is on by default") {
    const SpannerAutomaton nfa = compile_spanner_regex(".* x{ a }x .* | .* x{ a }x", "ab");
    REQUIRE_FALSE(nfa.is_deterministic());
    RelationEnumerator e(build_test_slp("abaa"), nfa);
    CHECK(e.tables().automaton().is_deterministic());
    int n = 0;
    while (e.next()) ++n;
    CHECK(n == 3);
  }
}
