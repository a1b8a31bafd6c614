// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "slpspan/compute.hpp"
#include "slpspan/enumerate.hpp"
#include "slpspan/membership.hpp"
#include "slpspan/oracle.hpp"
#include "support/instances.hpp"

using namespace slpspan;
using Clock = std::chrono::steady_clock;

namespace {

/// Delay constant for criterion 8: producer steps between consecutive
/// outputs may not exceed kDelayConstant * depth * max(1, |X|).
constexpr double kDelayConstant = 40.0;

constexpr std::size_t kInstances = 500;
constexpr std::size_t kNonMembersPerInstance = 50;

int failures = 0;

void report(int criterion, bool ok, const std::string& what, const std::string& details) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << criterion << ": " << what;
  if (!details.empty()) std::cout << " [" << details << "]";
  std::cout << std::endl;
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3fs", s);
  return buf;
}

std::vector<SpanTuple> enumerate_all(RelationEnumerator& e) {
  std::vector<SpanTuple> out;
  while (auto t = e.next()) out.push_back(*t);
  return out;
}

std::set<std::string> as_text(const std::vector<SpanTuple>& tuples, const VariableSet& vars) {
  std::set<std::string> out;
  for (const auto& t : tuples) out.insert(format_tuple(t, vars));
  return out;
}

// ---------------------------------------------------------------------------

void intro_relation() {
  const auto t0 = Clock::now();
  const Slp slp = build_test_slp("abcca");
  const SpannerAutomaton m = compile_spanner_regex("(b|c)* x{ a }x .* y{ c+ }y .*", "abc");
  const std::set<std::string> expected = {"x=[1,2> y=[3,4>", "x=[1,2> y=[4,5>", "x=[1,2> y=[3,5>"};

  const auto computed = compute_relation(slp, m).tuples;
  RelationEnumerator e(slp, m);
  const auto enumerated = enumerate_all(e);
  const double took = seconds_since(t0);

  const bool ok = computed.size() == 3 && enumerated.size() == 3 && as_text(computed, m.variables()) == expected &&
                  as_text(enumerated, m.variables()) == expected && took < 1.0;
  report(1, ok, "relation on abcca", "compute " + std::to_string(computed.size()) + ", enum " +
                                         std::to_string(enumerated.size()) + " tuples, " + seconds(took));
}

void worked_slp() {
  const char* grammar =
      "start S0\n"
      "S0 -> A 'b' 'a' A B 'b'\n"
      "A -> B 'a' B\n"
      "B -> 'b' 'a' 'a' 'b'\n";
  const RawGrammar raw = parse_slp(grammar);
  const Slp slp = normalize(raw);
  const std::string derived = expand(slp, 1000);

  const char* normal_form =
      "start S0\n"
      "S0 -> A B\nA -> C D\nB -> C E\nC -> E Tb\nD -> Tc Tc\nE -> Ta Ta\n"
      "Ta -> 'a'\nTb -> 'b'\nTc -> 'c'\n";
  const Slp nf = load_slp(normal_form);
  const std::string nf_derived = expand(nf, 1000);

  const bool ok = raw.size() == 16 && slp.document_length() == 25 && derived == "baababaabbabaababaabbaabb" &&
                  nf_derived == "aabccaabaa" && nf.depth() == 5;
  report(2, ok, "worked SLP examples",
         "size " + std::to_string(raw.size()) + ", length " + std::to_string(slp.document_length()) + ", " + derived +
             ", normal form " + nf_derived);
}

MarkerSet markers(const VariableSet& vars, std::initializer_list<std::pair<const char*, bool>> list) {
  MarkerSet s;
  for (auto [name, close] : list) s.insert(Marker{*vars.find(name), close});
  return s;
}

PartialMarkerSet random_partial(std::mt19937_64& rng, std::size_t n, std::size_t vars) {
  std::vector<MarkerEntry> entries;
  std::uniform_int_distribution<Position> pos(1, n + 1);
  for (std::uint32_t code = 0; code < 2 * vars; ++code) {
    if (std::bernoulli_distribution(0.5)(rng)) entries.push_back({pos(rng), code});
  }
  return PartialMarkerSet::from_entries(std::move(entries));
}

void marked_word_roundtrip() {
  const VariableSet xyz({"x", "y", "z"});
  bool examples_ok = true;

  // {open x} a b {open y, open z, close x} b c {close z} a b {close y} a c
  MarkedWord w;
  w.document = "abbcabac";
  w.sets.assign(9, MarkerSet{});
  w.sets[0] = markers(xyz, {{"x", false}});
  w.sets[2] = markers(xyz, {{"y", false}, {"z", false}, {"x", true}});
  w.sets[4] = markers(xyz, {{"z", true}});
  w.sets[6] = markers(xyz, {{"y", true}});
  const PartialMarkerSet expected_markers =
      tuple_to_marker_set(SpanTuple({Span{1, 3}, Span{3, 7}, Span{3, 5}}));
  const PartialMarkerSet listed = PartialMarkerSet::from_entries(
      {{1, Marker{0, false}.code()}, {3, Marker{0, true}.code()}, {3, Marker{1, false}.code()},
       {7, Marker{1, true}.code()}, {3, Marker{2, false}.code()}, {5, Marker{2, true}.code()}});
  examples_ok &= word_of(w) == "abbcabac";
  examples_ok &= markers_of(w) == expected_markers && listed == expected_markers;
  examples_ok &= insert_markers("abbcabac", expected_markers) == w;
  examples_ok &= validate_subword_marked(w).empty();

  // aaabcbb with x=[6,8>, y undefined, z=[3,8>
  const MarkedWord inserted =
      insert_markers("aaabcbb", tuple_to_marker_set(SpanTuple({Span{6, 8}, std::nullopt, Span{3, 8}})));
  examples_ok &= format_marked_word(inserted, xyz) == "aa{open(z)}abc{open(x)}bb{close(x),close(z)}";

  // Splitting the first word after abb: both halves' partial marker sets.
  examples_ok &= markers_of(MarkedWord{"abb", {w.sets[0], {}, w.sets[2], w.sets[3]}}) ==
                 PartialMarkerSet::from_entries({{1, 0}, {3, 2}, {3, 4}, {3, 1}});
  examples_ok &= markers_of(MarkedWord{"cabac", {{}, w.sets[4], {}, w.sets[6], {}, {}}}) ==
                 PartialMarkerSet::from_entries({{2, 5}, {4, 3}});

  // Join with a shift of |abab cc| = 6.
  const PartialMarkerSet l1 = PartialMarkerSet::from_entries({{2, 2}, {4, 4}, {4, 0}, {6, 5}});
  const PartialMarkerSet l2 = PartialMarkerSet::from_entries({{2, 1}, {4, 3}});
  const PartialMarkerSet joined = join(l1, l2, 6);
  examples_ok &= joined == PartialMarkerSet::from_entries({{2, 2}, {4, 4}, {4, 0}, {6, 5}, {8, 1}, {10, 3}});
  const MarkedWord w1 = insert_markers("ababcc", l1);
  const MarkedWord w2 = insert_markers("caba", l2);
  MarkedWord glued{w1.document + w2.document, {w1.sets.begin(), w1.sets.end() - 1}};
  glued.sets.insert(glued.sets.end(), w2.sets.begin(), w2.sets.end());
  glued.sets[6] = glued.sets[6] | w1.sets.back();
  examples_ok &= insert_markers("ababcccaba", joined) == glued;

  // Property: random (doc, partial marker set) pairs.
  std::mt19937_64 rng(20240101);
  std::size_t failed = 0;
  constexpr std::size_t kRounds = 100000;
  for (std::size_t r = 0; r < kRounds; ++r) {
    std::string doc(std::uniform_int_distribution<std::size_t>(0, 20)(rng), 'a');
    for (char& c : doc) c = static_cast<char>('a' + std::uniform_int_distribution<int>(0, 2)(rng));
    const PartialMarkerSet lambda = random_partial(rng, doc.size(), 3);
    const MarkedWord mw = insert_markers(doc, lambda);
    if (word_of(mw) != doc || !(markers_of(mw) == lambda) || !(insert_markers(word_of(mw), markers_of(mw)) == mw)) {
      ++failed;
    }
  }
  report(3, examples_ok && failed == 0, "marked-word examples and roundtrips",
         std::string("examples ") + (examples_ok ? "match" : "differ") + ", " + std::to_string(failed) + "/" +
             std::to_string(kRounds) + " roundtrip failures");
}

// ---------------------------------------------------------------------------

struct CorpusResult {
  std::size_t instances = 0;
  std::size_t mismatches = 0;
  std::size_t duplicates = 0;
  std::size_t tuples = 0;
  std::size_t trees = 0;
  std::size_t leaf_violations = 0;
  std::size_t node_violations = 0;
  std::size_t decision_disagreements = 0;
  std::size_t model_checks = 0;
  std::size_t delay_violations = 0;
  double max_delay_ratio = 0;
  std::uint64_t max_delay = 0;
  std::string first_failure;
  std::string worst_tree;
  double seconds = 0;
};

SpanTuple random_tuple(std::mt19937_64& rng, std::size_t n, std::size_t vars) {
  SpanTuple t(vars);
  for (std::size_t v = 0; v < vars; ++v) {
    if (std::bernoulli_distribution(0.2)(rng)) continue;
    std::uniform_int_distribution<Position> pos(1, n + 1);
    Position a = pos(rng), b = pos(rng);
    if (a > b) std::swap(a, b);
    t.set(v, Span{a, b});
  }
  return t;
}

CorpusResult run_corpus() {
  CorpusResult r;
  const auto t0 = Clock::now();
  for (std::uint64_t seed = 1; seed <= kInstances; ++seed) {
    const testing::Instance in = testing::random_instance(seed);
    const VariableSet& vars = in.automaton.variables();
    const std::size_t x = std::max<std::size_t>(1, vars.size());
    ++r.instances;
    auto note = [&](const std::string& what) {
      if (r.first_failure.empty()) {
        r.first_failure = "seed " + std::to_string(seed) + " '" + in.pattern + "' on " + in.document + ": " + what;
      }
    };

    std::vector<SpanTuple> oracle = brute_force_relation(in.document, in.automaton);
    std::vector<SpanTuple> computed = compute_relation(in.slp, in.automaton).tuples;
    std::sort(computed.begin(), computed.end());

    EnumerateOptions options;
    const Position depth = in.slp.depth();
    options.tree_observer = [&](const MTree& tree) {
      ++r.trees;
      const TreeShape s = tree_shape(tree);
      const bool leaf_bad = s.terminal_leaves > 2 * x;
      const bool node_bad = s.nodes > 4 * x * depth;
      r.leaf_violations += leaf_bad;
      r.node_violations += node_bad;
      if ((leaf_bad || node_bad) && r.worst_tree.empty()) {
        r.worst_tree = "seed " + std::to_string(seed) + " '" + in.pattern + "' on " + in.document + ": " +
                       std::to_string(s.nodes) + " nodes, " + std::to_string(s.terminal_leaves) +
                       " terminal leaves, " + std::to_string(s.empty_leaves) + " empty leaves, |X|=" +
                       std::to_string(vars.size()) + ", depth " + std::to_string(depth);
      }
    };
    RelationEnumerator e(in.slp, in.automaton, options);
    std::vector<SpanTuple> enumerated = enumerate_all(e);
    r.tuples += enumerated.size();
    std::sort(enumerated.begin(), enumerated.end());
    if (std::adjacent_find(enumerated.begin(), enumerated.end()) != enumerated.end()) {
      ++r.duplicates;
      note("duplicate in enumeration");
    }
    enumerated.erase(std::unique(enumerated.begin(), enumerated.end()), enumerated.end());
    if (computed != oracle || enumerated != oracle) {
      ++r.mismatches;
      note("oracle " + std::to_string(oracle.size()) + ", compute " + std::to_string(computed.size()) + ", enum " +
           std::to_string(enumerated.size()));
    }

    const auto& d = e.delay_stats();
    r.max_delay = std::max(r.max_delay, d.max_delay);
    const double ratio = static_cast<double>(d.max_delay) / (static_cast<double>(depth) * static_cast<double>(x));
    r.max_delay_ratio = std::max(r.max_delay_ratio, ratio);
    r.delay_violations += ratio > kDelayConstant;

    // Decision procedures.
    if (check_nonempty(in.slp, in.automaton) != !oracle.empty()) {
      ++r.decision_disagreements;
      note("check_nonempty disagrees");
    }
    for (const auto& t : oracle) {
      ++r.model_checks;
      if (!model_check(in.slp, in.automaton, t)) {
        ++r.decision_disagreements;
        note("model_check rejects a member");
      }
    }
    std::mt19937_64 rng(seed * 7919);
    const std::uint64_t space = candidate_count(in.document.size(), vars.size());
    const std::size_t wanted = std::min<std::uint64_t>(kNonMembersPerInstance, space - oracle.size());
    std::size_t found = 0;
    for (std::size_t attempt = 0; found < wanted && attempt < 100000; ++attempt) {
      const SpanTuple t = random_tuple(rng, in.document.size(), vars.size());
      if (std::binary_search(oracle.begin(), oracle.end(), t)) continue;
      ++found;
      ++r.model_checks;
      if (model_check(in.slp, in.automaton, t)) {
        ++r.decision_disagreements;
        note("model_check accepts a non-member");
      }
    }
  }
  r.seconds = seconds_since(t0);
  return r;
}

// ---------------------------------------------------------------------------

void compressed_scale() {
  std::ostringstream text;
  text << "start S\nA0 -> 'a'\n";
  for (int k = 1; k <= 40; ++k) text << 'A' << k << " -> A" << k - 1 << " A" << k - 1 << '\n';
  text << "S -> A40 'b' A40\n";

  const auto t0 = Clock::now();
  const Slp slp = load_slp(text.str());
  const SpannerAutomaton m = compile_spanner_regex("a* x{ b }x a*", "ab");
  const Position p = (Position{1} << 40) + 1;
  const SpanTuple expected({Span{p, p + 1}});

  const bool nonempty = check_nonempty(slp, m);
  const auto computed = compute_relation(slp, m).tuples;
  RelationEnumerator e(slp, m);
  const auto enumerated = enumerate_all(e);
  const double took = seconds_since(t0);

  const bool ok = nonempty && computed == std::vector<SpanTuple>{expected} &&
                  enumerated == std::vector<SpanTuple>{expected} && slp.document_length() == 2 * (p - 1) + 1 &&
                  took < 1.0;
  report(7, ok, "a^(2^40) b a^(2^40) without decompression",
         std::to_string(slp.symbol_count()) + " symbols, " +
             (computed.empty() ? std::string("no tuple") : format_tuple(computed.front(), m.variables())) + ", " +
             seconds(took));
}

}  // namespace

int main() {
  intro_relation();
  worked_slp();
  marked_word_roundtrip();

  const CorpusResult r = run_corpus();
  report(4, r.mismatches == 0 && r.duplicates == 0 && r.seconds < 300.0, "compute = enum = oracle",
         std::to_string(r.instances) + " instances, " + std::to_string(r.tuples) + " tuples, " +
             std::to_string(r.mismatches) + " mismatches, " + std::to_string(r.duplicates) + " with duplicates, " +
             seconds(r.seconds) + (r.first_failure.empty() ? "" : "; first: " + r.first_failure));
  report(5, r.leaf_violations == 0 && r.node_violations == 0, "tree size bounds",
         std::to_string(r.trees) + " trees, " + std::to_string(r.leaf_violations) + " over the terminal-leaf bound, " +
             std::to_string(r.node_violations) + " over the node bound" +
             (r.worst_tree.empty() ? "" : "; first: " + r.worst_tree));
  report(6, r.decision_disagreements == 0, "decision procedures agree",
         std::to_string(r.model_checks) + " model checks, " + std::to_string(r.decision_disagreements) +
             " disagreements" + (r.first_failure.empty() ? "" : "; first: " + r.first_failure));

  compressed_scale();

  char ratio[32];
  std::snprintf(ratio, sizeof ratio, "%.2f", r.max_delay_ratio);
  report(8, r.delay_violations == 0, "delay within c * depth * max(1,|X|)",
         "c = " + std::to_string(static_cast<int>(kDelayConstant)) + ", measured max ratio " + ratio +
             ", max delay " + std::to_string(r.max_delay) + " steps, " + std::to_string(r.delay_violations) +
             " instances over");
  return failures;
}
