#pragma once

#include <string>

#include "slpspan/slp.hpp"
#include "slpspan/spanner.hpp"

namespace slpspan::testing {

inline const char* kIntroPattern = "(b|c)* x{ a }x .* y{ c+ }y .*";

/// S0 -> A B, A -> C D, B -> C E, C -> E Tb, D -> Tc Tc, E -> Ta Ta.
inline const char* kSmallGrammar =
    "start S0\n"
    "S0 -> A B\nA -> C D\nB -> C E\nC -> E Tb\nD -> Tc Tc\nE -> Ta Ta\n"
    "Ta -> 'a'\nTb -> 'b'\nTc -> 'c'\n";

/// Six-state DFA extracting y = a run of c's that is followed by an a
/// (states 1..6 in the text format, 0..5 here):
/// 1 loops on a,b,c; 1 -{open y}-> 2 -c-> 5; 5 loops on c;
/// 5 -{close y}-> 4 -a-> 6; 6 loops on a,b,c; 6 accepts.
inline SpannerAutomaton run_of_c_dfa() {
  return parse_automaton(
      "states 6\nstart 1\naccept 6\nalphabet a b c\nvars x y\n"
      "trans 1 a 1\ntrans 1 b 1\ntrans 1 c 1\n"
      "trans 1 {open(y)} 2\ntrans 2 c 5\ntrans 5 c 5\n"
      "trans 5 {close(y)} 4\ntrans 4 a 6\n"
      "trans 6 a 6\ntrans 6 b 6\ntrans 6 c 6\n");
}

}  // namespace slpspan::testing
