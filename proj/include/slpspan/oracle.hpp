#pragma once

// Brute-force evaluation on the uncompressed document: try every partial
// assignment of spans and run the automaton on the marked word.

#include <string_view>
#include <vector>

#include "slpspan/spanner.hpp"

namespace slpspan {

struct OracleBounds {
  std::size_t max_document_length = 40;
  std::size_t max_variables = 3;
};

/// Every t with insert_markers(doc, [t]) in L(M), sorted by SpanTuple order.
std::vector<SpanTuple> brute_force_relation(std::string_view document, const SpannerAutomaton& m,
                                            const OracleBounds& bounds = {});

/// Number of candidate tuples: ((n+1)(n+2)/2 + 1)^|X|.
std::uint64_t candidate_count(std::size_t document_length, std::size_t variables);

}  // namespace slpspan
