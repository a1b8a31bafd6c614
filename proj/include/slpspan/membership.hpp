#pragma once

// Decision procedures on compressed documents via Boolean transition
// matrices: membership, non-emptiness and model checking.

#include "slpspan/bits.hpp"
#include "slpspan/slp.hpp"
#include "slpspan/spanner.hpp"

namespace slpspan {

struct MatrixStats {
  std::uint64_t products = 0;
  std::uint64_t word_operations = 0;
};

/// Transition matrix of every symbol: [i][j] set iff state i reaches j
/// reading D(A). Letters without transitions give the zero matrix.
std::vector<BitMatrix> transition_matrices(const Slp& slp, const SpannerAutomaton& m, MatrixStats* stats = nullptr);

/// D(S) in L(M); marker-set leaves are read as single letters.
bool slp_membership(const Slp& slp, const SpannerAutomaton& m, MatrixStats* stats = nullptr);

/// [[M]](D(S)) is non-empty.
bool check_nonempty(const Slp& slp, const SpannerAutomaton& m, MatrixStats* stats = nullptr);

/// t in [[M]](D(S)); spans must end at most at |D(S)| + 1.
bool model_check(const Slp& slp, const SpannerAutomaton& m, const SpanTuple& tuple, MatrixStats* stats = nullptr);

}  // namespace slpspan
