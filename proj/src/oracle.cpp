#include "slpspan/oracle.hpp"

#include <algorithm>

namespace slpspan {

std::uint64_t candidate_count(std::size_t document_length, std::size_t variables) {
  const std::uint64_t n = document_length;
  const std::uint64_t per_variable = (n + 1) * (n + 2) / 2 + 1;
  std::uint64_t total = 1;
  for (std::size_t v = 0; v < variables; ++v) total *= per_variable;
  return total;
}

std::vector<SpanTuple> brute_force_relation(std::string_view document, const SpannerAutomaton& m,
                                            const OracleBounds& bounds) {
  const std::size_t n = document.size();
  const std::size_t vars = m.variables().size();
  if (n > bounds.max_document_length) {
    throw LimitExceeded("oracle: document length " + std::to_string(n) + " exceeds " +
                        std::to_string(bounds.max_document_length));
  }
  if (vars > bounds.max_variables) {
    throw LimitExceeded("oracle: " + std::to_string(vars) + " variables exceed " + std::to_string(bounds.max_variables));
  }
  // Choices per variable: index 0 is undefined, the rest enumerate [i,j>.
  std::vector<std::optional<Span>> choices{std::nullopt};
  for (Position i = 1; i <= n + 1; ++i) {
    for (Position j = i; j <= n + 1; ++j) choices.push_back(Span{i, j});
  }
  const Acceptor acceptor(m);
  std::vector<std::size_t> pick(vars, 0);
  std::vector<MarkerSet> sets(n + 1);
  std::vector<SpanTuple> out;
  for (;;) {
    std::fill(sets.begin(), sets.end(), MarkerSet{});
    for (std::size_t v = 0; v < vars; ++v) {
      if (const auto& s = choices[pick[v]]) {
        const auto var = static_cast<std::uint32_t>(v);
        sets[s->begin - 1].insert(Marker{var, false});
        sets[s->end - 1].insert(Marker{var, true});
      }
    }
    if (acceptor.accepts(document, sets)) {
      std::vector<std::optional<Span>> spans(vars);
      for (std::size_t v = 0; v < vars; ++v) spans[v] = choices[pick[v]];
      out.emplace_back(std::move(spans));
    }
    std::size_t v = 0;
    while (v < vars && ++pick[v] == choices.size()) pick[v++] = 0;
    if (v == vars) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace slpspan
