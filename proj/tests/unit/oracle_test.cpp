#include <doctest.h>

#include "fixtures.hpp"
#include "slpspan/oracle.hpp"

using namespace slpspan;

TEST_SUITE("oracle") {
  TEST_CASE("candidate count") {
    CHECK(candidate_count(5, 0) == 1);
    CHECK(candidate_count(2, 1) == 3 + 3 + 1);
    CHECK(candidate_count(40, 2) == 862 * 862);
  }

  TEST_CASE("a pattern accepting every span sees all candidates") {
    const SpannerAutomaton m = compile_spanner_regex(".* (x{ .* }x)? .*", "ab");
    for (std::size_t n = 1; n <= 6; ++n) {
      CHECK(brute_force_relation(std::string(n, 'a'), m).size() == candidate_count(n, 1));
    }
  }

  TEST_CASE("introductory relation") {
    const auto rel = brute_force_relation("abcca", compile_spanner_regex(testing::kIntroPattern, "abc"));
    const VariableSet xy({"x", "y"});
    REQUIRE(rel.size() == 3);
    CHECK(format_tuple(rel[0], xy) == "x=[1,2> y=[3,4>");
    CHECK(format_tuple(rel[1], xy) == "x=[1,2> y=[3,5>");
    CHECK(format_tuple(rel[2], xy) == "x=[1,2> y=[4,5>");
  }

  TEST_CASE("empty language and bounds") {
    SpannerAutomaton nothing(1, VariableSet({"x"}), "ab");
    CHECK(brute_force_relation("abab", nothing).empty());
    CHECK_THROWS_AS(brute_force_relation(std::string(41, 'a'), nothing), LimitExceeded);
    const SpannerAutomaton four = SpannerAutomaton(1, VariableSet({"w", "x", "y", "z"}), "a");
    CHECK_THROWS_AS(brute_force_relation("a", four), LimitExceeded);
    CHECK_NOTHROW(brute_force_relation(std::string(60, 'a'), nothing, OracleBounds{60, 3}));
  }
}
