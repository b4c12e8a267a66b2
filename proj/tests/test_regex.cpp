#include "doctest.h"

#include "lenuniv/regex.hpp"
#include "lenuniv/solvers.hpp"

using namespace lenuniv;

namespace {

bool matches(const automaton& a, const std::string& w) {
    std::vector<std::size_t> word;
    for (char c : w) word.push_back(a.symbol_index(std::string(1, c)));
    return accepts(a, word);
}

} // namespace

TEST_CASE("glushkov automaton recognizes the pattern language") {
    automaton a = regex_to_nfa("a(b|c)*a");
    CHECK(matches(a, "aa"));
    CHECK(matches(a, "abca"));
    CHECK(matches(a, "abbbca"));
    CHECK_FALSE(matches(a, "a"));
    CHECK_FALSE(matches(a, "ab"));
    CHECK_FALSE(matches(a, "ba"));

    automaton b = regex_to_nfa("(ab)+");
    CHECK(matches(b, "ab"));
    CHECK(matches(b, "abab"));
    CHECK_FALSE(matches(b, ""));
    CHECK_FALSE(matches(b, "aba"));

    automaton c = regex_to_nfa("ab?");
    CHECK(matches(c, "a"));
    CHECK(matches(c, "ab"));
    CHECK_FALSE(matches(c, "abb"));

    automaton d = regex_to_nfa("a\\*");
    CHECK(matches(d, "a*"));
    CHECK_FALSE(matches(d, "a"));
}

TEST_CASE("epsilon and nullability") {
    automaton a = regex_to_nfa("");
    CHECK(matches(a, ""));
    automaton b = regex_to_nfa("a*");
    CHECK(matches(b, ""));
    CHECK(matches(b, "aaaa"));
}

TEST_CASE("state count is linear: one state per symbol occurrence plus start") {
    CHECK(regex_to_nfa("(0|1)*").states == 3);
    CHECK(regex_to_nfa("0(0|1)*").states == 4);
    CHECK(regex_to_nfa("abc").states == 4);
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(regex_to_nfa("(ab"), parse_error);
    CHECK_THROWS_AS(regex_to_nfa("ab)"), parse_error);
    CHECK_THROWS_AS(regex_to_nfa("*a"), parse_error);
    CHECK_THROWS_AS(regex_to_nfa("a\\"), parse_error);
}

TEST_CASE("length universality through the regex front end") {
    CHECK(universal_at_length(regex_to_nfa("(0|1)*"), 5));
    CHECK_FALSE(universal_at_length(regex_to_nfa("0(0|1)*"), 3));

    // (00)* over a unary alphabet restricted view: even lengths only.
    automaton evens = regex_to_nfa("(00)*");
    CHECK(universal_at_length(evens, 4));
    CHECK_FALSE(universal_at_length(evens, 5));
    universality_report rep = minimal_universality_length(evens);
    CHECK(rep.exists);
    CHECK(rep.minimal_length == 0);
}
