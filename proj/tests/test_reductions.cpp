#include "doctest.h"

#include <numeric>
#include <random>

#include "lenuniv/reductions.hpp"
#include "lenuniv/gadget_compile.hpp"
#include "lenuniv/solvers.hpp"

using namespace lenuniv;

namespace {

automaton random_complete_dfa(std::mt19937& rng, std::size_t max_states, std::size_t syms) {
    std::uniform_int_distribution<std::size_t> ns(1, max_states);
    std::size_t n = ns(rng);
    std::vector<std::string> alpha;
    for (std::size_t s = 0; s < syms; ++s) alpha.push_back(std::string(1, char('a' + s)));
    automaton a = make_automaton(automaton_kind::dfa, alpha, n);
    std::uniform_int_distribution<std::size_t> st(0, n - 1);
    std::bernoulli_distribution fin(0.6);
    for (std::size_t q = 0; q < n; ++q)
        for (std::size_t s = 0; s < syms; ++s) a.add_transition(q, s, st(rng));
    a.initials = {st(rng)};
    for (std::size_t q = 0; q < n; ++q)
        if (fin(rng)) a.finals.push_back(q);
    a.validate();
    return a;
}

} // namespace

TEST_CASE("prime table") {
    CHECK(nth_prime(1) == 2);
    CHECK(nth_prime(4) == 7);
    CHECK(nth_prime(96) == 503);
    CHECK_THROWS_AS(nth_prime(0), input_error);
    CHECK(is_prime(2));
    CHECK_FALSE(is_prime(1));
    CHECK_FALSE(is_prime(91)); // 7 * 13
}

TEST_CASE("reserved primes stay below the degree bound") {
    // p(2^{2s} (2s+2)) <= 2^{11s} for the machine sizes the reduction emits.
    for (std::uint32_t s = 1; s <= 3; ++s) {
        std::uint64_t count = (std::uint64_t(1) << (2 * s)) * (2 * s + 2);
        CHECK(bignat(nth_prime(count)) <= (bignat(1) << (11 * s)));
    }
}

TEST_CASE("prime cycle minimal length is the primorial") {
    for (std::uint64_t t = 1; t <= 4; ++t) {
        automaton a = prime_cycle_dfa(t);
        std::uint64_t prod = 1, sum = 0;
        for (std::uint64_t i = 1; i <= t; ++i) {
            prod *= nth_prime(i);
            sum += nth_prime(i);
        }
        CHECK(a.states == 1 + sum);
        CHECK(a.alphabet.size() == t);
        universality_report rep = minimal_universality_length(a);
        REQUIRE(rep.exists);
        CHECK(rep.minimal_length == prod); // CRT: least positive common multiple
    }
}

TEST_CASE("binarized prime cycle uses two letters and pays the tree height") {
    for (std::uint64_t t : {3ull, 4ull}) {
        automaton a = prime_cycle_dfa(t, true);
        CHECK(a.alphabet.size() == 2);
        std::uint64_t h = 0;
        while ((1ull << (h + 1)) < t) ++h; // ceil(log2 t) - 1
        universality_report rep = minimal_universality_length(a);
        REQUIRE(rep.exists);
        universality_report plain = minimal_universality_length(prime_cycle_dfa(t));
        CHECK(rep.minimal_length == plain.minimal_length + h);
    }
}

TEST_CASE("general binarization preserves universality at scaled lengths") {
    std::mt19937 rng(41);
    for (int it = 0; it < 40; ++it) {
        std::uniform_int_distribution<std::size_t> sd(3, 5);
        std::size_t k = sd(rng);
        automaton a = random_complete_dfa(rng, 5, k);
        automaton b = binarize(a);
        std::uint64_t h = 0;
        while ((1ull << h) < k) ++h;
        CHECK(b.alphabet.size() == 2);
        CHECK(b.states == ((std::size_t(1) << h) - 1) * a.states);
        for (std::uint64_t ell = 0; ell <= 6; ++ell)
            CHECK(universal_at_length(a, ell) == universal_at_length(b, ell * h));
    }
    CHECK_THROWS_AS(binarize(prime_cycle_dfa(1)), input_error); // already unary
}

TEST_CASE("dimacs parsing") {
    cnf c = parse_dimacs("c comment\np cnf 3 2\n1 -2 3 0\n-1 2 -3 0\n");
    CHECK(c.nvars == 3);
    REQUIRE(c.clauses.size() == 2);
    CHECK(c.clauses[0][0].var == 1);
    CHECK_FALSE(c.clauses[0][1].positive);
    CHECK_THROWS_AS(parse_dimacs("1 2 3 0\n"), parse_error);               // missing header
    CHECK_THROWS_AS(parse_dimacs("p cnf 3 1\n1 2 0\n"), parse_error);      // not three literals
    CHECK_THROWS_AS(parse_dimacs("p cnf 3 1\n1 1 2 0\n"), parse_error);    // repeated variable
    CHECK_THROWS_AS(parse_dimacs("p cnf 3 2\n1 2 3 0\n"), parse_error);    // clause count mismatch
    CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 2 3 0\n"), parse_error);    // variable out of range
}

TEST_CASE("satisfiability transfers to existential length universality") {
    cnf sat = parse_dimacs("p cnf 3 2\n1 -2 3 0\n-1 2 -3 0\n");
    automaton a = sat_to_dfa(sat);
    CHECK(a.alphabet.size() == 2); // one letter per clause
    universality_report rep = minimal_universality_length(a);
    REQUIRE(rep.exists);
    std::vector<bool> assign = decode_sat_assignment(rep.minimal_length, sat);
    for (const auto& cl : sat.clauses) {
        std::array<int, 3> bits;
        for (int i = 0; i < 3; ++i) bits[i] = assign[cl[i].var - 1] ? 1 : 0;
        CHECK(clause_satisfied(cl, bits));
    }

    // x1 and not x1, twice over, padded to three distinct variables: unsatisfiable
    cnf unsat = parse_dimacs(
        "p cnf 3 8\n"
        "1 2 3 0\n1 2 -3 0\n1 -2 3 0\n1 -2 -3 0\n"
        "-1 2 3 0\n-1 2 -3 0\n-1 -2 3 0\n-1 -2 -3 0\n");
    CHECK_FALSE(minimal_universality_length(sat_to_dfa(unsat)).exists);
}

TEST_CASE("assignment decoding reads residues") {
    cnf c = parse_dimacs("p cnf 3 1\n1 2 3 0\n");
    // ell = 1 mod 2, 1 mod 3, 1 mod 5 -> all three variables true
    std::vector<bool> a = decode_sat_assignment(1, c);
    CHECK(a == std::vector<bool>{true, true, true});
    CHECK(decode_sat_assignment(6, c) == std::vector<bool>{false, false, true});
    CHECK_THROWS_AS(decode_sat_assignment(2, c), input_error); // residue 2 mod 3 encodes nothing
}

TEST_CASE("counter program text") {
    for (unsigned m = 1; m <= 3; ++m) {
        compiled_nfa c = compile_text(alg3_program(m), m);
        CHECK(c.nfa.states == 11u * m + 5);
        CHECK(c.nfa.nsym() == 15);
    }
}
