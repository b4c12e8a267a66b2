#include "doctest.h"

#include <random>

#include "lenuniv/formulas.hpp"
#include "lenuniv/gadget_compile.hpp"
#include "lenuniv/gadget_sim.hpp"

using namespace lenuniv;

TEST_CASE("parse and store round trip") {
    const std::string texts[] = {
        "(exists (X) 4 (and (= X 5) (prime X)))",
        "(exists (X P) 4 (and (= X 3) (nthprime P X) (divides P)))",
        "(exists (A B C) 3 (or (and (= A 1) (sum C A B)) (and (= B 2) (prod C A B))))",
        "(exists (X) 2 (and (= X 3) (notdivides X)))",
    };
    for (const auto& t : texts) {
        formula f = parse_formula(t);
        formula f2 = parse_formula(store_formula(f));
        CHECK(store_formula(f) == store_formula(f2));
        CHECK(f2.vars == f.vars);
        CHECK(f2.m == f.m);
    }
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(parse_formula("(exists (X) 4 (= Y 1))"), parse_error);
    CHECK_THROWS_AS(parse_formula("(exists (X) 0 (= X 1))"), error);
    CHECK_THROWS_AS(parse_formula("(exists (X) 4 (= X 16))"), parse_error);
    CHECK_THROWS_AS(parse_formula("(exists (X) 4 (and))"), parse_error);
    CHECK_THROWS_AS(parse_formula("(exists (X) 4 (frobnicate X))"), parse_error);
    CHECK_THROWS_AS(parse_formula("(exists (X) 4 (= X 1)"), parse_error);
}

TEST_CASE("evaluator on closed examples") {
    formula f1 = parse_formula("(exists (X) 4 (and (= X 5) (prime X)))");
    CHECK(eval_formula(f1, 0));

    formula f2 = parse_formula("(exists (X P) 4 (and (= X 3) (nthprime P X) (divides P)))");
    CHECK(eval_formula(f2, 10));      // p(3) = 5 divides 10
    CHECK_FALSE(eval_formula(f2, 7)); // 5 does not divide 7

    formula f3 = parse_formula("(exists (X Y Z) 3 (and (= X 3) (= Y 4) (sum Z X Y)))");
    CHECK(eval_formula(f3, 0)); // Z = 7 fits in 3 bits
    formula f4 = parse_formula("(exists (X Y Z) 3 (and (= X 3) (= Y 5) (sum Z X Y)))");
    CHECK_FALSE(eval_formula(f4, 0)); // 8 overflows

    formula f5 = parse_formula("(exists (X Y Z) 4 (and (= X 12) (= Y 4) (prod X Z Y)))");
    CHECK(eval_formula(f5, 0)); // searched factor Z = 3
    formula f6 = parse_formula("(exists (X Y Z) 4 (and (= X 13) (= Y 4) (prod X Z Y)))");
    CHECK_FALSE(eval_formula(f6, 0));

    formula f7 = parse_formula("(exists (X) 4 (and (= X 0) (divides X)))");
    CHECK(eval_formula(f7, 0)); // 0 | 0 only
    CHECK_FALSE(eval_formula(f7, 3));

    formula f8 = parse_formula("(exists (X P) 4 (and (= X 0) (nthprime P X)))");
    CHECK_FALSE(eval_formula(f8, 0)); // prime index 0 is undefined
}

TEST_CASE("evaluation with pre-bound variables") {
    formula f = parse_formula("(exists (X) 2 (and (= X 3) (notdivides X)))");
    CHECK(eval_formula_at(f, 7, {{"X", 3}}));
    CHECK_FALSE(eval_formula_at(f, 6, {{"X", 3}}));
    CHECK_FALSE(eval_formula_at(f, 7, {{"X", 2}}));
    CHECK_THROWS_AS(eval_formula_at(f, 7, {{"Q", 1}}), input_error);
}

TEST_CASE("adding a disjunct never flips true to false") {
    std::mt19937 rng(31);
    std::uniform_int_distribution<std::uint64_t> cd(0, 15), ld(0, 40);
    for (int it = 0; it < 60; ++it) {
        std::uint64_t c1 = cd(rng), c2 = cd(rng), ellp = ld(rng);
        formula narrow = parse_formula("(exists (X) 4 (and (= X " + std::to_string(c1) +
                                       ") (divides X)))");
        formula wide = parse_formula("(exists (X) 4 (or (and (= X " + std::to_string(c1) +
                                     ") (divides X)) (and (= X " + std::to_string(c2) +
                                     ") (prime X))))");
        if (eval_formula(narrow, ellp)) CHECK(eval_formula(wide, ellp));
    }
}

TEST_CASE("verifier program shape for a single defining atom") {
    formula f = parse_formula("(exists (X) 2 (= X 3))");
    gadget_program p = verify_to_program(f);
    // X and its iteration counter X' are the external variables.
    REQUIRE(p.decls.size() >= 2);
    CHECK(p.decls[0].name == "X");
    CHECK(p.find_var("X'") != nullptr);
    REQUIRE(p.body.kind == stmt_kind::sequence);
    REQUIRE(p.body.children.size() == 1);
    // One defining atom compiles to a constant assignment guarded by equality.
    const stmt& atom_code = p.body.children[0];
    REQUIRE(atom_code.kind == stmt_kind::sequence);
    REQUIRE(atom_code.children.size() == 2);
    CHECK(atom_code.children[0].kind == stmt_kind::assign_const);
    CHECK(atom_code.children[1].kind == stmt_kind::equality);
}

TEST_CASE("verifier preserves the external variables") {
    formula f = parse_formula("(exists (X) 2 (and (= X 2) (divides X)))");
    gadget_program p = verify_to_program(f);
    compiled_nfa c = compile(expand_macros(p, 2), 2);
    state_set init = initial_configuration(c, {{"X", 2}, {"X'", 0}});
    auto rs = enumerate_computations(c, init, c.target, 40);
    REQUIRE(!rs.empty());
    for (const auto& r : rs) {
        CHECK(var_value(c, r.end, "X") == 2);
        CHECK(var_value(c, r.end, "X'") == 0);
    }
}

TEST_CASE("gadget existence matches evaluation at m=2") {
    // Spot grid here; the acceptance battery runs the full ten-formula version.
    const std::string texts[] = {
        "(exists (X) 2 (and (= X 2) (divides X)))",
        "(exists (X) 2 (and (= X 3) (notdivides X)))",
        "(exists (X) 2 (or (= X 1) (and (= X 2) (prime X))))",
    };
    for (const auto& t : texts) {
        formula f = parse_formula(t);
        gadget_program p = verify_to_program(f);
        compiled_nfa c = compile(expand_macros(p, 2), 2);
        for (std::uint64_t ellp = 0; ellp <= 6; ++ellp)
            for (std::uint64_t x = 0; x < 4; ++x) {
                std::map<std::string, std::uint64_t> vals{{"X", x},
                                                          {"X'", x ? ellp % x : ellp}};
                if (x == 0 && ellp > 3) continue; // counter value out of width
                bool by_eval = eval_formula_at(f, ellp, {{"X", x}});
                bool by_gadget =
                    complete_computation_exists(c, initial_configuration(c, vals), c.target);
                CHECK(by_eval == by_gadget);
            }
    }
}
