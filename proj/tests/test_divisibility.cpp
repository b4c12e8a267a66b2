#include "doctest.h"

#include "lenuniv/divisibility.hpp"
#include "lenuniv/solvers.hpp"

using namespace lenuniv;

TEST_CASE("longest proper run of a finite program") {
    compiled_nfa c = compile_text("wait 5;", 2);
    CHECK(longest_proper_run(c) == 5);
    compiled_nfa c2 = compile_text("var X; select X; inc X;", 2);
    // select (2) then inc (3); overflow branches die early
    CHECK(longest_proper_run(c2) == 5);
    // cyclic configuration graphs are unbounded
    compiled_nfa c3 = compile_text("var X; X <- 0; while true { inc X; X <- 0; }", 1);
    CHECK_FALSE(longest_proper_run(c3).has_value());
}

TEST_CASE("counting wrapper constants at k=1, m=2") {
    formula f = parse_formula("(exists (X) 2 (= X 1))");
    divisibility_result r = divisibility_program(f);
    CHECK(r.D == 1);
    CHECK(delay_T(r.D) == 9);
    CHECK(r.r1 == 18);
    CHECK(r.r2 == 13);
}

TEST_CASE("an explicit delay overrides the derived one") {
    formula f = parse_formula("(exists (X) 2 (and (= X 2) (prime X)))");
    divisibility_result r = divisibility_program(f, 10);
    CHECK(r.D == 10);
    CHECK(r.r1 == 1 + (delay_T(10) + 1) + 7);
    CHECK(r.r2 == 2 + 1 + 1 + delay_T(10));
}

TEST_CASE("every complete loop iteration consumes exactly r1 letters") {
    formula f = parse_formula("(exists (X) 2 (and (= X 3) (notdivides X)))");
    divisibility_result r = divisibility_program(f);
    gadget_program prog = expand_macros(r.program, 2);
    compiled_nfa c = compile(prog, 2);

    REQUIRE(prog.body.kind == stmt_kind::sequence);
    const stmt& loop = prog.body.children.back();
    REQUIRE(loop.kind == stmt_kind::while_true);
    std::uint32_t head = c.stmt_span.at(loop.id).first;

    for (std::uint64_t xp : {0ull, 1ull}) {
        state_set cfg(c.nfa.states);
        cfg.set(head);
        const var_states& vx = c.vars.at("X");
        const var_states& vc = c.vars.at("X'");
        for (unsigned i = 0; i < vx.width; ++i) cfg.set((3u >> i) & 1 ? vx.pos[i] : vx.neg[i]);
        for (unsigned i = 0; i < vc.width; ++i) cfg.set((xp >> i) & 1 ? vc.pos[i] : vc.neg[i]);

        auto lens = complete_computation_lengths(c, cfg, head, 2 * r.r1);
        CHECK(lens == std::set<std::size_t>{0, r.r1, 2 * r.r1});
    }
}

TEST_CASE("universal lengths are exactly the encoded arithmetic progression") {
    // psi = (X = 3 and X does not divide ell'): rejectable iff ell' % 3 != 0,
    // so the compiled machine is universal exactly at 18*ell' + 13 with 3 | ell'.
    formula f = parse_formula("(exists (X) 2 (and (= X 3) (notdivides X)))");
    divisibility_result r = divisibility_program(f);
    compiled_nfa c = compile(expand_macros(r.program, 2), 2);

    // The subset construction explodes here, so scan with the reach-set solver.
    std::size_t max_len = r.r1 * 6 + r.r2;
    std::vector<bool> uni = universal_lengths_upto(c.nfa, max_len);
    for (std::uint64_t ell = 0; ell <= max_len; ++ell) {
        bool expect = ell >= r.r2 && (ell - r.r2) % r.r1 == 0 && ((ell - r.r2) / r.r1) % 3 == 0;
        CHECK(uni[ell] == expect);
    }
}
