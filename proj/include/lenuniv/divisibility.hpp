#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "formulas.hpp"
#include "gadget_compile.hpp"
#include "gadget_sim.hpp"

namespace lenuniv {

// Longest run from the component's start (all variables empty) along
// configurations that never touch q_acc; nullopt when the configuration
// graph has a proper cycle or the budget is exhausted. This is the bound L
// that the parallel gadget's automatic delay selection uses.
inline std::optional<std::uint64_t> longest_proper_run(const compiled_nfa& c,
                                                       std::uint64_t budget = 500'000) {
    std::unordered_map<state_set, std::uint64_t, state_set_hash> memo;
    std::unordered_map<state_set, int, state_set_hash> color; // 1 = on stack
    struct frame {
        state_set cfg;
        std::size_t sym;
        std::uint64_t best;
    };
    std::vector<frame> stack;
    state_set init(c.nfa.states);
    init.set(c.start);
    stack.push_back({init, 0, 0});
    color[init] = 1;
    while (!stack.empty()) {
        frame& f = stack.back();
        if (f.sym == c.nfa.nsym()) {
            memo[f.cfg] = f.best;
            color[f.cfg] = 2;
            std::uint64_t done = f.best;
            stack.pop_back();
            if (!stack.empty()) {
                auto& pf = stack.back();
                pf.best = std::max(pf.best, done + 1);
                ++pf.sym;
            }
            continue;
        }
        state_set nxt = step_set(c.nfa, f.cfg, f.sym);
        if (!is_proper(c, nxt)) {
            ++f.sym;
            continue;
        }
        auto itc = color.find(nxt);
        if (itc != color.end() && itc->second == 1) return std::nullopt; // cycle
        auto itm = memo.find(nxt);
        if (itm != memo.end()) {
            f.best = std::max(f.best, itm->second + 1);
            ++f.sym;
            continue;
        }
        if (memo.size() + stack.size() > budget) return std::nullopt;
        color[nxt] = 1;
        stack.push_back({std::move(nxt), 0, 0});
    }
    return memo[init];
}

struct divisibility_result {
    gadget_program program; // still contains macros; expand_macros before compiling
    std::uint64_t r1 = 0;   // letters per complete loop iteration
    std::uint64_t r2 = 0;   // letters of the shortest final-reaching prefix
    std::uint64_t D = 0;    // delay matched to the verifier bound
};

// The counting wrapper: select X_1..X_k, zero the counters, then loop
// forever choosing between running the verifier (padded to T(D)+1 letters by
// the parallel gadget) and an equally long delay that passes through the
// single final state; each iteration ends by stepping every counter modulo
// its X_i. Words of length r1*ell' + r2 are then rejectable exactly when the
// verifier succeeds at counter values ell' mod X_i.
inline divisibility_result divisibility_program(const formula& f,
                                                std::uint64_t explicit_delay = 0) {
    gadget_program verify = verify_to_program(f);
    std::size_t k = f.vars.size();
    unsigned m = f.m;

    std::uint64_t D = explicit_delay;
    if (D == 0) {
        compiled_nfa cv = compile(expand_macros(verify, m), m);
        auto L = longest_proper_run(cv);
        if (!L)
            throw resource_limit_error(
                "divisibility_program: cannot bound the verifier's computations; "
                "supply an explicit delay D with T(D) >= its longest complete computation");
        D = 1;
        while (delay_T(D) < *L) ++D;
    }

    gadget_program prog;
    prog.decls = verify.decls;
    prog.fresh_counter = verify.fresh_counter;

    std::vector<stmt> top;
    for (const auto& v : f.vars) top.push_back(gb::select(v));
    for (const auto& v : f.vars) top.push_back(gb::assign_const(counter_name(v), 0));

    std::vector<stmt> loop;
    loop.push_back(gb::choose(
        {gb::seq({gb::parallel(verify.body, D)}),
         gb::seq({gb::delay(D), gb::final_mark(gb::wait(1))})}));
    for (const auto& v : f.vars) {
        std::string cnt = counter_name(v);
        loop.push_back(gb::inc(cnt));
        loop.push_back(gb::if_then(gb::eq(cnt, v), gb::seq({gb::assign_const(cnt, 0)})));
    }
    top.push_back(gb::while_true(gb::seq(std::move(loop))));
    prog.body = gb::seq(std::move(top));
    prog.renumber();

    divisibility_result out;
    out.program = std::move(prog);
    out.D = D;
    out.r1 = 1 + (delay_T(D) + 1) + (2 * std::uint64_t(m) + 3) * k;
    out.r2 = std::uint64_t(k) * m + k + 1 + delay_T(D);
    return out;
}

} // namespace lenuniv
