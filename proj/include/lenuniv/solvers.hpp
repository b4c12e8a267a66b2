#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "automaton.hpp"
#include "boolmat.hpp"
#include "errors.hpp"

namespace lenuniv {

inline constexpr std::size_t kDefaultHistoryCap = 1'000'000;
inline constexpr std::uint64_t kDefaultBruteBudget = 10'000'000;

// Normalize to a complete DFA: NFAs are determinized (already complete),
// DFAs are completed.
inline automaton universality_machine(const automaton& a,
                                      std::size_t det_cap = kDefaultDeterminizeCap) {
    if (a.kind == automaton_kind::nfa) return determinize(a, det_cap).dfa;
    return complete(a);
}

// Is every word of length ell accepted? ell may be astronomically large:
// decided via boolean matrix powering over the any-letter adjacency.
inline bool universal_at_length(const automaton& a, const bignat& ell,
                                std::size_t det_cap = kDefaultDeterminizeCap) {
    automaton d = universality_machine(a, det_cap);
    state_set fin = d.final_set();
    if (ell == 0) return d.initial_set().subset_of(fin);
    bool_matrix p = mat_pow(adjacency(d), ell);
    return p.row_support(d.initials[0]).subset_of(fin);
}

struct universality_report {
    bool exists = false;
    bignat minimal_length = 0; // valid iff exists
    std::size_t preperiod = 0; // rho: index of first repeated reach-set
    std::size_t period = 0;    // pi: distance to its earlier occurrence
};

// Exact existential solver. Iterates v_{k+1} = image(v_k) over the complete
// DFA; the sequence of reach-sets is ultimately periodic, so scanning
// k < preperiod + period covers all lengths.
inline universality_report minimal_universality_length(
    const automaton& a, std::size_t det_cap = kDefaultDeterminizeCap,
    std::size_t history_cap = kDefaultHistoryCap) {
    automaton d = universality_machine(a, det_cap);
    state_set fin = d.final_set();

    // Per-state any-letter successor lists, deduplicated.
    std::vector<std::vector<std::uint32_t>> next(d.states);
    for (std::size_t q = 0; q < d.states; ++q) {
        auto& v = next[q];
        for (std::size_t s = 0; s < d.nsym(); ++s)
            for (auto t : d.succ(q, s)) v.push_back(t);
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    std::unordered_map<state_set, std::size_t, state_set_hash> seen;
    universality_report rep;
    std::optional<std::size_t> first_universal;
    state_set v = d.initial_set();
    for (std::size_t k = 0;; ++k) {
        auto it = seen.find(v);
        if (it != seen.end()) {
            rep.preperiod = it->second;
            rep.period = k - it->second;
            break;
        }
        if (seen.size() >= history_cap)
            throw resource_limit_error("minimal_universality_length: history cap exceeded (" +
                                       std::to_string(history_cap) + ")");
        seen.emplace(v, k);
        if (!first_universal && v.subset_of(fin)) first_universal = k;
        state_set w(d.states);
        v.for_each([&](std::size_t q) {
            for (auto t : next[q]) w.set(t);
        });
        v = std::move(w);
    }
    if (first_universal) {
        rep.exists = true;
        rep.minimal_length = *first_universal;
    }
    return rep;
}

// Independent oracle: enumerate every word of length ell and test acceptance
// directly on the input automaton.
inline bool brute_force_universal(const automaton& a, std::size_t ell,
                                  std::uint64_t budget = kDefaultBruteBudget) {
    std::vector<std::size_t> word(ell, 0);
    std::uint64_t used = 0;
    state_set fin = a.final_set();
    // Depth-first over words, maintaining the reach-set prefix by prefix.
    std::vector<state_set> stack;
    stack.reserve(ell + 1);
    stack.push_back(a.initial_set());
    std::size_t depth = 0;
    while (true) {
        if (depth == ell) {
            if (++used > budget)
                throw resource_limit_error("brute_force_universal: word budget exceeded");
            if (!stack.back().intersects(fin)) return false;
            // backtrack
            while (depth > 0 && word[depth - 1] + 1 == a.nsym()) {
                --depth;
                stack.pop_back();
            }
            if (depth == 0) return true;
            ++word[depth - 1];
            stack.back() = step_set(a, stack[depth - 1], word[depth - 1]);
        } else {
            word[depth] = 0;
            stack.push_back(step_set(a, stack.back(), 0));
            ++depth;
        }
    }
}

// Universality for every length up to max_len at once, without the full
// subset construction. Compiled gadget NFAs have an absorbing accepting
// state, so most reach-sets are accepted forever; tracking only the
// reach-sets that avoid every accept-absorbing state (states whose entire
// forward closure is accepting) keeps the frontier at configuration scale
// where determinization blows up. result[ell] == universal_at_length(ell).
inline std::vector<bool> universal_lengths_upto(const automaton& a, std::size_t max_len,
                                                std::uint64_t budget = 50'000'000) {
    state_set fin = a.final_set();

    // Accept-absorbing states: final, and on every symbol some successor is
    // accept-absorbing again. A reach-set containing one accepts every
    // extension, so such sets can never falsify universality. Greatest
    // fixpoint inside the final states.
    state_set absorbing = fin;
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t q = 0; q < a.states; ++q) {
            if (!absorbing.test(q)) continue;
            for (std::size_t s = 0; s < a.nsym(); ++s) {
                bool kept = false;
                for (auto t : a.succ(q, s))
                    if (absorbing.test(t)) {
                        kept = true;
                        break;
                    }
                if (!kept) {
                    absorbing.reset(q);
                    changed = true;
                    break;
                }
            }
        }
    }

    std::vector<bool> universal(max_len + 1, true);
    state_set init = a.initial_set();
    auto absorbed = [&](const state_set& s) { return s.intersects(absorbing); };
    if (absorbed(init)) return universal; // every word is accepted
    std::vector<state_set> layer{init};
    if (!init.intersects(fin)) universal[0] = false;
    std::uint64_t used = 0;
    for (std::size_t d = 1; d <= max_len && !layer.empty(); ++d) {
        std::unordered_set<state_set, state_set_hash> seen;
        std::vector<state_set> next;
        for (const auto& s : layer)
            for (std::size_t sym = 0; sym < a.nsym(); ++sym) {
                if (++used > budget)
                    throw resource_limit_error("universal_lengths_upto: budget exceeded");
                state_set t = step_set(a, s, sym);
                if (t.empty()) { // dead word: it and every extension is rejected
                    for (std::size_t k = d; k <= max_len; ++k) universal[k] = false;
                    return universal;
                }
                if (absorbed(t) || !seen.insert(t).second) continue;
                if (!t.intersects(fin)) universal[d] = false;
                next.push_back(std::move(t));
            }
        layer = std::move(next);
    }
    return universal;
}

} // namespace lenuniv
