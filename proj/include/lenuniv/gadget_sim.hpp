#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "gadget_compile.hpp"

namespace lenuniv {

// Initial configuration: top-level start state active; listed variables
// encoded bit-wise; "invalid" variables get a caller-chosen subset of their
// states; unmentioned variables get no states at all.
inline state_set initial_configuration(
    const compiled_nfa& c, const std::map<std::string, std::uint64_t>& values,
    const std::map<std::string, std::vector<std::uint32_t>>& invalid = {}) {
    state_set s(c.nfa.states);
    s.set(c.start);
    for (const auto& [name, value] : values) {
        auto it = c.vars.find(name);
        if (it == c.vars.end()) throw input_error("initial_configuration: unknown variable " + name);
        const var_states& v = it->second;
        if (v.width >= 64 || value > ((std::uint64_t(1) << v.width) - 1))
            throw input_error("initial_configuration: value out of range for " + name);
        for (unsigned i = 0; i < v.width; ++i) s.set((value >> i) & 1 ? v.pos[i] : v.neg[i]);
    }
    for (const auto& [name, subset] : invalid) {
        if (values.count(name)) throw input_error("initial_configuration: " + name + " both valid and invalid");
        if (!c.vars.count(name)) throw input_error("initial_configuration: unknown variable " + name);
        for (auto q : subset) s.set(q);
    }
    return s;
}

inline bool is_proper(const compiled_nfa& c, const state_set& conf) { return !conf.test(c.q_acc); }

// Decode a variable's value; nullopt when not valid (not exactly one of
// each v_i / negated-v_i pair active).
inline std::optional<std::uint64_t> var_value(const compiled_nfa& c, const state_set& conf,
                                              const std::string& name) {
    const var_states& v = c.vars.at(name);
    std::uint64_t val = 0;
    for (unsigned i = 0; i < v.width; ++i) {
        bool p = conf.test(v.pos[i]), n = conf.test(v.neg[i]);
        if (p == n) return std::nullopt;
        if (p) val |= std::uint64_t(1) << i;
    }
    return val;
}

inline std::size_t count_active_controls(const compiled_nfa& c, const state_set& conf) {
    std::size_t n = 0;
    conf.for_each([&](std::size_t q) {
        if (c.is_control[q]) ++n;
    });
    return n;
}

struct computation {
    std::vector<std::size_t> word;
    state_set end;
};

// All words of length <= max_len from `from` that stay proper throughout and
// end with `target` active.
inline std::vector<computation> enumerate_computations(const compiled_nfa& c, const state_set& from,
                                                       std::uint32_t target, std::size_t max_len,
                                                       std::uint64_t budget = 5'000'000) {
    std::vector<computation> out;
    if (!is_proper(c, from)) return out;
    struct frame {
        state_set cfg;
        std::size_t sym;
    };
    std::vector<frame> stack{{from, 0}};
    std::vector<std::size_t> word;
    std::uint64_t used = 0;
    if (from.test(target)) out.push_back({word, from});
    while (!stack.empty()) {
        frame& f = stack.back();
        if (word.size() == max_len || f.sym == c.nfa.nsym()) {
            stack.pop_back();
            if (!word.empty()) word.pop_back();
            continue;
        }
        std::size_t sym = f.sym++;
        if (++used > budget) throw resource_limit_error("enumerate_computations: budget exceeded");
        state_set nxt = step_set(c.nfa, f.cfg, sym);
        if (!is_proper(c, nxt)) continue;
        word.push_back(sym);
        if (nxt.test(target)) out.push_back({word, nxt});
        stack.push_back({std::move(nxt), 0});
    }
    return out;
}

// Reachability-based existence check; merges words leading to the same
// configuration, so it scales where word enumeration cannot.
inline bool complete_computation_exists(const compiled_nfa& c, const state_set& from,
                                        std::uint32_t target, std::uint64_t budget = 2'000'000) {
    if (!is_proper(c, from)) return false;
    if (from.test(target)) return true;
    std::unordered_set<state_set, state_set_hash> seen{from};
    std::deque<state_set> work{from};
    std::uint64_t used = 0;
    while (!work.empty()) {
        state_set cur = work.front();
        work.pop_front();
        for (std::size_t sym = 0; sym < c.nfa.nsym(); ++sym) {
            if (++used > budget)
                throw resource_limit_error("complete_computation_exists: budget exceeded");
            state_set nxt = step_set(c.nfa, cur, sym);
            if (!is_proper(c, nxt)) continue;
            if (nxt.test(target)) return true;
            if (seen.insert(nxt).second) work.push_back(nxt);
        }
    }
    return false;
}

// Depths at which some proper computation from `from` has `target` active.
// Layered search with per-depth deduplication, so it scales to lengths where
// word enumeration cannot.
inline std::set<std::size_t> complete_computation_lengths(const compiled_nfa& c,
                                                           const state_set& from,
                                                           std::uint32_t target, std::size_t max_len,
                                                           std::uint64_t budget = 20'000'000) {
    std::set<std::size_t> out;
    if (!is_proper(c, from)) return out;
    if (from.test(target)) out.insert(0);
    std::vector<state_set> layer{from};
    std::uint64_t used = 0;
    for (std::size_t d = 1; d <= max_len && !layer.empty(); ++d) {
        std::unordered_set<state_set, state_set_hash> seen;
        std::vector<state_set> next;
        for (const auto& cfg : layer)
            for (std::size_t sym = 0; sym < c.nfa.nsym(); ++sym) {
                if (++used > budget)
                    throw resource_limit_error("complete_computation_lengths: budget exceeded");
                state_set nxt = step_set(c.nfa, cfg, sym);
                if (!is_proper(c, nxt) || !seen.insert(nxt).second) continue;
                if (nxt.test(target)) out.insert(d);
                next.push_back(std::move(nxt));
            }
        layer = std::move(next);
    }
    return out;
}

// Every distinct configuration with `target` active that some proper
// computation from `from` reaches (at any length). Used to inspect variable
// values in final configurations without enumerating words.
inline std::vector<state_set> target_configurations(const compiled_nfa& c, const state_set& from,
                                                    std::uint32_t target,
                                                    std::uint64_t budget = 20'000'000) {
    std::vector<state_set> out;
    if (!is_proper(c, from)) return out;
    std::unordered_set<state_set, state_set_hash> seen{from};
    std::deque<state_set> work{from};
    if (from.test(target)) out.push_back(from);
    std::uint64_t used = 0;
    while (!work.empty()) {
        state_set cur = work.front();
        work.pop_front();
        for (std::size_t sym = 0; sym < c.nfa.nsym(); ++sym) {
            if (++used > budget)
                throw resource_limit_error("target_configurations: budget exceeded");
            state_set nxt = step_set(c.nfa, cur, sym);
            if (!is_proper(c, nxt) || !seen.insert(nxt).second) continue;
            if (nxt.test(target)) out.push_back(nxt);
            work.push_back(nxt);
        }
    }
    return out;
}

} // namespace lenuniv
