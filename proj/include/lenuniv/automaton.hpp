#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "errors.hpp"
#include "state_set.hpp"

namespace lenuniv {

enum class automaton_kind { dfa, nfa };

// Finite automaton over an explicit named alphabet. A "dfa" here means at
// most one successor per (state, symbol); it need not be complete.
struct automaton {
    automaton_kind kind = automaton_kind::nfa;
    std::vector<std::string> alphabet;
    std::size_t states = 0;
    std::vector<std::size_t> initials; // sorted, unique
    std::vector<std::size_t> finals;   // sorted, unique
    // delta[state * |alphabet| + symbol] = sorted successor list
    std::vector<std::vector<std::uint32_t>> delta;

    std::size_t nsym() const { return alphabet.size(); }

    const std::vector<std::uint32_t>& succ(std::size_t q, std::size_t sym) const {
        return delta[q * nsym() + sym];
    }

    std::size_t symbol_index(const std::string& s) const {
        for (std::size_t i = 0; i < alphabet.size(); ++i)
            if (alphabet[i] == s) return i;
        throw input_error("unknown symbol: " + s);
    }

    void add_transition(std::size_t from, std::size_t sym, std::size_t to) {
        auto& v = delta[from * nsym() + sym];
        auto it = std::lower_bound(v.begin(), v.end(), static_cast<std::uint32_t>(to));
        if (it == v.end() || *it != to) v.insert(it, static_cast<std::uint32_t>(to));
    }

    state_set initial_set() const {
        state_set s(states);
        for (auto q : initials) s.set(q);
        return s;
    }

    state_set final_set() const {
        state_set s(states);
        for (auto q : finals) s.set(q);
        return s;
    }

    void validate() const {
        if (alphabet.empty()) throw input_error("automaton: empty alphabet");
        {
            auto a = alphabet;
            std::sort(a.begin(), a.end());
            if (std::adjacent_find(a.begin(), a.end()) != a.end())
                throw input_error("automaton: duplicate alphabet symbol");
        }
        if (initials.empty()) throw input_error("automaton: no initial state");
        if (kind == automaton_kind::dfa && initials.size() != 1)
            throw input_error("automaton: dfa must have exactly one initial state");
        auto check_states = [&](const std::vector<std::size_t>& v, const char* what) {
            for (auto q : v)
                if (q >= states) throw input_error(std::string("automaton: ") + what + " state out of range");
            if (!std::is_sorted(v.begin(), v.end()) ||
                std::adjacent_find(v.begin(), v.end()) != v.end())
                throw input_error(std::string("automaton: ") + what + " states not sorted/unique");
        };
        check_states(initials, "initial");
        check_states(finals, "final");
        if (delta.size() != states * alphabet.size())
            throw input_error("automaton: transition table size mismatch");
        for (std::size_t q = 0; q < states; ++q)
            for (std::size_t a = 0; a < alphabet.size(); ++a) {
                const auto& v = succ(q, a);
                for (auto t : v)
                    if (t >= states) throw input_error("automaton: transition target out of range");
                if (kind == automaton_kind::dfa && v.size() > 1)
                    throw input_error("automaton: dfa state has multiple successors");
            }
    }
};

inline automaton make_automaton(automaton_kind kind, std::vector<std::string> alphabet,
                                std::size_t states) {
    automaton a;
    a.kind = kind;
    a.alphabet = std::move(alphabet);
    a.states = states;
    a.delta.assign(states * a.alphabet.size(), {});
    return a;
}

// One synchronous step of the powerset simulation.
inline state_set step_set(const automaton& a, const state_set& s, std::size_t sym) {
    if (sym >= a.nsym()) throw input_error("step_set: symbol index out of range");
    state_set out(a.states);
    s.for_each([&](std::size_t q) {
        for (auto t : a.succ(q, sym)) out.set(t);
    });
    return out;
}

inline state_set run_word(const automaton& a, const std::vector<std::size_t>& word) {
    state_set s = a.initial_set();
    for (auto sym : word) s = step_set(a, s, sym);
    return s;
}

inline bool accepts(const automaton& a, const std::vector<std::size_t>& word) {
    return run_word(a, word).intersects(a.final_set());
}

// Complete a DFA by routing every missing (state, symbol) edge to a fresh
// non-final sink. Returns the input unchanged when already complete.
inline automaton complete(const automaton& a) {
    if (a.kind != automaton_kind::dfa) throw input_error("complete: expects a dfa");
    bool missing = false;
    for (std::size_t q = 0; q < a.states && !missing; ++q)
        for (std::size_t s = 0; s < a.nsym(); ++s)
            if (a.succ(q, s).empty()) {
                missing = true;
                break;
            }
    if (!missing) return a;
    automaton out = make_automaton(automaton_kind::dfa, a.alphabet, a.states + 1);
    out.initials = a.initials;
    out.finals = a.finals;
    std::size_t sink = a.states;
    for (std::size_t q = 0; q < a.states; ++q)
        for (std::size_t s = 0; s < a.nsym(); ++s) {
            const auto& v = a.succ(q, s);
            out.add_transition(q, s, v.empty() ? sink : v[0]);
        }
    for (std::size_t s = 0; s < a.nsym(); ++s) out.add_transition(sink, s, sink);
    return out;
}

struct determinize_result {
    automaton dfa; // complete by construction
    std::vector<state_set> subsets; // subsets[i] = NFA subset behind DFA state i
};

inline constexpr std::size_t kDefaultDeterminizeCap = 1'000'000;

// Reachable-subset construction. The empty subset appears as an ordinary
// (absorbing, non-final) subset when reachable.
inline determinize_result determinize(const automaton& a,
                                      std::size_t cap = kDefaultDeterminizeCap) {
    std::unordered_map<state_set, std::size_t, state_set_hash> idx;
    std::vector<state_set> subsets;
    std::deque<std::size_t> work;

    auto intern = [&](const state_set& s) {
        auto it = idx.find(s);
        if (it != idx.end()) return it->second;
        if (subsets.size() >= cap)
            throw resource_limit_error("determinize: subset cap exceeded (" + std::to_string(cap) + ")");
        std::size_t id = subsets.size();
        idx.emplace(s, id);
        subsets.push_back(s);
        work.push_back(id);
        return id;
    };

    intern(a.initial_set());
    std::vector<std::vector<std::uint32_t>> trans; // trans[q] per symbol
    state_set fin = a.final_set();
    std::vector<bool> is_final;
    while (!work.empty()) {
        std::size_t q = work.front();
        work.pop_front();
        if (trans.size() <= q) trans.resize(q + 1);
        if (is_final.size() <= q) is_final.resize(q + 1);
        state_set cur = subsets[q]; // copy: subsets may reallocate below
        is_final[q] = cur.intersects(fin);
        trans[q].resize(a.nsym());
        for (std::size_t s = 0; s < a.nsym(); ++s)
            trans[q][s] = static_cast<std::uint32_t>(intern(step_set(a, cur, s)));
    }
    trans.resize(subsets.size());
    is_final.resize(subsets.size());

    automaton d = make_automaton(automaton_kind::dfa, a.alphabet, subsets.size());
    d.initials = {0};
    for (std::size_t q = 0; q < subsets.size(); ++q) {
        if (is_final[q]) d.finals.push_back(q);
        for (std::size_t s = 0; s < a.nsym(); ++s) d.add_transition(q, s, trans[q][s]);
    }
    return {std::move(d), std::move(subsets)};
}

// ---- JSON (de)serialization; schema is part of the CLI contract ----

inline nlohmann::json store_automaton(const automaton& a) {
    nlohmann::json j;
    j["kind"] = a.kind == automaton_kind::dfa ? "dfa" : "nfa";
    j["alphabet"] = a.alphabet;
    j["states"] = a.states;
    j["initials"] = a.initials;
    j["finals"] = a.finals;
    auto trans = nlohmann::json::array();
    for (std::size_t q = 0; q < a.states; ++q)
        for (std::size_t s = 0; s < a.nsym(); ++s)
            for (auto t : a.succ(q, s))
                trans.push_back(nlohmann::json::array({q, a.alphabet[s], t}));
    j["transitions"] = std::move(trans);
    return j;
}

inline automaton load_automaton(const nlohmann::json& j) {
    auto fail = [](const std::string& where) -> void {
        throw parse_error("automaton json: " + where);
    };
    if (!j.is_object()) fail("not an object");
    for (const char* key : {"kind", "alphabet", "states", "initials", "finals", "transitions"})
        if (!j.contains(key)) fail(std::string("missing field '") + key + "'");

    automaton a;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "dfa")
        a.kind = automaton_kind::dfa;
    else if (kind == "nfa")
        a.kind = automaton_kind::nfa;
    else
        fail("kind must be 'dfa' or 'nfa'");

    if (!j.at("alphabet").is_array() || j.at("alphabet").empty()) fail("alphabet must be a non-empty array");
    for (const auto& s : j.at("alphabet")) {
        if (!s.is_string()) fail("alphabet entries must be strings");
        a.alphabet.push_back(s.get<std::string>());
    }
    if (!j.at("states").is_number_unsigned()) fail("states must be a non-negative integer");
    a.states = j.at("states").get<std::size_t>();
    a.delta.assign(a.states * a.alphabet.size(), {});

    auto read_states = [&](const char* key) {
        std::vector<std::size_t> v;
        if (!j.at(key).is_array()) fail(std::string(key) + " must be an array");
        for (const auto& e : j.at(key)) {
            if (!e.is_number_unsigned()) fail(std::string(key) + " entries must be non-negative integers");
            v.push_back(e.get<std::size_t>());
        }
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    };
    a.initials = read_states("initials");
    a.finals = read_states("finals");

    if (!j.at("transitions").is_array()) fail("transitions must be an array");
    std::size_t ti = 0;
    for (const auto& t : j.at("transitions")) {
        std::string at = "transitions[" + std::to_string(ti++) + "]";
        if (!t.is_array() || t.size() != 3) fail(at + " must be [from, symbol, to]");
        if (!t[0].is_number_unsigned() || !t[1].is_string() || !t[2].is_number_unsigned())
            fail(at + " must be [nat, string, nat]");
        std::size_t from = t[0].get<std::size_t>();
        std::size_t to = t[2].get<std::size_t>();
        std::string sym = t[1].get<std::string>();
        if (from >= a.states || to >= a.states) fail(at + ": state index out of range");
        std::size_t si = 0;
        for (; si < a.alphabet.size(); ++si)
            if (a.alphabet[si] == sym) break;
        if (si == a.alphabet.size()) fail(at + ": symbol not in alphabet: " + sym);
        a.add_transition(from, si, to);
    }
    try {
        a.validate();
    } catch (const input_error& e) {
        throw parse_error(e.what());
    }
    return a;
}

} // namespace lenuniv
