#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "automaton.hpp"
#include "boolmat.hpp"
#include "formulas.hpp"
#include "primes.hpp"

namespace lenuniv {

// ---------------------------------------------------------------------------
// Prime-cycle DFA: a non-final initial state fans out on symbol a_i into a
// cycle of size p(i) over the full alphabet; the only final state of each
// cycle sits immediately before the cycle's entry point, so a word of length
// ell is accepted iff ell is divisible by the prime of the cycle it chose.
// ---------------------------------------------------------------------------

inline automaton prime_cycle_dfa(std::uint64_t t, bool binarize_initial = false) {
    if (t < 1) throw input_error("prime_cycle_dfa: t must be >= 1");
    if (binarize_initial && t < 2)
        throw input_error("prime_cycle_dfa: binarization needs t >= 2");
    std::vector<std::uint64_t> primes(t);
    std::size_t total = 0;
    for (std::uint64_t i = 0; i < t; ++i) {
        primes[i] = nth_prime(i + 1);
        total += primes[i];
    }

    if (!binarize_initial) {
        std::vector<std::string> alphabet;
        for (std::uint64_t i = 1; i <= t; ++i) alphabet.push_back("a" + std::to_string(i));
        automaton a = make_automaton(automaton_kind::dfa, alphabet, 1 + total);
        a.initials = {0};
        std::size_t base = 1;
        for (std::uint64_t i = 0; i < t; ++i) {
            std::size_t p = primes[i];
            a.add_transition(0, i, static_cast<std::uint32_t>(base));
            for (std::size_t j = 0; j < p; ++j)
                for (std::size_t sym = 0; sym < t; ++sym)
                    a.add_transition(static_cast<std::uint32_t>(base + j), sym,
                                     static_cast<std::uint32_t>(base + (j + 1) % p));
            a.finals.push_back(static_cast<std::uint32_t>(base + p - 1));
            base += p;
        }
        std::sort(a.finals.begin(), a.finals.end());
        a.validate();
        return a;
    }

    // Binary variant: the initial state becomes a full binary tree of height
    // h = ceil(log2 t) - 1 whose 2^(h+1) leaf edges route the binary code of
    // i to cycle i; codes >= t fall back to cycle 0. Inside cycles both bits
    // advance, since the original cycles read the whole alphabet uniformly.
    unsigned hp1 = 0; // h + 1 = ceil(log2 t)
    while ((std::uint64_t(1) << hp1) < t) ++hp1;
    std::size_t tree = (std::size_t(1) << hp1) - 1; // 2^(h+1) - 1 internal nodes
    automaton a = make_automaton(automaton_kind::dfa, {"0", "1"}, tree + total);
    a.initials = {0};
    std::vector<std::size_t> cycle_base(t);
    std::size_t base = tree;
    for (std::uint64_t i = 0; i < t; ++i) {
        cycle_base[i] = base;
        std::size_t p = primes[i];
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t sym = 0; sym < 2; ++sym)
                a.add_transition(static_cast<std::uint32_t>(base + j), sym,
                                 static_cast<std::uint32_t>(base + (j + 1) % p));
        a.finals.push_back(static_cast<std::uint32_t>(base + p - 1));
        base += p;
    }
    // heap-ordered tree nodes: node v at depth d; edge on bit b goes to child
    // 2v+1+b, or to the cycle whose index is the completed code
    for (std::size_t v = 0; v < tree; ++v) {
        bool last = 2 * v + 1 >= tree;
        for (std::size_t b = 0; b < 2; ++b) {
            if (!last) {
                a.add_transition(static_cast<std::uint32_t>(v), b,
                                 static_cast<std::uint32_t>(2 * v + 1 + b));
            } else {
                // code = path bits of v (v+1 minus leading one) followed by b
                std::size_t code = ((v + 1) - (std::size_t(1) << (hp1 - 1))) * 2 + b;
                std::size_t idx = code < t ? code : 0;
                a.add_transition(static_cast<std::uint32_t>(v), b,
                                 static_cast<std::uint32_t>(cycle_base[idx]));
            }
        }
    }
    std::sort(a.finals.begin(), a.finals.end());
    a.validate();
    return a;
}

// ---------------------------------------------------------------------------
// 3-CNF and the satisfiability reduction. Lengths encode assignments through
// residues: ell mod p(i) = 1 sets v_i, = 0 clears it, anything else is not an
// assignment encoding.
// ---------------------------------------------------------------------------

struct cnf_literal {
    std::uint32_t var = 0; // 1-based
    bool positive = true;
};

struct cnf {
    std::uint32_t nvars = 0;
    std::vector<std::array<cnf_literal, 3>> clauses;
};

inline cnf parse_dimacs(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    cnf out;
    bool header = false;
    std::size_t expected_clauses = 0;
    std::vector<long long> pending;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "c") continue;
        if (tok == "p") {
            std::string kind;
            if (!(ls >> kind >> out.nvars >> expected_clauses) || kind != "cnf")
                throw parse_error("dimacs: malformed problem line");
            header = true;
            continue;
        }
        if (!header) throw parse_error("dimacs: clause before 'p cnf' header");
        ls.clear();
        ls.str(line);
        long long v;
        while (ls >> v) {
            if (v == 0) {
                if (pending.size() != 3)
                    throw parse_error("dimacs: clauses must have exactly 3 literals");
                std::array<cnf_literal, 3> cl;
                for (int i = 0; i < 3; ++i) {
                    long long lit = pending[i];
                    std::uint32_t idx = static_cast<std::uint32_t>(lit < 0 ? -lit : lit);
                    if (idx == 0 || idx > out.nvars)
                        throw parse_error("dimacs: variable index out of range");
                    cl[i] = {idx, lit > 0};
                }
                if (cl[0].var == cl[1].var || cl[0].var == cl[2].var || cl[1].var == cl[2].var)
                    throw parse_error("dimacs: clause variables must be distinct");
                out.clauses.push_back(cl);
                pending.clear();
            } else {
                pending.push_back(v);
            }
        }
    }
    if (!pending.empty()) throw parse_error("dimacs: clause not terminated by 0");
    if (!header) throw parse_error("dimacs: missing 'p cnf' header");
    if (expected_clauses != out.clauses.size())
        throw parse_error("dimacs: clause count does not match header");
    return out;
}

inline bool clause_satisfied(const std::array<cnf_literal, 3>& cl,
                             const std::array<int, 3>& bits) {
    for (int i = 0; i < 3; ++i)
        if ((bits[i] == 1) == cl[i].positive) return true;
    return false;
}

inline automaton sat_to_dfa(const cnf& c) {
    if (c.clauses.empty()) throw input_error("sat_to_dfa: formula has no clauses");
    std::size_t s = c.clauses.size();
    std::vector<std::string> alphabet;
    for (std::size_t i = 1; i <= s; ++i) alphabet.push_back(std::to_string(i));

    std::vector<std::uint64_t> cyc(s);
    std::size_t total = 0;
    for (std::size_t i = 0; i < s; ++i) {
        std::uint64_t n = 1;
        for (const auto& lit : c.clauses[i]) n *= nth_prime(lit.var);
        cyc[i] = n;
        total += n;
    }
    automaton a = make_automaton(automaton_kind::dfa, alphabet, 1 + total);
    a.initials = {0};
    std::size_t base = 1;
    for (std::size_t i = 0; i < s; ++i) {
        std::uint64_t n = cyc[i];
        a.add_transition(0, i, static_cast<std::uint32_t>(base));
        for (std::uint64_t j = 0; j < n; ++j)
            for (std::size_t sym = 0; sym < s; ++sym)
                a.add_transition(static_cast<std::uint32_t>(base + j), sym,
                                 static_cast<std::uint32_t>(base + (j + 1) % n));
        // state base+j is reached by words of length ell with ell = j+1 mod n;
        // it accepts iff that residue encodes bits satisfying the clause
        std::array<std::uint64_t, 3> ps;
        for (int v = 0; v < 3; ++v) ps[v] = nth_prime(c.clauses[i][v].var);
        for (std::uint64_t rho = 0; rho < n; ++rho) {
            std::array<int, 3> bits;
            bool enc = true;
            for (int v = 0; v < 3; ++v) {
                std::uint64_t r = rho % ps[v];
                if (r > 1) {
                    enc = false;
                    break;
                }
                bits[v] = static_cast<int>(r);
            }
            if (enc && clause_satisfied(c.clauses[i], bits))
                a.finals.push_back(static_cast<std::uint32_t>(base + (rho + n - 1) % n));
        }
        base += n;
    }
    std::sort(a.finals.begin(), a.finals.end());
    a.finals.erase(std::unique(a.finals.begin(), a.finals.end()), a.finals.end());
    a.validate();
    return a;
}

// Read an assignment out of a length; index i-1 holds v_i.
inline std::vector<bool> decode_sat_assignment(const bignat& ell, const cnf& c) {
    std::vector<bool> out(c.nvars);
    for (std::uint32_t i = 1; i <= c.nvars; ++i) {
        std::uint64_t r = (ell % nth_prime(i)).convert_to<std::uint64_t>();
        if (r > 1)
            throw input_error("decode_sat_assignment: not an assignment-encoding length (residue " +
                              std::to_string(r) + " mod p(" + std::to_string(i) + "))");
        out[i - 1] = r == 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// The reference long-run program: select a modulus Y, count X up to it in an
// infinite loop, marking a final state only on the equality branch.
// ---------------------------------------------------------------------------

inline std::string alg3_program(unsigned m) {
    if (m == 0) throw input_error("alg3_program: width m must be >= 1");
    std::ostringstream out;
    out << "var X, Y;\n"
        << "select Y;\n"
        << "X <- 0;\n"
        << "while true {\n"
        << "  choose {\n"
        << "    eq X Y;\n"
        << "    X <- 0;\n"
        << "    final wait " << (m + 1) << ";\n"
        << "  } or {\n"
        << "    neq X Y;\n"
        << "    inc X;\n"
        << "  }\n"
        << "}\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Alphabet binarization: every state becomes a full binary tree of height
// ceil(log2 k) - 1; reading H = ceil(log2 k) bits selects a symbol code and
// jumps to the root of each target's tree. Codes past k-1 duplicate symbol 0.
// Word lengths scale by H.
// ---------------------------------------------------------------------------

inline automaton binarize(const automaton& a) {
    std::size_t k = a.nsym();
    if (k < 2) throw input_error("binarize: alphabet must have at least 2 symbols");
    unsigned H = 0;
    while ((std::size_t(1) << H) < k) ++H;
    std::size_t tree = (std::size_t(1) << H) - 1;
    automaton b = make_automaton(a.kind, {"0", "1"}, a.states * tree);
    auto node = [&](std::uint32_t q, std::size_t v) {
        return static_cast<std::uint32_t>(q * tree + v);
    };
    for (auto q : a.initials) b.initials.push_back(node(q, 0));
    for (auto q : a.finals) b.finals.push_back(node(q, 0));
    for (std::uint32_t q = 0; q < a.states; ++q) {
        for (std::size_t v = 0; v < tree; ++v) {
            bool last = 2 * v + 1 >= tree;
            for (std::size_t bit = 0; bit < 2; ++bit) {
                if (!last) {
                    b.add_transition(node(q, v), bit, node(q, 2 * v + 1 + bit));
                } else {
                    std::size_t code = ((v + 1) - (std::size_t(1) << (H - 1))) * 2 + bit;
                    std::size_t sym = code < k ? code : 0;
                    for (auto to : a.succ(q, sym)) b.add_transition(node(q, v), bit, node(to, 0));
                }
            }
        }
    }
    std::sort(b.initials.begin(), b.initials.end());
    std::sort(b.finals.begin(), b.finals.end());
    b.validate();
    return b;
}

// ---------------------------------------------------------------------------
// Nondeterministic Turing machines on a binary tape of length 2^s, run for
// 2^s steps from the all-zero tape. The accepting state is a sink; once
// reached, the machine waits in place.
// ---------------------------------------------------------------------------

struct ntm_transition {
    std::uint32_t from = 0;
    int read = 0;
    std::uint32_t to = 0;
    int write = 0;
    int move = 1; // +1 = R, -1 = L
};

struct ntm {
    std::uint32_t states = 0;
    std::uint32_t q0 = 0, qf = 0;
    std::vector<ntm_transition> delta;
};

inline void validate_ntm(const ntm& n) {
    if (n.states == 0) throw input_error("ntm: needs at least one state");
    if (n.q0 >= n.states || n.qf >= n.states) throw input_error("ntm: q0/qf out of range");
    std::vector<std::array<bool, 2>> covered(n.states, {false, false});
    for (const auto& t : n.delta) {
        if (t.from >= n.states || t.to >= n.states) throw input_error("ntm: transition state out of range");
        if ((t.read != 0 && t.read != 1) || (t.write != 0 && t.write != 1))
            throw input_error("ntm: tape symbols must be 0 or 1");
        if (t.move != 1 && t.move != -1) throw input_error("ntm: move must be L or R");
        if (t.from == n.qf)
            throw input_error("ntm: accepting state must have no outgoing transitions");
        covered[t.from][t.read] = true;
    }
    for (std::uint32_t q = 0; q < n.states; ++q) {
        if (q == n.qf) continue;
        for (int b = 0; b < 2; ++b)
            if (!covered[q][b])
                throw input_error("ntm: state " + std::to_string(q) + " has no transition on " +
                                  std::to_string(b));
    }
}

inline ntm load_ntm(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("states") || !j.contains("q0") || !j.contains("qf") ||
        !j.contains("delta"))
        throw parse_error("ntm: expected {states, q0, qf, delta}");
    ntm n;
    try {
        n.states = j.at("states").get<std::uint32_t>();
        n.q0 = j.at("q0").get<std::uint32_t>();
        n.qf = j.at("qf").get<std::uint32_t>();
        for (const auto& e : j.at("delta")) {
            if (!e.is_array() || e.size() != 5) throw parse_error("ntm: delta entries are 5-tuples");
            ntm_transition t;
            t.from = e.at(0).get<std::uint32_t>();
            t.read = e.at(1).get<int>();
            t.to = e.at(2).get<std::uint32_t>();
            t.write = e.at(3).get<int>();
            std::string mv = e.at(4).get<std::string>();
            if (mv != "L" && mv != "R") throw parse_error("ntm: move must be \"L\" or \"R\"");
            t.move = mv == "R" ? 1 : -1;
            n.delta.push_back(t);
        }
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("ntm: ") + e.what());
    }
    validate_ntm(n);
    return n;
}

inline nlohmann::json store_ntm(const ntm& n) {
    nlohmann::json d = nlohmann::json::array();
    for (const auto& t : n.delta)
        d.push_back({t.from, t.read, t.to, t.write, t.move == 1 ? "R" : "L"});
    return {{"states", n.states}, {"q0", n.q0}, {"qf", n.qf}, {"delta", std::move(d)}};
}

// Table cells: a tape symbol plus, under the head, a state.
struct tm_element {
    std::int32_t state = -1; // -1 = no head here
    int sym = 0;

    bool operator==(const tm_element& o) const { return state == o.state && sym == o.sym; }
};

struct computation_table {
    std::uint32_t s = 0; // rows = cols = 2^s
    std::vector<std::vector<tm_element>> rows;
};

// Bijection from elements onto {1,...,z}, z = 2s+2: the two headless symbols
// first, then state pairs in state-id order.
inline std::uint32_t element_index(const tm_element& e) {
    if (e.state < 0) return static_cast<std::uint32_t>(e.sym + 1);
    return static_cast<std::uint32_t>(3 + 2 * e.state + e.sym);
}

inline tm_element element_of_index(std::uint32_t i, std::uint32_t z) {
    if (i < 1 || i > z) throw input_error("element_of_index: out of range");
    if (i <= 2) return {-1, static_cast<int>(i - 1)};
    return {static_cast<std::int32_t>((i - 3) / 2), static_cast<int>((i - 3) % 2)};
}

// Exhaustive accepting-run search at tiny s: 2^s - 1 steps from the all-zero
// tape, acceptance = accepting state parked on a cleared leftmost cell in the
// last row. Rows after acceptance repeat with the head stationary.
inline std::optional<computation_table> simulate_ntm(const ntm& n,
                                                     std::uint64_t budget = 4'000'000) {
    validate_ntm(n);
    std::uint32_t s = n.states;
    if (s > 3) throw input_error("simulate_ntm: supported only for s <= 3");
    std::size_t len = std::size_t(1) << s;

    std::vector<int> tape(len, 0);
    computation_table table;
    table.s = s;
    std::uint64_t used = 0;

    auto snapshot = [&](std::uint32_t state, std::size_t head) {
        std::vector<tm_element> row(len);
        for (std::size_t c = 0; c < len; ++c)
            row[c] = {c == head ? static_cast<std::int32_t>(state) : -1, tape[c]};
        return row;
    };

    // depth-first over the nondeterministic choices
    std::function<bool(std::uint32_t, std::size_t, std::size_t)> go =
        [&](std::uint32_t state, std::size_t head, std::size_t row) -> bool {
        if (++used > budget) throw resource_limit_error("simulate_ntm: search budget exceeded");
        table.rows.push_back(snapshot(state, head));
        if (row + 1 == len) {
            if (state == n.qf && head == 0 && tape[0] == 0) return true;
            table.rows.pop_back();
            return false;
        }
        if (state == n.qf) {
            if (go(state, head, row + 1)) return true;
            table.rows.pop_back();
            return false;
        }
        for (const auto& t : n.delta) {
            if (t.from != state || t.read != tape[head]) continue;
            std::size_t nh = head;
            if (t.move == 1) {
                if (head + 1 >= len) continue;
                nh = head + 1;
            } else {
                if (head == 0) continue;
                nh = head - 1;
            }
            int old = tape[head];
            tape[head] = t.write;
            if (go(t.to, nh, row + 1)) return true;
            tape[head] = old;
        }
        table.rows.pop_back();
        return false;
    };
    if (go(n.q0, 0, 0)) return table;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Encoding tables as integers: z primes are reserved per cell; the chosen
// element's prime gets residue 0, every other reserved prime residue 1.
// ---------------------------------------------------------------------------

inline std::uint64_t reserved_prime_count(const ntm& n) {
    std::uint32_t z = 2 * n.states + 2;
    return (std::uint64_t(1) << (2 * n.states)) * z;
}

namespace detail {

inline std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t p) {
    // extended Euclid; p prime and a != 0 mod p
    std::int64_t t = 0, nt = 1;
    std::int64_t r = static_cast<std::int64_t>(p), nr = static_cast<std::int64_t>(a % p);
    while (nr != 0) {
        std::int64_t q = r / nr;
        std::int64_t tmp = t - q * nt;
        t = nt;
        nt = tmp;
        tmp = r - q * nr;
        r = nr;
        nr = tmp;
    }
    if (r != 1) throw input_error("mod_inverse: arguments not coprime");
    return static_cast<std::uint64_t>(t < 0 ? t + static_cast<std::int64_t>(p) : t);
}

} // namespace detail

// Chinese-remainder combination over the reserved primes p(1)..p(N);
// residues[i] is the remainder modulo p(i+1).
inline bignat crt_encode_residues(const ntm& n, const std::vector<std::uint64_t>& residues) {
    std::uint64_t N = reserved_prime_count(n);
    if (residues.size() != N)
        throw input_error("crt_encode_residues: expected " + std::to_string(N) + " residues");
    bignat x = 0, M = 1;
    for (std::uint64_t i = 0; i < N; ++i) {
        std::uint64_t p = nth_prime(i + 1);
        if (residues[i] >= p) throw input_error("crt_encode_residues: residue not reduced");
        std::uint64_t xm = (x % p).convert_to<std::uint64_t>();
        std::uint64_t diff = (residues[i] + p - xm) % p;
        std::uint64_t t = static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(diff) *
             detail::mod_inverse((M % p).convert_to<std::uint64_t>(), p)) %
            p);
        x += M * t;
        M *= p;
    }
    return x;
}

inline bignat crt_encode_table(const ntm& n, const computation_table& table) {
    std::uint32_t s = n.states;
    std::size_t len = std::size_t(1) << s;
    std::uint32_t z = 2 * s + 2;
    if (table.rows.size() != len)
        throw input_error("crt_encode_table: table must have 2^s rows");
    std::vector<std::uint64_t> residues(reserved_prime_count(n), 1);
    for (std::size_t r = 0; r < len; ++r) {
        if (table.rows[r].size() != len)
            throw input_error("crt_encode_table: table must have 2^s columns");
        for (std::size_t c = 0; c < len; ++c) {
            std::uint64_t idx = ((std::uint64_t(1) << s) * r + c) * z +
                                element_index(table.rows[r][c]);
            residues[idx - 1] = 0;
        }
    }
    return crt_encode_residues(n, residues);
}

// ---------------------------------------------------------------------------
// Legal 2x3 windows. A window is two rows of three adjacent cells; it is
// legal when the bottom row can follow the top row in one machine step,
// including steps whose head is outside the window.
// ---------------------------------------------------------------------------

inline std::set<std::array<std::uint32_t, 6>> legal_windows(const ntm& n) {
    validate_ntm(n);
    std::uint32_t z = 2 * n.states + 2;
    std::set<std::array<std::uint32_t, 6>> W;

    bool any_r = false, any_l = false;
    std::vector<bool> enter_r(n.states, false), enter_l(n.states, false);
    for (const auto& t : n.delta) {
        (t.move == 1 ? any_r : any_l) = true;
        (t.move == 1 ? enter_r : enter_l)[t.to] = true;
    }
    (void)any_r;
    (void)any_l;

    std::array<tm_element, 3> top, bot;
    auto emit = [&] {
        W.insert({element_index(top[0]), element_index(top[1]), element_index(top[2]),
                  element_index(bot[0]), element_index(bot[1]), element_index(bot[2])});
    };

    // enumerate top rows; derive every legal bottom row
    for (std::uint32_t i0 = 1; i0 <= z; ++i0)
        for (std::uint32_t i1 = 1; i1 <= z; ++i1)
            for (std::uint32_t i2 = 1; i2 <= z; ++i2) {
                top = {element_of_index(i0, z), element_of_index(i1, z), element_of_index(i2, z)};
                int heads = 0, at = -1;
                for (int p = 0; p < 3; ++p)
                    if (top[p].state >= 0) {
                        ++heads;
                        at = p;
                    }
                if (heads >= 2) continue;

                if (heads == 0) {
                    // symbols frozen; optionally a head enters at an edge cell
                    bot = top;
                    emit();
                    for (std::uint32_t q = 0; q < n.states; ++q) {
                        if (enter_r[q]) {
                            bot = top;
                            bot[0].state = static_cast<std::int32_t>(q);
                            emit();
                        }
                        if (enter_l[q]) {
                            bot = top;
                            bot[2].state = static_cast<std::int32_t>(q);
                            emit();
                        }
                    }
                    continue;
                }

                std::uint32_t q = static_cast<std::uint32_t>(top[at].state);
                int sym = top[at].sym;
                if (q == n.qf) {
                    // the accepting state waits in place
                    bot = top;
                    emit();
                    continue;
                }
                for (const auto& t : n.delta) {
                    if (t.from != q || t.read != sym) continue;
                    bot = top;
                    for (auto& e : bot) e.state = -1;
                    bot[at].sym = t.write;
                    int dst = at + t.move;
                    if (dst >= 0 && dst < 3) bot[dst].state = static_cast<std::int32_t>(t.to);
                    emit();
                }
            }
    return W;
}

// ---------------------------------------------------------------------------
// The rejection formula: true exactly when ell' fails to encode a legal
// accepting table. One disjunct family per failure mode; all share a width
// m = 11s variable palette, and ranged cell coordinates are recovered by
// factor enumeration against Delta = 2^(10s) with a product guard capping
// them below 2^s.
// ---------------------------------------------------------------------------

struct ntm_formula_set {
    formula full;
    std::array<formula, 6> families; // one per failure condition
};

namespace detail {

class ntm_formula_builder {
public:
    explicit ntm_formula_builder(const ntm& n) : n_(n) {
        validate_ntm(n);
        s_ = n.states;
        if (11ull * s_ > 62) throw input_error("ntm_to_formula: 11*s exceeds the supported width");
        m_ = 11 * s_;
        z_ = 2 * s_ + 2;
        names_ = palette();
    }

    ntm_formula_set build() {
        ntm_formula_set out;
        out.families[0] = family([&](formula_builder& b) { return cond1(b); });
        out.families[1] = family([&](formula_builder& b) { return cond2(b); });
        out.families[2] = family([&](formula_builder& b) { return cond3(b); });
        out.families[3] = family([&](formula_builder& b) { return cond4(b); });
        out.families[4] = family([&](formula_builder& b) { return cond5(b); });
        out.families[5] = family([&](formula_builder& b) { return cond6(b); });
        out.full = family([&](formula_builder& b) {
            std::vector<std::uint32_t> parts{cond1(b), cond2(b), cond3(b),
                                             cond4(b), cond5(b), cond6(b)};
            return b.disj(parts);
        });
        return out;
    }

private:
    template <class F> formula family(F&& f) {
        formula_builder b(names_, m_);
        return b.finish(f(b));
    }

    std::vector<std::string> palette() {
        std::vector<std::string> v{"DL", "ONE", "TWO", "ZR",  "ZC",  "R",   "RP", "C",
                                   "CP", "MR",  "MC",  "MS",  "MI",  "MJ",  "MPI", "MPJ",
                                   "PI", "PJ",  "M3",  "P3",  "C0",  "C0P", "C4",  "C4P",
                                   "MC4", "MF4", "M4", "P4",  "M5",  "P5",  "R0",  "R0P",
                                   "R6",  "R6P", "C20", "C20P", "C6", "C6P", "V1"};
        for (std::uint32_t i = 1; i <= z_; ++i) {
            v.push_back("QI" + std::to_string(i));
            v.push_back("QM" + std::to_string(i));
            v.push_back("QP" + std::to_string(i));
        }
        for (const char* base : {"A", "B"})
            for (int j = 0; j < 3; ++j) v.push_back(base + std::to_string(j));
        for (int j = 0; j < 6; ++j) {
            v.push_back("T" + std::to_string(j));
            v.push_back("I" + std::to_string(j));
            v.push_back("M6" + std::to_string(j));
            v.push_back("P6" + std::to_string(j));
        }
        return v;
    }

    std::int32_t vi(const std::string& name) const {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == name) return static_cast<std::int32_t>(i);
        throw input_error("ntm_to_formula: internal palette miss " + name);
    }

    std::uint32_t eq_const(formula_builder& b, const char* x, std::uint64_t c) {
        return b.leaf({atom_kind::eq_const, vi(x), -1, -1, c});
    }
    std::uint32_t sum(formula_builder& b, const char* x, const char* y, const char* z) {
        return b.leaf({atom_kind::sum_eq, vi(x), vi(y), vi(z), 0});
    }
    std::uint32_t prod(formula_builder& b, const char* x, const char* y, const char* z) {
        return b.leaf({atom_kind::prod_eq, vi(x), vi(y), vi(z), 0});
    }
    std::uint32_t nthp(formula_builder& b, const char* x, const char* u) {
        return b.leaf({atom_kind::nth_prime, vi(x), vi(u), -1, 0});
    }
    std::uint32_t div(formula_builder& b, const char* x) {
        return b.leaf({atom_kind::divides, vi(x), -1, -1, 0});
    }
    std::uint32_t ndiv(formula_builder& b, const char* x) {
        return b.leaf({atom_kind::not_divides, vi(x), -1, -1, 0});
    }

    std::uint64_t delta_c() const { return std::uint64_t(1) << (10 * s_); }

    std::uint32_t f_idx(std::uint32_t state, int sym) const {
        return element_index({static_cast<std::int32_t>(state), sym});
    }

    // shared prefix fixing r, c in [0, 2^s) and m_s = (2^s r + c) z
    std::vector<std::uint32_t> cell_chain(formula_builder& b) {
        return {eq_const(b, "DL", delta_c()),
                prod(b, "RP", "R", "DL"),
                prod(b, "CP", "C", "DL"),
                eq_const(b, "ZR", (std::uint64_t(1) << s_) * z_),
                eq_const(b, "ZC", z_),
                prod(b, "MR", "ZR", "R"),
                prod(b, "MC", "ZC", "C"),
                sum(b, "MS", "MR", "MC")};
    }

    // condition 1: some cell has two marked primes
    std::uint32_t cond1(formula_builder& b) {
        std::vector<std::uint32_t> base = cell_chain(b);
        std::vector<std::uint32_t> parts;
        for (std::uint32_t i = 1; i <= z_; ++i)
            for (std::uint32_t j = i + 1; j <= z_; ++j) {
                std::vector<std::uint32_t> at = base;
                at.push_back(eq_const(b, "MI", i));
                at.push_back(eq_const(b, "MJ", j));
                at.push_back(sum(b, "MPI", "MS", "MI"));
                at.push_back(sum(b, "MPJ", "MS", "MJ"));
                at.push_back(nthp(b, "PI", "MPI"));
                at.push_back(nthp(b, "PJ", "MPJ"));
                at.push_back(div(b, "PI"));
                at.push_back(div(b, "PJ"));
                parts.push_back(b.conj(at));
            }
        return b.disj(parts);
    }

    // condition 2: some cell has no marked prime at all
    std::uint32_t cond2(formula_builder& b) {
        std::vector<std::uint32_t> at = cell_chain(b);
        for (std::uint32_t i = 1; i <= z_; ++i) {
            std::string qi = "QI" + std::to_string(i);
            std::string qm = "QM" + std::to_string(i);
            std::string qp = "QP" + std::to_string(i);
            at.push_back(eq_const(b, qi.c_str(), i));
            at.push_back(sum(b, qm.c_str(), "MS", qi.c_str()));
            at.push_back(nthp(b, qp.c_str(), qm.c_str()));
            at.push_back(ndiv(b, qp.c_str()));
        }
        return b.conj(at);
    }

    // condition 3: cell (0,0) does not hold the initial head
    std::uint32_t cond3(formula_builder& b) {
        return b.conj({eq_const(b, "M3", f_idx(n_.q0, 0)), nthp(b, "P3", "M3"), ndiv(b, "P3")});
    }

    // condition 4: some cell (0,c), c >= 1, is not a headless zero
    std::uint32_t cond4(formula_builder& b) {
        return b.conj({eq_const(b, "DL", delta_c()),
                       prod(b, "C0P", "C0", "DL"), // enumerates C0 in [0, 2^s)
                       eq_const(b, "ONE", 1),
                       sum(b, "C4", "C0", "ONE"),
                       prod(b, "C4P", "C4", "DL"), // caps C4 below 2^s
                       eq_const(b, "ZC", z_),
                       prod(b, "MC4", "C4", "ZC"),
                       eq_const(b, "MF4", element_index({-1, 0})),
                       sum(b, "M4", "MC4", "MF4"),
                       nthp(b, "P4", "M4"),
                       ndiv(b, "P4")});
    }

    // condition 5: the last row does not end with the head parked on a zero
    std::uint32_t cond5(formula_builder& b) {
        std::uint64_t pow = std::uint64_t(1) << s_;
        std::uint64_t idx = pow * (pow - 1) * z_ + f_idx(n_.qf, 0);
        return b.conj({eq_const(b, "M5", idx), nthp(b, "P5", "M5"), ndiv(b, "P5")});
    }

    // condition 6': some interior 2x3 window carries an illegal tuple
    std::uint32_t cond6(formula_builder& b) {
        std::set<std::array<std::uint32_t, 6>> W = legal_windows(n_);
        // shared coordinate chain: r in [1, 2^s), c in [2, 2^s)
        std::vector<std::uint32_t> base{
            eq_const(b, "DL", delta_c()),
            eq_const(b, "ONE", 1),
            eq_const(b, "TWO", 2),
            prod(b, "R0P", "R0", "DL"), // enumerates r-1
            sum(b, "R6", "R0", "ONE"),
            prod(b, "R6P", "R6", "DL"),  // caps r below 2^s
            prod(b, "C20P", "C20", "DL"), // enumerates c-2
            sum(b, "C6", "C20", "TWO"),
            prod(b, "C6P", "C6", "DL"), // caps c below 2^s
            sum(b, "V1", "C20", "ONE"),
            eq_const(b, "ZR", (std::uint64_t(1) << s_) * z_),
            eq_const(b, "ZC", z_),
            prod(b, "A0", "ZR", "R0"),
            prod(b, "A1", "ZR", "R6"),
            prod(b, "B0", "C20", "ZC"),
            prod(b, "B1", "V1", "ZC"),
            prod(b, "B2", "C6", "ZC")};
        // per-cell chains minus the tuple-dependent constant are shared too
        std::array<std::array<std::uint32_t, 3>, 6> shared;
        for (int j = 0; j < 6; ++j) {
            std::string a = "A" + std::to_string(j / 3);
            std::string bb = "B" + std::to_string(j % 3);
            std::string t = "T" + std::to_string(j);
            std::string m6 = "M6" + std::to_string(j);
            std::string p6 = "P6" + std::to_string(j);
            std::string ic = "I" + std::to_string(j);
            shared[j] = {sum(b, t.c_str(), a.c_str(), bb.c_str()),
                         sum(b, m6.c_str(), t.c_str(), ic.c_str()), nthp(b, p6.c_str(), m6.c_str())};
        }
        std::vector<std::uint32_t> parts;
        std::array<std::uint32_t, 6> tup;
        std::function<void(int)> rec = [&](int pos) {
            if (pos == 6) {
                if (W.count(tup)) return;
                std::vector<std::uint32_t> at = base;
                for (int j = 0; j < 6; ++j) {
                    std::string ic = "I" + std::to_string(j);
                    std::string p6 = "P6" + std::to_string(j);
                    at.push_back(eq_const(b, ic.c_str(), tup[j]));
                    at.push_back(shared[j][0]);
                    at.push_back(shared[j][1]);
                    at.push_back(shared[j][2]);
                    at.push_back(div(b, p6.c_str()));
                }
                parts.push_back(b.conj(at));
                return;
            }
            for (std::uint32_t i = 1; i <= z_; ++i) {
                tup[pos] = i;
                rec(pos + 1);
            }
        };
        rec(0);
        if (parts.empty())
            // every tuple legal (cannot happen for a validated machine, but
            // keep the disjunction well-formed)
            return b.conj({eq_const(b, "ONE", 1), eq_const(b, "ONE", 0)});
        return b.disj(parts);
    }

    const ntm& n_;
    std::uint32_t s_ = 0, z_ = 0;
    unsigned m_ = 0;
    std::vector<std::string> names_;
};

} // namespace detail

inline ntm_formula_set ntm_to_formula_parts(const ntm& n) {
    return detail::ntm_formula_builder(n).build();
}

inline formula ntm_to_formula(const ntm& n) { return ntm_to_formula_parts(n).full; }

} // namespace lenuniv
