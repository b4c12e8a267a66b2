#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "automaton.hpp"
#include "gadget_ast.hpp"
#include "gadget_expand.hpp"
#include "gadget_parser.hpp"

namespace lenuniv {

struct var_states {
    unsigned width = 0;
    std::vector<std::uint32_t> pos; // pos[i] = v_{i+1}
    std::vector<std::uint32_t> neg; // neg[i] = negated track
};

struct compiled_nfa {
    automaton nfa;
    unsigned m = 0;
    std::uint32_t q_acc = 0;
    std::uint32_t start = 0;
    std::uint32_t target = 0;
    std::map<std::string, var_states> vars;
    std::map<int, std::pair<std::uint32_t, std::uint32_t>> stmt_span; // stmt id -> (start, target)
    std::map<std::uint32_t, int> final_provenance; // final state -> FinalMark stmt id
    std::vector<bool> is_control;
};

// Exact delaying-gadget length for duration d at its minimal internal width.
inline std::uint64_t delay_T(std::uint64_t d) {
    unsigned mp = detail::delay_width(d);
    return 2 + d * (1 + 2 * (std::uint64_t(mp) + 1)) + 1 + mp;
}

namespace detail {

inline bool contains_while_true(const stmt& s) {
    if (s.kind == stmt_kind::while_true) return true;
    for (const auto& c : s.children)
        if (contains_while_true(c)) return true;
    return false;
}

class gadget_compiler {
public:
    gadget_compiler(const gadget_program& prog, unsigned m) : prog_(prog), m_(m) {
        if (m == 0) throw input_error("compile: width m must be >= 1");
        is_control_.push_back(false); // q_acc
        for (const auto& d : prog.decls) declare(d.name, d.width == 0 ? m : d.width);
    }

    compiled_nfa run() {
        std::uint32_t start = new_state(true);
        std::uint32_t target = compile_stmt(prog_.body, start, std::nullopt);
        return finalize(start, target);
    }

private:
    struct letter {
        std::string name;
        // explicit transition entries; an entry with an empty vector means
        // "maps to the empty set" (variable content destroyed)
        std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> map;
    };

    // ---- allocation ----

    std::uint32_t new_state(bool control) {
        is_control_.push_back(control);
        return nstates_++;
    }

    void declare(const std::string& name, unsigned width) {
        if (vars_.count(name)) throw input_error("compile: duplicate variable '" + name + "'");
        var_states v;
        v.width = width;
        for (unsigned i = 0; i < width; ++i) v.pos.push_back(new_state(false));
        for (unsigned i = 0; i < width; ++i) v.neg.push_back(new_state(false));
        vars_.emplace(name, std::move(v));
    }

    const var_states& var(const std::string& name) const {
        auto it = vars_.find(name);
        if (it == vars_.end()) throw input_error("compile: unknown variable '" + name + "'");
        return it->second;
    }

    std::size_t add_letter(int id, const std::string& local) {
        letters_.push_back({"g" + std::to_string(id) + "." + local, {}});
        return letters_.size() - 1;
    }

    void map_to(std::size_t li, std::uint32_t from, std::vector<std::uint32_t> to) {
        letters_[li].map[from] = std::move(to);
    }

    // ---- statement dispatch ----

    std::uint32_t compile_stmt(const stmt& s, std::uint32_t start, std::optional<std::uint32_t> tgt) {
        std::uint32_t t;
        switch (s.kind) {
        case stmt_kind::select: t = emit_select(s, start, tgt); break;
        case stmt_kind::assign_const: t = emit_assign_const(s, start, tgt); break;
        case stmt_kind::assign_var: t = emit_assign_var(s, start, tgt); break;
        case stmt_kind::increment: t = emit_increment(s, start, tgt); break;
        case stmt_kind::equality: t = emit_eq(s, start, tgt, true); break;
        case stmt_kind::inequality: t = emit_ineq(s, start, tgt); break;
        case stmt_kind::wait: t = emit_wait(s, start, tgt); break;
        case stmt_kind::sequence: t = emit_sequence(s, start, tgt); break;
        case stmt_kind::choose: t = emit_choose(s, start, tgt); break;
        case stmt_kind::while_loop: t = emit_while(s, start, tgt); break;
        case stmt_kind::while_true:
            compile_stmt(s.children[0], start, start);
            t = start;
            break;
        case stmt_kind::final_mark:
            if (!final_provenance_.count(start)) final_provenance_[start] = s.id;
            t = compile_stmt(s.children[0], start, tgt);
            break;
        case stmt_kind::parallel: t = emit_parallel(s, start, tgt); break;
        case stmt_kind::if_else:
            throw input_error("compile: if-else must be rewritten by expand_macros first");
        default:
            throw input_error("compile: macro statement survived expansion");
        }
        if (s.id >= 0) spans_[s.id] = {start, t};
        return t;
    }

    std::uint32_t take_target(std::optional<std::uint32_t> tgt) {
        return tgt ? *tgt : new_state(true);
    }

    // ---- primitives; tables follow the per-gadget letter semantics ----

    std::uint32_t emit_select(const stmt& s, std::uint32_t start, std::optional<std::uint32_t> tgt) {
        int id = gid_++;
        std::size_t a1 = add_letter(id, "a1"), a2 = add_letter(id, "a2");
        const var_states& V = var(s.a);
        unsigned mm = V.width;
        std::vector<std::uint32_t> P(mm + 1);
        P[0] = start;
        for (unsigned i = 1; i < mm; ++i) P[i] = new_state(true);
        P[mm] = take_target(tgt);
        for (unsigned i = 0; i < mm; ++i) {
            map_to(a1, P[i], {P[i + 1], V.pos[0]});
            map_to(a2, P[i], {P[i + 1], V.neg[0]});
        }
        map_to(a1, P[mm], {0});
        map_to(a2, P[mm], {0});
        for (std::size_t l : {a1, a2}) {
            for (unsigned i = 1; i < mm; ++i) { // v_i -> v_{i+1}
                map_to(l, V.pos[i - 1], {V.pos[i]});
                map_to(l, V.neg[i - 1], {V.neg[i]});
            }
            map_to(l, V.pos[mm - 1], {});
            map_to(l, V.neg[mm - 1], {});
        }
        return P[mm];
    }

    // Equality checks one bit position per letter via a cyclic down-shift;
    // letter a1 asserts the inspected bit is 1, a2 asserts 0.
    std::uint32_t emit_eq(const stmt& s, std::uint32_t start, std::optional<std::uint32_t> tgt,
                          bool /*tag*/) {
        int id = gid_++;
        std::size_t a1 = add_letter(id, "a1"), a2 = add_letter(id, "a2");
        const var_states& U = var(s.a);
        const var_states& V = var(s.b);
        if (U.width != V.width) throw input_error("compile: eq on variables of different widths");
        unsigned mm = U.width;
        std::vector<std::uint32_t> P(mm + 1);
        P[0] = start;
        for (unsigned i = 1; i < mm; ++i) P[i] = new_state(true);
        P[mm] = take_target(tgt);
        for (std::size_t l : {a1, a2}) {
            for (unsigned i = 0; i < mm; ++i) map_to(l, P[i], {P[i + 1]});
            map_to(l, P[mm], {0});
        }
        for (const var_states* W : {&U, &V}) {
            for (unsigned i = 1; i <= mm; ++i) {
                unsigned dst = (i == 1) ? mm : i - 1;
                if (i == mm) {
                    map_to(a1, W->pos[i - 1], {W->pos[dst - 1]});
                    map_to(a2, W->pos[i - 1], {0});
                    map_to(a1, W->neg[i - 1], {0});
                    map_to(a2, W->neg[i - 1], {W->neg[dst - 1]});
                } else {
                    for (std::size_t l : {a1, a2}) {
                        map_to(l, W->pos[i - 1], {W->pos[dst - 1]});
                        map_to(l, W->neg[i - 1], {W->neg[dst - 1]});
                    }
                }
            }
        }
        return P[mm];
    }

    // Inequality: shift letter cycles the bits; a1/a2 certify a position
    // where U and V differ (U-bit 1 / U-bit 0 respectively). The check letter
    // inspects the current top position and may come first, so at most mm-1
    // shifts precede it; on equal values properness is then lost strictly
    // before the mm+1 completion depth, which keeps off-schedule prefixes
    // from surviving to the depth where a complete computation finishes.
    std::uint32_t emit_ineq(const stmt& s, std::uint32_t start, std::optional<std::uint32_t> tgt) {
        int id = gid_++;
        std::size_t sh = add_letter(id, "s"), a1 = add_letter(id, "a1"), a2 = add_letter(id, "a2");
        const var_states& U = var(s.a);
        const var_states& V = var(s.b);
        if (U.width != V.width) throw input_error("compile: neq on variables of different widths");
        unsigned mm = U.width;
        // pre-check chain P[0..mm-1], post-check chain R[0..mm]
        std::vector<std::uint32_t> P(mm), R(mm + 1);
        P[0] = start;
        for (unsigned i = 1; i < mm; ++i) P[i] = new_state(true);
        for (unsigned i = 0; i < mm; ++i) R[i] = new_state(true);
        R[mm] = take_target(tgt);
        // shift letter
        for (unsigned i = 0; i + 1 < mm; ++i) map_to(sh, P[i], {P[i + 1]});
        for (unsigned i = 0; i < mm; ++i) map_to(sh, R[i], {R[i + 1]});
        for (const var_states* W : {&U, &V})
            for (unsigned i = 1; i <= mm; ++i) {
                unsigned dst = (i == 1) ? mm : i - 1;
                map_to(sh, W->pos[i - 1], {W->pos[dst - 1]});
                map_to(sh, W->neg[i - 1], {W->neg[dst - 1]});
            }
        // check letters
        for (std::size_t l : {a1, a2})
            for (unsigned i = 0; i < mm; ++i) map_to(l, P[i], {R[i]});
        for (const var_states* W : {&U, &V})
            for (unsigned i = 1; i < mm; ++i)
                for (std::size_t l : {a1, a2}) {
                    map_to(l, W->pos[i - 1], {W->pos[i - 1]});
                    map_to(l, W->neg[i - 1], {W->neg[i - 1]});
                }
        map_to(a1, U.pos[mm - 1], {U.pos[mm - 1]});
        map_to(a1, V.neg[mm - 1], {V.neg[mm - 1]});
        map_to(a1, U.neg[mm - 1], {0});
        map_to(a1, V.pos[mm - 1], {0});
        map_to(a2, U.neg[mm - 1], {U.neg[mm - 1]});
        map_to(a2, V.pos[mm - 1], {V.pos[mm - 1]});
        map_to(a2, U.pos[mm - 1], {0});
        map_to(a2, V.neg[mm - 1], {0});
        return R[mm];
    }

    std::uint32_t emit_increment(const stmt& s, std::uint32_t start, std::optional<std::uint32_t> tgt) {
        int id = gid_++;
        std::size_t c = add_letter(id, "c"), a = add_letter(id, "a"), p = add_letter(id, "p");
        const var_states& V = var(s.a);
        unsigned mm = V.width;
        std::vector<std::uint32_t> P(2 * mm + 1);
        P[0] = start;
        for (unsigned i = 1; i < 2 * mm; ++i) P[i] = new_state(true);
        P[2 * mm] = take_target(tgt);
        // c: cycle the bits
        map_to(c, P[0], {P[1]});
        for (unsigned i = 1; i < mm; ++i) map_to(c, P[mm + i], {P[mm + i + 1]});
        for (unsigned i = 1; i <= mm; ++i) {
            unsigned dst = (i == 1) ? mm : i - 1;
            map_to(c, V.pos[i - 1], {V.pos[dst - 1]});
            map_to(c, V.neg[i - 1], {V.neg[dst - 1]});
        }
        // a: consume a trailing 1 (turns into 0 with carry pending)
        for (unsigned i = 1; i < mm; ++i) map_to(a, P[i], {P[i + 1]});
        if (mm >= 2) {
            map_to(a, V.pos[0], {V.pos[mm - 1]});
            map_to(a, V.neg[0], {V.neg[mm - 1]});
            for (unsigned i = 2; i < mm; ++i) {
                map_to(a, V.pos[i - 1], {V.pos[i - 2]});
                map_to(a, V.neg[i - 1], {V.neg[i - 2]});
            }
            map_to(a, V.pos[mm - 1], {V.neg[mm - 2]});
            map_to(a, V.neg[mm - 1], {0});
        }
        // p: flip the inspected 0 to 1; a 1 here means overflow
        for (unsigned i = 1; i <= mm; ++i) map_to(p, P[i], {P[mm + i]});
        for (unsigned i = 1; i < mm; ++i) {
            map_to(p, V.pos[i - 1], {V.pos[i - 1]});
            map_to(p, V.neg[i - 1], {V.neg[i - 1]});
        }
        map_to(p, V.pos[mm - 1], {0});
        map_to(p, V.neg[mm - 1], {V.pos[mm - 1]});
        return P[2 * mm];
    }

    std::uint32_t emit_assign_const(const stmt& s, std::uint32_t start, std::optional<std::uint32_t> tgt) {
        int id = gid_++;
        std::size_t a = add_letter(id, "a");
        const var_states& U = var(s.a);
        if (U.width >= 64 || s.value > ((std::uint64_t(1) << U.width) - 1))
            throw input_error("compile: constant out of range for variable width");
        std::uint32_t t = take_target(tgt);
        std::vector<std::uint32_t> img{t};
        for (unsigned i = 0; i < U.width; ++i)
            img.push_back((s.value >> i) & 1 ? U.pos[i] : U.neg[i]);
        map_to(a, start, std::move(img));
        for (unsigned i = 0; i < U.width; ++i) {
            map_to(a, U.pos[i], {});
            map_to(a, U.neg[i], {});
        }
        return t;
    }

    std::uint32_t emit_assign_var(const stmt& s, std::uint32_t start, std::optional<std::uint32_t> tgt) {
        int id = gid_++;
        std::size_t a = add_letter(id, "a");
        const var_states& U = var(s.a);
        const var_states& V = var(s.b);
        if (U.width != V.width) throw input_error("compile: assignment between different widths");
        std::uint32_t t = take_target(tgt);
        map_to(a, start, {t});
        for (unsigned i = 0; i < U.width; ++i) {
            map_to(a, U.pos[i], {});
            map_to(a, U.neg[i], {});
        }
        for (unsigned i = 0; i < V.width; ++i) {
            map_to(a, V.pos[i], {U.pos[i], V.pos[i]});
            map_to(a, V.neg[i], {U.neg[i], V.neg[i]});
        }
        return t;
    }

    std::uint32_t emit_wait(const stmt& s, std::uint32_t start, std::optional<std::uint32_t> tgt) {
        int id = gid_++;
        std::size_t a = add_letter(id, "a");
        if (s.value == 0) throw input_error("compile: wait duration must be >= 1");
        std::uint32_t cur = start;
        for (std::uint64_t i = 0; i + 1 < s.value; ++i) {
            std::uint32_t nx = new_state(true);
            map_to(a, cur, {nx});
            cur = nx;
        }
        std::uint32_t t = take_target(tgt);
        map_to(a, cur, {t});
        return t;
    }

    // ---- joining ----

    std::uint32_t emit_sequence(const stmt& s, std::uint32_t start, std::optional<std::uint32_t> tgt) {
        if (s.children.empty()) throw input_error("compile: empty sequence");
        std::uint32_t cur = start;
        for (std::size_t i = 0; i + 1 < s.children.size(); ++i)
            cur = compile_stmt(s.children[i], cur, std::nullopt);
        return compile_stmt(s.children.back(), cur, tgt);
    }

    std::uint32_t emit_choose(const stmt& s, std::uint32_t start, std::optional<std::uint32_t> tgt) {
        if (s.children.size() < 2) throw input_error("compile: choose needs >= 2 branches");
        int id = gid_++;
        std::uint32_t t = take_target(tgt);
        for (std::size_t i = 0; i < s.children.size(); ++i) {
            std::size_t ci = add_letter(id, "c" + std::to_string(i + 1));
            std::uint32_t bi = new_state(true);
            map_to(ci, start, {bi});
            compile_stmt(s.children[i], bi, t);
        }
        return t;
    }

    std::uint32_t emit_while(const stmt& s, std::uint32_t start, std::optional<std::uint32_t> tgt) {
        if (s.children.size() != 3)
            throw input_error("compile: while must be rewritten by expand_macros first");
        int id = gid_++;
        std::size_t w1 = add_letter(id, "w1"), w2 = add_letter(id, "w2");
        std::uint32_t b1 = new_state(true);
        map_to(w1, start, {b1});
        std::uint32_t mid = compile_stmt(s.children[0], b1, std::nullopt);
        compile_stmt(s.children[1], mid, start); // loop back
        std::uint32_t b2 = new_state(true);
        map_to(w2, start, {b2});
        return compile_stmt(s.children[2], b2, tgt);
    }

    std::uint32_t emit_parallel(const stmt& s, std::uint32_t start, std::optional<std::uint32_t> tgt) {
        if (contains_while_true(s.children[0]))
            throw input_error("compile: parallel body must not contain 'while true'");
        std::size_t lbegin = letters_.size();
        std::uint32_t nbegin = nstates_;
        std::uint32_t g1t = new_state(true);
        compile_stmt(s.children[0], start, g1t);
        std::size_t l1end = letters_.size();
        std::uint32_t n1end = nstates_;

        std::uint64_t d = s.value;
        if (d == 0) {
            auto L = longest_proper_run(start, lbegin, l1end);
            if (L) {
                d = 1;
                while (delay_T(d) < *L) ++d;
            } else {
                // unbounded or budget: fall back to 2^n over the component size
                std::uint64_t n = (n1end - nbegin) + 1;
                if (n > 40)
                    throw resource_limit_error(
                        "parallel: cannot bound the body's computations; supply an explicit delay");
                d = std::uint64_t(1) << n;
            }
        }

        // synthesized delaying component, sharing the start state
        int pid = gid_++;
        std::string xv = "@par" + std::to_string(pid) + ".X";
        std::string yv = "@par" + std::to_string(pid) + ".Y";
        unsigned mp = delay_width(d);
        declare(xv, mp);
        declare(yv, mp);
        stmt w = gb::while_loop(gb::neq(xv, yv), gb::seq({gb::inc(xv)}));
        w.children.push_back(gb::eq(xv, yv));
        stmt g2 = gb::seq({gb::assign_const(xv, 0), gb::assign_const(yv, d), std::move(w)});
        std::uint32_t g2t = new_state(true);
        compile_stmt(g2, start, g2t);
        std::size_t l2end = letters_.size();

        // G1 control states needing the q_acc merge in the gamma letters
        std::vector<std::uint32_t> g1_controls{start};
        for (std::uint32_t q = nbegin; q < n1end; ++q)
            if (is_control_[q] && q != g1t) g1_controls.push_back(q);
        // per-component control state lists for the beta letters
        std::vector<std::uint32_t> g1_all{start};
        for (std::uint32_t q = nbegin; q < n1end; ++q)
            if (is_control_[q]) g1_all.push_back(q);
        std::vector<std::uint32_t> g2_all{start};
        for (std::uint32_t q = n1end; q < nstates_; ++q)
            if (is_control_[q]) g2_all.push_back(q);

        std::vector<letter> L1(letters_.begin() + lbegin, letters_.begin() + l1end);
        std::vector<letter> L2(letters_.begin() + l1end, letters_.begin() + l2end);
        letters_.resize(lbegin);
        std::uint32_t t = take_target(tgt);

        // A beta letter acts on each component as that component's letter; a
        // control state the component letter does not map must go to q_acc
        // even if the other component maps it (the shared start state).
        auto merged = [&](const letter& x, const letter& y) {
            std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> m2 = x.map;
            for (const auto& [q, v] : y.map) {
                auto& dst = m2[q];
                for (auto e : v)
                    if (std::find(dst.begin(), dst.end(), e) == dst.end()) dst.push_back(e);
            }
            auto force_acc = [&m2](const std::vector<std::uint32_t>& controls,
                                   const letter& own) {
                for (auto q : controls) {
                    if (own.map.count(q)) continue;
                    auto it = m2.find(q);
                    if (it == m2.end()) continue; // no entry at all: defaults to q_acc
                    if (std::find(it->second.begin(), it->second.end(), 0u) == it->second.end())
                        it->second.push_back(0);
                }
            };
            force_acc(g1_all, x);
            force_acc(g2_all, y);
            return m2;
        };
        for (std::size_t i = 0; i < L1.size(); ++i)
            for (std::size_t j = 0; j < L2.size(); ++j) {
                letters_.push_back({"g" + std::to_string(pid) + ".b" + std::to_string(i + 1) + "_" +
                                        std::to_string(j + 1),
                                    merged(L1[i], L2[j])});
            }
        for (std::size_t j = 0; j < L2.size(); ++j) {
            letter g{"g" + std::to_string(pid) + ".c" + std::to_string(j + 1), L2[j].map};
            g.map[g1t] = {g1t};
            for (auto q : g1_controls) {
                auto it = g.map.find(q);
                if (it != g.map.end()) {
                    if (std::find(it->second.begin(), it->second.end(), 0u) == it->second.end())
                        it->second.push_back(0);
                }
                // states without an entry default to q_acc anyway
            }
            letters_.push_back(std::move(g));
        }
        letter tau{"g" + std::to_string(pid) + ".t", {}};
        tau.map[g1t] = {t};
        tau.map[g2t] = {t};
        letters_.push_back(std::move(tau));
        return t;
    }

    // ---- parallel body bound: longest proper run from {start}, all vars empty ----

    std::optional<std::uint64_t> longest_proper_run(std::uint32_t start, std::size_t lbegin,
                                                    std::size_t lend) {
        // memoized longest path over the configuration graph; nullopt on a
        // cycle or when the budget is exhausted
        std::unordered_map<state_set, std::uint64_t, state_set_hash> memo;
        std::unordered_map<state_set, int, state_set_hash> color; // 1 = on stack
        constexpr std::size_t kBudget = 500'000;
        bool failed = false;

        auto step_letter = [&](const state_set& c, const letter& l, state_set& out) {
            out = state_set(nstates_);
            bool proper = true;
            c.for_each([&](std::size_t q) {
                auto it = l.map.find(static_cast<std::uint32_t>(q));
                if (it != l.map.end()) {
                    for (auto e : it->second) {
                        if (e == 0) proper = false;
                        out.set(e);
                    }
                } else if (q == 0 || is_control_[q]) {
                    proper = false; // control default: q_acc
                } else {
                    out.set(q); // variable default: fixed
                }
            });
            return proper;
        };

        // iterative DFS
        struct frame {
            state_set cfg;
            std::size_t li;
            std::uint64_t best;
        };
        std::vector<frame> stack;
        state_set init(nstates_);
        init.set(start);
        stack.push_back({init, lbegin, 0});
        color[init] = 1;
        while (!stack.empty() && !failed) {
            frame& f = stack.back();
            if (f.li == lend) {
                memo[f.cfg] = f.best;
                color[f.cfg] = 2;
                std::uint64_t done = f.best;
                stack.pop_back();
                if (!stack.empty()) {
                    auto& pf = stack.back();
                    pf.best = std::max(pf.best, done + 1);
                    ++pf.li;
                }
                continue;
            }
            state_set nxt;
            if (!step_letter(f.cfg, letters_[f.li], nxt)) {
                ++f.li;
                continue;
            }
            auto itc = color.find(nxt);
            if (itc != color.end() && itc->second == 1) return std::nullopt; // cycle
            auto itm = memo.find(nxt);
            if (itm != memo.end()) {
                f.best = std::max(f.best, itm->second + 1);
                ++f.li;
                continue;
            }
            if (memo.size() + stack.size() > kBudget) {
                failed = true;
                break;
            }
            color[nxt] = 1;
            stack.push_back({std::move(nxt), lbegin, 0});
        }
        if (failed) return std::nullopt;
        return memo[init];
    }

    // ---- finalization ----

    compiled_nfa finalize(std::uint32_t start, std::uint32_t target) {
        compiled_nfa out;
        out.m = m_;
        out.q_acc = 0;
        out.start = start;
        out.target = target;
        out.vars = vars_;
        out.stmt_span = spans_;
        out.final_provenance = final_provenance_;
        out.is_control = is_control_;

        std::vector<std::string> alphabet;
        for (const auto& l : letters_) alphabet.push_back(l.name);
        automaton a = make_automaton(automaton_kind::nfa, std::move(alphabet), nstates_);
        a.initials = {start};
        a.finals.push_back(0);
        for (const auto& [q, id] : final_provenance_) a.finals.push_back(q);
        std::sort(a.finals.begin(), a.finals.end());
        a.finals.erase(std::unique(a.finals.begin(), a.finals.end()), a.finals.end());

        for (std::size_t li = 0; li < letters_.size(); ++li) {
            const auto& l = letters_[li];
            for (std::uint32_t q = 0; q < nstates_; ++q) {
                if (q == 0) {
                    a.add_transition(q, li, 0); // q_acc absorbing
                    continue;
                }
                auto it = l.map.find(q);
                if (it != l.map.end()) {
                    for (auto e : it->second) a.add_transition(q, li, e);
                } else if (is_control_[q]) {
                    a.add_transition(q, li, 0); // foreign control state dies
                } else {
                    a.add_transition(q, li, q); // untouched variable state is fixed
                }
            }
        }
        a.validate();
        out.nfa = std::move(a);
        return out;
    }

    const gadget_program& prog_;
    unsigned m_;
    std::vector<letter> letters_;
    std::uint32_t nstates_ = 1; // state 0 = q_acc
    std::vector<bool> is_control_;
    std::map<std::string, var_states> vars_;
    std::map<int, std::pair<std::uint32_t, std::uint32_t>> spans_;
    std::map<std::uint32_t, int> final_provenance_;
    int gid_ = 0;
};

} // namespace detail

// Compile a macro-free program at width m.
inline compiled_nfa compile(const gadget_program& prog, unsigned m) {
    return detail::gadget_compiler(prog, m).run();
}

// Convenience: parse + expand + compile.
inline compiled_nfa compile_text(const std::string& text, unsigned m) {
    return compile(expand_macros(parse_program(text, m), m), m);
}

} // namespace lenuniv
