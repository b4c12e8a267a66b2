#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gadget_ast.hpp"

namespace lenuniv {

namespace detail {

inline unsigned delay_width(std::uint64_t d) {
    // minimum width holding d: ceil(log2(d+1)), at least 1
    unsigned w = 0;
    std::uint64_t v = d;
    while (v) {
        ++w;
        v >>= 1;
    }
    return w == 0 ? 1 : w;
}

class macro_expander {
public:
    macro_expander(gadget_program& p, unsigned m) : p_(p), m_(m) {}

    stmt expand(const stmt& s) {
        using namespace gb;
        switch (s.kind) {
        case stmt_kind::sequence:
        case stmt_kind::choose: {
            stmt out = s;
            out.children.clear();
            for (const auto& c : s.children) out.children.push_back(expand(c));
            return out;
        }
        case stmt_kind::final_mark:
        case stmt_kind::while_true:
        case stmt_kind::parallel: {
            stmt out = s;
            out.children[0] = expand(s.children[0]);
            return out;
        }
        case stmt_kind::if_else: {
            // Choose over [cond; then] and [!cond; else?]
            std::vector<stmt> then_branch{expand(s.children[0]), expand(s.children[1])};
            std::vector<stmt> else_branch{expand(negate(s.children[0]))};
            if (s.children.size() > 2) else_branch.push_back(expand(s.children[2]));
            return choose({seq(std::move(then_branch)), seq(std::move(else_branch))});
        }
        case stmt_kind::while_loop: {
            // core form: children = [cond, body, negated cond]
            stmt out = s;
            stmt neg = negate(s.children[0]);
            out.children.clear();
            out.children.push_back(expand(s.children[0]));
            out.children.push_back(expand(s.children[1]));
            out.children.push_back(expand(neg));
            return out;
        }
        case stmt_kind::add_macro:
            return expand(expand_add(s.a, s.b, s.c));
        case stmt_kind::mul_macro:
            return expand(expand_mul(s.a, s.b, s.c));
        case stmt_kind::prime_macro:
            return expand(expand_prime(s.a));
        case stmt_kind::not_prime_macro:
            return expand(expand_not_prime(s.a));
        case stmt_kind::nth_prime_macro:
            return expand(expand_nth_prime(s.a, s.b));
        case stmt_kind::delay_macro:
            return expand(expand_delay(s.value));
        default:
            return s;
        }
    }

    stmt negate(const stmt& cond) {
        stmt n = cond;
        switch (cond.kind) {
        case stmt_kind::equality:
            n.kind = stmt_kind::inequality;
            return n;
        case stmt_kind::inequality:
            n.kind = stmt_kind::equality;
            return n;
        case stmt_kind::prime_macro:
            n.kind = stmt_kind::not_prime_macro;
            return n;
        case stmt_kind::not_prime_macro:
            n.kind = stmt_kind::prime_macro;
            return n;
        default:
            throw input_error("expand_macros: condition must be eq/neq/prime/notprime");
        }
    }

    std::string fresh(const std::string& hint, unsigned width) {
        std::string n = p_.fresh_var(hint);
        p_.declare_internal(n, width);
        return n;
    }

    // W <- U + V
    stmt expand_add(const std::string& w, const std::string& u, const std::string& v) {
        using namespace gb;
        if (w == u || w == v) throw input_error("add: destination must differ from sources");
        std::string x = fresh("addX", m_);
        return seq({assign_var(w, u), assign_const(x, 0),
                    while_loop(neq(x, v), seq({inc(x), inc(w)}))});
    }

    // W <- U * V, via repeated addition
    stmt expand_mul(const std::string& w, const std::string& u, const std::string& v) {
        using namespace gb;
        if (w == u || w == v) throw input_error("mul: destination must differ from sources");
        std::string x = fresh("mulX", m_);
        std::string wp = fresh("mulW", m_);
        return seq({assign_const(w, 0), assign_const(x, 0),
                    while_loop(neq(x, v),
                               seq({inc(x), add(wp, w, u), assign_var(w, wp)}))});
    }

    stmt never_completes() {
        using namespace gb;
        std::string z0 = fresh("nvr0", m_), z1 = fresh("nvr1", m_);
        return seq({assign_const(z0, 0), assign_const(z1, 1), eq(z0, z1)});
    }

    // Complete computation exists iff P is prime. For each divisor candidate
    // X in [2, P-1] a selected witness (Q, R, S) with Q*X + R = P, 0 < R < X
    // certifies X does not divide P; all witness values stay below P, so no
    // intermediate result can overflow.
    stmt expand_prime(const std::string& p) {
        using namespace gb;
        if (m_ < 2) return never_completes(); // no primes below 2^1
        std::string z0 = fresh("prZ", m_), x = fresh("prX", m_), q = fresh("prQ", m_),
                    r = fresh("prR", m_), s2 = fresh("prS", m_), t = fresh("prT", m_),
                    t2 = fresh("prT2", m_), u2 = fresh("prU", m_);
        return seq({assign_const(z0, 0), assign_const(x, 2),
                    while_loop(neq(x, p),
                               seq({select(q), select(r), select(s2), mul(t, q, x),
                                    add(t2, t, r), eq(t2, p), neq(r, z0), add(u2, r, s2),
                                    eq(u2, x), neq(s2, z0), inc(x)}))});
    }

    // Complete computation exists iff P is composite: select X, Y not in
    // {0, 1, P} with X*Y = P.
    stmt expand_not_prime(const std::string& p) {
        using namespace gb;
        std::string z0 = fresh("npZ0", m_), z1 = fresh("npZ1", m_), a = fresh("npA", m_),
                    b = fresh("npB", m_), t = fresh("npT", m_);
        return seq({assign_const(z0, 0), assign_const(z1, 1), select(a), select(b),
                    neq(a, z0), neq(a, z1), neq(a, p), neq(b, z0), neq(b, z1), neq(b, p),
                    mul(t, a, b), eq(t, p)});
    }

    // P <- the U'th prime
    stmt expand_nth_prime(const std::string& p, const std::string& u) {
        using namespace gb;
        if (m_ < 2) return never_completes(); // p(1) = 2 already overflows width 1
        std::string x = fresh("npiX", m_);
        return seq({assign_const(p, 2), assign_const(x, 1),
                    while_loop(neq(x, u),
                               seq({inc(p), if_then(prime(p), seq({inc(x)}))}))});
    }

    // Delaying gadget body: count X from 0 to D at internal width m'
    stmt expand_delay(std::uint64_t d) {
        using namespace gb;
        if (d == 0) throw input_error("delay: duration must be >= 1");
        unsigned mp = delay_width(d);
        std::string x = fresh("dlX", mp), y = fresh("dlY", mp);
        return seq({assign_const(x, 0), assign_const(y, d),
                    while_loop(neq(x, y), seq({inc(x)}))});
    }

    gadget_program& p_;
    unsigned m_;
};

} // namespace detail

// Rewrite macros into primitive + joining statements; If-Else becomes the
// Choose-based construction, While gains its negated-condition branch.
inline gadget_program expand_macros(const gadget_program& prog, unsigned m) {
    gadget_program out = prog;
    detail::macro_expander ex(out, m);
    out.body = ex.expand(prog.body);
    out.renumber();
    return out;
}

} // namespace lenuniv
