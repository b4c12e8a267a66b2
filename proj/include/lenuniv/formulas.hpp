#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "boolmat.hpp" // bignat
#include "errors.hpp"
#include "gadget_ast.hpp"
#include "primes.hpp"

namespace lenuniv {

enum class atom_kind : std::uint8_t {
    eq_const,    // X = c
    sum_eq,      // Xh = Xi + Xj
    prod_eq,     // Xh = Xi * Xj
    is_prime,    // Xi is prime
    nth_prime,   // Xi is the Xj'th prime
    divides,     // Xi | ell'
    not_divides, // Xi does not divide ell'
};

struct atom {
    atom_kind kind;
    std::int32_t x = -1, y = -1, z = -1; // variable indices
    std::uint64_t c = 0;                 // for eq_const
};

// Formula bodies are stored in a flat arena: AND/OR reference a child-index
// range, leaves carry an atom. Keeps multi-million-node reduction formulas
// compact.
struct formula_node {
    enum type_t : std::uint8_t { f_and, f_or, f_atom } type;
    atom a{atom_kind::eq_const};
    std::uint32_t kb = 0, ke = 0; // child range in formula::kids
};

struct formula {
    std::vector<std::string> vars;
    unsigned m = 0;
    std::vector<formula_node> nodes;
    std::vector<std::uint32_t> kids;
    std::uint32_t root = 0;

    std::int32_t var_index(const std::string& name) const {
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (vars[i] == name) return static_cast<std::int32_t>(i);
        return -1;
    }
};

// Incremental builder used by parsers and the reduction generator.
class formula_builder {
public:
    formula_builder(std::vector<std::string> vars, unsigned m) {
        f_.vars = std::move(vars);
        f_.m = m;
        if (m == 0 || m > 62) throw input_error("formula: width must be in [1, 62]");
    }

    std::uint32_t leaf(const atom& a) {
        check_atom(a);
        f_.nodes.push_back({formula_node::f_atom, a, 0, 0});
        return static_cast<std::uint32_t>(f_.nodes.size() - 1);
    }

    std::uint32_t combine(formula_node::type_t t, const std::vector<std::uint32_t>& children) {
        if (children.empty()) throw input_error("formula: and/or needs children");
        if (children.size() == 1) return children[0];
        formula_node n;
        n.type = t;
        n.kb = static_cast<std::uint32_t>(f_.kids.size());
        for (auto c : children) f_.kids.push_back(c);
        n.ke = static_cast<std::uint32_t>(f_.kids.size());
        f_.nodes.push_back(n);
        return static_cast<std::uint32_t>(f_.nodes.size() - 1);
    }

    std::uint32_t conj(const std::vector<std::uint32_t>& c) { return combine(formula_node::f_and, c); }
    std::uint32_t disj(const std::vector<std::uint32_t>& c) { return combine(formula_node::f_or, c); }

    formula finish(std::uint32_t root) {
        f_.root = root;
        return std::move(f_);
    }

private:
    void check_atom(const atom& a) {
        auto chk = [&](std::int32_t v) {
            if (v < 0 || static_cast<std::size_t>(v) >= f_.vars.size())
                throw input_error("formula: variable index out of range");
        };
        chk(a.x);
        switch (a.kind) {
        case atom_kind::eq_const:
            if (a.c > ((std::uint64_t(1) << f_.m) - 1))
                throw input_error("formula: constant " + std::to_string(a.c) +
                                  " out of range for width " + std::to_string(f_.m));
            break;
        case atom_kind::sum_eq:
        case atom_kind::prod_eq:
            chk(a.y);
            chk(a.z);
            break;
        case atom_kind::nth_prime:
            chk(a.y);
            break;
        default:
            break;
        }
    }

    formula f_;
};

// ---- s-expression syntax ----

namespace detail {

struct sexp {
    std::string tok;            // leaf token (empty for lists)
    std::vector<sexp> kids;
    bool is_list = false;
};

inline sexp parse_sexp(const std::string& s, std::size_t& i) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) throw parse_error("formula: unexpected end of input");
    if (s[i] == '(') {
        ++i;
        sexp e;
        e.is_list = true;
        while (true) {
            while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
            if (i >= s.size()) throw parse_error("formula: missing ')'");
            if (s[i] == ')') {
                ++i;
                return e;
            }
            e.kids.push_back(parse_sexp(s, i));
        }
    }
    if (s[i] == ')') throw parse_error("formula: unexpected ')'");
    sexp e;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '(' && s[i] != ')')
        e.tok += s[i++];
    return e;
}

inline std::uint32_t build_body(const sexp& e, formula_builder& b, const formula& shape,
                                const std::vector<std::string>& vars) {
    auto var_of = [&](const sexp& t) -> std::int32_t {
        if (t.is_list) throw parse_error("formula: expected a variable name");
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (vars[i] == t.tok) return static_cast<std::int32_t>(i);
        throw parse_error("formula: undeclared variable '" + t.tok + "'");
    };
    auto nat_of = [&](const sexp& t) -> std::uint64_t {
        if (t.is_list || t.tok.empty()) throw parse_error("formula: expected a number");
        for (char c : t.tok)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                throw parse_error("formula: malformed number '" + t.tok + "'");
        return std::stoull(t.tok);
    };
    if (!e.is_list || e.kids.empty() || e.kids[0].is_list)
        throw parse_error("formula: malformed body");
    const std::string& op = e.kids[0].tok;
    auto arity = [&](std::size_t n) {
        if (e.kids.size() != n + 1)
            throw parse_error("formula: '" + op + "' expects " + std::to_string(n) + " arguments");
    };
    if (op == "and" || op == "or") {
        if (e.kids.size() < 2) throw parse_error("formula: empty '" + op + "'");
        std::vector<std::uint32_t> c;
        for (std::size_t i = 1; i < e.kids.size(); ++i)
            c.push_back(build_body(e.kids[i], b, shape, vars));
        return b.combine(op == "and" ? formula_node::f_and : formula_node::f_or, c);
    }
    if (op == "=") {
        arity(2);
        return b.leaf({atom_kind::eq_const, var_of(e.kids[1]), -1, -1, nat_of(e.kids[2])});
    }
    if (op == "sum" || op == "prod") {
        arity(3);
        return b.leaf({op == "sum" ? atom_kind::sum_eq : atom_kind::prod_eq, var_of(e.kids[1]),
                       var_of(e.kids[2]), var_of(e.kids[3]), 0});
    }
    if (op == "prime") {
        arity(1);
        return b.leaf({atom_kind::is_prime, var_of(e.kids[1]), -1, -1, 0});
    }
    if (op == "nthprime") {
        arity(2);
        return b.leaf({atom_kind::nth_prime, var_of(e.kids[1]), var_of(e.kids[2]), -1, 0});
    }
    if (op == "divides" || op == "notdivides") {
        arity(1);
        return b.leaf(
            {op == "divides" ? atom_kind::divides : atom_kind::not_divides, var_of(e.kids[1]), -1, -1, 0});
    }
    throw parse_error("formula: unknown operator '" + op + "'");
}

} // namespace detail

inline formula parse_formula(const std::string& text) {
    std::size_t i = 0;
    detail::sexp e = detail::parse_sexp(text, i);
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i != text.size()) throw parse_error("formula: trailing input");
    if (!e.is_list || e.kids.size() != 4 || e.kids[0].is_list || e.kids[0].tok != "exists")
        throw parse_error("formula: expected (exists (vars...) m body)");
    if (!e.kids[1].is_list) throw parse_error("formula: variable list must be a list");
    std::vector<std::string> vars;
    for (const auto& v : e.kids[1].kids) {
        if (v.is_list) throw parse_error("formula: variable names must be atoms");
        for (const auto& prev : vars)
            if (prev == v.tok) throw parse_error("formula: duplicate variable '" + v.tok + "'");
        vars.push_back(v.tok);
    }
    if (vars.empty()) throw parse_error("formula: needs at least one variable");
    if (e.kids[2].is_list) throw parse_error("formula: width must be a number");
    unsigned m = 0;
    try {
        m = static_cast<unsigned>(std::stoul(e.kids[2].tok));
    } catch (...) {
        throw parse_error("formula: malformed width '" + e.kids[2].tok + "'");
    }
    formula_builder b(vars, m);
    formula shape;
    try {
        std::uint32_t root = detail::build_body(e.kids[3], b, shape, vars);
        return b.finish(root);
    } catch (const input_error& ie) {
        throw parse_error(ie.what());
    }
}

namespace detail {
inline void store_body(const formula& f, std::uint32_t n, std::string& out) {
    const formula_node& nd = f.nodes[n];
    switch (nd.type) {
    case formula_node::f_and:
    case formula_node::f_or:
        out += nd.type == formula_node::f_and ? "(and" : "(or";
        for (std::uint32_t k = nd.kb; k < nd.ke; ++k) {
            out += ' ';
            store_body(f, f.kids[k], out);
        }
        out += ')';
        break;
    case formula_node::f_atom: {
        const atom& a = nd.a;
        switch (a.kind) {
        case atom_kind::eq_const:
            out += "(= " + f.vars[a.x] + " " + std::to_string(a.c) + ")";
            break;
        case atom_kind::sum_eq:
            out += "(sum " + f.vars[a.x] + " " + f.vars[a.y] + " " + f.vars[a.z] + ")";
            break;
        case atom_kind::prod_eq:
            out += "(prod " + f.vars[a.x] + " " + f.vars[a.y] + " " + f.vars[a.z] + ")";
            break;
        case atom_kind::is_prime:
            out += "(prime " + f.vars[a.x] + ")";
            break;
        case atom_kind::nth_prime:
            out += "(nthprime " + f.vars[a.x] + " " + f.vars[a.y] + ")";
            break;
        case atom_kind::divides:
            out += "(divides " + f.vars[a.x] + ")";
            break;
        case atom_kind::not_divides:
            out += "(notdivides " + f.vars[a.x] + ")";
            break;
        }
        break;
    }
    }
}
} // namespace detail

inline std::string store_formula(const formula& f) {
    std::string out = "(exists (";
    for (std::size_t i = 0; i < f.vars.size(); ++i) {
        if (i) out += ' ';
        out += f.vars[i];
    }
    out += ") " + std::to_string(f.m) + " ";
    detail::store_body(f, f.root, out);
    out += ")";
    return out;
}

// ---- evaluation ----

namespace detail {

class formula_evaluator {
public:
    formula_evaluator(const formula& f, const bignat& ellp, std::uint64_t budget)
        : f_(f), ellp_(ellp), budget_(budget) {
        maxval_ = (std::uint64_t(1) << f.m) - 1;
        env_.assign(f.vars.size(), std::nullopt);
    }

    // Pre-bound variables (used by the fixed-assignment equivalence tests).
    void bind_fixed(std::size_t idx, std::uint64_t v) { env_[idx] = v; }

    bool eval() { return eval_node(f_.root, [] { return true; }); }

private:
    using cont = std::function<bool()>;

    bool eval_node(std::uint32_t n, const cont& k) {
        const formula_node& nd = f_.nodes[n];
        switch (nd.type) {
        case formula_node::f_atom:
            return eval_atom(nd.a, k);
        case formula_node::f_or:
            for (std::uint32_t i = nd.kb; i < nd.ke; ++i)
                if (eval_node(f_.kids[i], k)) return true;
            return false;
        case formula_node::f_and:
            return eval_and(nd.kb, nd.ke, k);
        }
        return false;
    }

    bool eval_and(std::uint32_t kb, std::uint32_t ke, const cont& k) {
        if (kb == ke) return k();
        return eval_node(f_.kids[kb], [&, kb, ke] { return eval_and(kb + 1, ke, k); });
    }

    bool bind(std::int32_t v, std::uint64_t val, const cont& k) {
        if (val > maxval_) return false;
        if (env_[v]) return *env_[v] == val && k();
        env_[v] = val;
        bool r = k();
        env_[v] = std::nullopt;
        return r;
    }

    std::uint64_t need(std::int32_t v, const char* who) {
        if (!env_[v])
            throw input_error(std::string("eval_formula: non-definitional use of '") + f_.vars[v] +
                              "' in " + who);
        return *env_[v];
    }

    void spend(std::uint64_t n) {
        if ((spent_ += n) > budget_)
            throw resource_limit_error("eval_formula: enumeration budget exceeded");
    }

    bool eval_atom(const atom& a, const cont& k) {
        spend(1);
        switch (a.kind) {
        case atom_kind::eq_const:
            return bind(a.x, a.c, k);
        case atom_kind::sum_eq: {
            std::uint64_t yi = need(a.y, "sum"), zi = need(a.z, "sum");
            if (yi + zi > maxval_) return false; // overflow falsifies the conjunct
            return bind(a.x, yi + zi, k);
        }
        case atom_kind::prod_eq: {
            bool yd = env_[a.y].has_value(), zd = env_[a.z].has_value();
            if (yd && zd) {
                unsigned __int128 p = static_cast<unsigned __int128>(*env_[a.y]) * *env_[a.z];
                if (p > maxval_) return false;
                return bind(a.x, static_cast<std::uint64_t>(p), k);
            }
            // one factor known: the other is fixed by bounded enumeration
            std::int32_t known = yd ? a.y : (zd ? a.z : -1);
            std::int32_t open = yd ? a.z : a.y;
            if (known < 0)
                throw input_error("eval_formula: non-definitional product (both factors open)");
            std::uint64_t kv = *env_[known];
            if (kv == 0)
                throw input_error("eval_formula: non-definitional product (known factor is zero)");
            if (env_[a.x]) {
                std::uint64_t xv = *env_[a.x];
                if (xv % kv != 0) return false;
                return bind(open, xv / kv, k);
            }
            std::uint64_t hi = maxval_ / kv;
            spend(hi + 1);
            for (std::uint64_t cand = 0; cand <= hi; ++cand) {
                env_[open] = cand;
                bool r = bind(a.x, cand * kv, k);
                env_[open] = std::nullopt;
                if (r) return true;
            }
            return false;
        }
        case atom_kind::is_prime:
            return is_prime(need(a.x, "prime")) && k();
        case atom_kind::nth_prime: {
            std::uint64_t u = need(a.y, "nthprime");
            if (u == 0) return false;
            if (u >= maxval_) return false; // p(u) > u >= 2^m - 1
            std::uint64_t p = nth_prime(u);
            if (p > maxval_) return false;
            return bind(a.x, p, k);
        }
        case atom_kind::divides: {
            std::uint64_t x = need(a.x, "divides");
            bool d = x == 0 ? (ellp_ == 0) : (ellp_ % x == 0);
            return d && k();
        }
        case atom_kind::not_divides: {
            std::uint64_t x = need(a.x, "notdivides");
            bool d = x == 0 ? (ellp_ == 0) : (ellp_ % x == 0);
            return !d && k();
        }
        }
        return false;
    }

    const formula& f_;
    bignat ellp_;
    std::uint64_t maxval_;
    std::vector<std::optional<std::uint64_t>> env_;
    std::uint64_t budget_;
    std::uint64_t spent_ = 0;
};

} // namespace detail

inline constexpr std::uint64_t kDefaultEvalBudget = 200'000'000;

inline bool eval_formula(const formula& f, const bignat& ellp,
                         std::uint64_t budget = kDefaultEvalBudget) {
    detail::formula_evaluator ev(f, ellp, budget);
    return ev.eval();
}

// Evaluate the body with all quantified variables pre-bound (oracle helper).
inline bool eval_formula_at(const formula& f, const bignat& ellp,
                            const std::map<std::string, std::uint64_t>& fixed,
                            std::uint64_t budget = kDefaultEvalBudget) {
    detail::formula_evaluator ev(f, ellp, budget);
    for (const auto& [name, v] : fixed) {
        std::int32_t i = f.var_index(name);
        if (i < 0) throw input_error("eval_formula_at: unknown variable " + name);
        ev.bind_fixed(static_cast<std::size_t>(i), v);
    }
    return ev.eval();
}

// ---- compilation to gadget programs ----

// Suffix for the per-variable divisibility counters.
inline std::string counter_name(const std::string& var) { return var + "'"; }

namespace detail {

inline stmt verify_node(const formula& f, std::uint32_t n, gadget_program& prog) {
    using namespace gb;
    const formula_node& nd = f.nodes[n];
    if (nd.type == formula_node::f_and || nd.type == formula_node::f_or) {
        std::vector<stmt> kids;
        for (std::uint32_t i = nd.kb; i < nd.ke; ++i)
            kids.push_back(verify_node(f, f.kids[i], prog));
        if (nd.type == formula_node::f_and) return seq(std::move(kids));
        std::vector<stmt> branches;
        for (auto& s : kids) branches.push_back(seq({std::move(s)}));
        return choose(std::move(branches));
    }
    const atom& a = nd.a;
    auto freshc = [&](const char* hint) {
        std::string c = prog.fresh_var(hint);
        prog.declare_internal(c, f.m);
        return c;
    };
    switch (a.kind) {
    case atom_kind::eq_const: {
        std::string c = freshc("C");
        return seq({assign_const(c, a.c), eq(f.vars[a.x], c)});
    }
    case atom_kind::sum_eq: {
        std::string c = freshc("C");
        return seq({add(c, f.vars[a.y], f.vars[a.z]), eq(f.vars[a.x], c)});
    }
    case atom_kind::prod_eq: {
        std::string c = freshc("C");
        return seq({mul(c, f.vars[a.y], f.vars[a.z]), eq(f.vars[a.x], c)});
    }
    case atom_kind::is_prime:
        return prime(f.vars[a.x]);
    case atom_kind::nth_prime: {
        std::string c = freshc("C");
        return seq({nth_prime_s(c, f.vars[a.y]), eq(f.vars[a.x], c)});
    }
    case atom_kind::divides: {
        std::string c = freshc("C");
        return seq({assign_const(c, 0), eq(counter_name(f.vars[a.x]), c)});
    }
    case atom_kind::not_divides: {
        std::string c = freshc("C");
        return seq({assign_const(c, 0), neq(counter_name(f.vars[a.x]), c)});
    }
    }
    throw input_error("verify_to_program: unreachable");
}

} // namespace detail

// Gadget program whose complete computations (from valid X_i with counters
// X_i' = ell' mod X_i) exist iff the body holds at those values. External
// variables X_i and X_i' are declared; internal C variables are fresh.
inline gadget_program verify_to_program(const formula& f) {
    gadget_program prog;
    for (const auto& v : f.vars) prog.decls.push_back({v, f.m, false});
    for (const auto& v : f.vars) prog.decls.push_back({counter_name(v), f.m, false});
    prog.body = gb::seq({detail::verify_node(f, f.root, prog)});
    prog.renumber();
    return prog;
}

} // namespace lenuniv
