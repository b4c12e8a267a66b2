#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"

namespace lenuniv {

// Statement tree for the gadget programming language. Joining constructs
// and primitives are "core"; macro kinds are rewritten away by
// expand_macros before compilation.
enum class stmt_kind {
    // primitives
    select,       // select a
    assign_const, // a <- value
    assign_var,   // a <- b
    increment,    // inc a
    equality,     // eq a b
    inequality,   // neq a b
    wait,         // wait value   (value >= 1)
    // joining constructs
    sequence,   // children
    choose,     // children = branches
    if_else,    // children[0]=cond, children[1]=then, optional children[2]=else
    while_loop, // children[0]=cond, children[1]=body; core form adds children[2]=negated cond
    while_true, // children[0]=body
    parallel,   // children[0]=body; value = explicit delay (0 = auto)
    final_mark, // children[0]=inner; marks inner's start state final
    // macros
    delay_macro,     // value = D >= 1
    add_macro,       // a <- b + c
    mul_macro,       // a <- b * c
    prime_macro,     // prime a
    not_prime_macro, // notprime a
    nth_prime_macro, // a <- nthprime b
};

struct stmt {
    stmt_kind kind;
    int id = -1; // stable preorder id, assigned by renumber()
    std::string a, b, c;
    std::uint64_t value = 0;
    std::vector<stmt> children;
};

struct var_decl {
    std::string name;
    unsigned width = 0;
    bool internal = false;
};

struct gadget_program {
    std::vector<var_decl> decls;
    stmt body; // a sequence
    int next_id = 0;
    int fresh_counter = 0; // for macro-internal names

    void renumber() {
        next_id = 0;
        number(body);
    }

    std::string fresh_var(const std::string& hint) {
        return "#" + hint + std::to_string(fresh_counter++);
    }

    const var_decl* find_var(const std::string& name) const {
        for (const auto& d : decls)
            if (d.name == name) return &d;
        return nullptr;
    }

    void declare_internal(const std::string& name, unsigned width) {
        decls.push_back({name, width, true});
    }

private:
    void number(stmt& s) {
        s.id = next_id++;
        for (auto& c : s.children) number(c);
    }
};

// Convenience constructors used by programmatic builders.
namespace gb {
inline stmt seq(std::vector<stmt> kids) { return {stmt_kind::sequence, -1, "", "", "", 0, std::move(kids)}; }
inline stmt select(std::string v) { return {stmt_kind::select, -1, std::move(v), "", "", 0, {}}; }
inline stmt assign_const(std::string v, std::uint64_t c) { return {stmt_kind::assign_const, -1, std::move(v), "", "", c, {}}; }
inline stmt assign_var(std::string u, std::string v) { return {stmt_kind::assign_var, -1, std::move(u), std::move(v), "", 0, {}}; }
inline stmt inc(std::string v) { return {stmt_kind::increment, -1, std::move(v), "", "", 0, {}}; }
inline stmt eq(std::string u, std::string v) { return {stmt_kind::equality, -1, std::move(u), std::move(v), "", 0, {}}; }
inline stmt neq(std::string u, std::string v) { return {stmt_kind::inequality, -1, std::move(u), std::move(v), "", 0, {}}; }
inline stmt wait(std::uint64_t d) { return {stmt_kind::wait, -1, "", "", "", d, {}}; }
inline stmt choose(std::vector<stmt> branches) { return {stmt_kind::choose, -1, "", "", "", 0, std::move(branches)}; }
inline stmt if_else(stmt cond, stmt then_s, stmt else_s) {
    return {stmt_kind::if_else, -1, "", "", "", 0, {std::move(cond), std::move(then_s), std::move(else_s)}};
}
inline stmt if_then(stmt cond, stmt then_s) {
    return {stmt_kind::if_else, -1, "", "", "", 0, {std::move(cond), std::move(then_s)}};
}
inline stmt while_loop(stmt cond, stmt body) {
    return {stmt_kind::while_loop, -1, "", "", "", 0, {std::move(cond), std::move(body)}};
}
inline stmt while_true(stmt body) { return {stmt_kind::while_true, -1, "", "", "", 0, {std::move(body)}}; }
inline stmt parallel(stmt body, std::uint64_t explicit_delay = 0) {
    return {stmt_kind::parallel, -1, "", "", "", explicit_delay, {std::move(body)}};
}
inline stmt final_mark(stmt inner) { return {stmt_kind::final_mark, -1, "", "", "", 0, {std::move(inner)}}; }
inline stmt delay(std::uint64_t d) { return {stmt_kind::delay_macro, -1, "", "", "", d, {}}; }
inline stmt add(std::string w, std::string u, std::string v) { return {stmt_kind::add_macro, -1, std::move(w), std::move(u), std::move(v), 0, {}}; }
inline stmt mul(std::string w, std::string u, std::string v) { return {stmt_kind::mul_macro, -1, std::move(w), std::move(u), std::move(v), 0, {}}; }
inline stmt prime(std::string v) { return {stmt_kind::prime_macro, -1, std::move(v), "", "", 0, {}}; }
inline stmt not_prime(std::string v) { return {stmt_kind::not_prime_macro, -1, std::move(v), "", "", 0, {}}; }
inline stmt nth_prime_s(std::string p, std::string u) { return {stmt_kind::nth_prime_macro, -1, std::move(p), std::move(u), "", 0, {}}; }
} // namespace gb

} // namespace lenuniv
