#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "gadget_ast.hpp"

namespace lenuniv {

namespace detail {

struct gtoken {
    std::string text;
    int line = 1, col = 1;
    bool eof = false;
};

class glexer {
public:
    explicit glexer(const std::string& s) : s_(s) { advance(); }
    const gtoken& peek() const { return cur_; }
    gtoken next() {
        gtoken t = cur_;
        advance();
        return t;
    }

private:
    void advance() {
        while (i_ < s_.size()) {
            char c = s_[i_];
            if (c == '#') {
                while (i_ < s_.size() && s_[i_] != '\n') step();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                step();
            } else {
                break;
            }
        }
        cur_ = {};
        cur_.line = line_;
        cur_.col = col_;
        if (i_ >= s_.size()) {
            cur_.eof = true;
            return;
        }
        char c = s_[i_];
        if (c == '<' && i_ + 1 < s_.size() && s_[i_ + 1] == '-') {
            cur_.text = "<-";
            step();
            step();
            return;
        }
        if (c == ';' || c == ',' || c == '{' || c == '}') {
            cur_.text = std::string(1, c);
            step();
            return;
        }
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'') {
            while (i_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_' || s_[i_] == '\'')) {
                cur_.text += s_[i_];
                step();
            }
            return;
        }
        throw parse_error("program: unexpected character '" + std::string(1, c) + "' at line " +
                          std::to_string(line_) + ", col " + std::to_string(col_));
    }

    void step() {
        if (s_[i_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++i_;
    }

    const std::string& s_;
    std::size_t i_ = 0;
    int line_ = 1, col_ = 1;
    gtoken cur_;
};

class gparser {
public:
    gparser(const std::string& text, unsigned m) : lx_(text), m_(m) {
        if (m == 0) throw input_error("parse_program: width m must be >= 1");
    }

    gadget_program parse() {
        gadget_program p;
        // declarations
        while (!lx_.peek().eof && lx_.peek().text == "var") {
            lx_.next();
            while (true) {
                gtoken t = expect_name("variable name");
                if (p.find_var(t.text)) err(t, "duplicate variable '" + t.text + "'");
                p.decls.push_back({t.text, m_, false});
                if (lx_.peek().text == ",") {
                    lx_.next();
                    continue;
                }
                break;
            }
            expect(";");
        }
        std::vector<stmt> stmts;
        while (!lx_.peek().eof) stmts.push_back(parse_stmt(p));
        if (stmts.empty()) throw parse_error("program: no statements");
        p.body = gb::seq(std::move(stmts));
        check_while_true_positions(p.body, true);
        p.renumber();
        return p;
    }

private:
    [[noreturn]] void err(const gtoken& t, const std::string& msg) {
        throw parse_error("program: " + msg + " at line " + std::to_string(t.line) + ", col " +
                          std::to_string(t.col));
    }

    gtoken expect(const std::string& what) {
        gtoken t = lx_.next();
        if (t.eof || t.text != what) err(t, "expected '" + what + "'");
        return t;
    }

    gtoken expect_name(const char* what) {
        gtoken t = lx_.next();
        if (t.eof || t.text.empty() || std::isdigit(static_cast<unsigned char>(t.text[0])))
            err(t, std::string("expected ") + what);
        return t;
    }

    std::uint64_t expect_nat(const gadget_program&) {
        gtoken t = lx_.next();
        if (t.eof || t.text.empty() || !std::isdigit(static_cast<unsigned char>(t.text[0])))
            err(t, "expected a natural number");
        for (char c : t.text)
            if (!std::isdigit(static_cast<unsigned char>(c))) err(t, "malformed number '" + t.text + "'");
        try {
            return std::stoull(t.text);
        } catch (...) {
            err(t, "number out of range '" + t.text + "'");
        }
    }

    std::string expect_var(const gadget_program& p) {
        gtoken t = expect_name("variable name");
        if (!p.find_var(t.text)) err(t, "undeclared variable '" + t.text + "'");
        return t.text;
    }

    std::vector<stmt> parse_block(gadget_program& p) {
        expect("{");
        std::vector<stmt> out;
        while (lx_.peek().text != "}") {
            if (lx_.peek().eof) err(lx_.peek(), "unterminated block");
            out.push_back(parse_stmt(p));
        }
        expect("}");
        return out;
    }

    stmt parse_cond(gadget_program& p) {
        gtoken t = lx_.next();
        if (t.text == "eq" || t.text == "neq") {
            std::string u = expect_var(p), v = expect_var(p);
            if (u == v) err(t, "condition variables must be distinct");
            return t.text == "eq" ? gb::eq(u, v) : gb::neq(u, v);
        }
        err(t, "expected condition 'eq V V' or 'neq V V'");
    }

    stmt parse_stmt(gadget_program& p) {
        gtoken t = lx_.next();
        if (t.eof) err(t, "unexpected end of input");
        const std::string& k = t.text;
        if (k == "select") {
            std::string v = expect_var(p);
            expect(";");
            return gb::select(v);
        }
        if (k == "inc") {
            std::string v = expect_var(p);
            expect(";");
            return gb::inc(v);
        }
        if (k == "eq" || k == "neq") {
            std::string u = expect_var(p), v = expect_var(p);
            if (u == v) err(t, "eq/neq variables must be distinct");
            expect(";");
            return k == "eq" ? gb::eq(u, v) : gb::neq(u, v);
        }
        if (k == "wait" || k == "delay") {
            std::uint64_t d = expect_nat(p);
            if (d == 0) err(t, k + " duration must be >= 1");
            expect(";");
            return k == "wait" ? gb::wait(d) : gb::delay(d);
        }
        if (k == "final") return gb::final_mark(parse_stmt(p));
        if (k == "choose") {
            std::vector<stmt> branches;
            branches.push_back(gb::seq(parse_block(p)));
            if (lx_.peek().text != "or") err(lx_.peek(), "choose needs at least one 'or' branch");
            while (lx_.peek().text == "or") {
                lx_.next();
                branches.push_back(gb::seq(parse_block(p)));
            }
            return gb::choose(std::move(branches));
        }
        if (k == "if") {
            stmt cond = parse_cond(p);
            stmt then_s = gb::seq(parse_block(p));
            if (lx_.peek().text == "else") {
                lx_.next();
                return gb::if_else(std::move(cond), std::move(then_s), gb::seq(parse_block(p)));
            }
            return gb::if_then(std::move(cond), std::move(then_s));
        }
        if (k == "while") {
            if (lx_.peek().text == "true") {
                lx_.next();
                return gb::while_true(gb::seq(parse_block(p)));
            }
            stmt cond = parse_cond(p);
            return gb::while_loop(std::move(cond), gb::seq(parse_block(p)));
        }
        if (k == "parallel") {
            stmt body = gb::seq(parse_block(p));
            std::uint64_t d = 0;
            if (lx_.peek().text == "delay") {
                lx_.next();
                d = expect_nat(p);
                if (d == 0) err(t, "parallel delay must be >= 1");
            }
            if (lx_.peek().text == ";") lx_.next();
            return gb::parallel(std::move(body), d);
        }
        if (k == "add" || k == "mul") {
            std::string w = expect_var(p), u = expect_var(p), v = expect_var(p);
            expect(";");
            return k == "add" ? gb::add(w, u, v) : gb::mul(w, u, v);
        }
        if (k == "prime" || k == "notprime") {
            std::string v = expect_var(p);
            expect(";");
            return k == "prime" ? gb::prime(v) : gb::not_prime(v);
        }
        if (k == "nthprime") {
            std::string pv = expect_var(p), u = expect_var(p);
            if (pv == u) err(t, "nthprime variables must be distinct");
            expect(";");
            return gb::nth_prime_s(pv, u);
        }
        // assignment: V <- NAT | V <- V
        if (!p.find_var(k)) err(t, "undeclared variable or unknown statement '" + k + "'");
        expect("<-");
        gtoken rhs = lx_.next();
        if (rhs.eof) err(rhs, "expected assignment right-hand side");
        stmt s;
        if (std::isdigit(static_cast<unsigned char>(rhs.text[0]))) {
            std::uint64_t c = 0;
            try {
                c = std::stoull(rhs.text);
            } catch (...) {
                err(rhs, "number out of range");
            }
            if (m_ >= 64 || c > ((std::uint64_t(1) << m_) - 1))
                err(rhs, "constant " + rhs.text + " out of range for width m=" + std::to_string(m_));
            s = gb::assign_const(k, c);
        } else {
            if (!p.find_var(rhs.text)) err(rhs, "undeclared variable '" + rhs.text + "'");
            if (rhs.text == k) err(rhs, "assignment source and destination must be distinct");
            s = gb::assign_var(k, rhs.text);
        }
        expect(";");
        return s;
    }

    // WhileTrue may appear only as the last element of the top-level sequence.
    void check_while_true_positions(const stmt& s, bool top_level) {
        if (s.kind == stmt_kind::sequence) {
            for (std::size_t i = 0; i < s.children.size(); ++i) {
                const stmt& c = s.children[i];
                if (c.kind == stmt_kind::while_true) {
                    if (!(top_level && i + 1 == s.children.size()))
                        throw parse_error(
                            "program: 'while true' is only allowed as the last top-level statement");
                    check_while_true_positions(c.children[0], false);
                } else {
                    check_while_true_positions(c, false);
                }
            }
            return;
        }
        for (const auto& c : s.children) {
            if (c.kind == stmt_kind::while_true)
                throw parse_error("program: 'while true' is only allowed as the last top-level statement");
            check_while_true_positions(c, false);
        }
    }

    glexer lx_;
    unsigned m_;
};

} // namespace detail

inline gadget_program parse_program(const std::string& text, unsigned m) {
    return detail::gparser(text, m).parse();
}

} // namespace lenuniv
