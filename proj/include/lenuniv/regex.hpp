#pragma once

#include <algorithm>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "automaton.hpp"
#include "errors.hpp"

namespace lenuniv {

namespace detail {

// Regex over single-character symbols: alternation '|', concatenation,
// '*' '+' '?', grouping, backslash escapes. No character classes.
struct rx_node {
    enum kind_t { epsilon, sym, alt, cat, star, plus, opt } kind;
    char ch = 0;          // for sym
    std::size_t pos = 0;  // linearized position (1-based), for sym
    std::vector<std::unique_ptr<rx_node>> kids;
};

class rx_parser {
public:
    explicit rx_parser(const std::string& s) : s_(s) {}

    std::unique_ptr<rx_node> parse() {
        auto n = parse_alt();
        if (i_ != s_.size()) throw parse_error("regex: unexpected '" + std::string(1, s_[i_]) +
                                               "' at offset " + std::to_string(i_));
        return n;
    }

private:
    std::unique_ptr<rx_node> parse_alt() {
        auto left = parse_cat();
        while (i_ < s_.size() && s_[i_] == '|') {
            ++i_;
            auto right = parse_cat();
            auto n = std::make_unique<rx_node>();
            n->kind = rx_node::alt;
            n->kids.push_back(std::move(left));
            n->kids.push_back(std::move(right));
            left = std::move(n);
        }
        return left;
    }

    std::unique_ptr<rx_node> parse_cat() {
        std::vector<std::unique_ptr<rx_node>> parts;
        while (i_ < s_.size() && s_[i_] != '|' && s_[i_] != ')') parts.push_back(parse_rep());
        if (parts.empty()) {
            auto n = std::make_unique<rx_node>();
            n->kind = rx_node::epsilon;
            return n;
        }
        auto left = std::move(parts[0]);
        for (std::size_t k = 1; k < parts.size(); ++k) {
            auto n = std::make_unique<rx_node>();
            n->kind = rx_node::cat;
            n->kids.push_back(std::move(left));
            n->kids.push_back(std::move(parts[k]));
            left = std::move(n);
        }
        return left;
    }

    std::unique_ptr<rx_node> parse_rep() {
        auto n = parse_atom();
        while (i_ < s_.size() && (s_[i_] == '*' || s_[i_] == '+' || s_[i_] == '?')) {
            auto r = std::make_unique<rx_node>();
            r->kind = s_[i_] == '*' ? rx_node::star : s_[i_] == '+' ? rx_node::plus : rx_node::opt;
            r->kids.push_back(std::move(n));
            n = std::move(r);
            ++i_;
        }
        return n;
    }

    std::unique_ptr<rx_node> parse_atom() {
        if (i_ >= s_.size()) throw parse_error("regex: unexpected end of input");
        char c = s_[i_];
        if (c == '(') {
            ++i_;
            auto n = parse_alt();
            if (i_ >= s_.size() || s_[i_] != ')') throw parse_error("regex: missing ')'");
            ++i_;
            return n;
        }
        if (c == ')' || c == '|') throw parse_error("regex: unexpected '" + std::string(1, c) + "'");
        if (c == '*' || c == '+' || c == '?')
            throw parse_error("regex: quantifier '" + std::string(1, c) + "' with nothing to repeat");
        if (c == '\\') {
            if (i_ + 1 >= s_.size()) throw parse_error("regex: dangling escape");
            c = s_[i_ + 1];
            i_ += 2;
        } else {
            ++i_;
        }
        auto n = std::make_unique<rx_node>();
        n->kind = rx_node::sym;
        n->ch = c;
        return n;
    }

    const std::string& s_;
    std::size_t i_ = 0;
};

struct glushkov_sets {
    bool nullable = false;
    std::set<std::size_t> first, last;
};

inline glushkov_sets glushkov(const rx_node* n, std::vector<std::set<std::size_t>>& follow) {
    glushkov_sets g;
    switch (n->kind) {
    case rx_node::epsilon:
        g.nullable = true;
        break;
    case rx_node::sym:
        g.first = {n->pos};
        g.last = {n->pos};
        break;
    case rx_node::alt: {
        auto a = glushkov(n->kids[0].get(), follow);
        auto b = glushkov(n->kids[1].get(), follow);
        g.nullable = a.nullable || b.nullable;
        g.first = a.first;
        g.first.insert(b.first.begin(), b.first.end());
        g.last = a.last;
        g.last.insert(b.last.begin(), b.last.end());
        break;
    }
    case rx_node::cat: {
        auto a = glushkov(n->kids[0].get(), follow);
        auto b = glushkov(n->kids[1].get(), follow);
        g.nullable = a.nullable && b.nullable;
        g.first = a.first;
        if (a.nullable) g.first.insert(b.first.begin(), b.first.end());
        g.last = b.last;
        if (b.nullable) g.last.insert(a.last.begin(), a.last.end());
        for (auto p : a.last) follow[p].insert(b.first.begin(), b.first.end());
        break;
    }
    case rx_node::star:
    case rx_node::plus:
    case rx_node::opt: {
        auto a = glushkov(n->kids[0].get(), follow);
        g = a;
        if (n->kind != rx_node::plus) g.nullable = true;
        if (n->kind != rx_node::opt)
            for (auto p : a.last) follow[p].insert(a.first.begin(), a.first.end());
        break;
    }
    }
    return g;
}

inline void number_positions(rx_node* n, std::vector<char>& syms) {
    if (n->kind == rx_node::sym) {
        syms.push_back(n->ch);
        n->pos = syms.size(); // 1-based
    }
    for (auto& k : n->kids) number_positions(k.get(), syms);
}

} // namespace detail

// Position (Glushkov) automaton: epsilon-free NFA with one state per symbol
// occurrence plus a start state. Alphabet = sorted distinct symbols of the
// pattern.
inline automaton regex_to_nfa(const std::string& pattern) {
    detail::rx_parser p(pattern);
    auto root = p.parse();
    std::vector<char> syms;
    detail::number_positions(root.get(), syms);

    std::vector<std::string> alphabet;
    {
        std::set<char> uniq(syms.begin(), syms.end());
        for (char c : uniq) alphabet.emplace_back(1, c);
    }
    if (alphabet.empty()) alphabet.emplace_back("a"); // epsilon-only pattern still needs an alphabet

    std::vector<std::set<std::size_t>> follow(syms.size() + 1);
    auto g = detail::glushkov(root.get(), follow);

    automaton a = make_automaton(automaton_kind::nfa, alphabet, syms.size() + 1);
    a.initials = {0};
    auto sym_idx = [&](std::size_t pos) { return a.symbol_index(std::string(1, syms[pos - 1])); };
    for (auto q : g.first) a.add_transition(0, sym_idx(q), q);
    for (std::size_t p2 = 1; p2 <= syms.size(); ++p2)
        for (auto q : follow[p2]) a.add_transition(p2, sym_idx(q), q);
    for (auto q : g.last) a.finals.push_back(q);
    if (g.nullable) a.finals.push_back(0);
    std::sort(a.finals.begin(), a.finals.end());
    a.finals.erase(std::unique(a.finals.begin(), a.finals.end()), a.finals.end());
    return a;
}

} // namespace lenuniv
