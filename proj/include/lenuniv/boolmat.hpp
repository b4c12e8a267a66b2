#pragma once

#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "automaton.hpp"
#include "errors.hpp"

namespace lenuniv {

using bignat = boost::multiprecision::cpp_int;

// Square boolean matrix, rows packed into 64-bit words.
class bool_matrix {
public:
    bool_matrix() = default;
    explicit bool_matrix(std::size_t n) : n_(n), stride_((n + 63) / 64), w_(n * stride_, 0) {}

    std::size_t size() const { return n_; }

    bool get(std::size_t i, std::size_t j) const {
        return (w_[i * stride_ + (j >> 6)] >> (j & 63)) & 1u;
    }
    void set(std::size_t i, std::size_t j) {
        w_[i * stride_ + (j >> 6)] |= std::uint64_t(1) << (j & 63);
    }

    static bool_matrix identity(std::size_t n) {
        bool_matrix m(n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i);
        return m;
    }

    bool operator==(const bool_matrix& o) const { return n_ == o.n_ && w_ == o.w_; }

    // Row i of the product = OR of B's rows selected by row i of *this.
    friend bool_matrix mat_mul(const bool_matrix& a, const bool_matrix& b) {
        if (a.n_ != b.n_) throw input_error("mat_mul: dimension mismatch");
        bool_matrix c(a.n_);
        for (std::size_t i = 0; i < a.n_; ++i) {
            const std::uint64_t* arow = &a.w_[i * a.stride_];
            std::uint64_t* crow = &c.w_[i * c.stride_];
            for (std::size_t wi = 0; wi < a.stride_; ++wi) {
                std::uint64_t w = arow[wi];
                while (w) {
                    std::size_t j = wi * 64 + static_cast<unsigned>(__builtin_ctzll(w));
                    w &= w - 1;
                    const std::uint64_t* brow = &b.w_[j * b.stride_];
                    for (std::size_t k = 0; k < b.stride_; ++k) crow[k] |= brow[k];
                }
            }
        }
        return c;
    }

    // Support of row i as a state_set over [0, n).
    state_set row_support(std::size_t i) const {
        state_set s(n_);
        for (std::size_t wi = 0; wi < stride_; ++wi) {
            std::uint64_t w = w_[i * stride_ + wi];
            while (w) {
                s.set(wi * 64 + static_cast<unsigned>(__builtin_ctzll(w)));
                w &= w - 1;
            }
        }
        return s;
    }

private:
    std::size_t n_ = 0;
    std::size_t stride_ = 0;
    std::vector<std::uint64_t> w_;
};

// "Any letter" adjacency: edge q -> t iff some symbol moves q to t.
inline bool_matrix adjacency(const automaton& a) {
    bool_matrix m(a.states);
    for (std::size_t q = 0; q < a.states; ++q)
        for (std::size_t s = 0; s < a.nsym(); ++s)
            for (auto t : a.succ(q, s)) m.set(q, t);
    return m;
}

// Binary powering; exponent is an arbitrary-precision natural.
inline bool_matrix mat_pow(bool_matrix base, const bignat& e) {
    if (e < 0) throw input_error("mat_pow: negative exponent");
    bool_matrix acc = bool_matrix::identity(base.size());
    bignat k = e;
    while (k > 0) {
        if ((k & 1) != 0) acc = mat_mul(acc, base);
        k >>= 1;
        if (k > 0) base = mat_mul(base, base);
    }
    return acc;
}

} // namespace lenuniv
