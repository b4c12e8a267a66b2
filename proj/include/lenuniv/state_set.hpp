#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace lenuniv {

// Fixed-universe bitset over state indices.
class state_set {
public:
    state_set() = default;
    explicit state_set(std::size_t universe) : n_(universe), w_((universe + 63) / 64, 0) {}

    std::size_t universe() const { return n_; }

    bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i) { w_[i >> 6] |= std::uint64_t(1) << (i & 63); }
    void reset(std::size_t i) { w_[i >> 6] &= ~(std::uint64_t(1) << (i & 63)); }

    bool empty() const {
        for (auto w : w_)
            if (w) return false;
        return true;
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : w_) c += static_cast<std::size_t>(__builtin_popcountll(w));
        return c;
    }

    state_set& operator|=(const state_set& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }

    bool subset_of(const state_set& o) const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }

    bool intersects(const state_set& o) const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & o.w_[i]) return true;
        return false;
    }

    bool operator==(const state_set& o) const { return w_ == o.w_; }
    bool operator!=(const state_set& o) const { return !(*this == o); }

    template <typename F>
    void for_each(F&& f) const {
        for (std::size_t wi = 0; wi < w_.size(); ++wi) {
            std::uint64_t w = w_[wi];
            while (w) {
                unsigned b = static_cast<unsigned>(__builtin_ctzll(w));
                f(wi * 64 + b);
                w &= w - 1;
            }
        }
    }

    std::vector<std::size_t> to_vector() const {
        std::vector<std::size_t> v;
        for_each([&](std::size_t i) { v.push_back(i); });
        return v;
    }

    std::size_t hash() const {
        std::size_t h = 0xcbf29ce484222325ull;
        for (auto w : w_) {
            h ^= static_cast<std::size_t>(w);
            h *= 0x100000001b3ull;
        }
        return h;
    }

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

struct state_set_hash {
    std::size_t operator()(const state_set& s) const { return s.hash(); }
};

} // namespace lenuniv
