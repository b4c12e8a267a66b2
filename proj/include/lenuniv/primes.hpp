#pragma once

#include <cstdint>
#include <mutex>
#include <vector>

#include "errors.hpp"

namespace lenuniv {

namespace detail {

// Shared growing sieve. Guarded by a mutex so the public helpers stay
// safe to call from property tests running in parallel sections.
struct prime_table {
    std::vector<std::uint64_t> primes; // primes[i] = (i+1)-th prime
    std::uint64_t sieved_to = 1;
    std::mutex mu;

    static constexpr std::uint64_t kMaxSieve = 200'000'000;

    static prime_table& instance() {
        static prime_table t;
        return t;
    }

    void grow_to_limit_locked(std::uint64_t limit) {
        if (limit <= sieved_to) return;
        if (limit > kMaxSieve)
            throw resource_limit_error("prime sieve limit exceeded (" + std::to_string(limit) +
                                       " > " + std::to_string(kMaxSieve) + ")");
        std::vector<bool> comp(limit + 1, false);
        std::vector<std::uint64_t> ps;
        for (std::uint64_t i = 2; i <= limit; ++i) {
            if (comp[i]) continue;
            ps.push_back(i);
            for (std::uint64_t j = i * i; j <= limit; j += i) comp[j] = true;
        }
        primes = std::move(ps);
        sieved_to = limit;
    }

    void grow_to_count_locked(std::uint64_t n) {
        while (primes.size() < n) {
            // p(n) < n (ln n + ln ln n) for n >= 6; doubling is simpler and cheap.
            std::uint64_t next = sieved_to < 64 ? 128 : sieved_to * 2;
            grow_to_limit_locked(next);
        }
    }
};

} // namespace detail

// n-th prime, 1-based: nth_prime(1) = 2. n = 0 is a caller bug.
inline std::uint64_t nth_prime(std::uint64_t n) {
    if (n == 0) throw input_error("nth_prime: index is 1-based, got 0");
    if (n > 10'000'000) throw resource_limit_error("nth_prime: index too large: " + std::to_string(n));
    auto& t = detail::prime_table::instance();
    std::lock_guard<std::mutex> lk(t.mu);
    t.grow_to_count_locked(n);
    return t.primes[n - 1];
}

inline bool is_prime(std::uint64_t v) {
    if (v < 2) return false;
    for (std::uint64_t d = 2; d * d <= v; ++d)
        if (v % d == 0) return false;
    return true;
}

} // namespace lenuniv
