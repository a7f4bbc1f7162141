#pragma once

#include <cstdint>

#include "greenwalks/common.hpp"

namespace greenwalks {

// Arithmetic in Z/p for an odd prime p < 2^62. Elements are plain uint64_t
// in [0, p); sums of two elements stay below 2^63 so no intermediate wraps.
struct PrimeField {
    std::uint64_t p;

    explicit PrimeField(std::uint64_t prime) : p(prime) {}

    std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
        std::uint64_t s = a + b;
        return s >= p ? s - p : s;
    }
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const {
        return a >= b ? a - b : a + p - b;
    }
    std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : p - a; }
    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
        return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
    }
    std::uint64_t pow(std::uint64_t a, std::uint64_t e) const {
        std::uint64_t r = 1;
        while (e) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }
    std::uint64_t inv(std::uint64_t a) const { return pow(a, p - 2); }

    std::uint64_t reduce(const BigInt& v) const {
        std::uint64_t r = mpz_fdiv_ui(v.get_mpz_t(), p);
        return r;
    }
    std::uint64_t reduce_int(long v) const {
        long m = v % static_cast<long>(p);
        return m < 0 ? static_cast<std::uint64_t>(m + static_cast<long>(p))
                     : static_cast<std::uint64_t>(m);
    }
};

bool is_probable_prime_u64(std::uint64_t n);

}  // namespace greenwalks
