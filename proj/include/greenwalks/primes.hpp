#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "greenwalks/common.hpp"

namespace greenwalks {

// A pool of distinct word-size primes used for modular computations.
struct PrimeBasis {
    std::vector<std::uint64_t> primes;

    BigInt product() const;
    std::size_t size() const { return primes.size(); }
    std::uint64_t operator[](std::size_t i) const { return primes[i]; }
};

// `count` distinct probable primes in [2^(bits-1), 2^bits), deterministic,
// descending from 2^bits. Requires 30 <= bits <= 62.
PrimeBasis prime_stream(int bits, int count);

// Enough 62-bit primes so that their product exceeds `bound` (plus one spare).
PrimeBasis prime_basis_for_bound(const BigInt& bound);

// Unique value in [0, prod primes) congruent to every residue. Primes must be
// pairwise distinct (throws otherwise).
std::pair<BigInt, BigInt> crt_combine(const std::vector<std::pair<BigInt, BigInt>>& residues);
std::pair<BigInt, BigInt> crt_combine_u64(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& residues);

// Balanced rational reconstruction: finds n/d with n = value*d (mod modulus),
// |n| <= B, 0 < d <= B for B = floor(sqrt(modulus/2)), gcd(n, d) = 1.
// Returns nothing when no such pair exists (normal outcome: modulus too small).
std::optional<BigRat> rational_reconstruct(const BigInt& value, const BigInt& modulus);

}  // namespace greenwalks
