#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "greenwalks/common.hpp"
#include "greenwalks/lattice.hpp"

namespace greenwalks {

struct PolyRec;  // pfinite.hpp

enum class Norm { raw, tilde };

std::string norm_name(Norm n);
Norm norm_from_name(const std::string& s);

// A prefix of the closed-walk counting sequence r_{M,N}(n), either exact
// (modulus == 0) or reduced modulo a prime. Tilde tables hold r(2n) under
// index n and are only defined when odd-index terms vanish (M odd or M == N).
struct TermTable {
    LatticeSpec spec;
    Norm norm = Norm::raw;
    BigInt modulus = 0;
    std::vector<BigInt> terms;
    std::string method;

    bool exact() const { return modulus == 0; }
    long count() const { return static_cast<long>(terms.size()); }

    // counting-table invariants: terms[0] = 1, raw terms[1] = 0,
    // terms[2] = q, parity vanishing, nonnegativity when exact
    void validate() const;

    void save(const std::filesystem::path& path) const;
    static TermTable load(const std::filesystem::path& path);
};

// Exact r(n) for n <= nmax by position-space dynamic programming over
// signed-permutation orbit representatives.
TermTable terms_walk_dp(const LatticeSpec& spec, int nmax, Norm norm = Norm::raw,
                        std::size_t state_budget = 30'000'000);

// Reference walk counter without symmetry reduction; counts fit uint64 only
// for small n (used to pin the reduced DP).
std::vector<std::uint64_t> walk_counts_unreduced(const LatticeSpec& spec, int nmax);

// Exact r(n) for M = N-1 via the even/odd composition sums; computed
// multi-modularly and recombined by CRT.
TermTable terms_heracles(const LatticeSpec& spec, int nmax, Norm norm = Norm::raw);

// Single residue table mod p (raw indices 0..nmax_raw).
std::vector<std::uint64_t> heracles_mod(const LatticeSpec& spec, int nmax_raw, std::uint64_t prime);

// Exact r(n) for M = N (central binomial powers) or M = 1 (multinomial sums).
TermTable terms_closed_form(const LatticeSpec& spec, int nmax, Norm norm = Norm::raw);

// r(n) mod prime by the factor-fill constant-term DP: each of the n factors
// of sigma_M(Y)^n picks an M-subset of the N variables; variables are scanned
// once, classes count factors by how many variables they have already taken.
std::uint64_t term_factor_dp_mod(const LatticeSpec& spec, int n, std::uint64_t prime);

// Exact r(n) via CRT over enough 62-bit primes against the bound r(n) <= q^n.
BigInt term_factor_dp(const LatticeSpec& spec, int n);

TermTable terms_factor_dp(const LatticeSpec& spec, int nmax, Norm norm = Norm::raw,
                          std::optional<std::uint64_t> modulus = std::nullopt);

// Exact extension of `initial` through `rec`; every extended value must come
// out a nonnegative integer, otherwise the recurrence is rejected.
TermTable extend_terms(const PolyRec& rec, const TermTable& initial, long nmax);

// Shared immutable caches (warmed on demand under a lock).
const BigInt& factorial_exact(long n);
BigInt binomial_exact(unsigned long n, unsigned long k);

std::filesystem::path cache_root();
std::filesystem::path cache_path(const LatticeSpec& spec, Norm norm, const std::string& method);
TermTable cached_terms(const LatticeSpec& spec, Norm norm, const std::string& method, int nmax,
                       const std::function<TermTable()>& compute);

}  // namespace greenwalks
