#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "greenwalks/common.hpp"

namespace greenwalks {

// An M-headed lattice in dimension N: steps change exactly M coordinates
// by +-1. Requires 1 <= M <= N.
struct LatticeSpec {
    int M = 1;
    int N = 1;

    LatticeSpec() = default;
    LatticeSpec(int m, int n);

    bool parity_vanishing() const { return (M % 2 == 1) || M == N; }
};

using DirectionVector = std::vector<int>;  // entries in {-1, 0, 1}, exactly M nonzero

struct WalkResult {
    bool returned = false;
    std::optional<long> return_step;
    std::vector<long> final_site;
};

// splitmix64; the per-trial stream for trial i is seeded with seed ^ i, so
// results are independent of how trials are scheduled across threads.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    // unbiased-enough index in [0, n): Lemire multiply-shift
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
    }
};

std::uint64_t coordination_number(const LatticeSpec& spec);

// All 2^M * binom(N, M) direction vectors, ascending lexicographic order.
std::vector<DirectionVector> direction_vectors(const LatticeSpec& spec);

// sigma_M(cos theta_1, ..., cos theta_N) / binom(N, M); always in [-1, 1].
double structure_function(const LatticeSpec& spec, const std::vector<double>& theta);

// Uniform walk from the origin, stopping at the first return or at `horizon`.
WalkResult sample_walk(const LatticeSpec& spec, long horizon, std::uint64_t seed);

struct McEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    long returned = 0;
    long trials = 0;
};

// Fraction of `trials` walks that return within `horizon`, with binomial
// standard error. Trials run in parallel; the result depends only on `seed`.
McEstimate mc_return_probability(const LatticeSpec& spec, long horizon, long trials, std::uint64_t seed);

}  // namespace greenwalks
