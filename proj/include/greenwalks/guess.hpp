#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "greenwalks/pfinite.hpp"
#include "greenwalks/terms.hpp"

namespace greenwalks {

enum class Objective { order_first, degree_first };

struct GuessConfig {
    int max_order = 12;
    int max_degree = 30;
    Objective objective = Objective::order_first;
    int oversample = 25;  // extra equations beyond unknowns
    int prime_count = 3;

    void validate() const;
};

struct GuessReport {
    bool found = false;
    std::optional<PolyRec> rec;
    std::optional<ThetaODE> ode;
    int order = -1;
    int degree = -1;
    long equations_used = 0;
    int primes_used = 0;
    long verified_terms = 0;
    std::string reconstruction_status;  // "ok" | "no-candidate" | "reconstruction-failed" | ...
    std::vector<std::pair<int, int>> frontier;  // (order, degree) pairs searched without success
};

// Minimal recurrence search: scans (order, degree) in the objective's
// lexicographic order, solves the linear system modulo several primes,
// recombines by CRT + rational reconstruction, and verifies the canonical
// candidate on every supplied term before reporting it.
GuessReport guess_rec(const TermTable& terms, const GuessConfig& cfg);

// Same machinery in the Euler-operator basis (n-l)^k; rows include the
// zero-padded prefix so a hit annihilates the generating function exactly.
GuessReport guess_theta_ode(const TermTable& terms, const GuessConfig& cfg);

struct CertifyReport {
    bool pass = false;
    long first_failure = -1;
    long margin = 0;       // verified length minus rows a guess would have used
    int extra_primes = 0;  // held-out primes re-solved
};

// Re-verifies `candidate` on independently generated oracle terms and
// re-solves the linear system modulo held-out primes (drawn from a disjoint
// 61-bit stream).
CertifyReport certify_candidate(const PolyRec& candidate, const TermTable& oracle_terms, int extra_primes);

// True when the two recurrences generate the same sequence from the given
// initial values: the difference sequence is annihilated by rec_add(a, b) and
// checked to vanish past that combined order (and past any integer zeros of
// its leading coefficient found nearby).
bool rec_equivalent_on(const PolyRec& a, const PolyRec& b, const std::vector<BigInt>& initial);

std::string guess_report_to_json(const GuessReport& report);

}  // namespace greenwalks
