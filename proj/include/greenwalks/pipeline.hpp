#pragma once

#include <optional>
#include <string>

#include "greenwalks/analysis.hpp"
#include "greenwalks/guess.hpp"
#include "greenwalks/pfinite.hpp"
#include "greenwalks/terms.hpp"

namespace greenwalks {

// One row of the survey table for M-headed lattices with 1 <= M <= N <= 5:
// which generator produces terms, how long the guess tables must be, search
// bounds, and the expected published statistics.
struct LatticePlan {
    int M, N;
    Norm norm;                // working normalization for term tables
    std::string term_method;  // "heracles" | "closed-form" | "factor-dp"
    int guess_terms;          // exact terms to generate for guessing
    int rec_max_order, rec_max_degree;
    int ode_max_order, ode_max_degree;
    // survey expectations (raw level, i.e. after degree doubling for tilde)
    int ode_row_order, ode_row_degree;    // order-minimal ODE row
    int rec_row_order, rec_row_degree;    // minimal recurrence (order/degree), -1 when skipped
    int ode2_row_order, ode2_row_degree;  // degree-minimal ODE row, -1 when absent
    double polya_reference;
    bool recurrent;
    long polya_terms;  // extension length for the Polya estimate
    bool guessable;    // false for the one row out of desk-scale reach
};

const std::vector<LatticePlan>& table1_plan();
const LatticePlan& plan_for(int M, int N);

// doubling factor between the working normalization and the raw-level table
int degree_doubling(const LatticePlan& plan);

TermTable plan_terms(const LatticePlan& plan, int nmax, bool use_cache = true);

GuessConfig plan_rec_config(const LatticePlan& plan);
GuessConfig plan_ode_config(const LatticePlan& plan);

// Minimal recurrence for the plan's working normalization, guessed from an
// exact table (generated or cached) and certified against held-out primes.
struct PlannedOperators {
    TermTable table;
    GuessReport rec;
    GuessReport ode;
};
PlannedOperators plan_operators(const LatticePlan& plan, bool want_ode, bool use_cache = true);

// Exact terms extended through the guessed minimal recurrence (initial values
// cover any integer zeros of its leading coefficient).
TermTable plan_extended_terms(const LatticePlan& plan, long nmax, bool use_cache = true);

// Polya estimate along the plan's standard route.
PolyaEstimate plan_polya(const LatticePlan& plan, double tolerance, bool use_cache = true);

}  // namespace greenwalks
