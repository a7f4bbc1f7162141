#pragma once

#include <vector>

#include "greenwalks/terms.hpp"

namespace greenwalks {

struct PolyaEstimate {
    enum class Status { transient, recurrent };

    double value = 0.0;       // return probability; exactly 1 when recurrent
    double tail_bound = 0.0;  // propagated uncertainty of the tail correction
    long terms_used = 0;
    Status status = Status::transient;
    double green_value = 0.0;  // P(0, 1); +inf when recurrent
    double beta = 0.0;         // fitted tail exponent of r(n)/q^n
};

// Return probability from exact terms: partial sums of t(n) = r(n)/q^n plus
// a fitted power-law tail t(n) ~ n^-beta (c0 + c1/n + c2/n^2) summed by
// Euler-Maclaurin. Throws need_more_terms when the tolerance (on the Polya
// value) cannot be certified, or when beta sits in the ambiguous band.
PolyaEstimate polya_estimate(const TermTable& terms, double tolerance);

struct AsymptoticFit {
    double rho = 0.0;
    double alpha = 0.0;
    double C = 0.0;
    double residual = 0.0;  // spread of the last two extrapolation levels
    bool low_confidence = false;
};

// Fits r(n) ~ C rho^n n^alpha by Richardson-extrapolated ratios (rho),
// second differences of log r (alpha), and the compensated sequence (C).
// Tables with vanishing odd terms are fitted on their even subsequence.
AsymptoticFit asymptotic_fit(const TermTable& terms);

// Richardson/Neville extrapolation to x = 0 of y(k) sampled at k = nodes;
// pair.second is the spread of the last two levels.
std::pair<long double, long double> richardson_limit(const std::vector<std::pair<long, long double>>& samples);

// Euler-Maclaurin tail sum_{n > a} n^-s (s > 1).
long double power_tail(long double s, long a);

std::string polya_to_json(const PolyaEstimate& e);
std::string fit_to_json(const AsymptoticFit& f);

}  // namespace greenwalks
