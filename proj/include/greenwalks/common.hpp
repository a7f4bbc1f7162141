#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace greenwalks {

using BigInt = mpz_class;
using BigRat = mpq_class;

// Thrown when a requested computation exceeds the configured state budget.
class budget_error : public std::runtime_error {
public:
    budget_error(const std::string& what, double estimated_states)
        : std::runtime_error(what), estimated_states_(estimated_states) {}
    double estimated_states() const { return estimated_states_; }

private:
    double estimated_states_;
};

// Thrown when an analysis cannot certify the requested tolerance yet.
class need_more_terms : public std::runtime_error {
public:
    need_more_terms(const std::string& what, long projected_terms)
        : std::runtime_error(what), projected_terms_(projected_terms) {}
    long projected_terms() const { return projected_terms_; }

private:
    long projected_terms_;
};

unsigned worker_count();

// Runs fn(i) for i in [0, n). Work is split into contiguous blocks over the
// worker threads; callers must make fn safe for concurrent invocation.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// FNV-1a, used to fingerprint artifact inputs.
std::uint64_t fnv1a64(const std::string& data);

std::string to_decimal(const BigInt& v);
BigInt from_decimal(const std::string& s);

}  // namespace greenwalks
