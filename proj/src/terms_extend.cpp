#include "greenwalks/pfinite.hpp"
#include "greenwalks/terms.hpp"

namespace greenwalks {

TermTable extend_terms(const PolyRec& rec, const TermTable& initial, long nmax) {
    if (!initial.exact()) throw std::invalid_argument("extend_terms: initial terms must be exact");
    if (initial.count() < rec.order())
        throw std::invalid_argument("extend_terms: initial table shorter than the recurrence order");

    auto extended = rec_unroll(rec, initial.terms, nmax);
    for (long n = initial.count(); n < static_cast<long>(extended.size()); ++n)
        if (extended[n] < 0)
            throw std::runtime_error("extend_terms: negative count at n = " + std::to_string(n) +
                                     " (wrong recurrence)");

    TermTable out;
    out.spec = initial.spec;
    out.norm = initial.norm;
    out.modulus = 0;
    out.terms = std::move(extended);
    out.method = "extend(" + initial.method + ")";
    out.validate();
    return out;
}

}  // namespace greenwalks
