#pragma once

#include <optional>
#include <string>
#include <vector>

#include "greenwalks/poly.hpp"
#include "greenwalks/terms.hpp"

namespace greenwalks {

// P-finite recurrence sum_{l=0..L} p[l](n) * f(n-l) = 0 under the convention
// f(n) = 0 for n < 0. Canonical form: coefficient content 1 and positive
// leading coefficient of p[0].
struct PolyRec {
    std::vector<ZPoly> p;

    int order() const { return static_cast<int>(p.size()) - 1; }
    int degree() const;
    void validate() const;  // p[0], p[L] not identically zero
    void canonicalize();

    // Coefficients in forward form: Q[j](n) multiplies f(n+j) in
    // sum_j Q[j](n) f(n+j) = 0, i.e. Q[j](n) = p[L-j](n+L).
    std::vector<ZPoly> forward_coeffs() const;

    std::string str(const std::string& seq = "f") const;
};

// Euler-operator equation (sum_{k=0..K} u[k](z) theta^k)(F) = 0 with
// theta = z d/dz. Canonical form: no common z factor, content 1, sign fixed
// so that the bijection image p_0 has positive leading coefficient.
struct ThetaODE {
    std::vector<ZPoly> u;

    int order() const { return static_cast<int>(u.size()) - 1; }
    int degree() const;
    void validate() const;  // u[K] not identically zero
    void canonicalize();

    std::string str() const;
};

// (sum_k v[k](z) D^k)(F) = 0 with the plain derivation D = d/dz.
struct DiffOpD {
    std::vector<ZPoly> v;

    int order() const { return static_cast<int>(v.size()) - 1; }
    int degree() const;
    void validate() const;
    void canonicalize();
};

// The coefficient bijection u_{k,l} <-> p_l(n) = sum_k u_{k,l} (n-l)^k.
// Mutually inverse on canonical forms; the recurrence holds for all n >= 0
// (zero padding included) exactly when the ODE annihilates the series.
PolyRec theta_ode_to_rec(const ThetaODE& ode);
ThetaODE rec_to_theta_ode(const PolyRec& rec);

// Annihilator of the generating function of a sequence that satisfies `rec`
// from index L on: the bijection image is left-multiplied by (theta - i) for
// every padded row i < L that fails on `terms` (all rows when terms omitted).
ThetaODE rec_annihilator_ode(const PolyRec& rec, const std::vector<BigInt>* terms = nullptr);

// z^j D^j = theta (theta-1) ... (theta-j+1), both directions exact.
DiffOpD theta_to_d(const ThetaODE& ode);
ThetaODE d_to_theta(const DiffOpD& op);

// Recurrence for any sum f+g of solutions (least common left multiple style
// construction by elimination over rational functions of n).
PolyRec rec_add(const PolyRec& a, const PolyRec& b);

// Recurrence for b(2m+offset) = a(m), zero elsewhere; order doubles.
PolyRec rec_interleave(const PolyRec& rec, int offset);

// Annihilator of F(z^k) from an annihilator of F(z).
ThetaODE ode_compose_power(const ThetaODE& ode, int k);

struct VerifyResult {
    bool pass = false;
    long first_failure = -1;
};

// Checks the recurrence rows n = L .. count-1; with padded_rows also the
// zero-padded rows n < L (the ODE-grade check).
VerifyResult rec_verify(const PolyRec& rec, const TermTable& terms, bool padded_rows = false);
VerifyResult rec_verify_values(const PolyRec& rec, const std::vector<BigInt>& terms, const BigInt& modulus,
                               bool padded_rows = false);

// Exact unroll: extends `initial` (>= order values, or more to clear leading
// singularities) up to index nmax inclusive. Throws on a vanishing leading
// coefficient or a non-integer step, reporting the offending index.
std::vector<BigInt> rec_unroll(const PolyRec& rec, std::vector<BigInt> initial, long nmax);

// largest index in [0, scan_limit] where p[0] vanishes, if any
std::optional<long> leading_zero_in_range(const PolyRec& rec, long scan_limit);

// JSON: {"kind":"rec"|"theta-ode"|"d-ode","order":..,"degree":..,
//        "coeffs":[[decimal...],...]} with ascending coefficient lists.
std::string rec_to_json(const PolyRec& rec);
std::string ode_to_json(const ThetaODE& ode);
std::string dop_to_json(const DiffOpD& op);
PolyRec rec_from_json(const std::string& json);
ThetaODE ode_from_json(const std::string& json);
DiffOpD dop_from_json(const std::string& json);

}  // namespace greenwalks
