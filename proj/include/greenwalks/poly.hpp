#pragma once

#include <string>
#include <vector>

#include "greenwalks/common.hpp"
#include "greenwalks/modarith.hpp"

namespace greenwalks {

// Dense integer polynomial, ascending coefficients. Zero is the empty list.
struct ZPoly {
    std::vector<BigInt> c;

    ZPoly() = default;
    explicit ZPoly(BigInt constant) {
        if (constant != 0) c.push_back(std::move(constant));
    }
    static ZPoly monomial(const BigInt& coeff, int power);

    void trim();
    bool zero() const { return c.empty(); }
    int degree() const { return static_cast<int>(c.size()) - 1; }  // -1 for zero
    const BigInt& coeff(int k) const;
    const BigInt& leading() const;

    BigInt eval(const BigInt& x) const;
    BigInt eval_int(long x) const;
    std::uint64_t eval_mod(const PrimeField& f, std::uint64_t x) const;

    ZPoly shifted(long a) const;       // p(x + a)
    ZPoly stretched(int k) const;      // p(x) with x -> x^k

    BigInt content() const;  // gcd of coefficients, nonnegative

    std::string str(const std::string& var) const;

    friend ZPoly operator+(const ZPoly& a, const ZPoly& b);
    friend ZPoly operator-(const ZPoly& a, const ZPoly& b);
    friend ZPoly operator*(const ZPoly& a, const ZPoly& b);
    friend ZPoly operator*(const ZPoly& a, const BigInt& s);
    friend bool operator==(const ZPoly& a, const ZPoly& b) { return a.c == b.c; }
};

// exact division (throws if not divisible)
ZPoly divexact(const ZPoly& a, const BigInt& s);

// polynomial gcd over Z (primitive PRS), result primitive with positive lead
ZPoly poly_gcd(ZPoly a, ZPoly b);

// exact quotient by a primitive divisor
ZPoly poly_divexact(const ZPoly& p, const ZPoly& d);

// pseudo-division helpers for rational-function elimination
struct QPolyFrac {
    ZPoly num, den;  // den nonzero; normalized: den primitive, positive lead

    QPolyFrac() : den(ZPoly(BigInt(1))) {}
    QPolyFrac(ZPoly n, ZPoly d);
    static QPolyFrac from_poly(ZPoly p) { return QPolyFrac(std::move(p), ZPoly(BigInt(1))); }
    bool zero() const { return num.zero(); }
    void reduce();
};

QPolyFrac operator+(const QPolyFrac& a, const QPolyFrac& b);
QPolyFrac operator-(const QPolyFrac& a, const QPolyFrac& b);
QPolyFrac operator*(const QPolyFrac& a, const QPolyFrac& b);
QPolyFrac operator/(const QPolyFrac& a, const QPolyFrac& b);

}  // namespace greenwalks
