#include "greenwalks/poly.hpp"

#include <sstream>
#include <stdexcept>

namespace greenwalks {

namespace {
const BigInt kZero(0);
}

ZPoly ZPoly::monomial(const BigInt& coeff, int power) {
    ZPoly p;
    if (coeff != 0) {
        p.c.assign(power + 1, BigInt(0));
        p.c[power] = coeff;
    }
    return p;
}

void ZPoly::trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
}

const BigInt& ZPoly::coeff(int k) const {
    if (k < 0 || k >= static_cast<int>(c.size())) return kZero;
    return c[k];
}

const BigInt& ZPoly::leading() const {
    if (c.empty()) return kZero;
    return c.back();
}

BigInt ZPoly::eval(const BigInt& x) const {
    BigInt r = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
    return r;
}

BigInt ZPoly::eval_int(long x) const { return eval(BigInt(x)); }

std::uint64_t ZPoly::eval_mod(const PrimeField& f, std::uint64_t x) const {
    std::uint64_t r = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = f.add(f.mul(r, x), f.reduce(*it));
    return r;
}

ZPoly ZPoly::shifted(long a) const {
    // Taylor shift by synthetic Horner: p(x+a) built from the top coefficient down
    ZPoly r;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        // r := r * (x + a) + coeff
        ZPoly next;
        next.c.assign(r.c.size() + 1, BigInt(0));
        for (std::size_t i = 0; i < r.c.size(); ++i) {
            next.c[i + 1] += r.c[i];
            next.c[i] += r.c[i] * a;
        }
        if (next.c.empty()) next.c.push_back(BigInt(0));
        next.c[0] += *it;
        next.trim();
        r = std::move(next);
    }
    return r;
}

ZPoly ZPoly::stretched(int k) const {
    ZPoly r;
    if (zero()) return r;
    r.c.assign(static_cast<std::size_t>(degree()) * k + 1, BigInt(0));
    for (std::size_t i = 0; i < c.size(); ++i) r.c[i * k] = c[i];
    r.trim();
    return r;
}

BigInt ZPoly::content() const {
    BigInt g = 0;
    for (const auto& x : c) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        if (g == 1) break;
    }
    return g;
}

std::string ZPoly::str(const std::string& var) const {
    if (zero()) return "0";
    std::ostringstream out;
    bool first = true;
    for (int k = degree(); k >= 0; --k) {
        if (coeff(k) == 0) continue;
        BigInt a = coeff(k);
        if (!first) out << (a < 0 ? " - " : " + ");
        else if (a < 0) out << "-";
        first = false;
        BigInt mag = abs(a);
        if (mag != 1 || k == 0) out << mag.get_str();
        if (k > 0) {
            if (mag != 1) out << "*";
            out << var;
            if (k > 1) out << "^" << k;
        }
    }
    return out.str();
}

ZPoly operator+(const ZPoly& a, const ZPoly& b) {
    ZPoly r;
    r.c.resize(std::max(a.c.size(), b.c.size()), BigInt(0));
    for (std::size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
    for (std::size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i];
    r.trim();
    return r;
}

ZPoly operator-(const ZPoly& a, const ZPoly& b) {
    ZPoly r;
    r.c.resize(std::max(a.c.size(), b.c.size()), BigInt(0));
    for (std::size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
    for (std::size_t i = 0; i < b.c.size(); ++i) r.c[i] -= b.c[i];
    r.trim();
    return r;
}

ZPoly operator*(const ZPoly& a, const ZPoly& b) {
    ZPoly r;
    if (a.zero() || b.zero()) return r;
    r.c.assign(a.c.size() + b.c.size() - 1, BigInt(0));
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i] == 0) continue;
        for (std::size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
    }
    r.trim();
    return r;
}

ZPoly operator*(const ZPoly& a, const BigInt& s) {
    ZPoly r;
    if (s == 0) return r;
    r.c.reserve(a.c.size());
    for (const auto& x : a.c) r.c.push_back(x * s);
    r.trim();
    return r;
}

ZPoly divexact(const ZPoly& a, const BigInt& s) {
    if (s == 0) throw std::invalid_argument("divexact by zero");
    ZPoly r;
    r.c.reserve(a.c.size());
    for (const auto& x : a.c) {
        BigInt q;
        mpz_divexact(q.get_mpz_t(), x.get_mpz_t(), s.get_mpz_t());
        r.c.push_back(std::move(q));
    }
    r.trim();
    return r;
}

namespace {

ZPoly primitive_positive(ZPoly p) {
    if (p.zero()) return p;
    BigInt g = p.content();
    if (p.leading() < 0) g = -g;
    return divexact(p, g);
}

// pseudo-remainder of a by b (deg a >= deg b, b nonzero)
ZPoly pseudo_rem(ZPoly a, const ZPoly& b) {
    int db = b.degree();
    while (!a.zero() && a.degree() >= db) {
        int shift = a.degree() - db;
        BigInt lead_a = a.leading();
        // a := lc(b) * a - lc(a) * x^shift * b
        ZPoly scaled = a * b.leading();
        ZPoly sub = ZPoly::monomial(lead_a, shift) * b;
        a = scaled - sub;
    }
    return a;
}

}  // namespace

ZPoly poly_gcd(ZPoly a, ZPoly b) {
    a = primitive_positive(std::move(a));
    b = primitive_positive(std::move(b));
    if (a.zero()) return b;
    if (b.zero()) return a;
    if (a.degree() < b.degree()) std::swap(a, b);
    while (!b.zero()) {
        ZPoly r = primitive_positive(pseudo_rem(a, b));
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

// exact quotient p / d where d is primitive and divides p over Q (so the
// quotient is integral by Gauss's lemma)
ZPoly poly_divexact(const ZPoly& p, const ZPoly& d) {
    if (d.zero()) throw std::invalid_argument("poly_divexact by zero");
    ZPoly rem = p, q;
    if (p.zero()) return q;
    q.c.assign(std::max(0, p.degree() - d.degree()) + 1, BigInt(0));
    while (!rem.zero() && rem.degree() >= d.degree()) {
        int shift = rem.degree() - d.degree();
        BigInt qc;
        mpz_tdiv_q(qc.get_mpz_t(), rem.leading().get_mpz_t(), d.leading().get_mpz_t());
        if (qc * d.leading() != rem.leading()) throw std::runtime_error("poly_divexact: not divisible");
        q.c[shift] = qc;
        rem = rem - ZPoly::monomial(qc, shift) * d;
    }
    if (!rem.zero()) throw std::runtime_error("poly_divexact: not divisible");
    q.trim();
    return q;
}

QPolyFrac::QPolyFrac(ZPoly n, ZPoly d) : num(std::move(n)), den(std::move(d)) {
    if (den.zero()) throw std::invalid_argument("QPolyFrac: zero denominator");
    reduce();
}

void QPolyFrac::reduce() {
    if (num.zero()) {
        den = ZPoly(BigInt(1));
        return;
    }
    ZPoly g = poly_gcd(num, den);
    if (g.degree() > 0) {
        num = poly_divexact(num, g);
        den = poly_divexact(den, g);
    }
    BigInt cn = num.content(), cd = den.content();
    BigInt g2;
    mpz_gcd(g2.get_mpz_t(), cn.get_mpz_t(), cd.get_mpz_t());
    if (den.leading() < 0) g2 = -g2;
    num = divexact(num, g2);
    den = divexact(den, g2);
}

QPolyFrac operator+(const QPolyFrac& a, const QPolyFrac& b) {
    return QPolyFrac(a.num * b.den + b.num * a.den, a.den * b.den);
}
QPolyFrac operator-(const QPolyFrac& a, const QPolyFrac& b) {
    return QPolyFrac(a.num * b.den - b.num * a.den, a.den * b.den);
}
QPolyFrac operator*(const QPolyFrac& a, const QPolyFrac& b) { return QPolyFrac(a.num * b.num, a.den * b.den); }
QPolyFrac operator/(const QPolyFrac& a, const QPolyFrac& b) {
    if (b.zero()) throw std::invalid_argument("QPolyFrac division by zero");
    return QPolyFrac(a.num * b.den, a.den * b.num);
}

}  // namespace greenwalks
