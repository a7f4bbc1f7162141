#include "greenwalks/primes.hpp"

#include <set>
#include <stdexcept>

#include "greenwalks/modarith.hpp"

namespace greenwalks {

bool is_probable_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % q == 0) return n == q;
    }
    // Miller-Rabin with the first twelve primes as witnesses: deterministic
    // for every n below 3.3e24, in particular for all 64-bit inputs.
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    PrimeField f(n);
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = f.pow(a % n, d);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = f.mul(x, x);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

PrimeBasis prime_stream(int bits, int count) {
    if (bits < 30 || bits > 62) throw std::invalid_argument("prime_stream: bits must be in [30, 62]");
    if (count < 0) throw std::invalid_argument("prime_stream: negative count");
    PrimeBasis basis;
    basis.primes.reserve(static_cast<std::size_t>(count));
    std::uint64_t lo = 1ull << (bits - 1);
    std::uint64_t cand = (1ull << bits) - 1;
    while (static_cast<int>(basis.primes.size()) < count) {
        if (cand < lo) throw std::runtime_error("prime_stream: range exhausted");
        if (is_probable_prime_u64(cand)) basis.primes.push_back(cand);
        cand -= 2;
    }
    return basis;
}

PrimeBasis prime_basis_for_bound(const BigInt& bound) {
    int count = 1;
    BigInt prod = 1;
    PrimeBasis basis = prime_stream(62, count);
    prod = basis.primes[0];
    while (prod <= bound) {
        count += 4;
        basis = prime_stream(62, count);
        prod = basis.product();
    }
    // one spare prime beyond the bound
    return prime_stream(62, count + 1);
}

BigInt PrimeBasis::product() const {
    BigInt p = 1;
    for (auto q : primes) p *= BigInt(static_cast<unsigned long>(q));
    return p;
}

std::pair<BigInt, BigInt> crt_combine(const std::vector<std::pair<BigInt, BigInt>>& residues) {
    std::set<std::string> seen;
    BigInt x = 0, m = 1;
    for (const auto& [r, p] : residues) {
        if (!seen.insert(p.get_str()).second) throw std::invalid_argument("crt_combine: duplicate prime");
        if (r < 0 || r >= p) throw std::invalid_argument("crt_combine: residue out of range");
        // Garner step: x' = x + m * ((r - x) / m mod p)
        BigInt minv;
        if (mpz_invert(minv.get_mpz_t(), m.get_mpz_t(), p.get_mpz_t()) == 0)
            throw std::invalid_argument("crt_combine: moduli not coprime");
        BigInt t = ((r - x) * minv) % p;
        if (t < 0) t += p;
        x += m * t;
        m *= p;
    }
    return {x, m};
}

std::pair<BigInt, BigInt> crt_combine_u64(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& residues) {
    std::vector<std::pair<BigInt, BigInt>> rs;
    rs.reserve(residues.size());
    for (auto [r, p] : residues)
        rs.emplace_back(BigInt(static_cast<unsigned long>(r)), BigInt(static_cast<unsigned long>(p)));
    return crt_combine(rs);
}

std::optional<BigRat> rational_reconstruct(const BigInt& value, const BigInt& modulus) {
    if (modulus <= 0 || value < 0 || value >= modulus) throw std::invalid_argument("rational_reconstruct: bad input");
    BigInt bound;
    mpz_sqrt(bound.get_mpz_t(), BigInt(modulus / 2).get_mpz_t());

    BigInt r0 = modulus, r1 = value;
    BigInt t0 = 0, t1 = 1;
    while (r1 > bound) {
        BigInt q = r0 / r1;
        BigInt r2 = r0 - q * r1;
        r0 = r1;
        r1 = r2;
        BigInt t2 = t0 - q * t1;
        t0 = t1;
        t1 = t2;
    }
    BigInt num = r1, den = t1;
    if (den == 0) return std::nullopt;
    if (den < 0) {
        den = -den;
        num = -num;
    }
    if (den > bound) return std::nullopt;
    BigInt g;
    mpz_gcd(g.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    if (g != 1) return std::nullopt;
    // invariant of the half-extended loop: num = t1 * value (mod modulus)
    BigRat q(num, den);
    q.canonicalize();
    return q;
}

}  // namespace greenwalks
