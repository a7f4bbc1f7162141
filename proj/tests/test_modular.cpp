#include <doctest.h>

#include "greenwalks/lattice.hpp"
#include "greenwalks/modarith.hpp"
#include "greenwalks/primes.hpp"

using namespace greenwalks;

TEST_CASE("prime_stream ranges and determinism") {
    auto b = prime_stream(62, 3);
    REQUIRE(b.size() == 3);
    for (auto p : b.primes) {
        CHECK(p >= (1ull << 61));
        CHECK(p < (1ull << 62));
        CHECK(is_probable_prime_u64(p));
    }
    CHECK(b.primes[0] > b.primes[1]);
    CHECK(b.primes[1] > b.primes[2]);

    auto small = prime_stream(31, 1);
    CHECK(small.primes[0] >= (1u << 30));
    CHECK(small.primes[0] < (1ull << 31));

    CHECK(prime_stream(62, 3).primes == b.primes);
}

TEST_CASE("miller-rabin sanity") {
    CHECK(is_probable_prime_u64(2));
    CHECK(is_probable_prime_u64(1000003));
    CHECK_FALSE(is_probable_prime_u64(1));
    CHECK_FALSE(is_probable_prime_u64(561));         // Carmichael
    CHECK_FALSE(is_probable_prime_u64(3215031751ull));
    CHECK(is_probable_prime_u64((1ull << 61) - 1));  // Mersenne
}

TEST_CASE("crt_combine examples") {
    auto [v1, m1] = crt_combine({{BigInt(2), BigInt(3)}, {BigInt(3), BigInt(5)}});
    CHECK(v1 == 8);
    CHECK(m1 == 15);

    auto [v2, m2] = crt_combine({{BigInt(0), BigInt(97)}});
    CHECK(v2 == 0);
    CHECK(m2 == 97);

    auto [v3, m3] = crt_combine({{BigInt(5), BigInt(7)}, {BigInt(5), BigInt(11)}});
    CHECK(v3 == 5);
    CHECK(m3 == 77);

    CHECK_THROWS(crt_combine({{BigInt(1), BigInt(7)}, {BigInt(2), BigInt(7)}}));
}

TEST_CASE("crt round trip on random residues") {
    auto basis = prime_stream(62, 4);
    SplitMix64 rng(12345);
    for (int it = 0; it < 50; ++it) {
        std::vector<std::pair<BigInt, BigInt>> rs;
        for (auto p : basis.primes)
            rs.emplace_back(BigInt(static_cast<unsigned long>(rng.below(p))), BigInt(static_cast<unsigned long>(p)));
        auto [v, m] = crt_combine(rs);
        CHECK(v >= 0);
        CHECK(v < m);
        for (const auto& [r, p] : rs) CHECK(v % p == r);
    }
}

TEST_CASE("rational_reconstruct examples") {
    auto q1 = rational_reconstruct(BigInt(20), BigInt(97));
    REQUIRE(q1.has_value());
    CHECK(q1->get_num() == 3);
    CHECK(q1->get_den() == 5);

    auto q2 = rational_reconstruct(BigInt(5), BigInt(1000003));
    REQUIRE(q2.has_value());
    CHECK(*q2 == BigRat(5));

    auto q3 = rational_reconstruct(BigInt(0), BigInt(101));
    REQUIRE(q3.has_value());
    CHECK(*q3 == 0);
}

TEST_CASE("rational reconstruction round trip") {
    SplitMix64 rng(777);
    auto basis = prime_stream(62, 3);
    BigInt m = basis.product();
    for (int it = 0; it < 200; ++it) {
        long n = static_cast<long>(rng.below(2'000'000'000)) - 1'000'000'000;
        long d = static_cast<long>(rng.below(1'000'000'000)) + 1;
        BigInt num(n), den(d);
        BigInt g;
        mpz_gcd(g.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
        num /= g;
        den /= g;
        // residue num * den^{-1} mod m
        BigInt dinv;
        REQUIRE(mpz_invert(dinv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t()) != 0);
        BigInt v = (num * dinv) % m;
        if (v < 0) v += m;
        auto q = rational_reconstruct(v, m);
        REQUIRE(q.has_value());
        CHECK(q->get_num() == num);
        CHECK(q->get_den() == den);
    }
}

TEST_CASE("reconstruction failure under a too-small modulus") {
    // numerator far beyond sqrt(m/2) for a single word prime
    auto basis = prime_stream(62, 1);
    BigInt m(static_cast<unsigned long>(basis.primes[0]));
    BigInt num = BigInt("123456789012345678901");  // > sqrt(m/2)
    BigInt den = 982451653;
    BigInt dinv;
    REQUIRE(mpz_invert(dinv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t()) != 0);
    BigInt v = (num % m * dinv) % m;
    auto q = rational_reconstruct(v, m);
    if (q) CHECK(q->get_num() * den != num * q->get_den());
}

TEST_CASE("prime field arithmetic") {
    PrimeField f(prime_stream(62, 1).primes[0]);
    SplitMix64 rng(42);
    for (int it = 0; it < 100; ++it) {
        std::uint64_t a = rng.below(f.p), b = rng.below(f.p);
        CHECK(f.add(a, f.neg(a)) == 0);
        if (a) CHECK(f.mul(a, f.inv(a)) == 1);
        CHECK(f.sub(f.add(a, b), b) == a);
    }
}
