#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "greenwalks/pfinite.hpp"
#include "greenwalks/primes.hpp"
#include "greenwalks/terms.hpp"

using namespace greenwalks;

TEST_CASE("walk dp small tables") {
    auto t12 = terms_walk_dp(LatticeSpec(1, 2), 4);
    REQUIRE(t12.count() == 5);
    CHECK(t12.terms[0] == 1);
    CHECK(t12.terms[1] == 0);
    CHECK(t12.terms[2] == 4);
    CHECK(t12.terms[3] == 0);
    CHECK(t12.terms[4] == 36);

    CHECK(terms_walk_dp(LatticeSpec(3, 3), 2).terms[2] == 8);
    CHECK(terms_walk_dp(LatticeSpec(2, 3), 3).terms[3] == 48);
}

TEST_CASE("walk dp agrees with the unreduced reference") {
    for (auto [M, N] : {std::pair{1, 2}, {2, 2}, {1, 3}, {2, 3}, {3, 3}, {2, 4}, {3, 4}}) {
        LatticeSpec s(M, N);
        auto reduced = terms_walk_dp(s, 8);
        auto plain = walk_counts_unreduced(s, 8);
        for (int n = 0; n <= 8; ++n) CHECK(reduced.terms[n] == plain[n]);
    }
}

TEST_CASE("closed forms") {
    CHECK(terms_closed_form(LatticeSpec(2, 2), 2).terms[2] == 4);
    CHECK(terms_closed_form(LatticeSpec(5, 5), 4).terms[4] == 7776);
    CHECK(terms_closed_form(LatticeSpec(1, 3), 4).terms[4] == 90);
    // M=1 column vs the walk oracle
    auto cf = terms_closed_form(LatticeSpec(1, 3), 10);
    auto wd = terms_walk_dp(LatticeSpec(1, 3), 10);
    CHECK(cf.terms == wd.terms);
}

TEST_CASE("heracles sums") {
    CHECK(terms_heracles(LatticeSpec(1, 2), 2).terms[2] == 4);
    CHECK(terms_heracles(LatticeSpec(3, 4), 2).terms[2] == 32);
    CHECK(terms_heracles(LatticeSpec(4, 5), 5).terms[5] == 933120);

    auto hr = terms_heracles(LatticeSpec(4, 5), 12);
    auto wd = terms_walk_dp(LatticeSpec(4, 5), 12);
    CHECK(hr.terms == wd.terms);  // exercises both the even and odd sums

    auto hr34 = terms_heracles(LatticeSpec(3, 4), 10);
    auto wd34 = terms_walk_dp(LatticeSpec(3, 4), 10);
    CHECK(hr34.terms == wd34.terms);
}

TEST_CASE("factor dp published prefix for the 5D M=3 lattice") {
    LatticeSpec s(3, 5);
    auto t = terms_factor_dp(s, 5, Norm::tilde);
    REQUIRE(t.count() == 6);
    CHECK(t.terms[0] == 1);
    CHECK(t.terms[1] == 80);
    CHECK(t.terms[2] == 71280);
    CHECK(t.terms[3] == BigInt("174723200"));
    CHECK(t.terms[4] == BigInt("573097798000"));
    CHECK(t.terms[5] == BigInt("2167896636622080"));
}

TEST_CASE("factor dp cross-method agreement") {
    for (auto [M, N] : {std::pair{2, 5}, {2, 4}, {3, 5}, {1, 4}}) {
        LatticeSpec s(M, N);
        auto fd = terms_factor_dp(s, 10);
        auto wd = terms_walk_dp(s, 10);
        CHECK(fd.terms == wd.terms);
    }
}

TEST_CASE("factor dp modular consistency") {
    LatticeSpec s(2, 4);
    auto exact = terms_factor_dp(s, 12);
    auto p = prime_stream(62, 5).primes[4];
    auto modular = terms_factor_dp(s, 12, Norm::raw, p);
    for (int n = 0; n <= 12; ++n) CHECK(modular.terms[n] == exact.terms[n] % BigInt(static_cast<unsigned long>(p)));
}

TEST_CASE("parity vanishing and q at index two") {
    for (int N = 1; N <= 5; ++N)
        for (int M = 1; M <= N; ++M) {
            LatticeSpec s(M, N);
            auto t = terms_factor_dp(s, 6);
            CHECK(t.terms[2] == static_cast<unsigned long>(coordination_number(s)));
            if (s.parity_vanishing())
                for (int n = 1; n <= 6; n += 2) CHECK(t.terms[n] == 0);
        }
}

TEST_CASE("extend terms through a recurrence") {
    // Catalan: (n+1) c(n) - (4n-2) c(n-1) = 0
    PolyRec cat;
    cat.p.resize(2);
    cat.p[0].c = {BigInt(1), BigInt(1)};
    cat.p[1].c = {BigInt(2), BigInt(-4)};
    auto vals = rec_unroll(cat, {BigInt(1)}, 10);
    CHECK(vals[10] == 16796);

    // Motzkin: (n+2) m(n) - (2n+1) m(n-1) - 3(n-1) m(n-2) = 0; wrong initial
    // values trip the exactness check within a couple of steps
    PolyRec motz;
    motz.p.resize(3);
    motz.p[0].c = {BigInt(2), BigInt(1)};
    motz.p[1].c = {BigInt(-1), BigInt(-2)};
    motz.p[2].c = {BigInt(3), BigInt(-3)};
    auto mv = rec_unroll(motz, {BigInt(1), BigInt(1)}, 6);
    CHECK(mv == std::vector<BigInt>{BigInt(1), BigInt(1), BigInt(2), BigInt(4), BigInt(9), BigInt(21), BigInt(51)});
    CHECK_THROWS_WITH_AS(rec_unroll(motz, {BigInt(1), BigInt(2)}, 10), doctest::Contains("non-integer"),
                         std::runtime_error);
}

TEST_CASE("term table files round trip") {
    auto t = terms_factor_dp(LatticeSpec(2, 3), 9);
    auto path = std::filesystem::temp_directory_path() / "gw_test_terms.terms";
    t.save(path);
    auto u = TermTable::load(path);
    CHECK(u.spec.M == 2);
    CHECK(u.spec.N == 3);
    CHECK(u.norm == Norm::raw);
    CHECK(u.modulus == 0);
    CHECK(u.method == "factor-dp");
    CHECK(u.terms == t.terms);
    std::filesystem::remove(path);
}

TEST_CASE("walk dp budget check") {
    CHECK_THROWS_AS(terms_walk_dp(LatticeSpec(2, 5), 200), budget_error);
}

TEST_CASE("table invariant validation") {
    auto t = terms_factor_dp(LatticeSpec(1, 2), 6);
    t.terms[2] = 5;  // corrupt q
    CHECK_THROWS(t.validate());
}
