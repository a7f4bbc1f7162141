#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

#include "greenwalks/lattice.hpp"

using namespace greenwalks;

TEST_CASE("coordination numbers") {
    CHECK(coordination_number(LatticeSpec(1, 3)) == 6);
    CHECK(coordination_number(LatticeSpec(2, 3)) == 12);
    CHECK(coordination_number(LatticeSpec(3, 3)) == 8);
    CHECK(coordination_number(LatticeSpec(3, 5)) == 80);
    CHECK(coordination_number(LatticeSpec(4, 5)) == 80);
    CHECK_THROWS(LatticeSpec(4, 3));
    CHECK_THROWS(LatticeSpec(0, 3));
}

TEST_CASE("direction vectors: counts, entries, closure, order") {
    auto v11 = direction_vectors(LatticeSpec(1, 1));
    REQUIRE(v11.size() == 2);
    CHECK(v11[0] == DirectionVector{-1});
    CHECK(v11[1] == DirectionVector{1});

    CHECK(direction_vectors(LatticeSpec(2, 3)).size() == 12);
    CHECK(direction_vectors(LatticeSpec(3, 4)).size() == 32);

    for (int N = 1; N <= 6; ++N) {
        for (int M = 1; M <= N; ++M) {
            auto dirs = direction_vectors(LatticeSpec(M, N));
            CHECK(dirs.size() == coordination_number(LatticeSpec(M, N)));
            std::set<DirectionVector> all(dirs.begin(), dirs.end());
            CHECK(all.size() == dirs.size());
            CHECK(std::is_sorted(dirs.begin(), dirs.end()));
            for (const auto& d : dirs) {
                int nz = 0;
                for (int x : d) {
                    CHECK(std::abs(x) <= 1);
                    nz += x != 0;
                }
                CHECK(nz == M);
                DirectionVector neg(d);
                for (int& x : neg) x = -x;
                CHECK(all.count(neg) == 1);
            }
        }
    }
}

TEST_CASE("structure function values and symmetry") {
    const double pi = 3.14159265358979323846;
    CHECK(structure_function(LatticeSpec(2, 5), {0, 0, 0, 0, 0}) == doctest::Approx(1.0));
    CHECK(structure_function(LatticeSpec(1, 3), {pi, pi, pi}) == doctest::Approx(-1.0));
    CHECK(structure_function(LatticeSpec(2, 3), {pi / 2, pi / 2, pi / 2}) == doctest::Approx(0.0));

    LatticeSpec s(2, 4);
    std::vector<double> th = {0.3, 1.1, -0.7, 2.2};
    double base = structure_function(s, th);
    std::vector<double> perm = {1.1, 2.2, 0.3, -0.7};
    CHECK(structure_function(s, perm) == doctest::Approx(base));
    std::vector<double> flip = {0.3, -1.1, -0.7, 2.2};
    CHECK(structure_function(s, flip) == doctest::Approx(base));
    for (double x : {0.1, 0.9, 2.5}) {
        double v = structure_function(LatticeSpec(3, 5), {x, 2 * x, 3 * x, 0.2, 1.0});
        CHECK(v <= 1.0);
        CHECK(v >= -1.0);
    }
}

TEST_CASE("sample_walk basics") {
    // 1D, two steps: either returns at step 2 or ends at +-2
    for (std::uint64_t seed = 0; seed < 32; ++seed) {
        auto w = sample_walk(LatticeSpec(1, 1), 2, seed);
        if (w.returned) {
            CHECK(*w.return_step == 2);
        } else {
            CHECK(std::abs(w.final_site[0]) == 2);
        }
    }
    // determinism
    auto a = sample_walk(LatticeSpec(2, 3), 500, 987654321);
    auto b = sample_walk(LatticeSpec(2, 3), 500, 987654321);
    CHECK(a.returned == b.returned);
    CHECK(a.final_site == b.final_site);
    CHECK(a.return_step == b.return_step);
    // parity of first returns when M odd
    for (std::uint64_t seed = 100; seed < 200; ++seed) {
        auto w = sample_walk(LatticeSpec(3, 4), 1000, seed);
        if (w.returned) CHECK(*w.return_step % 2 == 0);
    }
}

TEST_CASE("mc determinism across scheduling") {
    LatticeSpec s(2, 3);
    setenv("GREENWALKS_THREADS", "1", 1);
    auto serial = mc_return_probability(s, 300, 20000, 2024);
    setenv("GREENWALKS_THREADS", "4", 1);
    auto parallel = mc_return_probability(s, 300, 20000, 2024);
    unsetenv("GREENWALKS_THREADS");
    CHECK(serial.returned == parallel.returned);
    CHECK(serial.estimate == parallel.estimate);
}

TEST_CASE("mc monotone in horizon") {
    LatticeSpec s(1, 3);
    auto a = mc_return_probability(s, 50, 30000, 7);
    auto b = mc_return_probability(s, 500, 30000, 7);
    auto c = mc_return_probability(s, 5000, 30000, 7);
    CHECK(a.estimate <= b.estimate);
    CHECK(b.estimate <= c.estimate);
}

TEST_CASE("mc matches the exact 1D return law") {
    // P(return within 100 steps) = 1 - C(100,50)/2^100 * (4/5 correction)… use
    // the exact survival q(2m) = C(2m,m)/4^m: at m = 50 this is ~0.0795892
    double expected = 1.0 - 0.07958923738717877;
    auto e = mc_return_probability(LatticeSpec(1, 1), 100, 400000, 99);
    CHECK(std::abs(e.estimate - expected) < 4 * e.stderr_);
}
