#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "nuca/fibonacci.hpp"
#include "nuca/lattice.hpp"

using namespace nuca;

TEST_CASE("Fibonacci sequence under the A_1=1, A_2=2 convention") {
    CHECK(fib(1) == 1);
    CHECK(fib(2) == 2);
    CHECK(fib(3) == 3);
    CHECK(fib(5) == 8);
    CHECK(fib(33) == 5702887);
    CHECK_THROWS_AS(fib(0), std::domain_error);
    CHECK_THROWS_AS(fib(91), std::overflow_error);
}

TEST_CASE("Zeckendorf representation: greedy digits and round trip") {
    CHECK(zeckendorf(1).to_string() == "1");
    CHECK(zeckendorf(7).to_string() == "1010");
    CHECK(zeckendorf(12).to_string() == "10101");
    CHECK_THROWS_AS(zeckendorf(0), std::domain_error);
    for (int64_t v = 1; v <= 20000; ++v) {
        FibRep r = zeckendorf(v);
        REQUIRE(r.valid());
        REQUIRE(fib_value(r) == v);
    }
    // Invalid representations are rejected.
    FibRep bad;
    bad.digits = {1, 1};
    CHECK_THROWS_AS(fib_value(bad), std::domain_error);
}

TEST_CASE("Exact Beatty floors against a high-precision oracle") {
    // phi^2 = (3+sqrt5)/2 in 80-bit precision; the continued-fraction
    // structure keeps phi^2*n at least ~1e-8 away from integers below 6e6,
    // so the long-double oracle is itself exact on this range.
    const long double phi2 = (3.0L + sqrtl(5.0L)) / 2.0L;
    CHECK(beatty_floor_div(7) == 2);
    CHECK(beatty_floor_mul(3) == 7);
    CHECK(beatty_floor_div(0) == 0);
    CHECK(beatty_floor_mul(0) == 0);
    for (int64_t n = 1; n <= 300000; ++n) {
        REQUIRE(beatty_floor_mul(n) == (int64_t)floorl(phi2 * n));
        REQUIRE(beatty_floor_div(n) == (int64_t)floorl(n / phi2));
    }
    // Spot checks deep in the supported range.
    for (int64_t n = 5800000 - 2000; n <= 5800000; ++n) {
        REQUIRE(beatty_floor_mul(n) == (int64_t)floorl(phi2 * n));
        REQUIRE(beatty_floor_div(n) == (int64_t)floorl(n / phi2));
    }
}

TEST_CASE("Auxiliary row functions J, P, C") {
    const int Jref[] = {0, 0, 1, 0, 0, 1, 0, 1, 0, 0, 1};
    for (int j = 0; j <= 10; ++j) CHECK(J54(j) == Jref[j]);
    CHECK(P54(2) == 0);
    CHECK(P54(5) == 1);
    CHECK(P54(10) == 3);
    CHECK(C54(0) == 1);
    CHECK(C54(2) == 7);
}

TEST_CASE("Beatty consistency properties on {5,4} rows") {
    LatticeSpec lat = LatticeSpec::make(Family::Hyper54, 12);
    int64_t rows = level_size(lat, 12);
    int64_t black = 0;
    for (int64_t j = 1; j < rows; ++j) {
        REQUIRE(P54(C54(j)) == j);
        REQUIRE(J54(beatty_floor_mul(j + 1)) == 1);
        if (j < level_size(lat, 11) && J54(j)) ++black;
    }
    // One black child per parent row.
    CHECK(black + J54(0) == level_size(lat, 10));
}

TEST_CASE("Level sizes and node/coordinate round trip") {
    LatticeSpec h54 = LatticeSpec::make(Family::Hyper54, 16);
    CHECK(level_size(h54, 0) == 1);
    CHECK(level_size(h54, 2) == 8);
    CHECK(level_size(h54, 16) == 5702887);
    CHECK_THROWS_AS(level_size(h54, 17), std::out_of_range);

    LatticeSpec h66 = LatticeSpec::make(Family::Hyper66, 4);
    CHECK(level_size(h66, 3) == 343);
    LatticeSpec e44 = LatticeSpec::make(Family::Euclid44, 9);
    CHECK(level_size(e44, 4) == 5);

    CHECK(node_to_coord(h54, 1) == SiteCoord{0, 0});
    CHECK(node_to_coord(h54, 2) == SiteCoord{1, 2});
    CHECK(coord_to_node(h54, {2, 7}) == 5);
    for (const LatticeSpec* lat : {&h54, &h66, &e44}) {
        int64_t vmax = std::min<int64_t>(level_prefix(*lat, lat->i_max), 3000);
        for (int64_t v = 1; v <= vmax; ++v) REQUIRE(coord_to_node(*lat, node_to_coord(*lat, v)) == v);
    }
}

TEST_CASE("Node colors") {
    LatticeSpec h54 = LatticeSpec::make(Family::Hyper54, 6);
    CHECK(color(h54, {1, 2}) == NodeColor::Black);
    CHECK(color(h54, {2, 0}) == NodeColor::White);
    LatticeSpec h66 = LatticeSpec::make(Family::Hyper66, 2);
    // Coordinate order reverses node order: (1,0) is node 8, the black
    // child of the white root, and (1,6) is node 2.
    CHECK(color(h66, {1, 0}) == NodeColor::Black);
    CHECK(color(h66, {1, 6}) == NodeColor::White);
    CHECK_THROWS_AS(color(h54, SiteCoord{1, 3}), std::domain_error);
}

TEST_CASE("{5,4} color sequence of level i is a prefix of level i+1") {
    LatticeSpec lat = LatticeSpec::make(Family::Hyper54, 11);
    for (int i = 0; i <= 10; ++i) {
        int64_t n = level_size(lat, i);
        for (int64_t j = 0; j < n; ++j) REQUIRE(color(lat, {i, j}) == color(lat, {i + 1, j}));
    }
}

TEST_CASE("{6,6} per-level color sequences follow the generating rules") {
    // w -> wwwwwwb and b -> wwwwwbw, applied left to right in node order.
    LatticeSpec lat = LatticeSpec::make(Family::Hyper66, 3);
    for (int i = 0; i < 3; ++i) {
        for (int64_t v = level_prefix(lat, i) - level_size(lat, i) + 1; v <= level_prefix(lat, i); ++v) {
            bool parent_black = color(lat, node_to_coord(lat, v)) == NodeColor::Black;
            // Children block [7v-5, 7v+1] in node order.
            for (int64_t c = 7 * v - 5; c <= 7 * v + 1; ++c) {
                bool child_black = color(lat, node_to_coord(lat, c)) == NodeColor::Black;
                int pos = int(c - (7 * v - 5));  // 0..6 left to right
                bool expect = parent_black ? pos == 5 : pos == 6;
                REQUIRE(child_black == expect);
            }
        }
    }
}

TEST_CASE("Neighbor relation: symmetry and bulk degree") {
    for (Family f : {Family::Euclid44, Family::Hyper54, Family::Hyper66}) {
        int im = f == Family::Hyper66 ? 4 : 6;
        LatticeSpec lat = LatticeSpec::make(f, im);
        std::map<SiteCoord, std::set<SiteCoord>> adj;
        for (int i = 0; i <= lat.i_max; ++i)
            for (int64_t j = 0; j < level_size(lat, i); ++j) {
                auto nb = neighbors(lat, {i, j});
                adj[{i, j}] = std::set<SiteCoord>(nb.begin(), nb.end());
                REQUIRE(adj[{i, j}].size() == nb.size());  // no duplicates
                REQUIRE(nb.size() <= size_t(lat.p));
            }
        for (auto& [c, nb] : adj)
            for (auto& d : nb) {
                INFO("edge (", c.i, ",", c.j, ") -> (", d.i, ",", d.j, ")");
                REQUIRE(adj[d].count(c) == 1);
            }
        // Sites whose full neighborhood fits inside the quarter have degree p.
        int bulk = 0;
        for (auto& [c, nb] : adj)
            if (nb.size() == size_t(lat.p)) ++bulk;
        REQUIRE(bulk > 0);
    }
}

TEST_CASE("{5,4} specific neighbor sets") {
    LatticeSpec lat = LatticeSpec::make(Family::Hyper54, 4);
    auto nb = neighbors(lat, {1, 2});
    std::set<SiteCoord> s(nb.begin(), nb.end());
    CHECK(s.count({0, 0}) == 1);
    CHECK(s.count({2, 7}) == 1);
}
