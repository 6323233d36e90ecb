#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <stdexcept>

#include "nuca/fibonacci.hpp"
#include "nuca/models.hpp"

using namespace nuca;

namespace {

int64_t P3(int64_t j) { return P54(P54(P54(j))); }
int64_t C3(int64_t j) { return C54(C54(C54(j))); }

}  // namespace

TEST_CASE("catalog holds the ten documented entries and rejects unknown names") {
    const char* names[] = {"cluster-54",        "sspt2-54",          "reg1-54",
                           "reg2-54",           "tree-54",           "cluster-66",
                           "euclid-regular-44", "euclid-fractal-44", "euclid-mixed-44",
                           "euclid-chaotic-44"};
    for (const char* n : names) CHECK(rule_lookup(n).name == n);
    CHECK(rule_catalog().size() >= 10);
    CHECK_THROWS_AS(rule_lookup("no-such-model"), std::out_of_range);
}

TEST_CASE("tree-54 transposed rule gathers the two parent-window rows") {
    auto lat = LatticeSpec::make(Family::Hyper54, 8);
    auto& e = rule_lookup("tree-54");
    for (SiteCoord c : {SiteCoord{3, 5}, SiteCoord{4, 13}, SiteCoord{5, 34}}) {
        REQUIRE(J54(c.j) == 1);
        auto tr = e.rule.transposed(lat, c);
        // x^-1 y^{P(j)+1-j} + x^-1 y^{P(j)-j}: look-backs j-P(j)-1 and
        // j-P(j), both one level up toward the root.
        std::set<std::pair<int, int>> got;
        for (auto& [k, p] : tr)
            for (int d : p.exponents) got.insert({k, d});
        std::set<std::pair<int, int>> want = {{int(c.j - P54(c.j) - 1), -1},
                                              {int(c.j - P54(c.j)), -1}};
        CHECK(got == want);
    }
}

TEST_CASE("cluster-54 transposed rule is trivial on white rows") {
    auto lat = LatticeSpec::make(Family::Hyper54, 8);
    auto& e = rule_lookup("cluster-54");
    for (SiteCoord c : {SiteCoord{3, 4}, SiteCoord{4, 21}, SiteCoord{5, 50}}) {
        REQUIRE(J54(c.j) == 0);
        CHECK(e.rule.transposed(lat, c).empty());
    }
}

TEST_CASE("euclid-fractal-44 forward rule feeds levels j+2 at offsets 2 and 4") {
    auto lat = LatticeSpec::make(Family::Euclid44, 16);
    auto& e = rule_lookup("euclid-fractal-44");
    // Quadrant rule f_2 = 1 + x^2 maps to level offsets {2, 4} at k = 2.
    auto fw = e.rule.forward(lat, {8, 4});
    REQUIRE(fw.size() == 1);
    CHECK(fw[0].first == 2);
    CHECK(fw[0].second == Poly2{2, 4});
}

TEST_CASE("every catalog rule passes the exact duality check") {
    for (const auto& e : rule_catalog()) {
        int imax = e.family == Family::Hyper66 ? 4 : (e.family == Family::Euclid44 ? 12 : 7);
        auto lat = LatticeSpec::make(e.family, imax);
        auto rep = check_rule_duality(e.rule, lat, imax);
        INFO(e.name);
        CHECK(rep.ok());
        CHECK(rep.checked_sites > 0);
    }
}

TEST_CASE("cluster-54 terms are the closed neighborhoods of their centers") {
    auto lat = LatticeSpec::make(Family::Hyper54, 7);
    auto terms = build_hamiltonian(rule_lookup("cluster-54"), lat);
    CHECK(!terms.empty());
    for (const auto& t : terms) {
        REQUIRE(t.center.has_value());
        CHECK(t.center->i == t.anchor.i - 1);
        CHECK(t.center->j == P54(t.anchor.j));
        std::set<std::pair<int, int64_t>> supp;
        for (const auto& [s, l] : t.word.letters)
            if (!(s == *t.center)) supp.insert({s.i, s.j});
        std::set<std::pair<int, int64_t>> nbr;
        for (const auto& n : neighbors(lat, *t.center)) nbr.insert({n.i, n.j});
        CHECK(supp == nbr);
        CHECK((t.word.letters.size() == 5 || t.word.letters.size() == 6));
        CHECK(t.species == (t.anchor.i % 2 == 0 ? TermSpecies::ZType : TermSpecies::XType));
    }
}

TEST_CASE("sspt2-54 builds one 16-site term per admissible center") {
    auto lat = LatticeSpec::make(Family::Hyper54, 8);
    auto terms = build_hamiltonian(rule_lookup("sspt2-54"), lat);
    std::set<std::pair<int, int64_t>> centers;
    for (const auto& t : terms) {
        REQUIRE(t.center.has_value());
        CHECK(t.center->i == t.anchor.i - 3);
        CHECK(t.center->j == P3(t.anchor.j));
        // distinguished anchor of the fiber
        CHECK(t.anchor.j == C3(t.center->j) + 3 - 8 * J54(t.center->j));
        CHECK(t.word.letters.size() == 16);
        CHECK(centers.insert({t.center->i, t.center->j}).second);
    }
    // one center per admissible row of levels 2..5
    int64_t expect = 0;
    for (int ci = 2; ci <= 5; ++ci) expect += std::max<int64_t>(0, level_size(lat, ci) - 6);
    CHECK(int64_t(terms.size()) == expect);
}

TEST_CASE("SSSB and tree term supports have the documented sizes") {
    auto lat = LatticeSpec::make(Family::Hyper54, 7);
    auto sz = [&](const char* n) {
        std::set<size_t> sizes;
        for (const auto& t : build_hamiltonian(rule_lookup(n), lat))
            sizes.insert(t.word.letters.size());
        return sizes;
    };
    CHECK(sz("reg1-54") == std::set<size_t>{4});   // the four faces at a vertex
    CHECK(sz("reg2-54") == std::set<size_t>{6});
    CHECK(sz("tree-54") == std::set<size_t>{3});
}

TEST_CASE("cluster-66 terms are hexagons with their six neighbors") {
    auto lat = LatticeSpec::make(Family::Hyper66, 6);
    auto terms = build_hamiltonian(rule_lookup("cluster-66"), lat);
    CHECK(!terms.empty());
    for (const auto& t : terms) {
        REQUIRE(t.center.has_value());
        CHECK(t.word.letters.size() == 7);
        std::set<std::pair<int, int64_t>> supp;
        for (const auto& [s, l] : t.word.letters)
            if (!(s == *t.center)) supp.insert({s.i, s.j});
        std::set<std::pair<int, int64_t>> nbr;
        for (const auto& n : neighbors(lat, *t.center)) nbr.insert({n.i, n.j});
        CHECK(supp == nbr);
    }
}

TEST_CASE("pairwise commutation holds for the three SSPT models") {
    for (const char* n : {"cluster-54", "sspt2-54"}) {
        auto lat = LatticeSpec::make(Family::Hyper54, 6);
        auto rep = check_terms_commute(build_hamiltonian(rule_lookup(n), lat));
        INFO(n);
        CHECK(rep.ok());
        CHECK(rep.checked > 0);
    }
    auto lat = LatticeSpec::make(Family::Hyper66, 6);
    auto rep = check_terms_commute(build_hamiltonian(rule_lookup("cluster-66"), lat));
    CHECK(rep.ok());
}

TEST_CASE("a flipped letter breaks pairwise commutation") {
    auto lat = LatticeSpec::make(Family::Hyper54, 6);
    auto terms = build_hamiltonian(rule_lookup("cluster-54"), lat);
    // Flip one overlapping term's letters from Z to X (or back).
    for (auto& [s, l] : terms[terms.size() / 2].word.letters)
        l = (l == PauliLetter::Z) ? PauliLetter::X : PauliLetter::Z;
    CHECK(!check_terms_commute(terms).ok());
}

TEST_CASE("documented initial conditions generate commuting symmetries") {
    for (const auto& e : rule_catalog()) {
        if (e.family == Family::Euclid44) continue;
        int imax = 6;
        auto lat = LatticeSpec::make(e.family, imax);
        auto terms = build_hamiltonian(e, lat);
        for (const auto& ic : e.initial_conditions) {
            auto sym = generate_symmetry(e, InitialCondition{ic.seeds(lat)}, lat);
            auto rep = check_symmetry_commutes(terms, sym);
            INFO(e.name << " / " << ic.name);
            CHECK(rep.ok());
            CHECK(!sym.letters.empty());
        }
    }
}

TEST_CASE("deleting one symmetry cell produces commutation violations") {
    auto lat = LatticeSpec::make(Family::Hyper54, 6);
    auto& e = rule_lookup("cluster-54");
    auto terms = build_hamiltonian(e, lat);
    auto sym = generate_symmetry(e, InitialCondition{e.initial_conditions[0].seeds(lat)}, lat);
    // Remove a cell that some bracket actually crosses.
    for (auto it = sym.letters.begin(); it != sym.letters.end(); ++it) {
        PauliWord broken = sym;
        broken.letters.erase(broken.letters.find(it->first));
        if (!check_symmetry_commutes(terms, broken).ok()) return;  // found a witness
    }
    FAIL("no deleted cell produced a violation");
}

TEST_CASE("symmetry species follows the seed sublattice") {
    auto lat = LatticeSpec::make(Family::Hyper54, 6);
    auto& e = rule_lookup("cluster-54");
    auto sym = generate_symmetry(e, InitialCondition{e.initial_conditions[0].seeds(lat)}, lat);
    for (const auto& [s, l] : sym.letters) {
        CHECK(l == PauliLetter::X);  // even-level seed
        CHECK(s.i % 2 == 0);
    }
    auto& e2 = rule_lookup("sspt2-54");
    Config2D odd;
    odd.set({1, 0});
    odd.set({1, 2});
    auto symz = generate_symmetry(e2, InitialCondition{odd}, lat);
    for (const auto& [s, l] : symz.letters) CHECK(l == PauliLetter::Z);

    Config2D mixed;
    mixed.set({1, 0});
    mixed.set({2, 0});
    CHECK_THROWS_AS(generate_symmetry(e, InitialCondition{mixed}, lat), std::invalid_argument);

    Config2D empty;
    CHECK(generate_symmetry(e, InitialCondition{empty}, lat).letters.empty());
}

TEST_CASE("edge triples satisfy the single-site Pauli algebra and commute with the bulk") {
    for (int imax : {6, 7}) {
        auto lat = LatticeSpec::make(Family::Hyper54, imax);
        auto terms = build_hamiltonian(rule_lookup("cluster-54"), lat);
        auto edges = edge_operators(lat);
        CHECK(!edges.empty());
        for (const auto& ed : edges) {
            CHECK(pauli_commutes(ed.x, ed.y) == 1);
            CHECK(pauli_commutes(ed.x, ed.z) == 1);
            CHECK(pauli_commutes(ed.y, ed.z) == 1);
            CHECK(ed.z.letters.size() == 1);                 // bare boundary letter
            CHECK(ed.x.letters.size() == (J54(ed.site.j) ? 3u : 2u));
            for (const auto& t : terms) {
                if (t.anchor.i >= imax) continue;  // bulk only
                INFO("imax=" << imax << " site j=" << ed.site.j << " term anchor ("
                             << t.anchor.i << "," << t.anchor.j << ")");
                CHECK(pauli_commutes(ed.x, t.word) == 0);
                CHECK(pauli_commutes(ed.y, t.word) == 0);
                CHECK(pauli_commutes(ed.z, t.word) == 0);
            }
        }
        // distinct boundary sites commute
        for (size_t a = 0; a + 1 < edges.size() && a < 50; ++a) {
            CHECK(pauli_commutes(edges[a].x, edges[a + 1].y) == 0);
            CHECK(pauli_commutes(edges[a].z, edges[a + 1].x) == 0);
        }
    }
}

TEST_CASE("strange-correlator supports evaluate to +1 whenever they fit") {
    auto lat = LatticeSpec::make(Family::Hyper54, 10);
    auto terms = build_hamiltonian(rule_lookup("cluster-54"), lat);
    int decided = 0;
    for (int n = 1; n <= 3; ++n)
        for (SiteCoord seed : {SiteCoord{2, 3}, SiteCoord{4, 10}, SiteCoord{4, 40}}) {
            if (seed.i + 2 * n > lat.i_max) continue;
            auto sup = mpsc_iterate(seed, n, lat);
            REQUIRE(!sup.support.cells().empty());
            CHECK(mpsc_evaluate(sup, terms, lat) == MpscValue::PlusOne);
            ++decided;
        }
    CHECK(decided == 9);
    // A support that no stabilizer product can build stays undecided.
    MpscSupport odd;
    odd.generation = 0;
    odd.support.set({4, 11});
    odd.support.set({6, 2});
    CHECK(mpsc_evaluate(odd, terms, lat) == MpscValue::Undecided);
}

TEST_CASE("isotropy separates the rotation-invariant models from the tree rule") {
    auto lat = LatticeSpec::make(Family::Hyper54, 6);
    for (const char* n : {"cluster-54", "reg1-54", "sspt2-54"}) {
        auto terms = build_hamiltonian(rule_lookup(n), lat);
        REQUIRE(!terms.empty());
        for (const auto& t : terms) {
            INFO(n);
            CHECK(isotropy_check(t, lat).verdict == IsotropyVerdict::Pass);
        }
    }
    for (const auto& t : build_hamiltonian(rule_lookup("tree-54"), lat))
        CHECK(isotropy_check(t, lat).verdict == IsotropyVerdict::Fail);

    auto lat44 = LatticeSpec::make(Family::Euclid44, 8);
    auto terms44 = build_hamiltonian(rule_lookup("euclid-regular-44"), lat44);
    REQUIRE(!terms44.empty());
    CHECK(isotropy_check(terms44.front(), lat44).verdict == IsotropyVerdict::CenterAmbiguous);
}

TEST_CASE("seedable predicate tracks rule-trivial physical sites") {
    auto lat = LatticeSpec::make(Family::Hyper54, 6);
    auto& e = rule_lookup("cluster-54");
    CHECK(e.seedable(lat, {0, 0}));
    CHECK(e.seedable(lat, {3, 4}));            // white row, trivial rule
    CHECK(!e.seedable(lat, {3, 5}));           // black row in the bulk
    CHECK(!e.seedable(lat, {3, 100}));         // not physical
}
