#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "nuca/classify.hpp"
#include "nuca/models.hpp"

using namespace nuca;

namespace {

Config2D evolved(const char* rule, const char* init, const LatticeSpec& lat) {
    const RuleCatalogEntry& e = rule_lookup(rule);
    const NamedInit* ni = nullptr;
    for (const auto& n : e.initial_conditions)
        if (n.name == init) ni = &n;
    REQUIRE(ni != nullptr);
    InitialCondition ic{ni->seeds(lat)};
    return truncate(evolve(lat, e.rule, ic, level_size(lat, lat.i_max) - 1), lat);
}

}  // namespace

TEST_CASE("growth series of the full lattice reproduces the level sizes") {
    auto lat = LatticeSpec::make(Family::Hyper54, 8);
    Config2D all;
    for (int i = 0; i <= lat.i_max; ++i)
        for (int64_t j = 0; j < level_size(lat, i); ++j) all.set({i, j});
    auto s = growth_series(all, lat);
    REQUIRE(int(s.counts.size()) == lat.i_max + 1);
    for (int k = 0; k <= lat.i_max; ++k) CHECK(s.counts[k] == level_size(lat, k));

    auto odd = growth_series(all, lat, 1);
    for (int k = 0; k <= lat.i_max; ++k)
        CHECK(odd.counts[k] == ((k & 1) ? level_size(lat, k) : 0));
}

TEST_CASE("growth series of the empty configuration is all zeros") {
    auto lat = LatticeSpec::make(Family::Hyper54, 6);
    auto s = growth_series(Config2D{}, lat);
    for (auto c : s.counts) CHECK(c == 0);
    CHECK_THROWS_AS(fit_growth(s), std::invalid_argument);
}

TEST_CASE("exact geometric series fits to ln 2 with a perfect line") {
    GrowthSeries s;
    for (int k = 0; k <= 12; ++k) s.counts.push_back(int64_t(1) << k);
    auto f = fit_growth(s);
    CHECK(f.lambda == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.k_min == 4);
    CHECK(f.k_max == 12);
}

TEST_CASE("constant series fits to zero slope") {
    GrowthSeries s;
    s.counts.assign(10, 7);
    auto f = fit_growth(s);
    CHECK(f.lambda == doctest::Approx(0.0));
    CHECK(f.r2 == doctest::Approx(1.0));
}

TEST_CASE("zero-count levels are skipped, not treated as data") {
    GrowthSeries s;
    for (int k = 0; k <= 12; ++k) s.counts.push_back((k & 1) ? 0 : (int64_t(1) << k));
    auto f = fit_growth(s);
    CHECK(f.lambda == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("window with fewer than three positive points is rejected") {
    GrowthSeries s;
    s.counts = {1, 2, 4, 8, 16, 32};
    CHECK_THROWS_AS(fit_growth(s, std::pair{4, 5}), std::invalid_argument);
    CHECK_NOTHROW(fit_growth(s, std::pair{0, 5}));
}

TEST_CASE("lattice-size series recovers the intrinsic growth rate within 1%") {
    auto lat = LatticeSpec::make(Family::Hyper54, 16);
    GrowthSeries s;
    for (int k = 0; k <= 16; ++k) s.counts.push_back(level_size(lat, k));
    auto f = fit_growth(s, std::pair{6, 16});
    double lam = lattice_growth_rate_54();
    CHECK(std::abs(f.lambda - lam) < 0.01 * lam);
    CHECK(f.r2 > 0.9999);
}

TEST_CASE("verdicts follow the tolerance band") {
    double lam = lattice_growth_rate_54();
    CHECK(classify(lam, lam) == GrowthClass::Regular);
    CHECK(classify(lam * 0.96, lam) == GrowthClass::Regular);
    CHECK(classify(std::log(2.0), lam) == GrowthClass::Irregular);
    CHECK(classify(0.0, lam) == GrowthClass::Indeterminate);
    CHECK(classify(lam * 0.03, lam) == GrowthClass::Indeterminate);
    CHECK(classify(lam * 1.2, lam) == GrowthClass::Indeterminate);
}

TEST_CASE("the three reference symmetries classify as in the growth survey") {
    auto lat = LatticeSpec::make(Family::Hyper54, 12);
    double lam_lat = lattice_growth_rate_54();

    auto check_case = [&](const char* rule, const char* init, std::optional<int> parity,
                          std::optional<std::pair<int, int>> window, GrowthClass want,
                          double lam_expect, double lam_tol) {
        CAPTURE(rule);
        auto cfg = evolved(rule, init, lat);
        auto s = growth_series(cfg, lat, parity);
        auto f = fit_growth(s, window);
        CHECK(classify(f.lambda, lam_lat) == want);
        if (lam_expect >= 0) CHECK(std::abs(f.lambda - lam_expect) < lam_tol);
        // Transient insensitivity: zeroing the first two levels of the
        // series must not change the verdict.
        GrowthSeries s2 = s;
        s2.counts[0] = s2.counts[1] = 0;
        auto f2 = fit_growth(s2, window);
        CHECK(classify(f2.lambda, lam_lat) == want);
    };

    check_case("reg1-54", "q1", std::nullopt, std::nullopt, GrowthClass::Regular, lam_lat,
               0.05 * lam_lat);
    check_case("tree-54", "q1", std::nullopt, std::nullopt, GrowthClass::Irregular,
               std::log(2.0), 0.05 * std::log(2.0));
    // The sublattice-restricted pattern approaches the lattice rate slowly
    // from below; the gap shows only when the early levels enter the fit,
    // so this case uses the full window over the populated levels.
    check_case("cluster-54", "q2", 0, std::pair{2, lat.i_max}, GrowthClass::Irregular, -1.0,
               0.0);
}

TEST_CASE("tree symmetry doubles its support level by level") {
    auto lat = LatticeSpec::make(Family::Hyper54, 10);
    auto cfg = evolved("tree-54", "q1", lat);
    auto s = growth_series(cfg, lat);
    // Seed at level 1; each occupied row feeds exactly two offspring rows.
    for (int k = 1; k <= lat.i_max; ++k) CHECK(s.counts[k] == (int64_t(1) << (k - 1)));
}
