// Growth-rate measurement of symmetry configurations: per-level support
// counts, a log-linear least-squares fit of the growth exponent, and the
// regular / irregular verdict obtained by comparing the fitted exponent
// against the intrinsic growth rate of the lattice.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nuca/core.hpp"
#include "nuca/lattice.hpp"

namespace nuca {

// Intrinsic growth rate of the {5,4} lattice: level sizes A_{2k+1} obey
// Binet asymptotics, so ln N(k) grows by 2 ln(phi) per level.
double lattice_growth_rate_54();

struct GrowthSeries {
    // counts[k] = number of occupied cells at level k, k = 0..i_max.
    std::vector<int64_t> counts;
};

// Per-level cell counts of the configuration, optionally restricted to one
// sublattice by the parity of the level index (parity = 0 or 1).
GrowthSeries growth_series(const Config2D& cfg, const LatticeSpec& lat,
                           std::optional<int> level_parity = std::nullopt);

struct FitResult {
    double lambda = 0.0;     // slope of ln T(k) per level
    double intercept = 0.0;
    double r2 = 0.0;
    int k_min = 0, k_max = 0;  // inclusive window actually used
};

// Ordinary least squares of ln T(k) against k over the window (default:
// all levels k >= 4, skipping the early transient); zero-count levels are
// always excluded.  Throws std::invalid_argument if fewer than three
// positive points remain.
FitResult fit_growth(const GrowthSeries& series,
                     std::optional<std::pair<int, int>> window = std::nullopt);

enum class GrowthClass { Regular, Irregular, Indeterminate };

// Regular if lambda matches lambda_lat within the relative tolerance;
// Irregular if lambda sits strictly between the tolerance band above zero
// and the band below lambda_lat; Indeterminate otherwise.
GrowthClass classify(double lambda, double lambda_lat, double tol = 0.05);

}  // namespace nuca
