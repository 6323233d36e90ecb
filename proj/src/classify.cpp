#include "nuca/classify.hpp"

#include <cmath>
#include <stdexcept>

namespace nuca {

double lattice_growth_rate_54() {
    static const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    return 2.0 * std::log(phi);
}

GrowthSeries growth_series(const Config2D& cfg, const LatticeSpec& lat,
                           std::optional<int> level_parity) {
    GrowthSeries s;
    s.counts.assign(lat.i_max + 1, 0);
    for (int k = 0; k <= lat.i_max; ++k) {
        if (level_parity && (k & 1) != (*level_parity & 1)) continue;
        s.counts[k] = cfg.count_level(k);
    }
    return s;
}

FitResult fit_growth(const GrowthSeries& series, std::optional<std::pair<int, int>> window) {
    int lo = window ? window->first : 4;
    int hi = window ? window->second : int(series.counts.size()) - 1;
    std::vector<std::pair<int, double>> pts;
    for (int k = std::max(lo, 0); k <= hi && k < int(series.counts.size()); ++k)
        if (series.counts[k] > 0)
            pts.emplace_back(k, std::log(double(series.counts[k])));
    if (pts.size() < 3)
        throw std::invalid_argument("fit_growth: fewer than 3 positive points in window");

    double n = double(pts.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (auto& [k, y] : pts) {
        sx += k;
        sy += y;
        sxx += double(k) * k;
        sxy += k * y;
        syy += y * y;
    }
    double vxx = sxx - sx * sx / n;
    double vxy = sxy - sx * sy / n;
    double vyy = syy - sy * sy / n;

    FitResult f;
    f.k_min = pts.front().first;
    f.k_max = pts.back().first;
    f.lambda = vxy / vxx;
    f.intercept = (sy - f.lambda * sx) / n;
    // Degenerate data (constant series): the flat line is an exact fit.
    f.r2 = vyy > 0 ? (vxy * vxy) / (vxx * vyy) : 1.0;
    return f;
}

GrowthClass classify(double lambda, double lambda_lat, double tol) {
    double band = tol * lambda_lat;
    if (std::abs(lambda - lambda_lat) <= band) return GrowthClass::Regular;
    if (lambda > band && lambda < lambda_lat - band) return GrowthClass::Irregular;
    return GrowthClass::Indeterminate;
}

}  // namespace nuca
