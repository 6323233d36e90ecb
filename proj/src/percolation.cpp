#include "nuca/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "nuca/fibonacci.hpp"

namespace nuca {

namespace {

uint64_t mix64(uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

double DpParams::effective_p2() const {
    switch (mode) {
        case DpMode::Site: return p1;
        case DpMode::Bond: return 2.0 * p1 - p1 * p1;
        case DpMode::Compact: return 1.0;
        case DpMode::Free: break;
    }
    return p2;
}

void DpParams::validate() const {
    if (!(p1 >= 0.0 && p1 <= 1.0)) throw std::invalid_argument("DpParams: p1 outside [0,1]");
    double q2 = effective_p2();
    if (!(q2 >= 0.0 && q2 <= 1.0)) throw std::invalid_argument("DpParams: p2 outside [0,1]");
}

RngStream::RngStream(uint64_t master, uint64_t run)
    : key_(mix64(mix64(master) ^ mix64(run + 0x632BE59BD9B4E019ULL))) {}

double RngStream::at(uint64_t counter) const {
    return double(mix64(key_ ^ mix64(counter)) >> 11) * 0x1.0p-53;
}

std::vector<std::vector<uint8_t>> dk_run(int width, int steps, const DpParams& params,
                                         const RngStream& rng,
                                         const std::vector<uint8_t>& init_row) {
    params.validate();
    if (width < 2) throw std::invalid_argument("dk_run: width < 2");
    if (int(init_row.size()) != width)
        throw std::invalid_argument("dk_run: init row size != width");
    double p1 = params.p1, p2 = params.effective_p2();

    std::vector<std::vector<uint8_t>> rows;
    rows.reserve(steps + 1);
    rows.push_back(init_row);
    for (int j = 1; j <= steps; ++j) {
        const auto& prev = rows.back();
        std::vector<uint8_t> row(width, 0);
        for (int i = 0; i < width; ++i) {
            int occ = prev[(i + width - 1) % width] + prev[(i + 1) % width];
            if (occ == 0) continue;
            double p = occ == 1 ? p1 : p2;
            row[i] = rng.at(uint64_t(j) * width + i) < p;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

// Rows at the next level whose (first) parent is jp: P is nondecreasing,
// so they form the consecutive block (floor(phi^2 jp), floor(phi^2 (jp+1))].
std::pair<int64_t, int64_t> child_range(int64_t jp) {
    int64_t lo = jp == 0 ? 0 : beatty_floor_mul(jp) + 1;
    return {lo, beatty_floor_mul(jp + 1)};
}

}  // namespace

Dp54Run dp54_run(const LatticeSpec& lat, const DpParams& params, const RngStream& rng,
                 SiteCoord seed, bool keep_history) {
    params.validate();
    if (lat.family != Family::Hyper54) throw std::invalid_argument("dp54_run: {5,4} only");
    if (seed.i != 0 || seed.j != 0)
        throw std::invalid_argument("dp54_run: the protocol seeds only (0,0)");
    double p1 = params.p1, p2 = params.effective_p2();

    Dp54Run out;
    out.level_counts.assign(lat.i_max + 1, 0);
    out.level_counts[0] = 1;
    if (keep_history) out.history.set({0, 0});

    std::vector<int64_t> occ = {0};  // occupied rows at the previous level
    for (int i = 1; i <= lat.i_max && !occ.empty(); ++i) {
        int64_t rows = level_size(lat, i);
        uint64_t base = uint64_t(level_prefix(lat, i));
        std::vector<int64_t> next;
        auto occupied = [&](int64_t jp) {
            return std::binary_search(occ.begin(), occ.end(), jp);
        };
        // Candidate rows: children of each occupied parent, plus the
        // two-parent (black) rows one block earlier whose second parent it
        // is.  Parents are visited in ascending order, so candidates come
        // out sorted; duplicates are skipped at evaluation time.
        int64_t done = -1;
        for (int64_t jp : occ) {
            auto [lo0, hi0] = child_range(jp > 0 ? jp - 1 : 0);
            auto [lo1, hi1] = child_range(jp);
            int64_t lo = jp > 0 ? lo0 : lo1;
            int64_t hi = std::min(hi1, rows - 1);
            for (int64_t j = std::max(lo, done + 1); j <= hi; ++j) {
                done = j;
                int64_t p = P54(j);
                int np;
                if (J54(j)) {
                    np = int(occupied(p)) + int(occupied(p + 1));
                } else {
                    np = occupied(p) ? 1 : 0;
                }
                if (np == 0) continue;
                double prob = np == 2 ? p2 : p1;
                if (rng.at(base + uint64_t(j)) < prob) next.push_back(j);
            }
        }
        out.level_counts[i] = int64_t(next.size());
        if (keep_history)
            for (int64_t j : next) out.history.set({i, j});
        occ = std::move(next);
    }
    return out;
}

SurvivalCurve survival_scan(const LatticeSpec& lat, const DpParams& params, int64_t runs,
                            uint64_t master, int workers) {
    params.validate();
    if (runs < 1) throw std::invalid_argument("survival_scan: runs < 1");
    if (workers < 1) workers = 1;

    int steps = lat.i_max + 1;
    auto worker = [&](int w, std::vector<int64_t>& acc) {
        acc.assign(steps, 0);
        for (int64_t r = w; r < runs; r += workers) {
            auto run = dp54_run(lat, params, RngStream(master, uint64_t(r)));
            for (int i = 0; i <= lat.i_max; ++i)
                if (run.level_counts[i] > 0) ++acc[i];
        }
    };

    std::vector<std::vector<int64_t>> partial(workers);
    if (workers == 1) {
        worker(0, partial[0]);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(worker, w, std::ref(partial[w]));
        for (auto& t : pool) t.join();
    }

    SurvivalCurve curve;
    curve.runs = runs;
    curve.master_seed = master;
    curve.survivors.assign(steps, 0);
    for (const auto& acc : partial)
        for (int t = 0; t < steps; ++t) curve.survivors[t] += acc[t];
    return curve;
}

SurvivalFit fit_survival(const SurvivalCurve& curve, int t_min, int t_max) {
    SurvivalFit f;
    std::vector<std::pair<double, double>> pts;
    for (int t = std::max(t_min, 1); t <= int(curve.survivors.size()); ++t) {
        if (t_max > 0 && t > t_max) break;
        int64_t s = curve.survivors[t - 1];
        if (s <= 0) continue;
        pts.emplace_back(std::log(double(t)), std::log(double(s) / double(curve.runs)));
    }
    if (pts.size() < 3) return f;

    double n = double(pts.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    double vxx = sxx - sx * sx / n;
    double vxy = sxy - sx * sy / n;
    double vyy = syy - sy * sy / n;
    f.delta = -vxy / vxx;
    f.r2 = vyy > 0 ? (vxy * vxy) / (vxx * vyy) : 1.0;
    f.ok = true;
    return f;
}

ThresholdEstimate scan_threshold(DpMode mode, const std::vector<double>& grid,
                                 const LatticeSpec& lat, int64_t runs, uint64_t master,
                                 int t_min, int workers, bool with_step_estimates,
                                 double p2_free) {
    if (grid.empty()) throw std::invalid_argument("scan_threshold: empty grid");

    ThresholdEstimate est;
    est.grid = grid;
    est.t_min = t_min;
    est.t_max = lat.i_max + 1;

    std::vector<SurvivalCurve> curves;
    curves.reserve(grid.size());
    for (double p1 : grid) {
        DpParams params{p1, p2_free, mode};
        curves.push_back(survival_scan(lat, params, runs, master, workers));
    }

    auto argmax = [&](int t_cap) {
        size_t best = 0;
        double best_r2 = -1.0;
        for (size_t g = 0; g < grid.size(); ++g) {
            auto f = fit_survival(curves[g], t_min, t_cap);
            double r2 = f.ok ? f.r2 : -1.0;
            if (r2 > best_r2) {
                best_r2 = r2;
                best = g;
            }
        }
        return best;
    };

    for (const auto& c : curves) {
        auto f = fit_survival(c, t_min, 0);
        est.r2.push_back(f.ok ? f.r2 : 0.0);
    }
    est.p1c = grid[argmax(0)];

    if (with_step_estimates)
        for (int T : {9, 11, 13, 15, 17})
            if (T <= lat.i_max + 1) est.by_steps.emplace_back(T, grid[argmax(T)]);
    return est;
}

PhaseBoundary phase_boundary(std::vector<std::pair<double, double>> points) {
    if (points.size() < 2) throw std::invalid_argument("phase_boundary: need >= 2 points");
    std::sort(points.begin(), points.end());
    size_t n = points.size();
    PhaseBoundary pb;
    for (size_t k = 0; k < n; ++k) {
        if (k > 0 && points[k].first == points[k - 1].first)
            throw std::invalid_argument("phase_boundary: duplicate p1 value");
        pb.p1.push_back(points[k].first);
        pb.p2.push_back(points[k].second);
    }

    // Fritsch-Carlson monotone cubic Hermite tangents.
    std::vector<double> d(n - 1);
    for (size_t k = 0; k + 1 < n; ++k)
        d[k] = (pb.p2[k + 1] - pb.p2[k]) / (pb.p1[k + 1] - pb.p1[k]);
    pb.tangent.assign(n, 0.0);
    pb.tangent[0] = d[0];
    pb.tangent[n - 1] = d[n - 2];
    for (size_t k = 1; k + 1 < n; ++k)
        pb.tangent[k] = (d[k - 1] * d[k] > 0) ? 2.0 * d[k - 1] * d[k] / (d[k - 1] + d[k]) : 0.0;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (d[k] == 0.0) {
            pb.tangent[k] = pb.tangent[k + 1] = 0.0;
            continue;
        }
        double a = pb.tangent[k] / d[k], b = pb.tangent[k + 1] / d[k];
        double s = a * a + b * b;
        if (s > 9.0) {
            double tau = 3.0 / std::sqrt(s);
            pb.tangent[k] = tau * a * d[k];
            pb.tangent[k + 1] = tau * b * d[k];
        }
    }
    return pb;
}

double PhaseBoundary::operator()(double x) const {
    if (x <= p1.front()) return std::clamp(p2.front(), 0.0, 1.0);
    if (x >= p1.back()) return std::clamp(p2.back(), 0.0, 1.0);
    size_t k = size_t(std::upper_bound(p1.begin(), p1.end(), x) - p1.begin()) - 1;
    double h = p1[k + 1] - p1[k];
    double t = (x - p1[k]) / h;
    double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    double h10 = t * (1 - t) * (1 - t);
    double h01 = t * t * (3 - 2 * t);
    double h11 = t * t * (t - 1);
    double y = h00 * p2[k] + h10 * h * tangent[k] + h01 * p2[k + 1] + h11 * h * tangent[k + 1];
    return std::clamp(y, 0.0, 1.0);
}

}  // namespace nuca
