// Stochastic automata for directed percolation: the Domany-Kinzel model on
// the diagonal square lattice, its non-uniform counterpart on the {5,4}
// lattice, survival-probability analysis, the R^2 threshold scan, and the
// interpolated phase boundary.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nuca/core.hpp"
#include "nuca/lattice.hpp"

namespace nuca {

enum class DpMode { Free, Site, Bond, Compact };

struct DpParams {
    double p1 = 0.0;
    double p2 = 0.0;  // used only in Free mode; other modes imply p2
    DpMode mode = DpMode::Free;

    // Site: p2 = p1; Bond: p2 = 2 p1 - p1^2; Compact: p2 = 1; Free: p2.
    double effective_p2() const;
    // Throws std::invalid_argument for probabilities outside [0,1].
    void validate() const;
};

// Counter-based uniform stream: the draw for a given counter is a pure
// function of (master seed, run index, counter), so runs are independent,
// reproducible under any parallel schedule, and two runs sharing the same
// (master, run) see identical draws per cell -- the coupling used by the
// monotonicity property test.
class RngStream {
  public:
    RngStream(uint64_t master, uint64_t run);
    // Uniform in [0,1).
    double at(uint64_t counter) const;

  private:
    uint64_t key_;
};

// Domany-Kinzel evolution on the diagonal square lattice with periodic
// columns: cell (i,j) draws on its parents (i-1,j-1), (i+1,j-1) (mod
// width); one occupied parent gives p1, two give p2, none leaves the cell
// empty.  Returns rows 0..steps, row 0 being the initial row.
std::vector<std::vector<uint8_t>> dk_run(int width, int steps, const DpParams& params,
                                         const RngStream& rng,
                                         const std::vector<uint8_t>& init_row);

struct Dp54Run {
    std::vector<int64_t> level_counts;  // occupied cells per level 0..i_max
    Config2D history;                   // filled only when keep_history
};

// Directed percolation on {5,4}: levels are DP steps (t = i+1).  A row
// with one parent draws p1 when the parent is occupied; a two-parent row
// draws p1 when exactly one parent is occupied and p2 when both are.  The
// protocol fixes the seed at (0,0); any other seed throws
// std::invalid_argument.
Dp54Run dp54_run(const LatticeSpec& lat, const DpParams& params, const RngStream& rng,
                 SiteCoord seed = {0, 0}, bool keep_history = false);

struct SurvivalCurve {
    // survivors[t-1] = number of runs with an occupied cell at DP step t.
    std::vector<int64_t> survivors;
    int64_t runs = 0;
    uint64_t master_seed = 0;
};

// Aggregates `runs` independent dp54 evolutions (run r uses stream
// (master, r)); deterministic for a given master seed regardless of the
// worker count.
SurvivalCurve survival_scan(const LatticeSpec& lat, const DpParams& params, int64_t runs,
                            uint64_t master, int workers = 1);

struct SurvivalFit {
    double delta = 0.0;  // decay exponent: ln P(t) ~ -delta ln t
    double r2 = 0.0;
    bool ok = false;  // false when fewer than 3 surviving points remain
};

// Least squares of ln(survivors/runs) against ln t over t_min <= t (<=
// t_max when t_max > 0); zero-survivor points are dropped.
SurvivalFit fit_survival(const SurvivalCurve& curve, int t_min = 3, int t_max = 0);

struct ThresholdEstimate {
    double p1c = 0.0;
    std::vector<double> grid;
    std::vector<double> r2;  // per grid point
    int t_min = 3, t_max = 0;
    // Estimates recomputed with the curve truncated to t <= 9,11,13,15,17.
    std::vector<std::pair<int, double>> by_steps;
};

// p1c = grid point whose survival curve is closest to a power law (max
// R^2); ties break toward smaller p1.  Throws std::invalid_argument on an
// empty grid.  p2_free supplies p2 in Free mode.
ThresholdEstimate scan_threshold(DpMode mode, const std::vector<double>& grid,
                                 const LatticeSpec& lat, int64_t runs, uint64_t master,
                                 int t_min = 3, int workers = 1,
                                 bool with_step_estimates = false, double p2_free = 0.0);

// Monotone piecewise-cubic interpolation of p2c as a function of p1c
// through the given threshold points, clamped to [0,1].  Throws
// std::invalid_argument on fewer than two points or duplicate p1 values.
struct PhaseBoundary {
    std::vector<double> p1, p2, tangent;  // knots sorted by p1

    double operator()(double x) const;
};

PhaseBoundary phase_boundary(std::vector<std::pair<double, double>> points);

}  // namespace nuca
