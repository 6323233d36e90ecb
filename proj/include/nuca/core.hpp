// Linear cellular-automaton engine over F2.
//
// A space-time configuration sum a_{ij} x^i y^j lives on the deformed
// coordinates of a lattice quarter: x tracks the level index i, y the row
// index j, which plays the role of time.  Update rules are position
// dependent: at each site they supply, for every look-back distance k >= 1,
// a Laurent polynomial in x describing which levels of row j - k feed the
// site (transposed/gather form) or which levels of row j + k the site feeds
// (forward/scatter form).
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "nuca/lattice.hpp"

namespace nuca {

// Laurent polynomial in one variable over F2: the set of exponents with
// coefficient 1.  Addition is symmetric difference.
struct Poly2 {
    std::vector<int> exponents;  // strictly increasing

    Poly2() = default;
    Poly2(std::initializer_list<int> es);

    bool zero() const { return exponents.empty(); }
    bool contains(int e) const;

    friend bool operator==(const Poly2&, const Poly2&) = default;
};

Poly2 poly_add(const Poly2& a, const Poly2& b);
Poly2 poly_shift_mul(const Poly2& a, int e);

// Sparse-façade configuration backed by one dense bit-row per level.  Rows
// grow on demand, so cells need not be physical on any particular lattice
// (truncate enforces that).  Row indices are required to be >= 0.
class Config2D {
  public:
    void set(SiteCoord c, bool value = true);
    void toggle(SiteCoord c);
    bool get(SiteCoord c) const;

    int64_t count() const;
    int64_t count_level(int i) const;
    bool empty() const { return count() == 0; }

    // All occupied cells in lexicographic (i, j) order.
    std::vector<SiteCoord> cells() const;

    void xor_with(const Config2D& other);

    // Parity of |this ∩ other|.
    int overlap_parity(const Config2D& other) const;

    friend bool operator==(const Config2D& a, const Config2D& b);

  private:
    // level -> packed bits over j
    std::map<int, std::vector<uint64_t>> levels_;
};

// A position-dependent linear update rule.  Both directions return the list
// of (k, polynomial-in-x) pairs with k >= 1; an empty list marks a
// rule-trivial site (where initial-condition seeds may be placed).
struct UpdateRule {
    std::string name;
    std::function<std::vector<std::pair<int, Poly2>>(const LatticeSpec&, SiteCoord)> forward;
    std::function<std::vector<std::pair<int, Poly2>>(const LatticeSpec&, SiteCoord)> transposed;
};

struct InitialCondition {
    Config2D seeds;
};

enum class PauliLetter { X, Y, Z };

// Finite product of single-site Pauli operators with phases discarded.
struct PauliWord {
    std::map<SiteCoord, PauliLetter> letters;

    // Letter-wise product; coinciding identical letters cancel, X*Z and
    // Z*X both map to Y and so on (phase dropped).
    PauliWord operator*(const PauliWord& other) const;

    friend bool operator==(const PauliWord&, const PauliWord&) = default;
};

// Coefficient of x^0 y^0 in alpha(x,y) * beta(1/x,1/y) mod 2; 0 means the
// operators X(alpha) and Z(beta) commute.
int commutation_coeff(const Config2D& alpha, const Config2D& beta);

// Parity of sites where both words act non-trivially with different
// letters; 0 means the words commute.
int pauli_commutes(const PauliWord& w1, const PauliWord& w2);

// Run the automaton over rows 0..j_max on every level, gathering each site
// from earlier rows through the transposed rule and adding seeds at
// rule-trivial sites.  Throws std::invalid_argument when a seed sits on a
// site whose transposed rule is nonempty.
Config2D evolve(const LatticeSpec& lat, const UpdateRule& rule, const InitialCondition& init,
                int64_t j_max);

// Drop every cell outside the physical quarter; on {6,6} additionally drop
// the cells of the vertex-inflation exclusion mask.
Config2D truncate(const Config2D& cfg, const LatticeSpec& lat);

struct DualityReport {
    std::vector<std::string> violations;
    int64_t checked_sites = 0;

    bool ok() const { return violations.empty(); }
};

// Verify that forward and transposed describe the same set of space-time
// couplings over all physical sites with level <= bound.
DualityReport check_rule_duality(const UpdateRule& rule, const LatticeSpec& lat, int bound);

// JSON record of an evolution: lattice, rule name, seeds and occupied cells
// (both sorted) for reproducible diffs.
std::string export_json(const LatticeSpec& lat, const std::string& rule_name,
                        const Config2D& seeds, const Config2D& cfg);

}  // namespace nuca
