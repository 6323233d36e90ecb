// Non-uniform Clifford QCA for the {5,4} cluster state: partition of the
// lattice into one-dimensional wires along black-offspring paths, the
// Clifford circuit layout (copy tensors plus CZ gates over the remaining
// lattice edges), Heisenberg propagation of virtual Pauli inputs, and the
// equivalence check against automaton-generated symmetries.
#pragma once

#include <cstdint>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nuca/core.hpp"
#include "nuca/lattice.hpp"

namespace nuca {

struct WirePartition {
    // Each wire lists its sites from the start (a site with trivial
    // transposed cluster rule) through successive black offspring; wires
    // are vertex-disjoint and jointly cover all physical sites.
    std::vector<std::vector<SiteCoord>> wires;
    std::unordered_map<uint64_t, int> index;  // packed site -> wire id

    static uint64_t pack(SiteCoord c) { return (uint64_t(c.i) << 40) | uint64_t(c.j); }
    int wire_at(SiteCoord c) const;  // -1 when the site is unknown
};

WirePartition build_wires(const LatticeSpec& lat);

struct CliffordLayout {
    struct Slice {
        SiteCoord site;  // the copy tensor of this time slice
        // CZ gates firing in this slice; each pair is (earlier site, this
        // site) and is a physical lattice edge that is not a wire step.
        std::vector<std::pair<SiteCoord, SiteCoord>> cz;
    };
    // One slice per physical site in (level, row) order, matching the
    // automaton time direction.
    std::vector<Slice> slices;
};

CliffordLayout build_circuit(const WirePartition& part, const LatticeSpec& lat);

// Heisenberg propagation of virtual inputs (wire id -> Pauli letter on the
// wire's start leg) through the circuit: a copy tensor leaves X on the
// physical bond when the virtual X bit is set (virtual Z leaves identity),
// CZ gates toggle the partner leg's Z bit, and the implicit Hadamard of
// each tensor swaps the X and Z bits.  The returned word is pure X; phases
// are discarded.
PauliWord propagate(const WirePartition& part, const CliffordLayout& layout,
                    const LatticeSpec& lat, const std::map<int, PauliLetter>& inputs);

struct CqcaEquivalence {
    int64_t checked = 0;
    std::vector<size_t> mismatches;  // indices of failing input sets
    bool ok() const { return mismatches.empty(); }
};

// For each input set (list of wire ids carrying virtual X), asserts that
// the propagated physical support equals the truncated cluster-rule
// evolution seeded at those wires' start sites.
CqcaEquivalence equivalence_check(const LatticeSpec& lat,
                                  const std::vector<std::vector<int>>& input_sets);

}  // namespace nuca
