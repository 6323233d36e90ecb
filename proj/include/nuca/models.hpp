// Catalog of concrete NUCA-generated stabilizer models and their algebraic
// verifiers: Hamiltonian construction, symmetry generation, commutation
// checks, boundary edge operators, the multi-point strange-correlator
// support map, and the rotation-isotropy test used as a sufficient
// condition for translation invariance on hyperbolic lattices.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nuca/core.hpp"
#include "nuca/lattice.hpp"

namespace nuca {

enum class ModelClass { SSPT, SSSB };

// Z-type / X-type label the two sublattice species of SSPT stabilizers;
// SSSB terms are uniformly Z.
enum class TermSpecies { ZType, XType, SSSB };

struct HamiltonianTerm {
    PauliWord word;
    SiteCoord anchor;                  // the defining site of the bracket
    std::optional<SiteCoord> center;   // complementary-sublattice site (SSPT)
    TermSpecies species = TermSpecies::SSSB;
};

struct NamedInit {
    std::string name;
    std::function<Config2D(const LatticeSpec&)> seeds;
};

struct RuleCatalogEntry {
    std::string name;
    Family family;
    ModelClass model_class;
    UpdateRule rule;
    // True iff an initial-condition seed may be placed at the site: the
    // site is physical (and retained on {6,6}) and its transposed rule is
    // trivial.
    std::function<bool(const LatticeSpec&, SiteCoord)> seedable;
    std::vector<NamedInit> initial_conditions;
    // SSPT only: the unique complementary-sublattice support of the term
    // anchored at the given site.
    std::function<SiteCoord(const LatticeSpec&, SiteCoord)> center_of;
    // Optional: restrict Hamiltonian construction to a subset of the
    // rule-nontrivial anchors (null = every nontrivial anchor carries a
    // term).  Needed when several anchors share one center and only a
    // distinguished one closes into a commuting, rotation-symmetric term.
    std::function<bool(const LatticeSpec&, SiteCoord)> term_anchor;
};

const std::vector<RuleCatalogEntry>& rule_catalog();

// Throws std::out_of_range for unknown names.
const RuleCatalogEntry& rule_lookup(const std::string& name);

// One term per anchor with nontrivial transposed rule whose full support
// (bracket, and center for SSPT) is physical; anchors whose support exits
// the lattice produce no term.
std::vector<HamiltonianTerm> build_hamiltonian(const RuleCatalogEntry& entry,
                                               const LatticeSpec& lat);

// Evolve the documented initial condition over the whole lattice and wrap
// the resulting configuration in a uniform Pauli word: X for the
// even-level (class-0 on {6,6}) sublattice or any SSSB seed set, Z for the
// complementary sublattice.  Throws std::invalid_argument for seeds on
// rule-nontrivial sites or mixed-sublattice SSPT seeds.
PauliWord generate_symmetry(const RuleCatalogEntry& entry, const InitialCondition& init,
                            const LatticeSpec& lat);

struct CommutationReport {
    // Anchors of the offending objects; for symmetry checks both entries
    // name the violating term's anchor.
    std::vector<std::pair<SiteCoord, SiteCoord>> violations;
    int64_t checked = 0;

    bool ok() const { return violations.empty(); }
};

CommutationReport check_symmetry_commutes(const std::vector<HamiltonianTerm>& terms,
                                          const PauliWord& sym);

// Pairwise commutation of all terms; only pairs with overlapping support
// are examined (disjoint words commute identically).
CommutationReport check_terms_commute(const std::vector<HamiltonianTerm>& terms);

struct EdgeTriple {
    SiteCoord site;   // boundary site at level i_max
    PauliWord x, y, z;
};

// Boundary edge-mode operators of the {5,4} cluster model: one triple per
// boundary site, dressed on the parent level; the Pauli letters swap with
// the parity of i_max so that the triples commute with every bulk term.
std::vector<EdgeTriple> edge_operators(const LatticeSpec& lat);

struct MpscSupport {
    int generation = 0;
    Config2D support;
};

// n applications of the strange-correlator support map to a single
// even-level seed, truncated to the physical lattice each generation.
MpscSupport mpsc_iterate(SiteCoord seed, int n, const LatticeSpec& lat);

enum class MpscValue { PlusOne, Undecided };

// Decide whether Z on the support decomposes into Z-type stabilizers plus
// residual Z letters on the odd sublattice (where the reference product
// state is a Z eigenstate).  The anchors of the Z-type terms are the
// lexicographic maxima of their even-sublattice supports, so the F2 system
// is triangular and solved by greedy peeling.
MpscValue mpsc_evaluate(const MpscSupport& support, const std::vector<HamiltonianTerm>& terms,
                        const LatticeSpec& lat);

enum class IsotropyVerdict { Pass, Fail, CenterAmbiguous };

struct IsotropyResult {
    IsotropyVerdict verdict = IsotropyVerdict::CenterAmbiguous;
    std::string witness;  // human-readable reason for non-pass verdicts
};

// Sufficient condition for translation invariance: the hyperboloid-model
// support of the term is invariant under a lattice rotation about its
// center (SSPT: the stored center face, by 2*pi/p; SSSB: some support face
// by 2*pi/p or some vertex of a support face by 2*pi/q).  Euclidean terms
// have no distinguished hyperbolic center and return CenterAmbiguous.
IsotropyResult isotropy_check(const HamiltonianTerm& term, const LatticeSpec& lat);

}  // namespace nuca
