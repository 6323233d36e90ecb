// Storage-free labelling of the {4,4}, {5,4} and {6,6} lattices.
//
// Every polygon of a lattice quarter is addressed either by its spanning-tree
// node index v = 1, 2, ... or by deformed-lattice coordinates (i, j), where i
// is the tree level and j the row index counted so that
// v = sum_{l=0}^{i} level_size(l) - j.  All relations (color, parent, child,
// neighborhood) are computed on demand from the index arithmetic; nothing is
// stored.
#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <vector>

#include "nuca/fibonacci.hpp"

namespace nuca {

enum class Family { Euclid44, Hyper54, Hyper66 };

struct LatticeSpec {
    Family family;
    int p;
    int q;
    int i_max;

    static LatticeSpec make(Family f, int i_max);
};

struct SiteCoord {
    int i;
    int64_t j;

    auto operator<=>(const SiteCoord&) const = default;
};

enum class NodeColor { White, Black };

// Number of nodes u_k on level k: A_{2k+1} for {5,4}, 7^k for {6,6},
// k+1 for {4,4}.  Throws std::out_of_range for k < 0 or k > i_max.
int64_t level_size(const LatticeSpec& lat, int k);

// S_k = sum_{l=0}^{k} u_l (node index of the last node on level k).
int64_t level_prefix(const LatticeSpec& lat, int k);

// True iff 0 <= i <= i_max and 0 <= j < u_i.  (The {6,6} vertex-inflation
// mask is applied separately; see exclusion_mask_66.)
bool is_physical(const LatticeSpec& lat, SiteCoord c);

// Node index <-> deformed coordinate, exact inverses.
SiteCoord node_to_coord(const LatticeSpec& lat, int64_t v);
int64_t coord_to_node(const LatticeSpec& lat, SiteCoord c);

// Spanning-tree node color.  {5,4}: Black iff J(j)=1; {6,6}: from the
// level generating sequences w -> wwwwwwb, b -> wwwwwbw; {4,4}: Black iff
// j >= 1.  Throws std::domain_error for non-physical sites.
NodeColor color(const LatticeSpec& lat, SiteCoord c);

// Full in-quarter adjacency set of the polygon at c (bulk degree = p);
// neighbors falling outside the quarter or beyond i_max are omitted.
std::vector<SiteCoord> neighbors(const LatticeSpec& lat, SiteCoord c);

// ---- {6,6} specifics ----------------------------------------------------

// Structural role of a node in the {6,6} spanning tree.  A white node is a
// marked-child when it is adjacent to its parent polygon, an end-child
// otherwise; leftmost/rightmost name the representation digits 2 and 1.
enum class NodeRole66 { Root, Black, Leftmost, Rightmost, Marked, Endnode };

NodeRole66 role66(int64_t v);

// Sites of levels <= i_max that fall outside the smooth vertex-inflation
// boundary and are therefore excluded from the physical {6,6} lattice.
std::set<SiteCoord> exclusion_mask_66(const LatticeSpec& lat);

}  // namespace nuca
