#include "nuca/lattice.hpp"

#include <stdexcept>

namespace nuca {

LatticeSpec LatticeSpec::make(Family f, int i_max) {
    if (i_max < 0) throw std::domain_error("LatticeSpec: i_max must be >= 0");
    switch (f) {
        case Family::Euclid44:
            return LatticeSpec{f, 4, 4, i_max};
        case Family::Hyper54:
            if (i_max > 43) throw std::overflow_error("LatticeSpec: {5,4} level sizes exceed int64 above i_max=43");
            return LatticeSpec{f, 5, 4, i_max};
        case Family::Hyper66:
            if (i_max > 21) throw std::overflow_error("LatticeSpec: {6,6} level sizes exceed int64 above i_max=21");
            return LatticeSpec{f, 6, 6, i_max};
    }
    throw std::domain_error("LatticeSpec: unknown family");
}

int64_t level_size(const LatticeSpec& lat, int k) {
    if (k < 0 || k > lat.i_max) throw std::out_of_range("level_size: level outside [0, i_max]");
    switch (lat.family) {
        case Family::Euclid44:
            return k + 1;
        case Family::Hyper54:
            return fib(2 * k + 1);
        case Family::Hyper66: {
            int64_t u = 1;
            for (int l = 0; l < k; ++l) u *= 7;
            return u;
        }
    }
    throw std::domain_error("level_size: unknown family");
}

int64_t level_prefix(const LatticeSpec& lat, int k) {
    if (k < 0 || k > lat.i_max) throw std::out_of_range("level_prefix: level outside [0, i_max]");
    switch (lat.family) {
        case Family::Euclid44:
            return int64_t(k + 1) * (k + 2) / 2;
        case Family::Hyper54:
            // 1 + A_3 + A_5 + ... + A_{2k+1} = A_{2k+2} - 1
            return fib(2 * k + 2) - 1;
        case Family::Hyper66: {
            int64_t s = 0, u = 1;
            for (int l = 0; l <= k; ++l) {
                s += u;
                u *= 7;
            }
            return s;
        }
    }
    throw std::domain_error("level_prefix: unknown family");
}

bool is_physical(const LatticeSpec& lat, SiteCoord c) {
    return c.i >= 0 && c.i <= lat.i_max && c.j >= 0 && c.j < level_size(lat, c.i);
}

SiteCoord node_to_coord(const LatticeSpec& lat, int64_t v) {
    if (v < 1 || v > level_prefix(lat, lat.i_max)) throw std::out_of_range("node_to_coord: node index outside tree");
    int i = 0;
    while (level_prefix(lat, i) < v) ++i;
    return SiteCoord{i, level_prefix(lat, i) - v};
}

int64_t coord_to_node(const LatticeSpec& lat, SiteCoord c) {
    if (!is_physical(lat, c)) throw std::domain_error("coord_to_node: non-physical site");
    return level_prefix(lat, c.i) - c.j;
}

// ---- {6,6} spanning-tree arithmetic (node-index space) ------------------
//
// The base-7 digit string of v is its representation in the splitting
// language: children of v are 7(v-1)+a for a = 2..6 together with 7v and
// 7v+1, i.e. the consecutive block [7v-5, 7v+1], and every child's tree
// parent is v.
namespace tree66 {

inline int64_t parent(int64_t v) {
    int d = int(v % 7);
    return d <= 1 ? v / 7 : v / 7 + 1;
}

inline int64_t child_rightmost(int64_t v) { return 7 * v + 1; }  // digit 1
inline int64_t child_leftmost(int64_t v) { return 7 * v - 5; }   // digit 2

bool black(int64_t v) {
    // Level sequences: a white node's children read w w w w w w b left to
    // right, a black node's read w w w w w b w; in digit terms the black
    // child of a white parent is the digit-1 child, that of a black parent
    // the digit-0 child.
    if (v == 1) return false;
    int d = int(v % 7);
    if (d >= 2) return false;
    bool parent_black = black(parent(v));
    return parent_black ? d == 0 : d == 1;
}

// Whether a white node is adjacent to its parent polygon (marked-child).
bool adjacent_to_parent(int64_t v) {
    int d = int(v % 7);
    bool pb = black(parent(v));
    // Neighbor-children of a white parent carry digits 3, 5, 0, 1; of a
    // black parent digits 2, 4, 6, 0 plus the digit-1 child.
    if (!pb) return d == 3 || d == 5 || d == 0 || d == 1;
    return d == 2 || d == 4 || d == 6 || d == 0 || d == 1;
}

}  // namespace tree66

NodeRole66 role66(int64_t v) {
    if (v < 1) throw std::domain_error("role66: node index must be >= 1");
    if (v == 1) return NodeRole66::Root;
    if (tree66::black(v)) return NodeRole66::Black;
    int d = int(v % 7);
    if (d == 2) return NodeRole66::Leftmost;
    if (d == 1) return NodeRole66::Rightmost;
    return tree66::adjacent_to_parent(v) ? NodeRole66::Marked : NodeRole66::Endnode;
}

NodeColor color(const LatticeSpec& lat, SiteCoord c) {
    if (!is_physical(lat, c)) throw std::domain_error("color: non-physical site");
    switch (lat.family) {
        case Family::Euclid44:
            return c.j >= 1 ? NodeColor::Black : NodeColor::White;
        case Family::Hyper54:
            return J54(c.j) ? NodeColor::Black : NodeColor::White;
        case Family::Hyper66:
            return tree66::black(coord_to_node(lat, c)) ? NodeColor::Black : NodeColor::White;
    }
    throw std::domain_error("color: unknown family");
}

namespace {

void push_if_physical(const LatticeSpec& lat, std::vector<SiteCoord>& out, SiteCoord c) {
    if (is_physical(lat, c)) out.push_back(c);
}

std::vector<SiteCoord> neighbors44(const LatticeSpec& lat, SiteCoord c) {
    // Quadrant grid in disguise: (i, j) is the cell (i-j, j), so a white
    // node (j=0) touches its parent, its white child and the black child,
    // while a black node touches both same-column cells and both children.
    std::vector<SiteCoord> out;
    if (c.j == 0) {
        push_if_physical(lat, out, {c.i - 1, 0});
        push_if_physical(lat, out, {c.i + 1, 0});
        push_if_physical(lat, out, {c.i + 1, 1});
    } else {
        push_if_physical(lat, out, {c.i - 1, c.j - 1});
        push_if_physical(lat, out, {c.i - 1, c.j});
        push_if_physical(lat, out, {c.i + 1, c.j});
        push_if_physical(lat, out, {c.i + 1, c.j + 1});
    }
    return out;
}

std::vector<SiteCoord> neighbors54(const LatticeSpec& lat, SiteCoord c) {
    // Table-derived relation transported to deformed coordinates, where the
    // node order within a level is reversed (v = S_i - j):
    //   black v: p(v), p(v)-1, c(v), c(v)+1, c(v)+2
    //   white v: p(v), c(v)-1, c(v), c(v)+1, c(v)+2
    std::vector<SiteCoord> out;
    int64_t P = P54(c.j), C = C54(c.j);
    if (c.i >= 1) {
        push_if_physical(lat, out, {c.i - 1, P});
        if (J54(c.j)) push_if_physical(lat, out, {c.i - 1, P + 1});
    }
    if (!J54(c.j)) push_if_physical(lat, out, {c.i + 1, C + 1});
    push_if_physical(lat, out, {c.i + 1, C});
    push_if_physical(lat, out, {c.i + 1, C - 1});
    push_if_physical(lat, out, {c.i + 1, C - 2});
    return out;
}

std::vector<SiteCoord> neighbors66(const LatticeSpec& lat, SiteCoord c) {
    using namespace tree66;
    const int64_t v = coord_to_node(lat, c);
    const int64_t vmax = level_prefix(lat, lat.i_max);
    std::vector<int64_t> nb;
    auto add = [&](int64_t u) {
        if (u >= 1 && u <= vmax) nb.push_back(u);
    };
    auto add_children_white = [&](int64_t u) {
        // N_w(v): digit-3 and digit-5 children of v-1, digit-0 and digit-1
        // children of v.
        add(7 * u - 4);
        add(7 * u - 2);
        add(7 * u);
        add(7 * u + 1);
    };
    switch (role66(v)) {
        case NodeRole66::Root:
            add_children_white(v);
            break;
        case NodeRole66::Black:
            add(7 * v - 5);
            add(7 * v - 3);
            add(7 * v - 1);
            add(7 * v);
            add(7 * v + 1);
            add(parent(v));
            break;
        case NodeRole66::Leftmost: {
            add_children_white(v);
            // Parent-search path: ascend while the representation ends in 2.
            int64_t mu = v;
            int l = 0;
            while (mu > 1 && mu % 7 == 2) {
                mu = parent(mu);
                ++l;
            }
            int64_t mu_minus = mu - 1;
            if (mu_minus >= 1 && mu % 7 != 2) {
                bool mu_minus_black = black(mu_minus);
                if (!mu_minus_black) {
                    if (black(mu)) {
                        // lateral c_R^{2l}(mu-1); third neighbor p(v) when
                        // l = 1, v+1 otherwise
                        int64_t lat_node = mu_minus;
                        for (int s = 0; s < 2 * l; ++s) lat_node = child_rightmost(lat_node);
                        add(lat_node);
                        add(l == 1 ? parent(v) : v + 1);
                    } else if (adjacent_to_parent(mu)) {
                        int64_t lat_node = mu_minus;
                        for (int s = 0; s < 2 * l; ++s) lat_node = child_rightmost(lat_node);
                        add(lat_node);
                        add(v + 1);
                    } else {
                        int64_t lat_node = mu_minus;
                        for (int s = 0; s < 2 * l + 2; ++s) lat_node = child_rightmost(lat_node);
                        add(lat_node);
                        add(v + 1);
                    }
                } else if (!black(mu)) {
                    int64_t lat_node = mu_minus;
                    for (int s = 0; s < 2 * l - 1; ++s) lat_node = child_rightmost(lat_node);
                    add(lat_node);
                    add(v + 1);
                }
            } else {
                // Path ran into the quarter seam; only the successor link
                // survives inside the quarter.
                add(v + 1);
            }
            break;
        }
        case NodeRole66::Rightmost: {
            add_children_white(v);
            add(parent(v));
            int64_t mu = v;
            int l = 0;
            while (mu > 1 && mu % 7 == 1) {
                mu = parent(mu);
                ++l;
            }
            if (mu >= 1 && mu % 7 != 1) {
                int64_t mu_plus = mu + 1;
                int e = -1;
                if (black(mu)) {
                    e = (l + 1) / 2;  // mu black, mu+1 white
                } else if (black(mu_plus)) {
                    e = l / 2;  // mu white, mu+1 black
                } else if (adjacent_to_parent(mu)) {
                    e = l / 2 - 1;  // mu marked, mu+1 endnode
                } else {
                    e = l / 2;  // mu endnode, mu+1 marked
                }
                if (e >= 0) {
                    int64_t lat_node = mu_plus;
                    for (int s = 0; s < e; ++s) lat_node = child_leftmost(lat_node);
                    add(lat_node);
                }
            }
            break;
        }
        case NodeRole66::Marked:
            add_children_white(v);
            add(parent(v));
            add(v - 1);
            break;
        case NodeRole66::Endnode:
            add_children_white(v);
            add(v + 1);
            add(child_rightmost(child_rightmost(v - 1)));
            break;
    }
    std::vector<SiteCoord> out;
    out.reserve(nb.size());
    for (int64_t u : nb) out.push_back(node_to_coord(lat, u));
    return out;
}

}  // namespace

// Defined in tessellation.cpp: vertex-closure layers of the exact
// combinatorial tessellation select the kept region.
namespace detail {
std::set<SiteCoord> mask66(const LatticeSpec& lat);
}

std::set<SiteCoord> exclusion_mask_66(const LatticeSpec& lat) {
    if (lat.family != Family::Hyper66)
        throw std::domain_error("exclusion_mask_66: lattice is not {6,6}");
    return detail::mask66(lat);
}

std::vector<SiteCoord> neighbors(const LatticeSpec& lat, SiteCoord c) {
    if (!is_physical(lat, c)) throw std::domain_error("neighbors: non-physical site");
    switch (lat.family) {
        case Family::Euclid44:
            return neighbors44(lat, c);
        case Family::Hyper54:
            return neighbors54(lat, c);
        case Family::Hyper66:
            return neighbors66(lat, c);
    }
    throw std::domain_error("neighbors: unknown family");
}

}  // namespace nuca
