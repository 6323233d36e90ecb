// Exact combinatorial {p,q} tessellation, grown face by face from a root
// polygon by closing vertex rings.  The construction is pure integer
// bookkeeping; optional vertex positions on the hyperboloid are attached
// only for rendering.  This is the geometric ground truth against which the
// index-arithmetic adjacency of the spanning tree is checked, and the
// source of the {6,6} vertex-inflation boundary.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <unordered_map>
#include <vector>

#include "nuca/lattice.hpp"

namespace nuca {

class Tessellation {
  public:
    Tessellation(int p, int q);

    int p() const { return p_; }
    int q() const { return q_; }
    int face_count() const { return int(faces_.size()); }
    int vertex_count() const { return int(rings_.size()); }

    // Vertex cycle of a face, counter-clockwise.
    const std::vector<int>& face_vertices(int f) const { return faces_[size_t(f)]; }

    // Faces currently sharing an edge with f (up to p once the boundary is
    // far enough away).
    std::vector<int> face_neighbors(int f) const;

    // Rotationally ordered data around a vertex.
    const std::vector<int>& vertex_fan(int v) const { return rings_[size_t(v)].fan; }
    const std::vector<int>& vertex_ring(int v) const { return rings_[size_t(v)].nbrs; }
    bool vertex_closed(int v) const { return rings_[size_t(v)].closed; }

    // A face is interior when every one of its vertices carries the full
    // fan of q faces; only then is its neighbor list final.
    bool face_interior(int f) const;

    // Close the rings of every vertex existing at the start of the round.
    void grow_round();
    void grow_rounds(int n);

    // Faces on both sides of an edge; the second entry is -1 on the
    // construction boundary.
    std::array<int, 2> edge_faces(int a, int b) const;

    // Internal consistency check (ring sizes, edge face counts, distinct
    // face vertices); throws std::logic_error on violation.
    void validate() const;

  private:
    struct Ring {
        std::vector<int> nbrs;  // ordered neighbor vertices
        std::vector<int> fan;   // faces between consecutive neighbors
        bool closed = false;
    };

    int new_vertex();
    void attach_corner(int v, int u, int w, int f);
    int add_face(const std::vector<int>& cycle);
    void complete_vertex(int v);

    int p_, q_;
    std::vector<std::vector<int>> faces_;
    std::vector<Ring> rings_;
    std::map<std::pair<int, int>, std::array<int, 2>> edge_faces_;
    size_t next_to_complete_ = 0;
};

// One sector of the tessellation identified with the spanning-tree quarter:
// a bijection between tree sites and faces that preserves adjacency both
// ways (induced-subgraph isomorphism), anchored at the root face.
struct SectorMap {
    std::map<SiteCoord, int> site_to_face;
    std::unordered_map<int, SiteCoord> face_to_site;
    int center_vertex = -1;       // tip of the sector (lattice center)
    std::vector<int> sector_faces;  // all faces enclosed by the seam rays
};

// Delimit a sector by tracing the two seam rays from the root face and
// match every enclosed face with tree level <= max_level against the
// spanning-tree adjacency.  Throws std::runtime_error when no
// adjacency-preserving bijection exists.
SectorMap match_sector(const LatticeSpec& lat, Tessellation& tess, int max_level);

// Vertex-inflation region: faces of layer n, where layer 0 holds the q
// faces around the center vertex and layer n+1 adds every face sharing a
// vertex with layer n.
std::vector<std::vector<int>> inflation_layers(Tessellation& tess, int center_vertex, int max_layers);

// The retained {6,6} quarter region with its geometric realization: every
// spanning-tree site kept by the vertex-inflation boundary, matched to a
// face of the backing tessellation.  The exclusion mask is the complement
// of the key set.
struct Region66 {
    std::shared_ptr<Tessellation> tess;
    std::map<SiteCoord, int> site_to_face;
};

Region66 region66(const LatticeSpec& lat);

// Hyperboloid-model vertex positions (t, x, y), root face centered at the
// origin; only meaningful for hyperbolic (p-2)(q-2) > 4.
std::vector<std::array<double, 3>> embed_vertices(const Tessellation& tess);

}  // namespace nuca
