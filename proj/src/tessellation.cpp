#include "nuca/tessellation.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>
#include <functional>
#include <set>
#include <stdexcept>

namespace nuca {

// ---- combinatorial builder ----------------------------------------------

Tessellation::Tessellation(int p, int q) : p_(p), q_(q) {
    if (p < 3 || q < 3) throw std::domain_error("Tessellation: need p, q >= 3");
    std::vector<int> root;
    for (int t = 0; t < p; ++t) root.push_back(new_vertex());
    add_face(root);
}

int Tessellation::new_vertex() {
    rings_.push_back({});
    return int(rings_.size()) - 1;
}

void Tessellation::attach_corner(int v, int u, int w, int f) {
    Ring& r = rings_[size_t(v)];
    if (r.nbrs.empty()) {
        r.nbrs = {u, w};
        r.fan = {f};
        return;
    }
    if (r.closed) throw std::logic_error("attach_corner: vertex ring already closed");
    if (r.nbrs.back() == u && r.nbrs.front() == w && int(r.fan.size()) == q_ - 1) {
        r.fan.push_back(f);
        r.closed = true;
    } else if (r.nbrs.back() == u) {
        r.nbrs.push_back(w);
        r.fan.push_back(f);
    } else if (r.nbrs.front() == w) {
        r.nbrs.insert(r.nbrs.begin(), u);
        r.fan.insert(r.fan.begin(), f);
    } else {
        throw std::logic_error("attach_corner: face does not attach at a ring end");
    }
}

int Tessellation::add_face(const std::vector<int>& cycle) {
    int f = int(faces_.size());
    faces_.push_back(cycle);
    for (int t = 0; t < p_; ++t) {
        int a = cycle[size_t(t)], b = cycle[size_t((t + 1) % p_)];
        auto key = std::minmax(a, b);
        auto [it, fresh] = edge_faces_.try_emplace({key.first, key.second},
                                                   std::array<int, 2>{f, -1});
        if (!fresh) {
            if (it->second[1] != -1) throw std::logic_error("add_face: edge with three faces");
            it->second[1] = f;
        }
    }
    for (int t = 0; t < p_; ++t) {
        int u = cycle[size_t((t + p_ - 1) % p_)];
        int v = cycle[size_t(t)];
        int w = cycle[size_t((t + 1) % p_)];
        attach_corner(v, u, w, f);
    }
    return f;
}

void Tessellation::complete_vertex(int v) {
    while (!rings_[size_t(v)].closed) {
        std::vector<int> cyc(size_t(p_), -1);
        cyc[0] = rings_[size_t(v)].nbrs.back();
        cyc[1] = v;
        // Forced identifications walking forward from v: whenever the face
        // being built is the q-th one around the current corner vertex, the
        // next cycle vertex must close that ring.
        {
            int cur = v;
            int pos = 1;
            while (pos + 1 < p_) {
                const Ring& rc = rings_[size_t(cur)];
                if (rc.nbrs.empty() || int(rc.fan.size()) != q_ - 1) break;
                cyc[size_t(pos + 1)] = rc.nbrs.front();
                cur = cyc[size_t(pos + 1)];
                ++pos;
            }
        }
        // Same walking backward from the anchor neighbor.
        {
            int cur = cyc[0];
            int idx = 0;
            while (true) {
                const Ring& rc = rings_[size_t(cur)];
                if (rc.nbrs.empty() || int(rc.fan.size()) != q_ - 1) break;
                int pidx = (idx + p_ - 1) % p_;
                if (pidx <= 1) break;
                int forced = rc.nbrs.back();
                if (cyc[size_t(pidx)] != -1) {
                    if (cyc[size_t(pidx)] != forced)
                        throw std::logic_error("complete_vertex: inconsistent closure");
                    break;
                }
                cyc[size_t(pidx)] = forced;
                cur = forced;
                idx = pidx;
            }
        }
        for (int t = 0; t < p_; ++t)
            if (cyc[size_t(t)] == -1) cyc[size_t(t)] = new_vertex();
        add_face(cyc);
    }
}

void Tessellation::grow_round() {
    size_t end = rings_.size();
    while (next_to_complete_ < end) {
        complete_vertex(int(next_to_complete_));
        ++next_to_complete_;
    }
}

void Tessellation::grow_rounds(int n) {
    for (int t = 0; t < n; ++t) grow_round();
}

std::array<int, 2> Tessellation::edge_faces(int a, int b) const {
    auto key = std::minmax(a, b);
    auto it = edge_faces_.find({key.first, key.second});
    if (it == edge_faces_.end()) return {-1, -1};
    return it->second;
}

std::vector<int> Tessellation::face_neighbors(int f) const {
    std::vector<int> out;
    const auto& cyc = faces_[size_t(f)];
    for (int t = 0; t < p_; ++t) {
        auto fs = edge_faces(cyc[size_t(t)], cyc[size_t((t + 1) % p_)]);
        int other = fs[0] == f ? fs[1] : fs[0];
        if (other >= 0) out.push_back(other);
    }
    return out;
}

bool Tessellation::face_interior(int f) const {
    for (int v : faces_[size_t(f)])
        if (!rings_[size_t(v)].closed) return false;
    return true;
}

void Tessellation::validate() const {
    for (size_t v = 0; v < rings_.size(); ++v) {
        const Ring& r = rings_[v];
        if (r.fan.empty()) continue;
        if (r.closed) {
            if (int(r.fan.size()) != q_ || int(r.nbrs.size()) != q_)
                throw std::logic_error("validate: closed ring with wrong size");
        } else if (r.nbrs.size() != r.fan.size() + 1) {
            throw std::logic_error("validate: open ring size mismatch");
        }
        std::set<int> uniq(r.fan.begin(), r.fan.end());
        if (uniq.size() != r.fan.size()) throw std::logic_error("validate: duplicate fan face");
    }
    for (const auto& cyc : faces_) {
        std::set<int> uniq(cyc.begin(), cyc.end());
        if (int(uniq.size()) != p_) throw std::logic_error("validate: degenerate face");
    }
}

// ---- sector delimitation ------------------------------------------------

namespace {

struct Sector {
    int c0 = -1;
    std::set<std::pair<int, int>> seam;
    std::vector<char> in_sector;  // per face
};

std::pair<int, int> ekey(int a, int b) { return std::minmax(a, b); }

// Seam ray: geodesic continuation through vertices (straight = q/2 steps
// around each ring); traced as far as rings are closed.
void trace_ray(const Tessellation& t, int from, int to, std::set<std::pair<int, int>>& seam) {
    seam.insert(ekey(from, to));
    int prev = from, cur = to;
    while (t.vertex_closed(cur)) {
        const auto& ring = t.vertex_ring(cur);
        auto it = std::find(ring.begin(), ring.end(), prev);
        if (it == ring.end()) throw std::logic_error("trace_ray: broken ring");
        int idx = int(it - ring.begin());
        int nxt = ring[size_t((idx + t.q() / 2) % t.q())];
        seam.insert(ekey(cur, nxt));
        prev = cur;
        cur = nxt;
    }
}

Sector compute_sector(const Tessellation& t) {
    Sector s;
    const auto& root = t.face_vertices(0);
    s.c0 = root[0];
    trace_ray(t, root[0], root[1], s.seam);
    trace_ray(t, root[0], root.back(), s.seam);
    s.in_sector.assign(size_t(t.face_count()), 0);
    if (!t.face_interior(0)) return s;
    std::deque<int> todo{0};
    s.in_sector[0] = 1;
    while (!todo.empty()) {
        int f = todo.front();
        todo.pop_front();
        const auto& cyc = t.face_vertices(f);
        for (int e = 0; e < t.p(); ++e) {
            int a = cyc[size_t(e)], b = cyc[size_t((e + 1) % t.p())];
            if (s.seam.count(ekey(a, b))) continue;
            auto fs = t.edge_faces(a, b);
            int g = fs[0] == f ? fs[1] : fs[0];
            if (g >= 0 && !s.in_sector[size_t(g)] && t.face_interior(g)) {
                s.in_sector[size_t(g)] = 1;
                todo.push_back(g);
            }
        }
    }
    return s;
}

// Shared matching state between tree sites and faces.
struct MatchState {
    std::map<SiteCoord, int> site_to_face;
    std::unordered_map<int, SiteCoord> face_to_site;
    std::map<SiteCoord, std::vector<SiteCoord>> tree_adj;  // cached neighbor lists

    const std::vector<SiteCoord>& tree_neighbors(const LatticeSpec& lat, SiteCoord s) {
        auto it = tree_adj.find(s);
        if (it == tree_adj.end()) it = tree_adj.emplace(s, neighbors(lat, s)).first;
        return it->second;
    }

    bool tree_adjacent(const LatticeSpec& lat, SiteCoord a, SiteCoord b) {
        const auto& nb = tree_neighbors(lat, a);
        return std::find(nb.begin(), nb.end(), b) != nb.end();
    }

    // Both induced-isomorphism directions for a tentative pair (s, f):
    // every matched geometric neighbor of f must be a tree neighbor of s,
    // and every matched tree neighbor of s must be a geometric neighbor.
    bool consistent(const LatticeSpec& lat, const Tessellation& t, SiteCoord s, int f) {
        auto geo = t.face_neighbors(f);
        for (int g : geo) {
            auto it = face_to_site.find(g);
            if (it != face_to_site.end() && !tree_adjacent(lat, s, it->second)) return false;
        }
        for (const SiteCoord& n : tree_neighbors(lat, s)) {
            auto it = site_to_face.find(n);
            if (it == site_to_face.end()) continue;
            if (std::find(geo.begin(), geo.end(), it->second) == geo.end()) return false;
        }
        return true;
    }

    void assign(SiteCoord s, int f) {
        site_to_face[s] = f;
        face_to_site[f] = s;
    }
    void unassign(SiteCoord s, int f) {
        site_to_face.erase(s);
        face_to_site.erase(f);
    }
};

// Depth-first assignment of ordered sites to faces.  The node budget keeps
// a hopeless search (too-shallow geometry) from exploding; the caller grows
// the ball and retries.
bool match_sites(const LatticeSpec& lat, const Tessellation& t, const Sector& sec,
                 const std::vector<SiteCoord>& order, size_t pos, MatchState& st,
                 int64_t& budget) {
    if (pos == order.size()) return true;
    if (--budget < 0) return false;
    SiteCoord s = order[pos];
    // Candidate faces: unmatched in-sector interior faces adjacent to the
    // face of some matched tree neighbor.
    std::set<int> cand;
    for (const SiteCoord& n : st.tree_neighbors(lat, s)) {
        auto it = st.site_to_face.find(n);
        if (it == st.site_to_face.end()) continue;
        for (int g : t.face_neighbors(it->second)) {
            if (size_t(g) < sec.in_sector.size() && sec.in_sector[size_t(g)] &&
                !st.face_to_site.count(g) && t.face_interior(g))
                cand.insert(g);
        }
    }
    for (int f : cand) {
        if (!st.consistent(lat, t, s, f)) continue;
        st.assign(s, f);
        if (match_sites(lat, t, sec, order, pos + 1, st, budget)) return true;
        st.unassign(s, f);
    }
    return false;
}

// Around a closed vertex the q fan faces correspond to q tree sites forming
// a cycle of pairwise-consecutive neighbors.  When at least two consecutive
// fan faces are matched, enumerate the tree completions of that cycle; if
// exactly one is consistent, commit it.  Returns true when the whole fan
// ends up matched.
bool complete_fan(const LatticeSpec& lat, const Tessellation& t, const Sector& sec,
                  MatchState& st, int v) {
    if (!t.vertex_closed(v)) return false;
    const std::vector<int>& fan = t.vertex_fan(v);
    const int q = int(fan.size());
    std::vector<char> m(size_t(q), 0);
    int nmatched = 0;
    for (int k = 0; k < q; ++k) {
        m[size_t(k)] = st.face_to_site.count(fan[size_t(k)]) ? 1 : 0;
        nmatched += m[size_t(k)];
    }
    if (nmatched == q) return true;
    if (nmatched < 2) return false;
    bool consec = false;
    for (int k = 0; k < q; ++k)
        if (m[size_t(k)] && m[size_t((k + 1) % q)]) consec = true;
    if (!consec) return false;
    // Unreliable information disqualifies the vertex: fan faces outside the
    // sector belong to a mirror copy of the tree, and non-interior faces
    // have incomplete neighbor lists.
    for (int f : fan)
        if (!t.face_interior(f) || size_t(f) >= sec.in_sector.size() || !sec.in_sector[size_t(f)])
            return false;

    std::vector<SiteCoord> sites(size_t(q), SiteCoord{});
    for (int k = 0; k < q; ++k)
        if (m[size_t(k)]) sites[size_t(k)] = st.face_to_site.at(fan[size_t(k)]);
    int k0 = -1;
    for (int k = 0; k < q; ++k)
        if (m[size_t(k)]) k0 = k;

    int ncomp = 0;
    std::vector<std::pair<int, SiteCoord>> chosen, best;
    std::function<void(int)> dfs = [&](int step) {
        if (ncomp > 1) return;
        if (step == q) {
            // Cycle closure: the last position must neighbor the anchor.
            if (st.tree_adjacent(lat, sites[size_t((k0 + q - 1) % q)], sites[size_t(k0)])) {
                ++ncomp;
                if (ncomp == 1) best = chosen;
            }
            return;
        }
        int p = (k0 + step) % q, pp = (k0 + step - 1 + q) % q;
        if (m[size_t(p)]) {
            if (st.tree_adjacent(lat, sites[size_t(pp)], sites[size_t(p)])) dfs(step + 1);
            return;
        }
        for (const SiteCoord& n : st.tree_neighbors(lat, sites[size_t(pp)])) {
            if (st.site_to_face.count(n)) continue;
            bool used = false;
            for (const auto& [cp, cs] : chosen)
                if (cs == n) used = true;
            if (used) continue;
            if (!st.consistent(lat, t, n, fan[size_t(p)])) continue;
            sites[size_t(p)] = n;
            chosen.push_back({p, n});
            dfs(step + 1);
            chosen.pop_back();
        }
    };
    dfs(1);
    if (ncomp != 1) return false;
    for (const auto& [p, s] : best) st.assign(s, fan[size_t(p)]);
    return true;
}

// Match every face of an inflation layer.  Fan closures are swept to a
// fixed point; leftovers (the very first layer, seam-touching stragglers)
// fall back to a budgeted most-constrained-first search.
void match_layer(const LatticeSpec& lat, const Tessellation& t, const Sector& sec,
                 MatchState& st, const std::vector<int>& next) {
    std::set<int> remaining(next.begin(), next.end());
    auto drop_matched = [&]() {
        for (auto it = remaining.begin(); it != remaining.end();)
            it = st.face_to_site.count(*it) ? remaining.erase(it) : ++it;
    };
    drop_matched();
    for (bool progress = true; progress && !remaining.empty();) {
        progress = false;
        std::set<int> verts;
        for (int f : remaining)
            for (int v : t.face_vertices(f)) verts.insert(v);
        for (int v : verts)
            if (complete_fan(lat, t, sec, st, v)) progress = true;
        drop_matched();
    }
    if (remaining.empty()) return;

    auto candidates = [&](int f) {
        std::set<SiteCoord> cand;
        for (int g : t.face_neighbors(f)) {
            auto it = st.face_to_site.find(g);
            if (it == st.face_to_site.end()) continue;
            for (const SiteCoord& n : st.tree_neighbors(lat, it->second))
                if (!st.site_to_face.count(n)) cand.insert(n);
        }
        std::vector<SiteCoord> out;
        for (const SiteCoord& s : cand)
            if (st.consistent(lat, t, s, f)) out.push_back(s);
        return out;
    };
    std::function<bool(std::vector<int>&, int64_t&)> search = [&](std::vector<int>& todo,
                                                                  int64_t& budget) {
        if (todo.empty()) return true;
        if (--budget < 0) return false;
        size_t bestf = todo.size();
        int best_deg = -1;
        for (size_t k = 0; k < todo.size(); ++k) {
            int d = 0;
            for (int g : t.face_neighbors(todo[k])) d += st.face_to_site.count(g) ? 1 : 0;
            if (d > best_deg) {
                best_deg = d;
                bestf = k;
            }
        }
        int f = todo[bestf];
        std::swap(todo[bestf], todo.back());
        todo.pop_back();
        for (const SiteCoord& s : candidates(f)) {
            st.assign(s, f);
            if (search(todo, budget)) return true;
            st.unassign(s, f);
        }
        todo.push_back(f);
        std::swap(todo[bestf], todo.back());
        return false;
    };
    std::vector<int> todo(remaining.begin(), remaining.end());
    int64_t budget = int64_t(100000) * int64_t(todo.size() + 1);
    if (!search(todo, budget))
        throw std::runtime_error("match_layer: geometry/tree matching failed");
}

std::vector<SiteCoord> quarter_bfs_order(const LatticeSpec& lat, int max_level) {
    std::vector<SiteCoord> order;
    std::set<SiteCoord> seen;
    std::deque<SiteCoord> todo{{0, 0}};
    seen.insert({0, 0});
    while (!todo.empty()) {
        SiteCoord s = todo.front();
        todo.pop_front();
        order.push_back(s);
        for (const SiteCoord& n : neighbors(lat, s)) {
            if (n.i > max_level || seen.count(n)) continue;
            seen.insert(n);
            todo.push_back(n);
        }
    }
    return order;
}

}  // namespace

SectorMap match_sector(const LatticeSpec& lat, Tessellation& tess, int max_level) {
    LatticeSpec sub = LatticeSpec::make(lat.family, max_level);
    std::vector<SiteCoord> order = quarter_bfs_order(sub, max_level);
    int64_t expect = level_prefix(sub, max_level);
    if (int64_t(order.size()) != expect)
        throw std::runtime_error("match_sector: quarter adjacency graph is not connected");

    for (int guard = 0; guard < 4 * max_level + 20; ++guard) {
        Sector sec = compute_sector(tess);
        int64_t have = std::count(sec.in_sector.begin(), sec.in_sector.end(), char(1));
        if (have >= expect) {
            MatchState st;
            st.assign({0, 0}, 0);
            // A failure on too-shallow geometry is retried after growing the
            // ball; three consecutive failures with growing geometry mean a
            // genuine adjacency mismatch.
            bool found = false;
            for (int attempt = 0; attempt < 3 && !found; ++attempt) {
                if (attempt > 0) {
                    tess.grow_round();
                    sec = compute_sector(tess);
                }
                st = MatchState{};
                st.assign({0, 0}, 0);
                int64_t budget = 64 * int64_t(order.size()) + 100000;
                found = match_sites(sub, tess, sec, order, 1, st, budget);
            }
            if (!found)
                throw std::runtime_error(
                    "match_sector: no adjacency-preserving bijection with the geometry");
            SectorMap out;
            out.site_to_face = std::move(st.site_to_face);
            out.face_to_site = std::move(st.face_to_site);
            out.center_vertex = sec.c0;
            for (int f = 0; f < tess.face_count(); ++f)
                if (sec.in_sector[size_t(f)]) out.sector_faces.push_back(f);
            return out;
        }
        tess.grow_round();
    }
    throw std::runtime_error("match_sector: geometry did not grow to cover the quarter");
}

std::vector<std::vector<int>> inflation_layers(Tessellation& tess, int center_vertex,
                                               int max_layers) {
    while (!tess.vertex_closed(center_vertex)) tess.grow_round();
    std::vector<std::vector<int>> layers;
    std::vector<char> in(size_t(tess.face_count()), 0);
    auto note = [&](int f, std::vector<int>& layer) {
        if (size_t(f) >= in.size()) in.resize(size_t(f) + 1, 0);
        if (!in[size_t(f)]) {
            in[size_t(f)] = 1;
            layer.push_back(f);
        }
    };
    std::vector<int> first;
    for (int f : tess.vertex_fan(center_vertex)) note(f, first);
    layers.push_back(std::move(first));
    while (int(layers.size()) <= max_layers) {
        std::vector<int> next;
        for (int f : layers.back()) {
            for (int round = 0;; ++round) {
                bool ok = true;
                for (int v : tess.face_vertices(f))
                    if (!tess.vertex_closed(v)) ok = false;
                if (ok) break;
                if (round > 8) throw std::logic_error("inflation_layers: geometry too small");
                tess.grow_round();
            }
            for (int v : tess.face_vertices(f))
                for (int g : tess.vertex_fan(v)) note(g, next);
        }
        in.resize(size_t(tess.face_count()), 0);
        layers.push_back(std::move(next));
    }
    return layers;
}

// ---- hyperboloid embedding ---------------------------------------------

namespace {
using Vec3 = std::array<double, 3>;

double mink(const Vec3& a, const Vec3& b) { return a[0] * b[0] - a[1] * b[1] - a[2] * b[2]; }

Vec3 geodesic_normal(const Vec3& a, const Vec3& b) {
    Vec3 c{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
    Vec3 n{c[0], -c[1], -c[2]};
    double s = -mink(n, n);
    double inv = 1.0 / std::sqrt(s);
    return {n[0] * inv, n[1] * inv, n[2] * inv};
}

Vec3 reflect(const Vec3& x, const Vec3& n) {
    double k = 2.0 * mink(x, n);
    return {x[0] + k * n[0], x[1] + k * n[1], x[2] + k * n[2]};
}
}  // namespace

std::vector<std::array<double, 3>> embed_vertices(const Tessellation& tess) {
    const int p = tess.p(), q = tess.q();
    if ((p - 2) * (q - 2) <= 4) throw std::domain_error("embed_vertices: tessellation not hyperbolic");
    std::vector<Vec3> pos(size_t(tess.vertex_count()), Vec3{0, 0, 0});
    std::vector<char> have(size_t(tess.vertex_count()), 0);
    const double pi = std::acos(-1.0);
    // Circumradius of a regular hyperbolic p-gon with interior angle 2*pi/q,
    // from the right triangle (center, vertex, edge midpoint):
    // cosh R = cot(pi/p) cot(pi/q).
    double ch = 1.0 / (std::tan(pi / p) * std::tan(pi / q));
    double r = std::acosh(ch);
    const auto& root = tess.face_vertices(0);
    for (int t = 0; t < p; ++t) {
        double th = 2.0 * pi * t / p;
        pos[size_t(root[size_t(t)])] = {std::cosh(r), std::sinh(r) * std::cos(th),
                                        std::sinh(r) * std::sin(th)};
        have[size_t(root[size_t(t)])] = 1;
    }
    std::vector<char> done(size_t(tess.face_count()), 0);
    done[0] = 1;
    std::deque<int> todo{0};
    auto index_of = [&](const std::vector<int>& cyc, int v) {
        return int(std::find(cyc.begin(), cyc.end(), v) - cyc.begin());
    };
    while (!todo.empty()) {
        int g = todo.front();
        todo.pop_front();
        const auto& gc = tess.face_vertices(g);
        for (int e = 0; e < p; ++e) {
            int a = gc[size_t(e)], b = gc[size_t((e + 1) % p)];
            auto fs = tess.edge_faces(a, b);
            int f = fs[0] == g ? fs[1] : fs[0];
            if (f < 0 || done[size_t(f)]) continue;
            done[size_t(f)] = 1;
            todo.push_back(f);
            Vec3 n = geodesic_normal(pos[size_t(a)], pos[size_t(b)]);
            const auto& fc = tess.face_vertices(f);
            // Walk both cycles from a away from b; the reflection pairs the
            // remaining vertices in that order.
            int ga = index_of(gc, a);
            int gd = gc[size_t((ga + 1) % p)] == b ? -1 : 1;
            int fa = index_of(fc, a);
            int fd = fc[size_t((fa + 1) % p)] == b ? -1 : 1;
            for (int t = 1; t < p; ++t) {
                int gv = gc[size_t(((ga + gd * t) % p + p) % p)];
                int fv = fc[size_t(((fa + fd * t) % p + p) % p)];
                if (!have[size_t(fv)]) {
                    pos[size_t(fv)] = reflect(pos[size_t(gv)], n);
                    have[size_t(fv)] = 1;
                }
            }
        }
    }
    return pos;
}

// ---- {6,6} vertex-inflation mask ---------------------------------------

namespace detail {

// The retained {6,6} region: faces of the deepest inflation layer whose
// tree levels all fit within i_max.  Layer 0 is the ring of root hexagons
// around the lattice center; each next layer adds every hexagon sharing a
// vertex with the previous region, which is exactly the vertex-inflation
// construction (inner vertices end up with their full six hexagons).
Region66 region66_build(const LatticeSpec& lat) {
    const int L = lat.i_max;
    // Matching explores tree neighbors a few levels past the boundary.
    LatticeSpec probe = LatticeSpec::make(Family::Hyper66, std::min(L + 6, 21));
    auto tessp = std::make_shared<Tessellation>(6, 6);
    Tessellation& tess = *tessp;
    tess.grow_rounds(2);

    MatchState st;
    st.assign({0, 0}, 0);
    std::set<SiteCoord> kept{{0, 0}};
    std::vector<int> layer{0};  // in-sector part of inflation layer 0
    std::vector<char> in_region(size_t(tess.face_count()), 0);
    in_region[0] = 1;

    // Restrict the full matching (which probes past the boundary) to the
    // kept sites before returning.
    auto finish = [&]() {
        Region66 reg;
        reg.tess = tessp;
        for (const SiteCoord& s : kept) reg.site_to_face[s] = st.site_to_face.at(s);
        return reg;
    };

    while (true) {
        // Grow geometry until every vertex of the current layer is closed
        // and every face of those fans is interior (otherwise the candidate
        // faces of the next layer are invisible to the sector), then
        // recompute the sector (its seam rays lengthen with growth).
        for (int round = 0;; ++round) {
            bool ok = true;
            for (int f : layer)
                for (int v : tess.face_vertices(f)) {
                    if (!tess.vertex_closed(v)) {
                        ok = false;
                        continue;
                    }
                    for (int g : tess.vertex_fan(v))
                        if (!tess.face_interior(g)) ok = false;
                }
            if (ok) break;
            if (round > 64) throw std::logic_error("kept66: geometry failed to grow");
            if (tess.face_count() > 3000000)
                throw std::runtime_error(
                    "kept66: geometric construction exceeds the memory budget at this depth "
                    "(the vertex-inflation boundary is practical up to i_max ~ 8)");
            tess.grow_round();
        }
        Sector sec = compute_sector(tess);
        in_region.resize(size_t(tess.face_count()), 0);

        // Next in-sector layer: unvisited sector faces sharing a vertex
        // with the current region.  Seam-adjacent faces of the neighboring
        // sector are skipped; their mirror images appear via our own seam
        // faces by symmetry.
        std::vector<int> next;
        for (int f : layer)
            for (int v : tess.face_vertices(f))
                for (int g : tess.vertex_fan(v))
                    if (!in_region[size_t(g)] && sec.in_sector[size_t(g)]) {
                        in_region[size_t(g)] = 1;
                        next.push_back(g);
                    }
        if (next.empty()) return finish();  // tree exhausted below i_max

        // Match the new faces.  Blind backtracking over a layer thrashes
        // (rim faces touching a single matched face have several weakly
        // constrained candidates), so the workhorse is vertex-fan closure:
        // around a closed vertex whose fan already holds two or more
        // consecutive matched faces, the six fan sites form a cycle of
        // pairwise-consecutive tree neighbors, and completing that cycle in
        // the spanning-tree graph is (almost always) forced.  Unique
        // completions are committed and swept to a fixed point; a small
        // budgeted search mops up any leftover faces.
        match_layer(probe, tess, sec, st, next);
        std::vector<SiteCoord> order;
        for (int f : next) order.push_back(st.face_to_site.at(f));

        // The construction stops at the last layer that stays inside the
        // i_max-level tree.
        for (const SiteCoord& s : order)
            if (s.i > L) return finish();
        for (const SiteCoord& s : order) kept.insert(s);
        layer = std::move(next);
    }
}

std::set<SiteCoord> kept66(const LatticeSpec& lat) {
    Region66 reg = region66_build(lat);
    std::set<SiteCoord> kept;
    for (auto& [s, f] : reg.site_to_face) kept.insert(s);
    return kept;
}

std::set<SiteCoord> mask66(const LatticeSpec& lat) {
    std::set<SiteCoord> kept = kept66(lat);
    std::set<SiteCoord> mask;
    for (int i = 0; i <= lat.i_max; ++i)
        for (int64_t j = 0; j < level_size(lat, i); ++j)
            if (!kept.count({i, j})) mask.insert({i, j});
    return mask;
}

}  // namespace detail

Region66 region66(const LatticeSpec& lat) {
    if (lat.family != Family::Hyper66)
        throw std::domain_error("region66: only defined for the {6,6} lattice");
    return detail::region66_build(lat);
}

}  // namespace nuca
