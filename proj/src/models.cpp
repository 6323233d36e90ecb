#include "nuca/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "nuca/fibonacci.hpp"
#include "nuca/tessellation.hpp"

namespace nuca {
namespace {

using KD = std::set<std::pair<int64_t, int>>;  // (look-back k, level offset d)

// XOR a coupling into the set: coefficients are mod 2, so a monomial that
// appears twice cancels.
void tgl(KD& s, int64_t k, int d) {
    if (k < 1) throw std::logic_error("update rule produced a non-positive look-back");
    auto [it, inserted] = s.insert({k, d});
    if (!inserted) s.erase(it);
}

std::vector<std::pair<int, Poly2>> emit(const KD& kd) {
    std::vector<std::pair<int, Poly2>> out;
    for (const auto& [k, d] : kd) {
        if (out.empty() || out.back().first != int(k)) out.push_back({int(k), Poly2{}});
        out.back().second.exponents.push_back(d);
    }
    return out;
}

bool site_in_range(const LatticeSpec& lat, SiteCoord c) {
    return c.i >= 0 && c.i <= lat.i_max && c.j >= 0 && c.j < level_size(lat, c.i);
}

// ---- nontrivial-anchor sets of the {5,4} rules -------------------------

bool in_s1(const LatticeSpec& lat, SiteCoord c) {  // cluster-54
    return site_in_range(lat, c) && c.i >= 2 && c.j >= 3 &&
           c.j <= level_size(lat, c.i) - 2 && J54(c.j) == 1;
}

bool in_s2(const LatticeSpec& lat, SiteCoord c) {  // reg1-54 and tree-54
    return site_in_range(lat, c) && c.i >= 2 && c.j >= 2 &&
           c.j <= level_size(lat, c.i) - 2 && J54(c.j) == 1;
}

bool in_s3(const LatticeSpec& lat, SiteCoord c) {  // reg2-54
    return site_in_range(lat, c) && c.i >= 3 && c.j >= 6 &&
           c.j <= level_size(lat, c.i) - 8 && J54(c.j) == 1 && J54(P54(c.j) + 1) == 1;
}

bool in_sspt2(const LatticeSpec& lat, SiteCoord c) {
    if (!site_in_range(lat, c) || c.i < 3) return false;
    int64_t p3 = P54(P54(P54(c.j)));
    return p3 >= 3 && p3 <= level_size(lat, c.i - 3) - 4;
}

// Keep only the couplings whose target is an in-lattice anchor of the
// model's nontrivial set; this is exactly the condition under which the
// target's transposed rule gathers back, so the rule pair stays dual.
std::vector<std::pair<int, Poly2>> scatter54(const LatticeSpec& lat, SiteCoord c,
                                             const std::vector<std::pair<int64_t, int>>& cand,
                                             bool (*in_s)(const LatticeSpec&, SiteCoord)) {
    KD kd;
    for (auto [k, d] : cand) {
        if (k < 1) continue;
        SiteCoord t{c.i + d, c.j + k};
        if (t.i > lat.i_max || !site_in_range(lat, t)) continue;
        if (!in_s(lat, t)) continue;
        tgl(kd, k, d);
    }
    return emit(kd);
}

// ---- cluster-54 --------------------------------------------------------

std::vector<std::pair<int, Poly2>> cluster54_t(const LatticeSpec& lat, SiteCoord c) {
    if (!in_s1(lat, c)) return {};
    int64_t j = c.j, p = P54(j), p2 = P54(p);
    KD kd;
    tgl(kd, 1, 0);
    tgl(kd, 2, 0);
    if (!J54(p)) tgl(kd, 3, 0);
    tgl(kd, j - p2, -2);
    if (J54(p)) tgl(kd, j - p2 - 1, -2);
    return emit(kd);
}

std::vector<std::pair<int, Poly2>> cluster54_f(const LatticeSpec& lat, SiteCoord c) {
    if (!site_in_range(lat, c)) return {};
    int64_t j = c.j, A = level_size(lat, c.i);
    int64_t C2 = C54(C54(j));
    std::vector<std::pair<int64_t, int>> cand;
    if (c.i == 0 && j == 0) {
        cand.push_back({C2 + 1 - j, 2});
    } else if (j == 0) {
        cand.push_back({C2 - j + 1, 2});
        cand.push_back({C2 - j + 3, 2});
    } else if (j <= A - 3) {
        if (J54(j + 1)) cand.push_back({1, 0});
        if (J54(j + 2)) cand.push_back({2, 0});
        if (J54(j) && J54(j + 3)) cand.push_back({3, 0});
        cand.push_back({C2 - j - 5, 2});
        cand.push_back({C2 - j - 2, 2});
        if (J54(j)) {
            cand.push_back({C2 - j, 2});
        } else {
            cand.push_back({C2 - j + 1, 2});
            cand.push_back({C2 - j + 3, 2});
        }
    } else {  // last two rows of the level
        cand.push_back({C2 - j - 5, 2});
        cand.push_back({C2 - j - 2, 2});
        if (!J54(j)) {
            cand.push_back({C2 - j + 1, 2});
            cand.push_back({C2 - j + 3, 2});
        }
    }
    return scatter54(lat, c, cand, in_s1);
}

// ---- reg1-54 (four qubits around a vertex) -----------------------------

std::vector<std::pair<int, Poly2>> reg1_t(const LatticeSpec& lat, SiteCoord c) {
    if (!in_s2(lat, c)) return {};
    int64_t j = c.j, p = P54(j);
    KD kd;
    tgl(kd, j - p - 1, -1);
    tgl(kd, j - p, -1);
    tgl(kd, j - P54(p + 1), -2);
    return emit(kd);
}

std::vector<std::pair<int, Poly2>> reg1_f(const LatticeSpec& lat, SiteCoord c) {
    if (!site_in_range(lat, c)) return {};
    int64_t j = c.j, A = level_size(lat, c.i);
    int64_t C1 = C54(j), C2 = C54(C1);
    std::vector<std::pair<int64_t, int>> cand;
    if (c.i == 0 && j == 0) {
        cand.push_back({C2 + 1 - j, 2});
        cand.push_back({C2 - 2 - j, 2});
    } else if (j == 0) {
        cand.push_back({C1 + 1 - j, 1});
        cand.push_back({C2 - 2 - j, 2});
        cand.push_back({C2 + 1 - j, 2});
    } else if (j == A - 1) {
        cand.push_back({C1 - 2 - j, 1});
        cand.push_back({C2 - 5 - j, 2});
        cand.push_back({C2 - 2 - j, 2});
    } else {
        cand.push_back({C1 - 2 - j, 1});
        if (J54(j)) cand.push_back({C1 - j, 1});
        else cand.push_back({C1 + 1 - j, 1});
        cand.push_back({C2 - 5 - j, 2});
        cand.push_back({C2 - 2 - j, 2});
        if (!J54(j)) cand.push_back({C2 + 1 - j, 2});
    }
    return scatter54(lat, c, cand, in_s2);
}

// ---- reg2-54 (qubit with its five next-nearest neighbors) --------------

std::vector<std::pair<int, Poly2>> reg2_t(const LatticeSpec& lat, SiteCoord c) {
    if (!in_s3(lat, c)) return {};
    int64_t j = c.j, p = P54(j), r = P54(p + 1);
    KD kd;
    tgl(kd, 3, 0);
    if (!J54(r)) tgl(kd, 6, 0);
    tgl(kd, j - r - 1, -2);
    tgl(kd, j - r, -2);
    tgl(kd, j - r + 1, -2);
    if (J54(r)) tgl(kd, j - P54(P54(r + 1)), -4);
    return emit(kd);
}

std::vector<std::pair<int, Poly2>> reg2_f(const LatticeSpec& lat, SiteCoord c) {
    if (!site_in_range(lat, c)) return {};
    int64_t j = c.j;
    int64_t C1 = C54(j), C2 = C54(C1), C3 = C54(C2), C4 = C54(C3);
    std::vector<std::pair<int64_t, int>> cand;
    if (J54(j)) {
        int jp = J54(P54(j)), jp1 = J54(P54(j) + 1), jpp = J54(P54(P54(j) + 1));
        if (((1 - jp) * (1 - jp1) + jp * (1 - jp1) * jpp) % 2) cand.push_back({3, 0});
        if (jp && !jp1 && !jpp) cand.push_back({6, 0});
        cand.push_back({C2 + 6 - j, 2});
        cand.push_back({C2 - 2 - j, 2});
        cand.push_back({C2 - 7 - j, 2});
        cand.push_back({C4 - 15 - j, 4});
        cand.push_back({C4 - 36 - j, 4});
    } else {
        if (J54(j + 1)) cand.push_back({C2 + 6 - j, 2});
        else cand.push_back({C2 + 9 - j, 2});
        cand.push_back({C2 + 1 - j, 2});
        cand.push_back({C2 - 7 - j, 2});
        cand.push_back({C4 + 6 - j, 4});
        cand.push_back({C4 - 15 - j, 4});
        cand.push_back({C4 - 36 - j, 4});
    }
    return scatter54(lat, c, cand, in_s3);
}

// ---- tree-54 (directed tree coupling, not translation invariant) -------

std::vector<std::pair<int, Poly2>> tree_t(const LatticeSpec& lat, SiteCoord c) {
    if (!in_s2(lat, c)) return {};
    int64_t j = c.j, p = P54(j);
    KD kd;
    tgl(kd, j - p - 1, -1);
    tgl(kd, j - p, -1);
    return emit(kd);
}

std::vector<std::pair<int, Poly2>> tree_f(const LatticeSpec& lat, SiteCoord c) {
    if (!site_in_range(lat, c)) return {};
    int64_t j = c.j, A = level_size(lat, c.i);
    int64_t C1 = C54(j);
    std::vector<std::pair<int64_t, int>> cand;
    if (c.i == 0 && j == 0) {
        // the root feeds nothing: its children rows fall outside the set
    } else if (j == 0) {
        cand.push_back({C1 + 1 - j, 1});
    } else if (j == A - 1) {
        cand.push_back({C1 - 2 - j, 1});
    } else {
        cand.push_back({C1 - 2 - j, 1});
        if (J54(j)) cand.push_back({C1 - j, 1});
        else cand.push_back({C1 + 1 - j, 1});
    }
    return scatter54(lat, c, cand, in_s2);
}

// ---- sspt2-54 (three-level bracket, Fibonacci-word case analysis) ------

std::vector<std::pair<int, Poly2>> sspt2_t(const LatticeSpec& lat, SiteCoord c) {
    if (!in_sspt2(lat, c)) return {};
    int64_t j = c.j;
    int64_t p1 = P54(j), p2 = P54(p1), p3 = P54(p2), p4 = P54(p3), p5 = P54(p4);
    int x1 = J54(p3), x2 = J54(p4 + 1), x3 = J54(p4);
    int64_t k0 = j - p2;  // base look-back of the two-level couplings
    int64_t k4 = j - p4;  // base look-back of the four-level couplings
    KD kd;
    tgl(kd, 2, 0);
    tgl(kd, 8, 0);
    tgl(kd, 10, 0);
    if (!x1) {
        tgl(kd, 16, 0);
        tgl(kd, 18, 0);
    }
    if (x1) tgl(kd, k0 + 4, -2);
    else tgl(kd, k0 + 3, -2);
    tgl(kd, k0 + 2, -2);
    tgl(kd, k0 + 1, -2);
    tgl(kd, k0, -2);
    tgl(kd, k0 - 1, -2);
    tgl(kd, k0 - 2, -2);
    if (x1) tgl(kd, k0 - 4, -2);
    if (!x1 && !x3) {
        // the preferred child of p4 is either p3 itself or its successor
        if (C54(p4) != p3) {
            tgl(kd, k4 + 1, -4);
            tgl(kd, k0 - 4, -2);
        } else {
            tgl(kd, k4 - 1, -4);
            tgl(kd, k0 + 5, -2);
        }
    }
    tgl(kd, k4, -4);
    if (x1) tgl(kd, k4 - 1, -4);
    if (!x1 && x3) {
        tgl(kd, k4 - 1, -4);
        tgl(kd, k4 + 1, -4);
    }
    if (x1 && ((x2 + x3) % 2)) tgl(kd, j - P54(p5 + 1), -6);
    if (x1 && !x2) tgl(kd, k4 - 2, -4);
    if (x1 && !x3) tgl(kd, k4 + 1, -4);
    return emit(kd);
}

const std::vector<std::pair<int, Poly2>>& sspt2_t_cached(const LatticeSpec& lat, SiteCoord c) {
    // The transposed rule depends on the lattice only through the level
    // bound, which every caller respects, so a per-site cache is safe.
    thread_local std::map<SiteCoord, std::vector<std::pair<int, Poly2>>> cache;
    auto it = cache.find(c);
    if (it == cache.end()) it = cache.emplace(c, sspt2_t(lat, c)).first;
    return it->second;
}

// Smallest index in [0, n] whose monotone image reaches the target.
template <class F>
int64_t first_reaching(int64_t n, int64_t target, F&& f) {
    int64_t lo = 0, hi = n;
    while (lo < hi) {
        int64_t mid = lo + (hi - lo) / 2;
        if (f(mid) >= target) hi = mid;
        else lo = mid + 1;
    }
    return lo;
}

// The forward rule is the exact adjoint of the transposed rule: for each
// admissible level offset, invert the monotone anchor-to-source row maps to
// bracket the candidate anchors and keep those that gather from this site.
std::vector<std::pair<int, Poly2>> sspt2_f(const LatticeSpec& lat, SiteCoord c) {
    if (!site_in_range(lat, c)) return {};
    auto p2f = [](int64_t t) { return P54(P54(t)); };
    auto p4f = [](int64_t t) { return P54(P54(P54(P54(t)))); };
    auto g6f = [](int64_t t) {
        for (int r = 0; r < 5; ++r) t = P54(t);
        return P54(t + 1);
    };
    KD kd;
    for (int d : {0, 2, 4, 6}) {
        int ti = c.i + d;
        if (ti > lat.i_max) continue;
        int64_t A = level_size(lat, ti);
        int64_t lo, hi;
        if (d == 0) {
            lo = c.j + 1;
            hi = c.j + 19;
        } else if (d == 2) {
            lo = first_reaching(A, c.j - 5, p2f);
            hi = first_reaching(A, c.j + 7, p2f) - 1;
        } else if (d == 4) {
            lo = first_reaching(A, c.j - 3, p4f);
            hi = first_reaching(A, c.j + 4, p4f) - 1;
        } else {
            lo = first_reaching(A, c.j - 1, g6f);
            hi = first_reaching(A, c.j + 2, g6f) - 1;
        }
        lo = std::max(lo, c.j + 1);
        hi = std::min(hi, A - 1);
        for (int64_t ja = lo; ja <= hi; ++ja) {
            int64_t k = ja - c.j;
            for (const auto& [kk, poly] : sspt2_t_cached(lat, {ti, ja}))
                if (kk == k && poly.contains(-d)) tgl(kd, k, d);
        }
    }
    return emit(kd);
}

// ---- {4,4} uniform rules ------------------------------------------------

// The published rules use quadrant coordinates (m, t) with m the column
// offset; the engine's level coordinates are (i, j) = (m + t, t), so a
// feed by x^d y^k shifts the level by d + k.
UpdateRule make44(const std::string& name, std::vector<Poly2> f) {
    int n = int(f.size());
    UpdateRule r;
    r.name = name;
    r.transposed = [f, n](const LatticeSpec& lat, SiteCoord c) {
        std::vector<std::pair<int, Poly2>> out;
        if (!site_in_range(lat, c) || c.j < n) return out;
        for (int k = 1; k <= n; ++k) {
            const Poly2& fk = f[size_t(k - 1)];
            if (fk.zero()) continue;
            Poly2 q;
            for (auto it = fk.exponents.rbegin(); it != fk.exponents.rend(); ++it)
                q.exponents.push_back(-*it - k);
            out.push_back({k, q});
        }
        return out;
    };
    r.forward = [f, n](const LatticeSpec& lat, SiteCoord c) {
        std::vector<std::pair<int, Poly2>> out;
        if (!site_in_range(lat, c)) return out;
        for (int k = 1; k <= n; ++k) {
            const Poly2& fk = f[size_t(k - 1)];
            if (fk.zero() || c.j + k < n) continue;
            Poly2 q;
            for (int d : fk.exponents) q.exponents.push_back(d + k);
            out.push_back({k, q});
        }
        return out;
    };
    return r;
}

// ---- {6,6} cluster model, built from the matched geometry ---------------

uint64_t hkey(SiteCoord c) { return (uint64_t(uint32_t(c.i)) << 44) | uint64_t(c.j); }

struct Cluster66State {
    std::set<SiteCoord> kept;
    std::unordered_set<uint64_t> kept_h, anchor_h;
    std::map<SiteCoord, int> cls;  // bipartition class, root = 0
    struct Term {
        SiteCoord center, anchor;
        std::vector<SiteCoord> bracket;  // the six neighbors of the center
    };
    std::map<SiteCoord, Term> by_anchor, by_center;
    int64_t j_top = 0;
    Region66 region;
};

std::shared_ptr<const Cluster66State> cluster66_state(const LatticeSpec& lat) {
    if (lat.family != Family::Hyper66)
        throw std::domain_error("cluster-66 rule evaluated on a non-{6,6} lattice");
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const Cluster66State>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto hit = cache.find(lat.i_max);
    if (hit != cache.end()) return hit->second;

    auto st = std::make_shared<Cluster66State>();
    st->region = region66(lat);
    for (const auto& [s, f] : st->region.site_to_face) {
        st->kept.insert(s);
        st->kept_h.insert(hkey(s));
        st->j_top = std::max(st->j_top, s.j);
    }
    // Two-color the kept region; hexagon adjacency is bipartite because
    // every elementary face cycle (around a vertex) has even length q = 6.
    st->cls[{0, 0}] = 0;
    std::vector<SiteCoord> todo{{0, 0}};
    while (!todo.empty()) {
        SiteCoord cur = todo.back();
        todo.pop_back();
        for (const auto& n : neighbors(lat, cur)) {
            if (!st->kept_h.count(hkey(n))) continue;
            auto it = st->cls.find(n);
            if (it == st->cls.end()) {
                st->cls[n] = 1 - st->cls.at(cur);
                todo.push_back(n);
            } else if (it->second == st->cls.at(cur)) {
                throw std::logic_error("{6,6} adjacency is not bipartite");
            }
        }
    }
    // One term per hexagon whose full neighborhood is retained; the anchor
    // is the neighbor with the strictly largest row index.
    for (const SiteCoord& ctr : st->kept) {
        auto nb = neighbors(lat, ctr);
        if (nb.size() != 6) continue;
        bool all_kept = true;
        for (const auto& n : nb)
            if (!st->kept_h.count(hkey(n))) all_kept = false;
        if (!all_kept) continue;
        SiteCoord a = nb[0];
        for (const auto& n : nb)
            if (n.j > a.j) a = n;
        for (const auto& n : nb)
            if (!(n == a) && n.j == a.j)
                throw std::logic_error("{6,6} cluster term without a unique top row");
        if (st->by_anchor.count(a))
            throw std::logic_error("{6,6} cluster anchors collide");
        Cluster66State::Term t{ctr, a, nb};
        st->by_anchor[a] = t;
        st->by_center[ctr] = t;
        st->anchor_h.insert(hkey(a));
    }
    cache[lat.i_max] = st;
    return st;
}

std::vector<std::pair<int, Poly2>> cluster66_t(const LatticeSpec& lat, SiteCoord c) {
    auto st = cluster66_state(lat);
    if (!st->anchor_h.count(hkey(c)) || !st->by_anchor.count(c)) return {};
    const auto& t = st->by_anchor.at(c);
    KD kd;
    for (const auto& n : t.bracket)
        if (!(n == c)) tgl(kd, c.j - n.j, n.i - c.i);
    return emit(kd);
}

std::vector<std::pair<int, Poly2>> cluster66_f(const LatticeSpec& lat, SiteCoord c) {
    auto st = cluster66_state(lat);
    if (!st->kept_h.count(hkey(c))) return {};
    KD kd;
    for (const auto& n : neighbors(lat, c)) {
        auto it = st->by_center.find(n);
        if (it == st->by_center.end()) continue;
        const SiteCoord& a = it->second.anchor;
        if (a == c) continue;
        tgl(kd, a.j - c.j, a.i - c.i);
    }
    return emit(kd);
}

// ---- initial-condition helpers -----------------------------------------

NamedInit fixed_init(const std::string& name, std::vector<SiteCoord> sites) {
    return {name, [sites](const LatticeSpec& lat) {
                Config2D c;
                for (const auto& s : sites)
                    if (is_physical(lat, s)) c.set(s);
                return c;
            }};
}

// Seed rows [L_t(j0), U_t(j0)] at level base + t for every t >= 1, where
// L and U iterate the Beatty maps L -> floor(phi^2 L), U -> floor(phi^2
// (U + 1)); only rows passing the keep predicate are set.
void add_windows(Config2D& c, const LatticeSpec& lat, int base, int64_t j0,
                 const std::function<bool(int64_t)>& keep) {
    int64_t lw = j0, uw = j0;
    for (int i = base + 1; i <= lat.i_max; ++i) {
        lw = beatty_floor_mul(lw);
        uw = beatty_floor_mul(uw + 1);
        int64_t top = std::min(uw, level_size(lat, i) - 1);
        for (int64_t j = lw; j <= top; ++j)
            if (keep(j)) c.set({i, j});
    }
}

std::function<bool(const LatticeSpec&, SiteCoord)> default_seedable(const UpdateRule& rule) {
    auto tr = rule.transposed;
    return [tr](const LatticeSpec& lat, SiteCoord c) {
        if (!is_physical(lat, c)) return false;
        return tr(lat, c).empty();
    };
}

std::vector<RuleCatalogEntry> build_catalog() {
    std::vector<RuleCatalogEntry> reg;

    auto notJ = [](int64_t j) { return J54(j) == 0; };

    {  // cluster-54
        RuleCatalogEntry e;
        e.name = "cluster-54";
        e.family = Family::Hyper54;
        e.model_class = ModelClass::SSPT;
        e.rule = {e.name, cluster54_f, cluster54_t};
        e.seedable = default_seedable(e.rule);
        e.initial_conditions = {fixed_init("q1", {{0, 0}}), fixed_init("q2", {{2, 2}}),
                                fixed_init("q3", {{2, 0}}), fixed_init("q4", {{4, 2}})};
        e.center_of = [](const LatticeSpec&, SiteCoord c) {
            return SiteCoord{c.i - 1, P54(c.j)};
        };
        reg.push_back(e);
    }
    {  // sspt2-54
        RuleCatalogEntry e;
        e.name = "sspt2-54";
        e.family = Family::Hyper54;
        e.model_class = ModelClass::SSPT;
        e.rule = {e.name, sspt2_f,
                  [](const LatticeSpec& lat, SiteCoord c) { return sspt2_t_cached(lat, c); }};
        e.seedable = default_seedable(e.rule);
        e.initial_conditions = {fixed_init("q1", {{0, 0}}), fixed_init("q2", {{2, 2}, {2, 5}}),
                                fixed_init("q3", {{1, 0}, {1, 2}}),
                                fixed_init("q4", {{3, 6}, {3, 7}})};
        e.center_of = [](const LatticeSpec&, SiteCoord c) {
            return SiteCoord{c.i - 3, P54(P54(P54(c.j)))};
        };
        // One Hamiltonian term per center.  All ~phi^6 anchors of a
        // P^3-fiber share the same center, but the gates of the deep
        // couplings are constant on the fiber while the same-level
        // couplings shift row by row, so a term at every anchor cannot
        // balance center-vs-bracket overlaps (verified: ~8% of pairs
        // anticommute).  Exactly one anchor per fiber closes into the
        // rotation-symmetric 16-site patch (center, its full neighbor
        // ring, and two 5-orbits at graph distance 3); with that anchor,
        // j* = C^3(m) + 3 - 8 J(m) for center row m, all pairs commute
        // and every term passes the isotropy check (i_max <= 9).
        e.term_anchor = [](const LatticeSpec&, SiteCoord c) {
            int64_t m = P54(P54(P54(c.j)));
            int64_t js = C54(C54(C54(m))) + 3 - 8 * J54(m);
            return c.j == js;
        };
        reg.push_back(e);
    }
    {  // reg1-54
        RuleCatalogEntry e;
        e.name = "reg1-54";
        e.family = Family::Hyper54;
        e.model_class = ModelClass::SSSB;
        e.rule = {e.name, reg1_f, reg1_t};
        e.seedable = default_seedable(e.rule);
        e.initial_conditions = {
            {"q1",
             [notJ](const LatticeSpec& lat) {
                 Config2D c;
                 c.set({1, 1});
                 add_windows(c, lat, 1, 1, notJ);
                 return c;
             }},
            {"q2",
             [notJ](const LatticeSpec& lat) {
                 Config2D c;
                 c.set({2, 1});
                 add_windows(c, lat, 2, 1, notJ);
                 if (is_physical(lat, {2, 6})) c.set({2, 6});
                 add_windows(c, lat, 2, 6, notJ);
                 return c;
             }},
            fixed_init("q3", {{1, 1}}),
            fixed_init("q4", {{2, 3}, {2, 4}})};
        reg.push_back(e);
    }
    {  // reg2-54
        RuleCatalogEntry e;
        e.name = "reg2-54";
        e.family = Family::Hyper54;
        e.model_class = ModelClass::SSSB;
        e.rule = {e.name, reg2_f, reg2_t};
        e.seedable = default_seedable(e.rule);
        e.initial_conditions = {
            {"q1",
             [](const LatticeSpec& lat) {
                 Config2D c;
                 c.set({1, 1});
                 add_windows(c, lat, 1, 1, [](int64_t j) {
                     return !(J54(j) == 1 && J54(P54(j) + 1) == 1);
                 });
                 return c;
             }},
            fixed_init("q2", {{1, 1}}),
            fixed_init("q3", {{3, 7}}),
            fixed_init("q4", {{2, 3}, {2, 4}})};
        reg.push_back(e);
    }
    {  // tree-54
        RuleCatalogEntry e;
        e.name = "tree-54";
        e.family = Family::Hyper54;
        e.model_class = ModelClass::SSSB;
        e.rule = {e.name, tree_f, tree_t};
        e.seedable = default_seedable(e.rule);
        e.initial_conditions = {fixed_init("q1", {{1, 1}}),
                                fixed_init("q2", {{1, 1}, {2, 3}, {2, 4}}),
                                fixed_init("q3", {{2, 3}, {2, 4}}),
                                fixed_init("q4", {{1, 1}, {2, 6}})};
        reg.push_back(e);
    }
    {  // cluster-66
        RuleCatalogEntry e;
        e.name = "cluster-66";
        e.family = Family::Hyper66;
        e.model_class = ModelClass::SSPT;
        e.rule = {e.name, cluster66_f, cluster66_t};
        e.seedable = [](const LatticeSpec& lat, SiteCoord c) {
            if (!is_physical(lat, c)) return false;
            auto st = cluster66_state(lat);
            return st->kept_h.count(hkey(c)) && !st->anchor_h.count(hkey(c));
        };
        e.initial_conditions = {fixed_init("q1", {{0, 0}}),
                                fixed_init("q2", {{0, 0}, {1, 2}, {2, 21}}),
                                fixed_init("q3", {{1, 1}}), fixed_init("q4", {{1, 1}, {1, 3}})};
        e.center_of = [](const LatticeSpec& lat, SiteCoord c) {
            return cluster66_state(lat)->by_anchor.at(c).center;
        };
        reg.push_back(e);
    }

    struct E44 {
        const char* name;
        std::vector<Poly2> f;
        std::vector<Poly2> q;
    };
    const std::vector<E44> euclid = {
        {"euclid-regular-44", {Poly2{}, Poly2{-2, 2}, Poly2{}, Poly2{0}},
         {Poly2{}, Poly2{0}, Poly2{}, Poly2{2}}},
        {"euclid-fractal-44", {Poly2{}, Poly2{0, 2}}, {Poly2{0}, Poly2{}}},
        {"euclid-mixed-44", {Poly2{}, Poly2{-2, 0, 2}, Poly2{}, Poly2{0, 2}},
         {Poly2{}, Poly2{}, Poly2{}, Poly2{-2, 0, 2}}},
        {"euclid-chaotic-44", {Poly2{}, Poly2{-2, 0, 2}, Poly2{}, Poly2{0}, Poly2{}, Poly2{2}},
         {Poly2{}, Poly2{}, Poly2{}, Poly2{}, Poly2{}, Poly2{0}}},
    };
    for (const auto& m : euclid) {
        RuleCatalogEntry e;
        e.name = m.name;
        e.family = Family::Euclid44;
        e.model_class = ModelClass::SSPT;
        e.rule = make44(e.name, m.f);
        e.seedable = default_seedable(e.rule);
        std::vector<Poly2> q = m.q;
        e.initial_conditions = {{"q1", [q](const LatticeSpec& lat) {
                                     Config2D c;
                                     for (size_t t = 0; t < q.size(); ++t)
                                         for (int mm : q[t].exponents) {
                                             // negative column offsets leave
                                             // the quarter and are clipped
                                             if (mm < 0) continue;
                                             SiteCoord s{mm + int(t), int64_t(t)};
                                             if (is_physical(lat, s)) c.set(s);
                                         }
                                     return c;
                                 }}};
        e.center_of = [](const LatticeSpec&, SiteCoord c) {
            return SiteCoord{c.i - 1, c.j - 1};
        };
        reg.push_back(e);
    }
    return reg;
}

}  // namespace

const std::vector<RuleCatalogEntry>& rule_catalog() {
    static const std::vector<RuleCatalogEntry> reg = build_catalog();
    return reg;
}

const RuleCatalogEntry& rule_lookup(const std::string& name) {
    for (const auto& e : rule_catalog())
        if (e.name == name) return e;
    throw std::out_of_range("unknown rule catalog entry: " + name);
}

std::vector<HamiltonianTerm> build_hamiltonian(const RuleCatalogEntry& entry,
                                               const LatticeSpec& lat) {
    if (entry.family != lat.family)
        throw std::invalid_argument("lattice family does not match the catalog entry");
    std::vector<HamiltonianTerm> out;

    if (lat.family == Family::Hyper66) {
        auto st = cluster66_state(lat);
        for (const auto& [a, t] : st->by_anchor) {
            int bracket_cls = st->cls.at(a);
            PauliLetter L = bracket_cls == 0 ? PauliLetter::Z : PauliLetter::X;
            HamiltonianTerm h;
            h.anchor = a;
            h.center = t.center;
            h.species = bracket_cls == 0 ? TermSpecies::ZType : TermSpecies::XType;
            for (const auto& s : t.bracket) h.word.letters[s] = L;
            h.word.letters[t.center] = L;
            out.push_back(std::move(h));
        }
        return out;
    }

    for (int i = 0; i <= lat.i_max; ++i) {
        int64_t A = level_size(lat, i);
        for (int64_t j = 0; j < A; ++j) {
            SiteCoord c{i, j};
            // The Euclidean SSPT stabilizers pair the gather bracket with
            // even levels only; odd levels carry the scatter bracket below.
            if (lat.family == Family::Euclid44 && (i % 2) != 0) continue;
            auto tr = entry.rule.transposed(lat, c);
            if (tr.empty()) continue;
            if (entry.term_anchor && !entry.term_anchor(lat, c)) continue;
            std::vector<SiteCoord> supp{c};
            bool phys = true;
            for (const auto& [k, poly] : tr)
                for (int d : poly.exponents) {
                    SiteCoord s{i + d, j - k};
                    if (!is_physical(lat, s)) phys = false;
                    supp.push_back(s);
                }
            if (!phys) continue;
            HamiltonianTerm h;
            h.anchor = c;
            if (entry.model_class == ModelClass::SSSB) {
                h.species = TermSpecies::SSSB;
                for (const auto& s : supp) h.word.letters[s] = PauliLetter::Z;
            } else {
                SiteCoord ctr = entry.center_of(lat, c);
                if (!is_physical(lat, ctr)) continue;
                bool even = (i % 2) == 0;
                PauliLetter L = even ? PauliLetter::Z : PauliLetter::X;
                h.species = even ? TermSpecies::ZType : TermSpecies::XType;
                h.center = ctr;
                for (const auto& s : supp) h.word.letters[s] = L;
                h.word.letters[ctr] = L;
            }
            out.push_back(std::move(h));
        }
    }

    if (lat.family == Family::Euclid44 && entry.model_class == ModelClass::SSPT) {
        for (int i = 1; i <= lat.i_max; i += 2) {
            int64_t A = level_size(lat, i);
            for (int64_t j = 0; j < A; ++j) {
                SiteCoord c{i, j};
                auto fw = entry.rule.forward(lat, c);
                if (fw.empty()) continue;
                std::vector<SiteCoord> supp{c};
                bool phys = true;
                for (const auto& [k, poly] : fw)
                    for (int d : poly.exponents) {
                        SiteCoord s{i + d, j + k};
                        if (!is_physical(lat, s)) phys = false;
                        supp.push_back(s);
                    }
                SiteCoord ctr{i + 1, j + 1};
                if (!phys || !is_physical(lat, ctr)) continue;
                HamiltonianTerm h;
                h.anchor = c;
                h.center = ctr;
                h.species = TermSpecies::XType;
                for (const auto& s : supp) h.word.letters[s] = PauliLetter::X;
                h.word.letters[ctr] = PauliLetter::X;
                out.push_back(std::move(h));
            }
        }
    }
    return out;
}

PauliWord generate_symmetry(const RuleCatalogEntry& entry, const InitialCondition& init,
                            const LatticeSpec& lat) {
    if (entry.family != lat.family)
        throw std::invalid_argument("lattice family does not match the catalog entry");
    PauliLetter L = PauliLetter::X;
    int64_t j_max = 0;
    if (lat.family == Family::Hyper66) {
        auto st = cluster66_state(lat);
        j_max = st->j_top;
        int want = -1;
        for (const auto& s : init.seeds.cells()) {
            if (!st->kept_h.count(hkey(s)))
                throw std::invalid_argument("seed outside the retained {6,6} region");
            int cl = st->cls.at(s);
            if (want == -1) want = cl;
            else if (want != cl)
                throw std::invalid_argument("seeds span both {6,6} sublattices");
        }
        if (want == 1) L = PauliLetter::Z;
    } else {
        j_max = level_size(lat, lat.i_max) - 1;
        if (entry.model_class == ModelClass::SSPT) {
            int want = -1;
            for (const auto& s : init.seeds.cells()) {
                int par = s.i % 2;
                if (want == -1) want = par;
                else if (want != par)
                    throw std::invalid_argument("seeds span both sublattices");
            }
            if (want == 1) L = PauliLetter::Z;
        }
    }
    Config2D grown = evolve(lat, entry.rule, init, j_max);
    PauliWord w;
    for (const auto& s : grown.cells()) w.letters[s] = L;
    return w;
}

CommutationReport check_symmetry_commutes(const std::vector<HamiltonianTerm>& terms,
                                          const PauliWord& sym) {
    CommutationReport r;
    for (const auto& t : terms) {
        ++r.checked;
        if (pauli_commutes(t.word, sym)) r.violations.push_back({t.anchor, t.anchor});
    }
    return r;
}

CommutationReport check_terms_commute(const std::vector<HamiltonianTerm>& terms) {
    std::map<SiteCoord, std::vector<int>> bucket;
    for (size_t idx = 0; idx < terms.size(); ++idx)
        for (const auto& [s, L] : terms[idx].word.letters) bucket[s].push_back(int(idx));
    std::set<std::pair<int, int>> pairs;
    for (const auto& [s, ids] : bucket)
        for (size_t a = 0; a < ids.size(); ++a)
            for (size_t b = a + 1; b < ids.size(); ++b)
                pairs.insert({std::min(ids[a], ids[b]), std::max(ids[a], ids[b])});
    CommutationReport r;
    for (const auto& [a, b] : pairs) {
        ++r.checked;
        if (pauli_commutes(terms[size_t(a)].word, terms[size_t(b)].word))
            r.violations.push_back({terms[size_t(a)].anchor, terms[size_t(b)].anchor});
    }
    std::sort(r.violations.begin(), r.violations.end());
    return r;
}

std::vector<EdgeTriple> edge_operators(const LatticeSpec& lat) {
    if (lat.family != Family::Hyper54)
        throw std::domain_error("edge operators are defined on the {5,4} boundary");
    std::vector<EdgeTriple> out;
    int i = lat.i_max;
    if (i == 0) return out;
    bool odd = (i % 2) != 0;
    PauliLetter site_a = odd ? PauliLetter::X : PauliLetter::Z;
    PauliLetter site_c = odd ? PauliLetter::Z : PauliLetter::X;
    PauliLetter dress_l = odd ? PauliLetter::Z : PauliLetter::X;
    int64_t A = level_size(lat, i);
    for (int64_t j = 0; j < A; ++j) {
        std::vector<SiteCoord> dress{{i - 1, P54(j)}};
        if (J54(j)) {
            SiteCoord d2{i - 1, P54(j) + 1};
            if (!is_physical(lat, d2)) continue;  // dressing would exit the lattice
            dress.push_back(d2);
        }
        EdgeTriple t;
        t.site = {i, j};
        t.x.letters[t.site] = site_a;
        t.y.letters[t.site] = PauliLetter::Y;
        t.z.letters[t.site] = site_c;
        for (const auto& d : dress) {
            t.x.letters[d] = dress_l;
            t.y.letters[d] = dress_l;
        }
        out.push_back(std::move(t));
    }
    return out;
}

MpscSupport mpsc_iterate(SiteCoord seed, int n, const LatticeSpec& lat) {
    if (lat.family != Family::Hyper54)
        throw std::domain_error("the strange-correlator support map lives on {5,4}");
    if (!is_physical(lat, seed) || (seed.i % 2) != 0)
        throw std::invalid_argument("seed must be a physical even-level site");
    if (n < 0) throw std::invalid_argument("generation count must be non-negative");
    Config2D cur;
    cur.set(seed);
    for (int g = 0; g < n; ++g) {
        Config2D next;
        for (const auto& c : cur.cells()) {
            int64_t j = c.j, c2 = C54(C54(j));
            next.toggle(c);
            if (J54(j)) next.toggle({c.i, j + 1});
            next.toggle({c.i + 2, c2 - 2});
            next.toggle({c.i + 2, c2 - 1});
            next.toggle({c.i + 2, c2});
            if (!J54(j)) next.toggle({c.i + 2, c2 + 1});
        }
        cur = truncate(next, lat);
    }
    return {n, cur};
}

MpscValue mpsc_evaluate(const MpscSupport& support, const std::vector<HamiltonianTerm>& terms,
                        const LatticeSpec& lat) {
    (void)lat;
    std::map<SiteCoord, const HamiltonianTerm*> by_anchor;
    for (const auto& t : terms)
        if (t.species == TermSpecies::ZType) by_anchor[t.anchor] = &t;
    // Only the even sublattice must be cleared; residual Z letters on the
    // odd sublattice are absorbed by the reference state.
    std::set<SiteCoord> rem;
    auto flip = [&rem](SiteCoord s) {
        auto it = rem.find(s);
        if (it != rem.end()) rem.erase(it);
        else rem.insert(s);
    };
    for (const auto& s : support.support.cells())
        if ((s.i % 2) == 0) flip(s);
    while (!rem.empty()) {
        SiteCoord m = *rem.rbegin();
        auto it = by_anchor.find(m);
        if (it == by_anchor.end()) return MpscValue::Undecided;
        // Every cell of the term below its anchor keeps the maximum
        // strictly decreasing, so the peeling terminates.
        for (const auto& [s, L] : it->second->word.letters)
            if ((s.i % 2) == 0) flip(s);
    }
    return MpscValue::PlusOne;
}

// ---- isotropy -----------------------------------------------------------

namespace {

using V3 = std::array<double, 3>;

double mink(const V3& a, const V3& b) { return a[0] * b[0] - a[1] * b[1] - a[2] * b[2]; }

V3 normt(const V3& v) {
    double s = std::sqrt(mink(v, v));
    return {v[0] / s, v[1] / s, v[2] / s};
}

V3 reflect(const V3& v, const V3& q) {
    double c = 2.0 * mink(v, q);
    return {-v[0] + c * q[0], -v[1] + c * q[1], -v[2] + c * q[2]};
}

struct IsoCtx {
    int p = 0, q = 0;
    std::map<SiteCoord, V3> face_center;
    std::map<SiteCoord, std::vector<int>> face_verts;
    std::vector<V3> vpos;
};

std::shared_ptr<const IsoCtx> iso_ctx(const LatticeSpec& lat) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const IsoCtx>> cache;
    std::pair<int, int> key{int(lat.family), lat.i_max};
    std::lock_guard<std::mutex> lock(mu);
    auto hit = cache.find(key);
    if (hit != cache.end()) return hit->second;

    auto ctx = std::make_shared<IsoCtx>();
    ctx->p = lat.p;
    ctx->q = lat.q;
    auto load = [&ctx](const std::map<SiteCoord, int>& s2f, const Tessellation& tess) {
        auto pos = embed_vertices(tess);
        ctx->vpos = pos;
        for (const auto& [s, f] : s2f) {
            const auto& verts = tess.face_vertices(f);
            V3 sum{0, 0, 0};
            for (int v : verts)
                for (int a = 0; a < 3; ++a) sum[size_t(a)] += pos[size_t(v)][size_t(a)];
            ctx->face_center[s] = normt(sum);
            ctx->face_verts[s] = verts;
        }
    };
    if (lat.family == Family::Hyper54) {
        Tessellation tess(5, 4);
        SectorMap sm = match_sector(lat, tess, lat.i_max);
        load(sm.site_to_face, tess);
    } else {
        auto st = cluster66_state(lat);
        load(st->region.site_to_face, *st->region.tess);
    }
    cache[key] = ctx;
    return ctx;
}

bool rotation_invariant(const std::vector<V3>& pts, const V3& center, double theta) {
    // Conjugate the rotation to the origin with two point reflections; the
    // support is then compared against its image under Rz(theta).
    V3 m = normt({center[0] + 1.0, center[1], center[2]});
    std::vector<V3> w;
    w.reserve(pts.size());
    for (const auto& v : pts) {
        V3 u = reflect(v, m);
        w.push_back({u[0], -u[1], -u[2]});
    }
    double co = std::cos(theta), si = std::sin(theta);
    std::vector<char> used(w.size(), 0);
    for (const auto& v : w) {
        V3 r{v[0], co * v[1] - si * v[2], si * v[1] + co * v[2]};
        bool found = false;
        for (size_t t = 0; t < w.size() && !found; ++t) {
            if (used[t]) continue;
            double scale = 1.0, diff = 0.0;
            for (int a = 0; a < 3; ++a) {
                scale = std::max({scale, std::abs(r[size_t(a)]), std::abs(w[t][size_t(a)])});
                diff = std::max(diff, std::abs(r[size_t(a)] - w[t][size_t(a)]));
            }
            if (diff <= 1e-4 * scale) {
                used[t] = 1;
                found = true;
            }
        }
        if (!found) return false;
    }
    return true;
}

}  // namespace

IsotropyResult isotropy_check(const HamiltonianTerm& term, const LatticeSpec& lat) {
    const double pi = std::acos(-1.0);
    if (lat.family == Family::Euclid44)
        return {IsotropyVerdict::CenterAmbiguous,
                "no distinguished hyperbolic rotation center on the Euclidean lattice"};
    auto ctx = iso_ctx(lat);
    std::vector<V3> pts;
    for (const auto& [s, L] : term.word.letters) {
        auto it = ctx->face_center.find(s);
        if (it == ctx->face_center.end())
            return {IsotropyVerdict::CenterAmbiguous, "support site without geometric realization"};
        pts.push_back(it->second);
    }
    if (term.center) {
        auto it = ctx->face_center.find(*term.center);
        if (it == ctx->face_center.end())
            return {IsotropyVerdict::CenterAmbiguous, "center without geometric realization"};
        if (rotation_invariant(pts, it->second, 2.0 * pi / ctx->p))
            return {IsotropyVerdict::Pass, ""};
        return {IsotropyVerdict::Fail,
                "support is not invariant under the face rotation about the center"};
    }
    std::set<int> tried;
    for (const auto& [s, L] : term.word.letters) {
        if (rotation_invariant(pts, ctx->face_center.at(s), 2.0 * pi / ctx->p))
            return {IsotropyVerdict::Pass, ""};
        for (int v : ctx->face_verts.at(s))
            if (tried.insert(v).second &&
                rotation_invariant(pts, ctx->vpos[size_t(v)], 2.0 * pi / ctx->q))
                return {IsotropyVerdict::Pass, ""};
    }
    return {IsotropyVerdict::Fail,
            "no face or vertex rotation leaves the support invariant"};
}

}  // namespace nuca
