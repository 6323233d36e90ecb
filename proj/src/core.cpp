#include "nuca/core.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace nuca {

Poly2::Poly2(std::initializer_list<int> es) : exponents(es) {
    std::sort(exponents.begin(), exponents.end());
    exponents.erase(std::unique(exponents.begin(), exponents.end()), exponents.end());
}

bool Poly2::contains(int e) const {
    return std::binary_search(exponents.begin(), exponents.end(), e);
}

Poly2 poly_add(const Poly2& a, const Poly2& b) {
    Poly2 r;
    std::set_symmetric_difference(a.exponents.begin(), a.exponents.end(), b.exponents.begin(),
                                  b.exponents.end(), std::back_inserter(r.exponents));
    return r;
}

Poly2 poly_shift_mul(const Poly2& a, int e) {
    Poly2 r = a;
    for (int& x : r.exponents) x += e;
    return r;
}

// ---- Config2D -----------------------------------------------------------

namespace {
inline size_t word_of(int64_t j) { return size_t(j >> 6); }
inline uint64_t bit_of(int64_t j) { return uint64_t(1) << (j & 63); }
}  // namespace

void Config2D::set(SiteCoord c, bool value) {
    if (c.j < 0) throw std::domain_error("Config2D: row index must be >= 0");
    auto& row = levels_[c.i];
    size_t w = word_of(c.j);
    if (w >= row.size()) row.resize(w + 1, 0);
    if (value)
        row[w] |= bit_of(c.j);
    else
        row[w] &= ~bit_of(c.j);
}

void Config2D::toggle(SiteCoord c) { set(c, !get(c)); }

bool Config2D::get(SiteCoord c) const {
    if (c.j < 0) return false;
    auto it = levels_.find(c.i);
    if (it == levels_.end()) return false;
    size_t w = word_of(c.j);
    return w < it->second.size() && (it->second[w] & bit_of(c.j));
}

int64_t Config2D::count() const {
    int64_t n = 0;
    for (auto& [i, row] : levels_)
        for (uint64_t w : row) n += std::popcount(w);
    return n;
}

int64_t Config2D::count_level(int i) const {
    auto it = levels_.find(i);
    if (it == levels_.end()) return 0;
    int64_t n = 0;
    for (uint64_t w : it->second) n += std::popcount(w);
    return n;
}

std::vector<SiteCoord> Config2D::cells() const {
    std::vector<SiteCoord> out;
    for (auto& [i, row] : levels_)
        for (size_t w = 0; w < row.size(); ++w)
            for (uint64_t bits = row[w]; bits; bits &= bits - 1)
                out.push_back({i, int64_t(w) * 64 + std::countr_zero(bits)});
    return out;
}

void Config2D::xor_with(const Config2D& other) {
    for (auto& [i, row] : other.levels_) {
        auto& mine = levels_[i];
        if (mine.size() < row.size()) mine.resize(row.size(), 0);
        for (size_t w = 0; w < row.size(); ++w) mine[w] ^= row[w];
    }
}

int Config2D::overlap_parity(const Config2D& other) const {
    int64_t n = 0;
    for (auto& [i, row] : levels_) {
        auto it = other.levels_.find(i);
        if (it == other.levels_.end()) continue;
        size_t m = std::min(row.size(), it->second.size());
        for (size_t w = 0; w < m; ++w) n += std::popcount(row[w] & it->second[w]);
    }
    return int(n & 1);
}

bool operator==(const Config2D& a, const Config2D& b) {
    // Rows may differ by trailing zero words only.
    auto covered = [](const Config2D& x, const Config2D& y) {
        for (auto& [i, row] : x.levels_) {
            auto it = y.levels_.find(i);
            size_t m = it == y.levels_.end() ? 0 : it->second.size();
            for (size_t w = 0; w < row.size(); ++w) {
                uint64_t there = w < m ? it->second[w] : 0;
                if (row[w] != there) return false;
            }
        }
        return true;
    };
    return covered(a, b) && covered(b, a);
}

// ---- Pauli algebra ------------------------------------------------------

PauliWord PauliWord::operator*(const PauliWord& other) const {
    PauliWord r = *this;
    for (auto& [site, l2] : other.letters) {
        auto it = r.letters.find(site);
        if (it == r.letters.end()) {
            r.letters.emplace(site, l2);
        } else if (it->second == l2) {
            r.letters.erase(it);
        } else {
            // The product of two distinct letters is the third one.
            int third = 0 + 1 + 2 - int(it->second) - int(l2);
            it->second = PauliLetter(third);
        }
    }
    return r;
}

int commutation_coeff(const Config2D& alpha, const Config2D& beta) {
    return alpha.overlap_parity(beta);
}

int pauli_commutes(const PauliWord& w1, const PauliWord& w2) {
    const auto& small = w1.letters.size() <= w2.letters.size() ? w1 : w2;
    const auto& big = w1.letters.size() <= w2.letters.size() ? w2 : w1;
    int clashes = 0;
    for (auto& [site, l] : small.letters) {
        auto it = big.letters.find(site);
        if (it != big.letters.end() && it->second != l) ++clashes;
    }
    return clashes & 1;
}

// ---- Evolution ----------------------------------------------------------

Config2D evolve(const LatticeSpec& lat, const UpdateRule& rule, const InitialCondition& init,
                int64_t j_max) {
    if (j_max < 0) throw std::invalid_argument("evolve: j_max must be >= 0");
    const int L = lat.i_max;
    std::vector<int64_t> rows(size_t(L) + 1);
    for (int i = 0; i <= L; ++i) rows[size_t(i)] = std::min(level_size(lat, i), j_max + 1);

    for (SiteCoord s : init.seeds.cells()) {
        if (!is_physical(lat, s))
            throw std::invalid_argument("evolve: seed on non-physical site");
        if (!rule.transposed(lat, s).empty())
            throw std::invalid_argument("evolve: seed on a site with a nontrivial update rule");
    }

    Config2D cfg;
    // Preallocate dense rows so the inner loop never reallocates.
    for (int i = 0; i <= L; ++i)
        if (rows[size_t(i)] > 0) cfg.set({i, rows[size_t(i)] - 1}, false);

    for (int64_t j = 0; j <= j_max; ++j) {
        for (int i = 0; i <= L; ++i) {
            if (j >= rows[size_t(i)]) continue;
            SiteCoord site{i, j};
            auto terms = rule.transposed(lat, site);
            bool a;
            if (terms.empty()) {
                a = init.seeds.get(site);
            } else {
                a = false;
                for (auto& [k, poly] : terms) {
                    int64_t js = j - k;
                    if (js < 0) continue;
                    for (int d : poly.exponents) {
                        int is = i + d;
                        if (is < 0 || is > L || js >= rows[size_t(is)]) continue;
                        a ^= cfg.get({is, js});
                    }
                }
            }
            if (a) cfg.set(site);
        }
    }
    return cfg;
}

Config2D truncate(const Config2D& cfg, const LatticeSpec& lat) {
    Config2D out;
    const bool masked = lat.family == Family::Hyper66;
    const std::set<SiteCoord>* mask = nullptr;
    static std::map<int, std::set<SiteCoord>> mask_cache;
    if (masked) {
        auto it = mask_cache.find(lat.i_max);
        if (it == mask_cache.end()) it = mask_cache.emplace(lat.i_max, exclusion_mask_66(lat)).first;
        mask = &it->second;
    }
    for (SiteCoord c : cfg.cells()) {
        if (!is_physical(lat, c)) continue;
        if (masked && mask->count(c)) continue;
        out.set(c);
    }
    return out;
}

// ---- Duality ------------------------------------------------------------

DualityReport check_rule_duality(const UpdateRule& rule, const LatticeSpec& lat, int bound) {
    bound = std::min(bound, lat.i_max);
    // Couplings (source site, k, target level) gathered from each direction;
    // only pairs whose endpoints are both physical with level <= bound are
    // comparable, since boundary clipping removes the rest from evolution.
    std::set<std::tuple<int, int64_t, int, int>> fwd, bwd;  // (b, jb, k, a)
    DualityReport rep;
    for (int b = 0; b <= bound; ++b) {
        for (int64_t jb = 0; jb < level_size(lat, b); ++jb) {
            ++rep.checked_sites;
            for (auto& [k, poly] : rule.forward(lat, {b, jb}))
                for (int d : poly.exponents) {
                    int a = b + d;
                    if (a < 0 || a > bound || !is_physical(lat, {a, jb + k})) continue;
                    fwd.insert({b, jb, k, a});
                }
            for (auto& [k, poly] : rule.transposed(lat, {b, jb}))
                for (int d : poly.exponents) {
                    int a = b + d;  // source feeding (b, jb) from row jb - k
                    if (a < 0 || a > bound || !is_physical(lat, {a, jb - k})) continue;
                    bwd.insert({a, jb - k, k, b});
                }
        }
    }
    auto report = [&](const auto& t, const char* side) {
        auto [b, jb, k, a] = t;
        std::ostringstream os;
        os << side << "-only coupling: (" << b << "," << jb << ") -> level " << a << " at distance "
           << k;
        rep.violations.push_back(os.str());
    };
    for (auto& t : fwd)
        if (!bwd.count(t)) report(t, "forward");
    for (auto& t : bwd)
        if (!fwd.count(t)) report(t, "transposed");
    return rep;
}

// ---- Export -------------------------------------------------------------

std::string export_json(const LatticeSpec& lat, const std::string& rule_name,
                        const Config2D& seeds, const Config2D& cfg) {
    nlohmann::json j;
    j["lattice"] = {{"p", lat.p}, {"q", lat.q}, {"i_max", lat.i_max}};
    j["rule"] = rule_name;
    auto pack = [](const Config2D& c) {
        nlohmann::json arr = nlohmann::json::array();
        for (SiteCoord s : c.cells()) arr.push_back({s.i, s.j});
        return arr;
    };
    j["seeds"] = pack(seeds);
    j["cells"] = pack(cfg);
    return j.dump(2);
}

}  // namespace nuca
