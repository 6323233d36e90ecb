#include "nuca/cqca.hpp"

#include <algorithm>
#include <stdexcept>

#include "nuca/fibonacci.hpp"
#include "nuca/models.hpp"

namespace nuca {

namespace {

const UpdateRule& cluster_rule() { return rule_lookup("cluster-54").rule; }

bool rule_nontrivial(const LatticeSpec& lat, SiteCoord c) {
    return !cluster_rule().transposed(lat, c).empty();
}

}  // namespace

int WirePartition::wire_at(SiteCoord c) const {
    auto it = index.find(pack(c));
    return it == index.end() ? -1 : it->second;
}

WirePartition build_wires(const LatticeSpec& lat) {
    if (lat.family != Family::Hyper54)
        throw std::invalid_argument("build_wires: {5,4} only");
    WirePartition part;
    for (int i = 0; i <= lat.i_max; ++i) {
        int64_t n = level_size(lat, i);
        for (int64_t j = 0; j < n; ++j) {
            SiteCoord c{i, j};
            // Sites with a nontrivial transposed rule are black offspring
            // and continue the wire of their tree parent.
            if (rule_nontrivial(lat, c)) continue;
            int id = int(part.wires.size());
            std::vector<SiteCoord> wire{c};
            part.index[WirePartition::pack(c)] = id;
            while (wire.back().i < lat.i_max) {
                // the unique black child in the tree: row floor(phi^2 (j+1))
                SiteCoord nx{wire.back().i + 1, beatty_floor_mul(wire.back().j + 1)};
                if (!is_physical(lat, nx) || !rule_nontrivial(lat, nx)) break;
                part.index[WirePartition::pack(nx)] = id;
                wire.push_back(nx);
            }
            part.wires.push_back(std::move(wire));
        }
    }
    return part;
}

CliffordLayout build_circuit(const WirePartition& part, const LatticeSpec& lat) {
    CliffordLayout layout;
    for (int i = 0; i <= lat.i_max; ++i) {
        int64_t n = level_size(lat, i);
        for (int64_t j = 0; j < n; ++j) {
            SiteCoord s{i, j};
            CliffordLayout::Slice slice{s, {}};
            int w = part.wire_at(s);
            if (w < 0) throw std::invalid_argument("build_circuit: partition does not cover lattice");
            const auto& wire = part.wires[w];
            bool start = wire.front() == s;
            SiteCoord pred{-1, -1};
            if (!start) {
                auto it = std::find(wire.begin(), wire.end(), s);
                pred = *(it - 1);
            }
            for (SiteCoord nb : neighbors(lat, s))
                if (nb < s && !(nb == pred)) slice.cz.emplace_back(nb, s);
            layout.slices.push_back(std::move(slice));
        }
    }
    return layout;
}

PauliWord propagate(const WirePartition& part, const CliffordLayout& layout,
                    const LatticeSpec& lat, const std::map<int, PauliLetter>& inputs) {
    (void)lat;
    std::vector<size_t> pos(part.wires.size(), 0);  // next unvisited wire site
    std::vector<uint8_t> zacc(part.wires.size(), 0);
    Config2D deposits;
    PauliWord word;

    for (const auto& slice : layout.slices) {
        SiteCoord s = slice.site;
        int w = part.wire_at(s);
        bool start = pos[w] == 0;
        uint8_t dv, zin = 0;
        if (start) {
            dv = 0;
            if (auto it = inputs.find(w); it != inputs.end()) {
                dv = it->second != PauliLetter::Z;   // X and Y carry the X bit
                zin = it->second != PauliLetter::X;  // Z and Y carry the Z bit
            }
        } else {
            dv = zacc[w];
        }
        ++pos[w];
        // Hadamard: the accumulated Z bit became this deposit; restart the
        // accumulator for the outgoing leg.
        zacc[w] = zin;
        // wire-step edge from the predecessor contributes its deposit
        if (!start) zacc[w] ^= deposits.get(part.wires[w][pos[w] - 2]) ? 1 : 0;
        for (const auto& [a, b] : slice.cz) {
            int wa = part.wire_at(a);
            zacc[w] ^= deposits.get(a) ? 1 : 0;  // partner X toggles our Z leg
            zacc[wa] ^= dv;                      // our X toggles the partner leg
        }
        if (dv) {
            deposits.set(s);
            word.letters[s] = PauliLetter::X;
        }
    }
    return word;
}

CqcaEquivalence equivalence_check(const LatticeSpec& lat,
                                  const std::vector<std::vector<int>>& input_sets) {
    auto part = build_wires(lat);
    auto layout = build_circuit(part, lat);
    const auto& rule = cluster_rule();

    CqcaEquivalence rep;
    for (size_t k = 0; k < input_sets.size(); ++k) {
        std::map<int, PauliLetter> inputs;
        InitialCondition ic;
        for (int w : input_sets[k]) {
            inputs[w] = PauliLetter::X;
            ic.seeds.set(part.wires.at(w).front());
        }
        PauliWord got = propagate(part, layout, lat, inputs);
        Config2D want =
            truncate(evolve(lat, rule, ic, level_size(lat, lat.i_max) - 1), lat);
        Config2D support;
        for (const auto& [site, letter] : got.letters) {
            (void)letter;
            support.set(site);
        }
        ++rep.checked;
        if (!(support == want)) rep.mismatches.push_back(k);
    }
    return rep;
}

}  // namespace nuca
