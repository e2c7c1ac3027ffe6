#ifndef MNSGA_TESTS_SUPPORT_HPP
#define MNSGA_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "mnsga/moea.hpp"
#include "mnsga/search_space.hpp"

namespace mnsga::testing {

// Reference backbone layer listing in the documented text format.
inline std::string reference_backbone_text() {
    return R"(0 Conv3 3 16 2
1 K3GBe3 16 16 2
2 K3GBe2 16 32 1
3 K3GBe4 32 32 1
4 K3GBe6 32 32 1
5 K3GBe2 32 40 2
6 K3GBe3 40 40 1
7 K3GBe5 40 40 1
8 K3GBe3 40 40 1
9 K3GBe2 40 56 2
10 K3GBe1 56 56 1
11 K3GBe4 56 56 1
12 K3GBe3 56 56 1
13 K3GBe4 56 56 1
14 K3GBe6 56 128 1
15 K3GBe6 128 128 1
16 K3GBe1 128 128 1
17 K3GBe1 128 128 1
18 K3GBe1 128 128 1
19 K3GBe1 128 128 1
20 K3GBe2 128 128 1
21 K3GBe3 128 128 1
22 K3GBe5 128 128 1
23 K3GBe3 128 152 2
24 K3GBe3 152 152 1
25 K3GBe6 152 152 1
26 K3GBe4 152 152 1
27 K3GBe4 152 152 1
28 K3GBe5 152 152 1
29 K3GBe3 152 152 1
30 K3GBe6 152 152 1
31 K3GBe6 152 152 1
32 K3GBe4 152 152 1
33 K3GBe3 152 152 1
)";
}

// Small space whose genome count (3888) permits exhaustive enumeration.
inline SearchSpaceSpec toy_space() {
    SearchSpaceSpec space = default_space();
    space.input_resolution = 64;
    const std::vector<int> slots = {2, 1, 1, 1, 1};
    const std::vector<std::vector<int>> channels = {
        {24, 32}, {40, 48}, {56}, {104}, {144}};
    for (int s = 2; s <= 6; ++s) {
        space.stages[s - 1].max_slots = slots[s - 2];
        space.stages[s - 1].allowed_channels = channels[s - 2];
    }
    space.allowed_ops = {OpKind::GBe1, OpKind::GBe2, OpKind::GBe3};
    return space;
}

// Minimal space (128 genomes) where the desk-scale search budget can cover
// the whole Pareto set; used for the enumeration-oracle recovery checks.
inline SearchSpaceSpec tiny_space() {
    SearchSpaceSpec space = toy_space();
    for (auto& stage : space.stages) stage.max_slots = 1;
    space.allowed_ops = {OpKind::GBe1, OpKind::GBe2};
    return space;
}

// Every genome of a (small) space, in lexicographic gene order.
inline std::vector<Genome> enumerate_genomes(const SearchSpaceSpec& space) {
    std::vector<Genome> result;
    Genome current;
    for (int s = 2; s <= 6; ++s) {
        current.op_genes.emplace_back(space.stage(s).max_slots, space.allowed_ops.front());
        current.channel_genes.push_back(0);
    }
    const auto recurse = [&](auto&& self, int stage_i, int slot) -> void {
        const int n = space.num_searched_stages();
        if (stage_i == n) {
            result.push_back(current);
            return;
        }
        const auto& st = space.stage(stage_i + 2);
        if (slot == st.max_slots) {
            for (int c = 0; c < static_cast<int>(st.allowed_channels.size()); ++c) {
                current.channel_genes[stage_i] = c;
                self(self, stage_i + 1, 0);
            }
            return;
        }
        for (OpKind op : space.allowed_ops) {
            current.op_genes[stage_i][slot] = op;
            self(self, stage_i, slot + 1);
        }
        if (slot > 0) {
            current.op_genes[stage_i][slot] = OpKind::Identity;
            self(self, stage_i, slot + 1);
        }
    };
    recurse(recurse, 0, 0);
    // Identity slots are positionally free; drop genomes that are not in
    // trailing-Identity normal form so each decoded network appears once.
    std::erase_if(result, [](const Genome& g) {
        for (const auto& stage : g.op_genes) {
            bool seen_identity = false;
            for (OpKind op : stage) {
                if (op == OpKind::Identity) {
                    seen_identity = true;
                } else if (seen_identity) {
                    return true;
                }
            }
        }
        return false;
    });
    return result;
}

// O(N^2 M) non-dominated set, independent of fast_nondominated_sort.
inline std::vector<std::size_t> brute_force_nondominated(
    const std::vector<ObjectiveVector>& points) {
    std::vector<std::size_t> result;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool is_dominated = false;
        for (std::size_t j = 0; j < points.size() && !is_dominated; ++j) {
            if (j != i && dominates(points[j], points[i])) is_dominated = true;
        }
        if (!is_dominated) result.push_back(i);
    }
    return result;
}

// Repeated peeling of the brute-force non-dominated set: oracle fronts.
inline std::vector<std::vector<std::size_t>> brute_force_fronts(
    const std::vector<ObjectiveVector>& points) {
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> remaining(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) remaining[i] = i;
    while (!remaining.empty()) {
        std::vector<ObjectiveVector> subset;
        for (std::size_t idx : remaining) subset.push_back(points[idx]);
        const auto local = brute_force_nondominated(subset);
        std::vector<std::size_t> front;
        for (std::size_t k : local) front.push_back(remaining[k]);
        std::vector<std::size_t> next;
        std::size_t cursor = 0;
        for (std::size_t k = 0; k < remaining.size(); ++k) {
            if (cursor < local.size() && local[cursor] == k) {
                ++cursor;
            } else {
                next.push_back(remaining[k]);
            }
        }
        fronts.push_back(std::move(front));
        remaining = std::move(next);
    }
    return fronts;
}

// Chi-square critical values at significance 0.01 for df = 1..11.
inline double chi2_critical_01(int df) {
    static const double table[] = {6.635,  9.210,  11.345, 13.277, 15.086, 16.812,
                                   18.475, 20.090, 21.666, 23.209, 24.725};
    return table[df - 1];
}

inline double chi2_statistic(const std::vector<std::int64_t>& counts,
                             const std::vector<double>& expected) {
    double stat = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double d = counts[i] - expected[i];
        stat += d * d / expected[i];
    }
    return stat;
}

}  // namespace mnsga::testing

#endif
