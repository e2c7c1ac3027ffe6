#include "mnsga/moea.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mnsga {

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("objective vectors differ in length");
    }
    bool strictly_better = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strictly_better = true;
    }
    return strictly_better;
}

std::vector<std::vector<std::size_t>> fast_nondominated_sort(
    const std::vector<ObjectiveVector>& objectives) {
    const std::size_t n = objectives.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<int> domination_count(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dominates(objectives[i], objectives[j])) {
                dominated[i].push_back(j);
                ++domination_count[j];
            } else if (dominates(objectives[j], objectives[i])) {
                dominated[j].push_back(i);
                ++domination_count[i];
            }
        }
    }
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i) {
        if (domination_count[i] == 0) current.push_back(i);
    }
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t i : current) {
            for (std::size_t j : dominated[i]) {
                if (--domination_count[j] == 0) next.push_back(j);
            }
        }
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return fronts;
}

std::vector<double> crowding_distance(const std::vector<ObjectiveVector>& front) {
    if (front.empty()) throw std::invalid_argument("empty front");
    const std::size_t n = front.size();
    std::vector<double> distance(n, 0.0);
    if (n <= 2) {
        std::fill(distance.begin(), distance.end(), kInfinity);
        return distance;
    }
    const std::size_t m = front.front().size();
    std::vector<std::size_t> order(n);
    for (std::size_t obj = 0; obj < m; ++obj) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return front[a][obj] < front[b][obj];
        });
        distance[order.front()] = kInfinity;
        distance[order.back()] = kInfinity;
        const double range = front[order.back()][obj] - front[order.front()][obj];
        if (range <= 0.0) continue;
        for (std::size_t k = 1; k + 1 < n; ++k) {
            if (std::isinf(distance[order[k]])) continue;
            distance[order[k]] +=
                (front[order[k + 1]][obj] - front[order[k - 1]][obj]) / range;
        }
    }
    return distance;
}

void rank_population(Population& pop, bool use_loss) {
    std::vector<ObjectiveVector> objectives;
    objectives.reserve(pop.members.size());
    for (const auto& ind : pop.members) {
        objectives.push_back(use_loss ? ind.full_objectives() : ind.cheap_objectives());
    }
    const auto fronts = fast_nondominated_sort(objectives);
    for (std::size_t f = 0; f < fronts.size(); ++f) {
        std::vector<ObjectiveVector> front_objectives;
        front_objectives.reserve(fronts[f].size());
        for (std::size_t idx : fronts[f]) front_objectives.push_back(objectives[idx]);
        const auto distances = crowding_distance(front_objectives);
        for (std::size_t k = 0; k < fronts[f].size(); ++k) {
            pop.members[fronts[f][k]].rank = static_cast<int>(f) + 1;
            pop.members[fronts[f][k]].crowding = distances[k];
        }
    }
}

const Individual& binary_tournament(const Population& pop, Rng& rng) {
    const std::size_t n = pop.members.size();
    if (n < 2) throw std::invalid_argument("tournament needs at least 2 members");
    const std::size_t a = rng.next_below(n);
    std::size_t b = rng.next_below(n - 1);
    if (b >= a) ++b;
    const Individual& x = pop.members[a];
    const Individual& y = pop.members[b];
    if (x.rank != y.rank) return x.rank < y.rank ? x : y;
    if (x.crowding != y.crowding) return x.crowding > y.crowding ? x : y;
    return rng.next_bool() ? x : y;
}

Genome crossover(const SearchSpaceSpec& space, const Genome& p1, const Genome& p2,
                 double mu, Rng& rng) {
    if (p1.op_genes.size() != p2.op_genes.size() ||
        p1.channel_genes.size() != p2.channel_genes.size()) {
        throw std::invalid_argument("parents come from different spaces");
    }
    if (rng.next_double() >= mu) return p1;
    Genome child = p1;
    for (std::size_t s = 0; s < child.op_genes.size(); ++s) {
        for (std::size_t slot = 0; slot < child.op_genes[s].size(); ++slot) {
            if (rng.next_bool()) child.op_genes[s][slot] = p2.op_genes[s][slot];
        }
        if (rng.next_bool()) child.channel_genes[s] = p2.channel_genes[s];
    }
    (void)space;
    return child;
}

Genome mutate(const SearchSpaceSpec& space, const Genome& g, double nu, Rng& rng) {
    Genome out = g;
    const auto& ops = space.allowed_ops;
    for (std::size_t s = 0; s < out.op_genes.size(); ++s) {
        const auto& st = space.stage(static_cast<int>(s) + 2);
        for (std::size_t slot = 0; slot < out.op_genes[s].size(); ++slot) {
            if (rng.next_double() >= nu) continue;
            if (slot == 0) {
                out.op_genes[s][slot] = ops[rng.next_below(ops.size())];
            } else {
                const auto pick = rng.next_below(ops.size() + 1);
                out.op_genes[s][slot] =
                    pick == ops.size() ? OpKind::Identity : ops[pick];
            }
        }
        if (rng.next_double() < nu) {
            out.channel_genes[s] =
                static_cast<int>(rng.next_below(st.allowed_channels.size()));
        }
    }
    return out;
}

}  // namespace mnsga
