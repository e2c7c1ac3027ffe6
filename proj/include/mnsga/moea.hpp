#ifndef MNSGA_MOEA_HPP
#define MNSGA_MOEA_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "mnsga/rng.hpp"
#include "mnsga/search_space.hpp"

namespace mnsga {

using ObjectiveVector = std::vector<double>;

// a dominates b: no worse everywhere, strictly better somewhere.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

// Fronts of member indices; front 0 is the non-dominated set. Ties
// (identical vectors) land in the same front.
std::vector<std::vector<std::size_t>> fast_nondominated_sort(
    const std::vector<ObjectiveVector>& objectives);

// Crowding distances for one front; boundary members per objective get
// +infinity, a zero-range objective contributes 0.
std::vector<double> crowding_distance(const std::vector<ObjectiveVector>& front);

struct Individual {
    Genome genome;
    std::optional<double> loss;  // expensive objective, set lazily
    double macs = 0;
    double params = 0;
    int rank = -1;  // 1-based front index, -1 until sorted
    double crowding = 0;
    std::uint64_t id = 0;

    ObjectiveVector cheap_objectives() const { return {macs, params}; }
    ObjectiveVector full_objectives() const {
        return {loss.value(), macs, params};
    }
};

struct Population {
    std::vector<Individual> members;
    int generation = 0;
};

// Writes rank and crowding onto every member. use_loss selects the
// tri-objective (loss, macs, params) vs the cheap (macs, params) sort.
void rank_population(Population& pop, bool use_loss);

// Binary tournament over two distinct members: lower rank wins, ties by
// larger crowding, remaining ties by coin flip.
const Individual& binary_tournament(const Population& pop, Rng& rng);

// Uniform crossover gated by probability mu; returns a copy of p1 when the
// gate does not fire.
Genome crossover(const SearchSpaceSpec& space, const Genome& p1, const Genome& p2,
                 double mu, Rng& rng);

// Per-gene uniform resample with probability nu; first slots never become
// Identity.
Genome mutate(const SearchSpaceSpec& space, const Genome& g, double nu, Rng& rng);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace mnsga

#endif
