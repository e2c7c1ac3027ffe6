#ifndef MNSGA_ENGINE_HPP
#define MNSGA_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "mnsga/evaluators.hpp"
#include "mnsga/moea.hpp"
#include "mnsga/search_space.hpp"

namespace mnsga {

struct MnsgaConfig {
    int population_size = 24;                       // N
    int generations = 30;                           // T
    double crossover_prob = 0.9;                    // mu
    double mutation_prob = 0.1;                     // nu
    double g1_max_macs = std::numeric_limits<double>::infinity();
    double g2_max_params = std::numeric_limits<double>::infinity();
    std::int64_t stage1_trial_budget = 0;           // 0 means 4*N
    std::uint64_t seed = 0;

    std::int64_t effective_trial_budget() const {
        return stage1_trial_budget > 0 ? stage1_trial_budget
                                       : 4ll * population_size;
    }
    void check() const;  // throws std::invalid_argument
};

// Raised when the stage-1 trial cap is exhausted with no feasible offspring.
class InfeasibleConstraints : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ArchiveEntry {
    Genome genome;
    ObjectiveVector objectives;  // (loss, macs, params)
    int generation = 0;
};

// Externally maintained non-dominated set of all fully evaluated
// individuals. Insertion drops newly dominated entries; duplicates (by
// genome) are kept once.
class ParetoArchive {
public:
    bool insert(const Genome& genome, const ObjectiveVector& objectives, int generation);
    const std::vector<ArchiveEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

private:
    std::vector<ArchiveEntry> entries_;
};

// Hypervolume of a minimization front w.r.t. ref; points not strictly
// inside the reference box contribute nothing.
double hypervolume(const std::vector<ObjectiveVector>& points, const ObjectiveVector& ref);

struct MetricsRow {
    int generation = 0;
    std::size_t archive_size = 0;
    double hypervolume = 0;
    double best_loss = 0;
    double min_macs = 0;
};

struct RunState {
    Population population;
    int generation = 0;
    ParetoArchive archive;
    std::vector<MetricsRow> metrics;
    std::vector<std::string> events;
    std::uint64_t next_id = 0;
    std::int64_t expensive_evaluations = 0;
};

// Algorithm driver: two-stage constrained offspring generation (mnsga) or
// the plain single-stage NSGA-II baseline.
class MnsgaEngine {
public:
    MnsgaEngine(MnsgaConfig config, SearchSpaceSpec space, const Evaluator& evaluator);

    RunState initialize();
    Population stage1_offspring(RunState& state);
    Population stage1_selection(const Population& parents, const Population& q1);
    Population stage2_offspring(const Population& parents, RunState& state);
    Population stage2_selection(Population& parents, Population& offspring,
                                RunState& state);

    using GenerationCallback = std::function<void(const RunState&)>;
    RunState run(const GenerationCallback& on_generation = nullptr);
    RunState run_nsga2_baseline(const GenerationCallback& on_generation = nullptr);
    // Continues either algorithm from a snapshot state.
    RunState resume(RunState state, bool baseline,
                    const GenerationCallback& on_generation = nullptr);

    const MnsgaConfig& config() const { return config_; }
    const SearchSpaceSpec& space() const { return space_; }
    // Normalized-hypervolume reference data, logged in the run header.
    double macs_normalizer() const { return macs_normalizer_; }
    double params_normalizer() const { return params_normalizer_; }
    double archive_hypervolume(const ParetoArchive& archive) const;

private:
    Individual make_individual(Genome genome, RunState& state, bool with_loss);
    Population environmental_select(const Population& union_pop, bool use_loss) const;
    void record_metrics(RunState& state);
    void ensure_losses(Population& pop, RunState& state);

    MnsgaConfig config_;
    SearchSpaceSpec space_;
    const Evaluator& evaluator_;
    double macs_normalizer_ = 1;
    double params_normalizer_ = 1;
};

// MACs/params of the space's maximal genome (full depth, widest channels,
// largest expansion); also the hypervolume normalizer fallback when a
// constraint bound is infinite.
std::pair<double, double> space_max_cost(const SearchSpaceSpec& space);

}  // namespace mnsga

#endif
