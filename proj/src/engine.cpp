#include "mnsga/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "mnsga/cost_model.hpp"

namespace mnsga {

void MnsgaConfig::check() const {
    if (population_size < 2) throw std::invalid_argument("population_size must be >= 2");
    if (generations < 1) throw std::invalid_argument("generations must be >= 1");
    if (crossover_prob < 0 || crossover_prob > 1) {
        throw std::invalid_argument("crossover_prob must be in [0, 1]");
    }
    if (mutation_prob < 0 || mutation_prob > 1) {
        throw std::invalid_argument("mutation_prob must be in [0, 1]");
    }
    if (!(g1_max_macs > 0) || !(g2_max_params > 0)) {
        throw std::invalid_argument("constraint bounds must be positive");
    }
    if (stage1_trial_budget != 0 && stage1_trial_budget < population_size) {
        throw std::invalid_argument("stage1_trial_budget must be >= population_size");
    }
}

bool ParetoArchive::insert(const Genome& genome, const ObjectiveVector& objectives,
                           int generation) {
    for (const auto& entry : entries_) {
        if (dominates(entry.objectives, objectives)) return false;
        if (entry.objectives == objectives && entry.genome == genome) return false;
    }
    std::erase_if(entries_, [&](const ArchiveEntry& entry) {
        return dominates(objectives, entry.objectives);
    });
    entries_.push_back({genome, objectives, generation});
    return true;
}

namespace {

// Area dominated by 2-D points within [0, ref]; points must be inside.
double staircase_area(std::vector<std::pair<double, double>> pts,
                      double rx, double ry) {
    std::sort(pts.begin(), pts.end());
    double area = 0.0;
    double best_y = ry;
    // Walk x ascending; each vertical strip is dominated down to the best
    // (lowest) y seen so far.
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double next_x = i + 1 < pts.size() ? pts[i + 1].first : rx;
        best_y = std::min(best_y, pts[i].second);
        if (next_x > pts[i].first) area += (next_x - pts[i].first) * (ry - best_y);
    }
    return area;
}

}  // namespace

double hypervolume(const std::vector<ObjectiveVector>& points, const ObjectiveVector& ref) {
    std::vector<ObjectiveVector> inside;
    for (const auto& p : points) {
        if (p.size() != ref.size()) throw std::invalid_argument("dimension mismatch");
        bool ok = true;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i] >= ref[i]) { ok = false; break; }
        }
        if (ok) inside.push_back(p);
    }
    if (inside.empty()) return 0.0;
    if (ref.size() == 2) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : inside) pts.emplace_back(p[0], p[1]);
        return staircase_area(std::move(pts), ref[0], ref[1]);
    }
    if (ref.size() != 3) throw std::invalid_argument("hypervolume supports 2 or 3 objectives");
    // Sweep the third axis: between consecutive z levels the dominated slab
    // is the 2-D staircase of every point at or below the level.
    std::sort(inside.begin(), inside.end(),
              [](const auto& a, const auto& b) { return a[2] < b[2]; });
    double volume = 0.0;
    for (std::size_t i = 0; i < inside.size(); ++i) {
        if (i + 1 < inside.size() && inside[i + 1][2] == inside[i][2]) continue;
        const double z_next = i + 1 < inside.size() ? inside[i + 1][2] : ref[2];
        std::vector<std::pair<double, double>> pts;
        for (std::size_t j = 0; j <= i; ++j) pts.emplace_back(inside[j][0], inside[j][1]);
        volume += (z_next - inside[i][2]) * staircase_area(std::move(pts), ref[0], ref[1]);
    }
    return volume;
}

std::pair<double, double> space_max_cost(const SearchSpaceSpec& space) {
    OpKind widest = space.allowed_ops.front();
    for (OpKind op : space.allowed_ops) {
        if (expansion_of(op) > expansion_of(widest)) widest = op;
    }
    Genome g;
    for (int s = 2; s <= 6; ++s) {
        const auto& st = space.stage(s);
        g.op_genes.emplace_back(st.max_slots, widest);
        g.channel_genes.push_back(static_cast<int>(st.allowed_channels.size()) - 1);
    }
    const CostReport report = backbone_cost(decode(space, g));
    return {static_cast<double>(report.macs), static_cast<double>(report.params)};
}

MnsgaEngine::MnsgaEngine(MnsgaConfig config, SearchSpaceSpec space,
                         const Evaluator& evaluator)
    : config_(std::move(config)), space_(std::move(space)), evaluator_(evaluator) {
    config_.check();
    const auto [max_macs, max_params] = space_max_cost(space_);
    macs_normalizer_ = std::min(config_.g1_max_macs, max_macs);
    params_normalizer_ = std::min(config_.g2_max_params, max_params);
}

double MnsgaEngine::archive_hypervolume(const ParetoArchive& archive) const {
    std::vector<ObjectiveVector> points;
    points.reserve(archive.size());
    for (const auto& entry : archive.entries()) {
        points.push_back({entry.objectives[0], entry.objectives[1] / macs_normalizer_,
                          entry.objectives[2] / params_normalizer_});
    }
    return hypervolume(points, {1.0, 1.1, 1.1});
}

Individual MnsgaEngine::make_individual(Genome genome, RunState& state, bool with_loss) {
    Individual ind;
    const CostReport report = backbone_cost(decode(space_, genome));
    ind.macs = static_cast<double>(report.macs);
    ind.params = static_cast<double>(report.params);
    if (with_loss) {
        ind.loss = evaluator_.evaluate(genome);
        ++state.expensive_evaluations;
    }
    ind.genome = std::move(genome);
    ind.id = state.next_id++;
    return ind;
}

void MnsgaEngine::ensure_losses(Population& pop, RunState& state) {
    for (auto& ind : pop.members) {
        if (!ind.loss) {
            ind.loss = evaluator_.evaluate(ind.genome);
            ++state.expensive_evaluations;
        }
    }
}

void MnsgaEngine::record_metrics(RunState& state) {
    MetricsRow row;
    row.generation = state.generation;
    row.archive_size = state.archive.size();
    row.hypervolume = archive_hypervolume(state.archive);
    row.best_loss = kInfinity;
    row.min_macs = kInfinity;
    for (const auto& entry : state.archive.entries()) {
        row.best_loss = std::min(row.best_loss, entry.objectives[0]);
        row.min_macs = std::min(row.min_macs, entry.objectives[1]);
    }
    state.metrics.push_back(row);
}

RunState MnsgaEngine::initialize() {
    RunState state;
    const int n = config_.population_size;
    for (int i = 0; i < n; ++i) {
        Rng rng = Rng::derive(config_.seed, 0, 0, i);
        state.population.members.push_back(
            make_individual(random_genome(space_, rng), state, true));
    }
    state.population.generation = 0;
    rank_population(state.population, true);
    for (const auto& ind : state.population.members) {
        if (ind.rank == 1) {
            state.archive.insert(ind.genome, ind.full_objectives(), 0);
        }
    }
    record_metrics(state);
    return state;
}

Population MnsgaEngine::stage1_offspring(RunState& state) {
    const int n = config_.population_size;
    const std::int64_t budget = config_.effective_trial_budget();
    const std::int64_t cap = 32ll * n;

    Population q1;
    q1.generation = state.generation;
    struct Rejected {
        Genome genome;
        double violation;
        std::int64_t trial;
    };
    std::vector<Rejected> rejected;

    std::int64_t trials = 0;
    while ((trials < budget || static_cast<int>(q1.members.size()) < n) && trials < cap) {
        Rng rng = Rng::derive(config_.seed, state.generation, 1, trials);
        const Individual& p1 = binary_tournament(state.population, rng);
        const Individual& p2 = binary_tournament(state.population, rng);
        Genome child = crossover(space_, p1.genome, p2.genome, config_.crossover_prob, rng);
        child = mutate(space_, child, config_.mutation_prob, rng);
        ++trials;

        const CostReport report = backbone_cost(decode(space_, child));
        const double macs = static_cast<double>(report.macs);
        const double params = static_cast<double>(report.params);
        if (macs <= config_.g1_max_macs && params <= config_.g2_max_params) {
            Individual ind;
            ind.genome = std::move(child);
            ind.macs = macs;
            ind.params = params;
            ind.id = state.next_id++;
            q1.members.push_back(std::move(ind));
        } else {
            const double violation =
                std::max(0.0, (macs - config_.g1_max_macs) / config_.g1_max_macs) +
                std::max(0.0, (params - config_.g2_max_params) / config_.g2_max_params);
            rejected.push_back({std::move(child), violation, trials});
        }
    }

    if (static_cast<int>(q1.members.size()) < n) {
        if (q1.members.empty()) {
            throw InfeasibleConstraints(
                "no offspring satisfied g1/g2 within " + std::to_string(cap) + " trials");
        }
        std::stable_sort(rejected.begin(), rejected.end(),
                         [](const Rejected& a, const Rejected& b) {
                             return a.violation < b.violation;
                         });
        std::size_t take = 0;
        while (static_cast<int>(q1.members.size()) < n && take < rejected.size()) {
            auto& r = rejected[take++];
            const CostReport report = backbone_cost(decode(space_, r.genome));
            Individual ind;
            ind.genome = std::move(r.genome);
            ind.macs = static_cast<double>(report.macs);
            ind.params = static_cast<double>(report.params);
            ind.id = state.next_id++;
            q1.members.push_back(std::move(ind));
        }
        state.events.push_back("generation " + std::to_string(state.generation) +
                               ": stage-1 cap reached, padded Q1 with " +
                               std::to_string(take) + " least-violating candidates");
    }
    return q1;
}

Population MnsgaEngine::environmental_select(const Population& union_pop,
                                             bool use_loss) const {
    std::vector<ObjectiveVector> objectives;
    objectives.reserve(union_pop.members.size());
    for (const auto& ind : union_pop.members) {
        objectives.push_back(use_loss ? ind.full_objectives() : ind.cheap_objectives());
    }
    const auto fronts = fast_nondominated_sort(objectives);

    Population selected;
    selected.generation = union_pop.generation;
    const std::size_t n = static_cast<std::size_t>(config_.population_size);
    for (const auto& front : fronts) {
        if (selected.members.size() + front.size() <= n) {
            for (std::size_t idx : front) selected.members.push_back(union_pop.members[idx]);
            continue;
        }
        std::vector<ObjectiveVector> front_objectives;
        for (std::size_t idx : front) front_objectives.push_back(objectives[idx]);
        const auto distances = crowding_distance(front_objectives);
        std::vector<std::size_t> order(front.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (distances[a] != distances[b]) return distances[a] > distances[b];
            return union_pop.members[front[a]].id < union_pop.members[front[b]].id;
        });
        for (std::size_t k = 0; selected.members.size() < n; ++k) {
            selected.members.push_back(union_pop.members[front[order[k]]]);
        }
        break;
    }
    rank_population(selected, use_loss);
    return selected;
}

Population MnsgaEngine::stage1_selection(const Population& parents, const Population& q1) {
    Population merged;
    merged.generation = q1.generation;
    merged.members = parents.members;
    merged.members.insert(merged.members.end(), q1.members.begin(), q1.members.end());
    return environmental_select(merged, false);
}

Population MnsgaEngine::stage2_offspring(const Population& parents, RunState& state) {
    Population q;
    q.generation = state.generation;
    for (int i = 0; i < config_.population_size; ++i) {
        Rng rng = Rng::derive(config_.seed, state.generation, 2, i);
        const Individual& p1 = binary_tournament(parents, rng);
        const Individual& p2 = binary_tournament(parents, rng);
        Genome child = crossover(space_, p1.genome, p2.genome, config_.crossover_prob, rng);
        child = mutate(space_, child, config_.mutation_prob, rng);
        q.members.push_back(make_individual(std::move(child), state, true));
    }
    return q;
}

Population MnsgaEngine::stage2_selection(Population& parents, Population& offspring,
                                         RunState& state) {
    ensure_losses(parents, state);  // stage-1 survivors may lack L_val
    Population merged;
    merged.generation = state.generation;
    merged.members = parents.members;
    merged.members.insert(merged.members.end(), offspring.members.begin(),
                          offspring.members.end());
    for (const auto& ind : merged.members) {
        state.archive.insert(ind.genome, ind.full_objectives(), state.generation);
    }
    return environmental_select(merged, true);
}

RunState MnsgaEngine::resume(RunState state, bool baseline,
                             const GenerationCallback& on_generation) {
    for (int t = state.generation + 1; t <= config_.generations; ++t) {
        state.generation = t;
        if (baseline) {
            Population q;
            q.generation = t;
            for (int i = 0; i < config_.population_size; ++i) {
                Rng rng = Rng::derive(config_.seed, t, 3, i);
                const Individual& p1 = binary_tournament(state.population, rng);
                const Individual& p2 = binary_tournament(state.population, rng);
                Genome child =
                    crossover(space_, p1.genome, p2.genome, config_.crossover_prob, rng);
                child = mutate(space_, child, config_.mutation_prob, rng);
                q.members.push_back(make_individual(std::move(child), state, true));
            }
            state.population = stage2_selection(state.population, q, state);
        } else {
            Population q1 = stage1_offspring(state);
            Population survivors = stage1_selection(state.population, q1);
            Population q = stage2_offspring(survivors, state);
            state.population = stage2_selection(survivors, q, state);
        }
        record_metrics(state);
        if (on_generation) on_generation(state);
    }
    return state;
}

RunState MnsgaEngine::run(const GenerationCallback& on_generation) {
    return resume(initialize(), false, on_generation);
}

RunState MnsgaEngine::run_nsga2_baseline(const GenerationCallback& on_generation) {
    return resume(initialize(), true, on_generation);
}

}  // namespace mnsga
