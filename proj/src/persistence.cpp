#include "mnsga/persistence.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mnsga {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& context) {
    for (const auto& [key, value] : j.items()) {
        bool found = false;
        for (const char* k : known) {
            if (key == k) { found = true; break; }
        }
        if (!found) {
            throw std::invalid_argument("unknown key \"" + key + "\" in " + context);
        }
    }
}

SearchSpaceSpec parse_space_overrides(const json& j) {
    SearchSpaceSpec space = default_space();
    reject_unknown(j, {"max_slots", "input_resolution", "channels", "allowed_ops"},
                   "space");
    if (j.contains("input_resolution")) {
        space.input_resolution = j.at("input_resolution").get<int>();
        if (space.input_resolution < 1) {
            throw std::invalid_argument("input_resolution must be positive");
        }
    }
    if (j.contains("max_slots")) {
        const auto slots = j.at("max_slots").get<std::vector<int>>();
        if (slots.size() != 5) {
            throw std::invalid_argument("max_slots needs 5 entries (stages 2..6)");
        }
        for (int s = 2; s <= 6; ++s) {
            if (slots[s - 2] < 1) throw std::invalid_argument("max_slots must be >= 1");
            space.stages[s - 1].max_slots = slots[s - 2];
        }
    }
    if (j.contains("channels")) {
        const auto sets = j.at("channels").get<std::vector<std::vector<int>>>();
        if (sets.size() != 5) {
            throw std::invalid_argument("channels needs 5 sets (stages 2..6)");
        }
        for (int s = 2; s <= 6; ++s) {
            const auto& set = sets[s - 2];
            if (set.empty()) throw std::invalid_argument("empty channel set");
            for (std::size_t k = 1; k < set.size(); ++k) {
                if (set[k] <= set[k - 1]) {
                    throw std::invalid_argument("channel sets must be strictly increasing");
                }
            }
            space.stages[s - 1].allowed_channels = set;
        }
    }
    if (j.contains("allowed_ops")) {
        space.allowed_ops.clear();
        for (const auto& name : j.at("allowed_ops")) {
            const auto op = op_from_name(name.get<std::string>());
            if (!op || *op == OpKind::Identity) {
                throw std::invalid_argument("allowed_ops entries must be K3GBe1..K3GBe6");
            }
            space.allowed_ops.push_back(*op);
        }
        if (space.allowed_ops.empty()) {
            throw std::invalid_argument("allowed_ops must not be empty");
        }
    }
    return space;
}

json individual_to_json(const Individual& ind) {
    json j;
    j["genome"] = json::parse(genome_to_json(ind.genome));
    if (ind.loss) j["loss"] = *ind.loss;
    j["macs"] = ind.macs;
    j["params"] = ind.params;
    j["id"] = ind.id;
    return j;
}

Individual individual_from_json(const json& j) {
    Individual ind;
    ind.genome = genome_from_json(j.at("genome").dump());
    if (j.contains("loss")) ind.loss = j.at("loss").get<double>();
    ind.macs = j.at("macs").get<double>();
    ind.params = j.at("params").get<double>();
    ind.id = j.at("id").get<std::uint64_t>();
    return ind;
}

}  // namespace

RunSpec parse_run_spec(const std::string& json_text) {
    const json j = json::parse(json_text);
    reject_unknown(j,
                   {"algorithm", "population_size", "generations", "crossover_prob",
                    "mutation_prob", "g1_max_macs", "g2_max_params",
                    "stage1_trial_budget", "seed", "space", "evaluator", "output_dir"},
                   "run config");
    RunSpec spec;
    if (j.contains("algorithm")) {
        const auto algo = j.at("algorithm").get<std::string>();
        if (algo == "nsga2") {
            spec.baseline = true;
        } else if (algo != "mnsga") {
            throw std::invalid_argument("algorithm must be \"mnsga\" or \"nsga2\"");
        }
    }
    auto& c = spec.config;
    if (j.contains("population_size")) c.population_size = j.at("population_size").get<int>();
    if (j.contains("generations")) c.generations = j.at("generations").get<int>();
    if (j.contains("crossover_prob")) c.crossover_prob = j.at("crossover_prob").get<double>();
    if (j.contains("mutation_prob")) c.mutation_prob = j.at("mutation_prob").get<double>();
    if (j.contains("g1_max_macs")) c.g1_max_macs = j.at("g1_max_macs").get<double>();
    if (j.contains("g2_max_params")) c.g2_max_params = j.at("g2_max_params").get<double>();
    if (j.contains("stage1_trial_budget")) {
        c.stage1_trial_budget = j.at("stage1_trial_budget").get<std::int64_t>();
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    c.check();

    spec.space = j.contains("space") ? parse_space_overrides(j.at("space"))
                                     : default_space();
    if (j.contains("evaluator")) {
        const json& e = j.at("evaluator");
        reject_unknown(e, {"name", "coefficients", "supernet"}, "evaluator");
        spec.evaluator.name = e.at("name").get<std::string>();
        if (spec.evaluator.name == "surrogate") {
            if (e.contains("coefficients")) {
                spec.evaluator.surrogate.stage_coefficients =
                    e.at("coefficients").get<std::vector<double>>();
            }
            if (e.contains("supernet")) {
                throw std::invalid_argument("surrogate evaluator takes no supernet");
            }
        } else if (spec.evaluator.name == "proxy") {
            spec.evaluator.supernet_path = e.at("supernet").get<std::string>();
        } else {
            throw std::invalid_argument("evaluator must be \"surrogate\" or \"proxy\"");
        }
    }
    if (j.contains("output_dir")) spec.output_dir = j.at("output_dir").get<std::string>();
    return spec;
}

RunSpec load_run_spec(const std::string& path) {
    return parse_run_spec(read_file(path));
}

std::uint64_t run_spec_hash(const std::string& json_text) {
    const std::string canon = json::parse(json_text).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : canon) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::unique_ptr<Evaluator> make_evaluator(const RunSpec& spec) {
    if (spec.evaluator.name == "surrogate") {
        return std::make_unique<SurrogateEvaluator>(spec.space, spec.evaluator.surrogate);
    }
    auto supernet =
        std::make_shared<SupernetWeights>(SupernetWeights::load(spec.evaluator.supernet_path));
    return std::make_unique<ProxyEvaluator>(spec.space, std::move(supernet));
}

std::string archive_to_json(const ParetoArchive& archive) {
    json j = json::array();
    for (const auto& entry : archive.entries()) {
        j.push_back({{"genome", json::parse(genome_to_json(entry.genome))},
                     {"loss", entry.objectives[0]},
                     {"macs", entry.objectives[1]},
                     {"params", entry.objectives[2]},
                     {"generation", entry.generation}});
    }
    return j.dump(2);
}

ParetoArchive archive_from_json(const std::string& text) {
    ParetoArchive archive;
    for (const auto& entry : json::parse(text)) {
        archive.insert(genome_from_json(entry.at("genome").dump()),
                       {entry.at("loss").get<double>(), entry.at("macs").get<double>(),
                        entry.at("params").get<double>()},
                       entry.at("generation").get<int>());
    }
    return archive;
}

namespace {

std::string full_precision(double v) {
    std::ostringstream out;
    out.precision(std::numeric_limits<double>::max_digits10);
    out << v;
    return out.str();
}

}  // namespace

std::string metrics_to_csv(const std::vector<MetricsRow>& rows) {
    std::ostringstream out;
    out << "generation,archive_size,hypervolume,best_loss,min_macs\n";
    for (const auto& row : rows) {
        out << row.generation << "," << row.archive_size << ","
            << full_precision(row.hypervolume) << "," << full_precision(row.best_loss)
            << "," << full_precision(row.min_macs) << "\n";
    }
    return out.str();
}

std::string snapshot_to_json(const RunState& state, std::uint64_t config_hash) {
    json j;
    j["config_hash"] = config_hash;
    j["generation"] = state.generation;
    j["next_id"] = state.next_id;
    j["expensive_evaluations"] = state.expensive_evaluations;
    j["events"] = state.events;
    j["population"] = json::array();
    for (const auto& ind : state.population.members) {
        j["population"].push_back(individual_to_json(ind));
    }
    j["archive"] = json::parse(archive_to_json(state.archive));
    j["metrics"] = json::array();
    for (const auto& row : state.metrics) {
        j["metrics"].push_back({{"generation", row.generation},
                                {"archive_size", row.archive_size},
                                {"hypervolume", row.hypervolume},
                                {"best_loss", row.best_loss},
                                {"min_macs", row.min_macs}});
    }
    return j.dump(2);
}

RunState snapshot_from_json(const std::string& text, std::uint64_t expected_config_hash) {
    const json j = json::parse(text);
    if (j.at("config_hash").get<std::uint64_t>() != expected_config_hash) {
        throw std::invalid_argument("snapshot was produced by a different config");
    }
    RunState state;
    state.generation = j.at("generation").get<int>();
    state.next_id = j.at("next_id").get<std::uint64_t>();
    state.expensive_evaluations = j.at("expensive_evaluations").get<std::int64_t>();
    state.events = j.at("events").get<std::vector<std::string>>();
    for (const auto& ind_j : j.at("population")) {
        state.population.members.push_back(individual_from_json(ind_j));
    }
    state.population.generation = state.generation;
    rank_population(state.population, true);
    state.archive = archive_from_json(j.at("archive").dump());
    for (const auto& row_j : j.at("metrics")) {
        state.metrics.push_back({row_j.at("generation").get<int>(),
                                 row_j.at("archive_size").get<std::size_t>(),
                                 row_j.at("hypervolume").get<double>(),
                                 row_j.at("best_loss").get<double>(),
                                 row_j.at("min_macs").get<double>()});
    }
    return state;
}

std::string export_front_csv(const ParetoArchive& archive) {
    std::ostringstream out;
    out << "loss,macs,params,generation\n";
    for (const auto& entry : archive.entries()) {
        out << full_precision(entry.objectives[0]) << ","
            << full_precision(entry.objectives[1]) << ","
            << full_precision(entry.objectives[2]) << "," << entry.generation << "\n";
    }
    return out.str();
}

std::string export_front_svg(const ParetoArchive& archive) {
    if (archive.size() == 0) throw std::invalid_argument("empty archive");
    double min_macs = kInfinity, max_macs = -kInfinity;
    double min_loss = kInfinity, max_loss = -kInfinity;
    for (const auto& entry : archive.entries()) {
        min_macs = std::min(min_macs, entry.objectives[1]);
        max_macs = std::max(max_macs, entry.objectives[1]);
        min_loss = std::min(min_loss, entry.objectives[0]);
        max_loss = std::max(max_loss, entry.objectives[0]);
    }
    const double macs_range = max_macs > min_macs ? max_macs - min_macs : 1.0;
    const double loss_range = max_loss > min_loss ? max_loss - min_loss : 1.0;
    const int width = 640, height = 480, margin = 60;

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\">\n"
        << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "  <line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
        << width - margin << "\" y2=\"" << height - margin
        << "\" stroke=\"black\"/>\n"
        << "  <line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin
        << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n"
        << "  <text x=\"" << width / 2 << "\" y=\"" << height - margin / 3
        << "\" text-anchor=\"middle\">backbone MACs</text>\n"
        << "  <text x=\"" << margin / 3 << "\" y=\"" << height / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 " << margin / 3 << " "
        << height / 2 << ")\">loss</text>\n";
    for (const auto& entry : archive.entries()) {
        const double x = margin + (entry.objectives[1] - min_macs) / macs_range *
                                      (width - 2.0 * margin);
        const double y = height - margin -
                         (entry.objectives[0] - min_loss) / loss_range *
                             (height - 2.0 * margin);
        out << "  <circle cx=\"" << x << "\" cy=\"" << y
            << "\" r=\"4\" fill=\"steelblue\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace mnsga
