#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mnsga/cost_model.hpp"
#include "mnsga/engine.hpp"
#include "mnsga/persistence.hpp"
#include "mnsga/search_space.hpp"
#include "mnsga/weight_mapping.hpp"

namespace fs = std::filesystem;
using namespace mnsga;

namespace {

constexpr const char* kVersion = "0.1.0";

int run_search(const std::string& config_path, std::int64_t seed_override,
               const std::string& resume_path) {
    const std::string config_text = read_file(config_path);
    RunSpec spec = parse_run_spec(config_text);
    if (seed_override >= 0) spec.config.seed = static_cast<std::uint64_t>(seed_override);
    const std::uint64_t config_hash = run_spec_hash(config_text) ^ spec.config.seed;

    const auto evaluator = make_evaluator(spec);
    MnsgaEngine engine(spec.config, spec.space, *evaluator);

    fs::create_directories(spec.output_dir);
    const auto out = [&](const std::string& name) {
        return (fs::path(spec.output_dir) / name).string();
    };

    {
        nlohmann::json header;
        header["artifact_version"] = kVersion;
        header["config_hash"] = config_hash;
        header["seed"] = spec.config.seed;
        header["space_hash"] = space_hash(spec.space);
        header["algorithm"] = spec.baseline ? "nsga2" : "mnsga";
        header["hypervolume_reference"] = {1.0, 1.1, 1.1};
        header["macs_normalizer"] = engine.macs_normalizer();
        header["params_normalizer"] = engine.params_normalizer();
        write_file(out("run_header.json"), header.dump(2) + "\n");
    }

    const auto snapshot_name = [](int generation) {
        char buffer[32];
        std::snprintf(buffer, sizeof buffer, "gen_%04d.json", generation);
        return std::string(buffer);
    };
    const auto on_generation = [&](const RunState& state) {
        write_file(out(snapshot_name(state.generation)),
                   snapshot_to_json(state, config_hash));
    };

    RunState final_state;
    try {
        if (!resume_path.empty()) {
            RunState state = snapshot_from_json(read_file(resume_path), config_hash);
            final_state = engine.resume(std::move(state), spec.baseline, on_generation);
        } else if (spec.baseline) {
            final_state = engine.run_nsga2_baseline(on_generation);
        } else {
            final_state = engine.run(on_generation);
        }
    } catch (const InfeasibleConstraints& e) {
        std::cerr << "infeasible constraints (g1=" << spec.config.g1_max_macs
                  << ", g2=" << spec.config.g2_max_params << "): " << e.what() << "\n";
        return 2;
    }

    write_file(out("archive.json"), archive_to_json(final_state.archive) + "\n");
    write_file(out("metrics.csv"), metrics_to_csv(final_state.metrics));
    for (const auto& event : final_state.events) std::cerr << "note: " << event << "\n";
    std::cout << "archive size " << final_state.archive.size() << ", expensive evaluations "
              << final_state.expensive_evaluations << "\n";
    return 0;
}

int run_cost(const std::string& arch_path, const std::string& genome_path, int resolution,
             bool as_json) {
    SearchSpaceSpec space = default_space();
    space.input_resolution = resolution;
    ArchitectureDesc arch;
    if (!arch_path.empty()) {
        arch = parse_architecture(read_file(arch_path));
        if (resolution != default_space().input_resolution) {
            // Re-derive spatial sizes at the requested resolution.
            arch = decode(space, encode(space, arch));
        }
    } else {
        arch = decode(space, genome_from_json(read_file(genome_path)));
    }
    const CostReport report = backbone_cost(arch);
    if (as_json) {
        std::cout << report.to_json() << "\n";
        return 0;
    }
    const std::string table = format_architecture(arch);
    std::istringstream lines(table);
    std::string line;
    std::size_t layer = 0;
    while (std::getline(lines, line)) {
        std::cout << line << " " << report.per_layer[layer].macs << " "
                  << report.per_layer[layer].params << "\n";
        ++layer;
    }
    std::cout << "total macs " << report.macs << "\n"
              << "total flops " << report.flops << "\n"
              << "total params " << report.params << "\n";
    return 0;
}

int run_map_weights(const std::string& supernet_path, const std::string& genome_path,
                    const std::string& out_path, const std::string& config_path) {
    const SupernetWeights supernet = SupernetWeights::load(supernet_path);
    SearchSpaceSpec space = default_space();
    if (!config_path.empty()) space = parse_run_spec(read_file(config_path)).space;
    if (supernet.space_hash_value() != space_hash(space)) {
        std::cerr << "space hash mismatch: supernet " << supernet.space_hash_value()
                  << ", expected space " << space_hash(space) << "\n";
        return 1;
    }
    const Genome genome = genome_from_json(read_file(genome_path));
    const MappedWeights mapped = map_individual(supernet, space, genome);
    save_mapped(mapped, out_path);
    for (const auto& layer : mapped.layers) {
        std::cout << "stage " << layer.stage << " slot " << layer.slot << " "
                  << op_name(layer.op) << " dims (" << layer.weights.out << ", "
                  << layer.weights.in << ", " << layer.weights.h << ", "
                  << layer.weights.w << ")\n";
    }
    return 0;
}

int run_export_front(const std::string& archive_path, const std::string& format,
                     const std::string& out_path) {
    const ParetoArchive archive = archive_from_json(read_file(archive_path));
    if (archive.size() == 0) {
        std::cerr << "empty archive: " << archive_path << "\n";
        return 1;
    }
    write_file(out_path,
               format == "csv" ? export_front_csv(archive) : export_front_svg(archive));
    return 0;
}

int run_make_supernet(std::uint64_t seed, const std::string& out_path,
                      const std::string& config_path) {
    SearchSpaceSpec space = default_space();
    if (!config_path.empty()) space = parse_run_spec(read_file(config_path)).space;
    SupernetWeights::build(space, seed).save(out_path);
    std::cout << "supernet written, space hash " << space_hash(space) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MNSGA-NAS: constrained non-dominated-sorting backbone search"};
    app.require_subcommand(1);

    std::string config_path, resume_path;
    std::int64_t seed_override = -1;
    auto* search = app.add_subcommand("search", "run the evolutionary search");
    search->add_option("--config", config_path, "run config JSON")->required();
    search->add_option("--seed", seed_override, "override the config seed");
    search->add_option("--resume", resume_path, "resume from a gen_####.json snapshot");

    std::string arch_path, genome_path;
    int resolution = 320;
    bool cost_json = false;
    auto* cost = app.add_subcommand("cost", "MACs/params of an architecture");
    auto* arch_opt = cost->add_option("--arch", arch_path, "layer-table text file");
    cost->add_option("--genome", genome_path, "genome JSON file")->excludes(arch_opt);
    cost->add_option("--resolution", resolution, "input resolution (default 320)");
    cost->add_flag("--json", cost_json, "emit the CostReport as JSON");

    std::string supernet_path, map_out, map_config;
    auto* map = app.add_subcommand("map-weights", "extract individual weights");
    map->add_option("--supernet", supernet_path, "supernet container")->required();
    auto* map_genome = map->add_option("--genome", genome_path, "genome JSON file");
    map_genome->required();
    map->add_option("--out", map_out, "output container path")->required();
    map->add_option("--config", map_config, "run config with space overrides");

    std::string archive_path, front_format = "csv", front_out;
    auto* front = app.add_subcommand("export-front", "export the Pareto front");
    front->add_option("--archive", archive_path, "archive.json path")->required();
    front->add_option("--format", front_format, "csv or svg")
        ->check(CLI::IsMember({"csv", "svg"}));
    front->add_option("--out", front_out, "output file")->required();

    std::uint64_t supernet_seed = 0;
    std::string supernet_out, supernet_config;
    auto* make = app.add_subcommand("make-supernet", "build a seeded supernet container");
    make->add_option("--seed", supernet_seed, "initialization seed");
    make->add_option("--out", supernet_out, "output container path")->required();
    make->add_option("--config", supernet_config, "run config with space overrides");

    CLI11_PARSE(app, argc, argv);

    try {
        if (search->parsed()) return run_search(config_path, seed_override, resume_path);
        if (cost->parsed()) {
            if (arch_path.empty() == genome_path.empty()) {
                std::cerr << "cost needs exactly one of --arch or --genome\n";
                return 1;
            }
            return run_cost(arch_path, genome_path, resolution, cost_json);
        }
        if (map->parsed()) {
            return run_map_weights(supernet_path, genome_path, map_out, map_config);
        }
        if (front->parsed()) return run_export_front(archive_path, front_format, front_out);
        if (make->parsed()) return run_make_supernet(supernet_seed, supernet_out,
                                                     supernet_config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
