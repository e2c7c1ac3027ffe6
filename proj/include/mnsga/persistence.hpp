#ifndef MNSGA_PERSISTENCE_HPP
#define MNSGA_PERSISTENCE_HPP

#include <memory>
#include <string>

#include "mnsga/engine.hpp"
#include "mnsga/evaluators.hpp"

namespace mnsga {

struct EvaluatorSpec {
    std::string name = "surrogate";  // or "proxy"
    SurrogateParams surrogate;
    std::string supernet_path;  // proxy only
};

// Parsed run configuration file; unknown keys are rejected.
struct RunSpec {
    MnsgaConfig config;
    SearchSpaceSpec space;
    EvaluatorSpec evaluator;
    bool baseline = false;  // algorithm: nsga2
    std::string output_dir = "out";
};

RunSpec parse_run_spec(const std::string& json_text);
RunSpec load_run_spec(const std::string& path);
std::uint64_t run_spec_hash(const std::string& json_text);

std::unique_ptr<Evaluator> make_evaluator(const RunSpec& spec);

std::string archive_to_json(const ParetoArchive& archive);
ParetoArchive archive_from_json(const std::string& text);

std::string metrics_to_csv(const std::vector<MetricsRow>& rows);

// Full-state snapshot (population, archive, counters); enough to resume a
// run deterministically together with the original config.
std::string snapshot_to_json(const RunState& state, std::uint64_t config_hash);
RunState snapshot_from_json(const std::string& text, std::uint64_t expected_config_hash);

std::string export_front_csv(const ParetoArchive& archive);
std::string export_front_svg(const ParetoArchive& archive);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace mnsga

#endif
