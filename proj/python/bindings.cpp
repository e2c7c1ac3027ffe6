#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mnsga/cost_model.hpp"
#include "mnsga/engine.hpp"
#include "mnsga/persistence.hpp"
#include "mnsga/rng.hpp"
#include "mnsga/search_space.hpp"
#include "mnsga/weight_mapping.hpp"

namespace py = pybind11;
using namespace mnsga;

namespace {

SearchSpaceSpec space_from_config(const std::string& config_json) {
    return config_json.empty() ? default_space()
                               : parse_run_spec(config_json).space;
}

}  // namespace

PYBIND11_MODULE(_mnsga, m) {
    m.doc() = "Constrained non-dominated-sorting backbone search";

    m.def("random_genome_json",
          [](std::uint64_t seed, const std::string& config_json) {
              auto space = space_from_config(config_json);
              Rng rng(seed);
              return genome_to_json(random_genome(space, rng));
          },
          py::arg("seed"), py::arg("config_json") = "",
          "Sample a uniform genome and return it as JSON");

    m.def("validate_genome_json",
          [](const std::string& genome_json, const std::string& config_json) {
              const auto space = space_from_config(config_json);
              std::vector<std::string> messages;
              for (const auto& v : validate(space, genome_from_json(genome_json)).violations) {
                  messages.push_back(v.message);
              }
              return messages;
          },
          py::arg("genome_json"), py::arg("config_json") = "",
          "Return the list of violation messages (empty when valid)");

    m.def("cost_of_genome_json",
          [](const std::string& genome_json, const std::string& config_json) {
              const auto space = space_from_config(config_json);
              const CostReport report =
                  backbone_cost(decode(space, genome_from_json(genome_json)));
              py::dict out;
              out["macs"] = report.macs;
              out["params"] = report.params;
              out["flops"] = report.flops;
              return out;
          },
          py::arg("genome_json"), py::arg("config_json") = "");

    m.def("cost_of_architecture",
          [](const std::string& table_text) {
              const CostReport report = backbone_cost(parse_architecture(table_text));
              py::dict out;
              out["macs"] = report.macs;
              out["params"] = report.params;
              out["flops"] = report.flops;
              return out;
          },
          py::arg("table_text"), "Cost of a layer-table architecture description");

    m.def("surrogate_loss",
          [](const std::string& genome_json, const std::string& config_json) {
              const auto space = space_from_config(config_json);
              return surrogate_loss(space, genome_from_json(genome_json), SurrogateParams{});
          },
          py::arg("genome_json"), py::arg("config_json") = "");

    m.def("search",
          [](const std::string& config_json) {
              const RunSpec spec = parse_run_spec(config_json);
              const auto evaluator = make_evaluator(spec);
              MnsgaEngine engine(spec.config, spec.space, *evaluator);
              const RunState state =
                  spec.baseline ? engine.run_nsga2_baseline() : engine.run();
              py::dict out;
              out["archive_json"] = archive_to_json(state.archive);
              out["metrics_csv"] = metrics_to_csv(state.metrics);
              out["expensive_evaluations"] = state.expensive_evaluations;
              out["events"] = state.events;
              return out;
          },
          py::arg("config_json"),
          "Run a full search described by a run-config JSON document");

    m.def("make_supernet",
          [](const std::string& path, std::uint64_t seed, const std::string& config_json) {
              SupernetWeights::build(space_from_config(config_json), seed).save(path);
          },
          py::arg("path"), py::arg("seed"), py::arg("config_json") = "");

    m.def("map_weights",
          [](const std::string& supernet_path, const std::string& genome_json,
             const std::string& out_path, const std::string& config_json) {
              const auto space = space_from_config(config_json);
              const auto supernet = SupernetWeights::load(supernet_path);
              if (supernet.space_hash_value() != space_hash(space)) {
                  throw std::invalid_argument("space hash mismatch");
              }
              const MappedWeights mapped =
                  map_individual(supernet, space, genome_from_json(genome_json));
              save_mapped(mapped, out_path);
              return mapped.layers.size();
          },
          py::arg("supernet_path"), py::arg("genome_json"), py::arg("out_path"),
          py::arg("config_json") = "",
          "Extract one individual's weights; returns the layer count");

    m.def("space_hash",
          [](const std::string& config_json) {
              return space_hash(space_from_config(config_json));
          },
          py::arg("config_json") = "");
}
