#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "mnsga/persistence.hpp"
#include "support.hpp"

using namespace mnsga;
using namespace mnsga::testing;

namespace {

std::string toy_space_json() {
    return R"({
        "max_slots": [2, 1, 1, 1, 1],
        "channels": [[24, 32], [40, 48], [56], [104], [144]],
        "allowed_ops": ["K3GBe1", "K3GBe2", "K3GBe3"],
        "input_resolution": 64
    })";
}

}  // namespace

TEST_CASE("run spec parsing: defaults, overrides, and rejection") {
    const RunSpec defaults = parse_run_spec("{}");
    CHECK(defaults.config.population_size == 24);
    CHECK(defaults.config.generations == 30);
    CHECK_FALSE(defaults.baseline);
    CHECK(defaults.evaluator.name == "surrogate");
    CHECK(defaults.space.input_resolution == 320);

    const RunSpec spec = parse_run_spec(R"({
        "algorithm": "nsga2",
        "population_size": 12,
        "generations": 7,
        "crossover_prob": 0.8,
        "mutation_prob": 0.25,
        "g1_max_macs": 5e8,
        "seed": 99,
        "space": )" + toy_space_json() + R"(,
        "evaluator": {"name": "surrogate", "coefficients": [1, 2, 3, 4, 5]},
        "output_dir": "runs/a"
    })");
    CHECK(spec.baseline);
    CHECK(spec.config.population_size == 12);
    CHECK(spec.config.g1_max_macs == 5e8);
    CHECK(spec.config.g2_max_params == kInfinity);
    CHECK(spec.space.stage(2).max_slots == 2);
    CHECK(spec.space.stage(6).allowed_channels == std::vector<int>{144});
    CHECK(spec.space.allowed_ops ==
          std::vector<OpKind>{OpKind::GBe1, OpKind::GBe2, OpKind::GBe3});
    CHECK(spec.evaluator.surrogate.stage_coefficients == std::vector<double>{1, 2, 3, 4, 5});
    CHECK(spec.output_dir == "runs/a");

    CHECK_THROWS_AS(parse_run_spec(R"({"popsize": 8})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_run_spec(R"({"space": {"depth": 3}})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_run_spec(R"({"evaluator": {"name": "magic"}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_run_spec(R"({"evaluator": {"name": "surrogate", "extra": 1}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_run_spec(R"({"algorithm": "spea2"})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_run_spec(R"({"population_size": 1})"), std::invalid_argument);
    CHECK_THROWS_AS(
        parse_run_spec(R"({"space": {"channels": [[32, 24], [40], [56], [104], [144]]}})"),
        std::invalid_argument);
    CHECK_THROWS_AS(
        parse_run_spec(R"({"space": {"allowed_ops": ["Identity"]}})"),
        std::invalid_argument);
}

TEST_CASE("run spec hash is stable under whitespace, sensitive to values") {
    const std::string a = R"({"seed": 1, "generations": 5})";
    const std::string b = "{ \"seed\": 1,\n  \"generations\": 5 }";
    const std::string c = R"({"seed": 2, "generations": 5})";
    CHECK(run_spec_hash(a) == run_spec_hash(b));
    CHECK(run_spec_hash(a) != run_spec_hash(c));
}

TEST_CASE("archive json round trip is exact") {
    const auto space = toy_space();
    const SurrogateEvaluator evaluator(space);
    MnsgaConfig config;
    config.population_size = 8;
    config.generations = 3;
    config.seed = 5;
    MnsgaEngine engine(config, space, evaluator);
    const RunState state = engine.run();
    REQUIRE(state.archive.size() > 0);

    const std::string text = archive_to_json(state.archive);
    const ParetoArchive loaded = archive_from_json(text);
    REQUIRE(loaded.size() == state.archive.size());
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        CHECK(loaded.entries()[i].genome == state.archive.entries()[i].genome);
        CHECK(loaded.entries()[i].objectives == state.archive.entries()[i].objectives);
        CHECK(loaded.entries()[i].generation == state.archive.entries()[i].generation);
    }
    // Serialization is deterministic.
    CHECK(archive_to_json(loaded) == text);
}

TEST_CASE("metrics csv carries full precision") {
    std::vector<MetricsRow> rows;
    rows.push_back({0, 3, 0.1234567890123456789, 1.0 / 3.0, 2.5e8});
    rows.push_back({1, 4, 0.2, 0.25, 2.4e8});
    const std::string csv = metrics_to_csv(rows);
    std::istringstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "generation,archive_size,hypervolume,best_loss,min_macs");
    std::string line;
    std::getline(in, line);
    std::istringstream fields(line);
    std::string cell;
    std::getline(fields, cell, ',');
    CHECK(cell == "0");
    std::getline(fields, cell, ',');
    CHECK(cell == "3");
    std::getline(fields, cell, ',');
    CHECK(std::stod(cell) == 0.1234567890123456789);
    std::getline(fields, cell, ',');
    CHECK(std::stod(cell) == 1.0 / 3.0);
}

TEST_CASE("snapshot round trip resumes to an identical run") {
    const auto space = toy_space();
    const SurrogateEvaluator evaluator(space);
    MnsgaConfig config;
    config.population_size = 8;
    config.generations = 6;
    config.seed = 77;
    MnsgaEngine engine(config, space, evaluator);

    // Stop after generation 3, snapshot, resume, compare with a straight run.
    RunState mid;
    engine.run([&](const RunState& s) {
        if (s.generation == 3) mid = s;
    });
    const RunState straight = engine.run();

    const std::uint64_t hash = 0xabcdef01;
    const std::string text = snapshot_to_json(mid, hash);
    CHECK_THROWS_AS(snapshot_from_json(text, hash + 1), std::invalid_argument);
    RunState restored = snapshot_from_json(text, hash);
    CHECK(restored.generation == 3);
    CHECK(restored.next_id == mid.next_id);
    CHECK(restored.expensive_evaluations == mid.expensive_evaluations);
    const RunState resumed = engine.resume(std::move(restored), false);

    REQUIRE(resumed.population.members.size() == straight.population.members.size());
    for (std::size_t i = 0; i < resumed.population.members.size(); ++i) {
        CHECK(resumed.population.members[i].genome == straight.population.members[i].genome);
        CHECK(resumed.population.members[i].loss == straight.population.members[i].loss);
        CHECK(resumed.population.members[i].id == straight.population.members[i].id);
    }
    CHECK(archive_to_json(resumed.archive) == archive_to_json(straight.archive));
    REQUIRE(resumed.metrics.size() == straight.metrics.size());
    for (std::size_t i = 0; i < resumed.metrics.size(); ++i) {
        CHECK(resumed.metrics[i].hypervolume == straight.metrics[i].hypervolume);
    }
}

TEST_CASE("front csv exports and re-imports exactly") {
    ParetoArchive archive;
    Genome g;
    archive.insert(g, {1.0 / 3.0, 123456789.0, 7654321.0}, 2);
    archive.insert(g, {0.5, 1e8, 9e6}, 4);
    const std::string csv = export_front_csv(archive);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "loss,macs,params,generation");
    std::size_t row = 0;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string cell;
        std::getline(fields, cell, ',');
        CHECK(std::stod(cell) == archive.entries()[row].objectives[0]);
        std::getline(fields, cell, ',');
        CHECK(std::stod(cell) == archive.entries()[row].objectives[1]);
        std::getline(fields, cell, ',');
        CHECK(std::stod(cell) == archive.entries()[row].objectives[2]);
        std::getline(fields, cell, ',');
        CHECK(std::stoi(cell) == archive.entries()[row].generation);
        ++row;
    }
    CHECK(row == archive.size());
}

TEST_CASE("front svg is well formed and plots every point") {
    ParetoArchive archive;
    Genome g;
    archive.insert(g, {0.2, 4e8, 3e6}, 1);
    archive.insert(g, {0.4, 2e8, 4e6}, 1);
    archive.insert(g, {0.6, 1e8, 5e6}, 2);
    const std::string svg = export_front_svg(archive);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    std::size_t circles = 0, pos = 0;
    while ((pos = svg.find("<circle", pos)) != std::string::npos) {
        ++circles;
        pos += 7;
    }
    CHECK(circles == archive.size());
    CHECK_THROWS_AS(export_front_svg(ParetoArchive{}), std::invalid_argument);
}

TEST_CASE("file helpers round trip bytes") {
    namespace fs = std::filesystem;
    const auto path = (fs::temp_directory_path() / "mnsga_file_test.txt").string();
    const std::string payload = "line1\nline2\x01\x02";
    write_file(path, payload);
    CHECK(read_file(path) == payload);
    fs::remove(path);
    CHECK_THROWS_AS(read_file(path), std::runtime_error);
}
