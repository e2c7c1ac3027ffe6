#include "mnsga/search_space.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mnsga {

int expansion_of(OpKind op) {
    switch (op) {
        case OpKind::GBe1: return 1;
        case OpKind::GBe2: return 2;
        case OpKind::GBe3: return 3;
        case OpKind::GBe4: return 4;
        case OpKind::GBe5: return 5;
        case OpKind::GBe6: return 6;
        case OpKind::Identity: break;
    }
    throw std::invalid_argument("Identity has no expansion size");
}

std::string op_name(OpKind op) {
    if (op == OpKind::Identity) return "Identity";
    return "K3GBe" + std::to_string(expansion_of(op));
}

std::optional<OpKind> op_from_name(const std::string& name) {
    if (name == "Identity") return OpKind::Identity;
    for (int e = 1; e <= 6; ++e) {
        if (name == "K3GBe" + std::to_string(e)) {
            return static_cast<OpKind>(e - 1);
        }
    }
    return std::nullopt;
}

SearchSpaceSpec default_space() {
    SearchSpaceSpec space;
    space.stem_channels = 16;
    space.input_resolution = 320;
    const std::vector<std::vector<int>> channels = {
        {16},
        {24, 32},
        {40, 48},
        {56, 64, 72, 80, 88, 96},
        {104, 112, 120, 128},
        {144, 152, 160, 168, 176, 184, 192},
    };
    const std::vector<int> max_slots = {1, 4, 4, 6, 9, 12};
    const std::vector<int> strides = {2, 2, 2, 2, 1, 2};
    for (int i = 0; i < 6; ++i) {
        StageSpec st;
        st.stage_index = i + 1;
        st.allowed_channels = channels[i];
        st.max_slots = max_slots[i];
        st.first_slot_stride = strides[i];
        st.emits_feature = (i + 1 == 3 || i + 1 == 5 || i + 1 == 6);
        space.stages.push_back(std::move(st));
    }
    return space;
}

std::uint64_t space_hash(const SearchSpaceSpec& space) {
    std::ostringstream canon;
    canon << "stem:" << space.stem_channels << ";res:" << space.input_resolution << ";";
    for (const auto& st : space.stages) {
        canon << "s" << st.stage_index << ":slots=" << st.max_slots
              << ",stride=" << st.first_slot_stride << ",feat=" << st.emits_feature << ",ch=";
        for (int c : st.allowed_channels) canon << c << "|";
        canon << ";";
    }
    canon << "ops=";
    for (OpKind op : space.allowed_ops) canon << op_name(op) << "|";
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : canon.str()) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

double space_cardinality(const SearchSpaceSpec& space) {
    double total = 1.0;
    const double k = static_cast<double>(space.allowed_ops.size());
    for (int s = 2; s <= 6; ++s) {
        const auto& st = space.stage(s);
        total *= k * std::pow(k + 1.0, st.max_slots - 1);
        total *= static_cast<double>(st.allowed_channels.size());
    }
    return total;
}

Genome random_genome(const SearchSpaceSpec& space, Rng& rng) {
    Genome g;
    const auto& ops = space.allowed_ops;
    for (int s = 2; s <= 6; ++s) {
        const auto& st = space.stage(s);
        std::vector<OpKind> genes(st.max_slots);
        for (int slot = 0; slot < st.max_slots; ++slot) {
            if (slot == 0) {
                genes[slot] = ops[rng.next_below(ops.size())];
            } else {
                // Identity is one extra allele beyond the concrete menu.
                const auto pick = rng.next_below(ops.size() + 1);
                genes[slot] = pick == ops.size() ? OpKind::Identity : ops[pick];
            }
        }
        g.op_genes.push_back(std::move(genes));
        g.channel_genes.push_back(static_cast<int>(rng.next_below(st.allowed_channels.size())));
    }
    return g;
}

ValidationResult validate(const SearchSpaceSpec& space, const Genome& genome) {
    ValidationResult result;
    const int n = space.num_searched_stages();
    if (static_cast<int>(genome.op_genes.size()) != n ||
        static_cast<int>(genome.channel_genes.size()) != n) {
        result.violations.push_back({ViolationKind::Structural,
                                     "genome stage count does not match space"});
        return result;
    }
    for (int i = 0; i < n; ++i) {
        const int stage_index = i + 2;
        const auto& st = space.stage(stage_index);
        const auto& ops = genome.op_genes[i];
        if (static_cast<int>(ops.size()) != st.max_slots) {
            result.violations.push_back(
                {ViolationKind::Structural,
                 "op gene length mismatch, stage " + std::to_string(stage_index)});
            continue;
        }
        if (ops[0] == OpKind::Identity) {
            result.violations.push_back(
                {ViolationKind::Semantic,
                 "first slot identity, stage " + std::to_string(stage_index)});
        }
        for (OpKind op : ops) {
            if (op != OpKind::Identity &&
                std::find(space.allowed_ops.begin(), space.allowed_ops.end(), op) ==
                    space.allowed_ops.end()) {
                result.violations.push_back(
                    {ViolationKind::Semantic,
                     "operation outside the space menu, stage " + std::to_string(stage_index)});
                break;
            }
        }
        const int ch = genome.channel_genes[i];
        if (ch < 0 || ch >= static_cast<int>(st.allowed_channels.size())) {
            result.violations.push_back(
                {ViolationKind::Semantic,
                 "channel index out of range, stage " + std::to_string(stage_index)});
        }
    }
    return result;
}

ArchitectureDesc decode(const SearchSpaceSpec& space, const Genome& genome) {
    const auto check = validate(space, genome);
    if (!check.ok()) {
        throw std::invalid_argument("invalid genome: " + check.violations.front().message);
    }
    ArchitectureDesc arch;
    arch.stem = LayerDesc{OpKind::GBe1, 3, space.stem_channels, 2, space.input_resolution};
    int spatial = (space.input_resolution + 1) / 2;
    int prev_channels = space.stem_channels;
    for (int i = 0; i < space.num_searched_stages(); ++i) {
        const int stage_index = i + 2;
        const auto& st = space.stage(stage_index);
        const int chosen = st.allowed_channels[genome.channel_genes[i]];
        std::vector<OpKind> ops;
        for (OpKind op : genome.op_genes[i]) {
            if (op != OpKind::Identity) ops.push_back(op);
        }
        std::vector<LayerDesc> layers;
        for (std::size_t k = 0; k < ops.size(); ++k) {
            LayerDesc layer;
            layer.op = ops[k];
            layer.stride = (k == 0) ? st.first_slot_stride : 1;
            layer.spatial_in = spatial;
            layer.c_in = prev_channels;
            // Stage 2 keeps the stem width through its strided first layer
            // and widens on the second layer (reference backbone layout). All other
            // stages transition at the first layer.
            if (stage_index == 2 && k == 0 && ops.size() > 1) {
                layer.c_out = prev_channels;
            } else if (k == 0 || (stage_index == 2 && k == 1)) {
                layer.c_out = chosen;
            } else {
                layer.c_out = prev_channels;
            }
            prev_channels = layer.c_out;
            spatial = (spatial + layer.stride - 1) / layer.stride;
            layers.push_back(layer);
        }
        arch.stages.push_back(std::move(layers));
    }
    return arch;
}

Genome encode(const SearchSpaceSpec& space, const ArchitectureDesc& arch) {
    if (static_cast<int>(arch.stages.size()) != space.num_searched_stages()) {
        throw std::invalid_argument("architecture stage count does not match space");
    }
    Genome g;
    for (int i = 0; i < space.num_searched_stages(); ++i) {
        const int stage_index = i + 2;
        const auto& st = space.stage(stage_index);
        const auto& layers = arch.stages[i];
        if (layers.empty()) {
            throw std::invalid_argument("empty stage " + std::to_string(stage_index));
        }
        if (static_cast<int>(layers.size()) > st.max_slots) {
            throw std::invalid_argument("stage " + std::to_string(stage_index) +
                                        " exceeds max slots");
        }
        std::vector<OpKind> ops;
        for (const auto& layer : layers) ops.push_back(layer.op);
        ops.resize(st.max_slots, OpKind::Identity);
        g.op_genes.push_back(std::move(ops));

        const int stage_channels = layers.back().c_out;
        const auto it = std::find(st.allowed_channels.begin(), st.allowed_channels.end(),
                                  stage_channels);
        if (it == st.allowed_channels.end()) {
            throw std::invalid_argument("stage " + std::to_string(stage_index) +
                                        " output channels " + std::to_string(stage_channels) +
                                        " outside the space");
        }
        g.channel_genes.push_back(static_cast<int>(it - st.allowed_channels.begin()));
    }
    const auto check = validate(space, g);
    if (!check.ok()) {
        throw std::invalid_argument("architecture does not encode into the space: " +
                                    check.violations.front().message);
    }
    return g;
}

namespace {

struct RawLayer {
    int index;
    std::string op;
    int c_in;
    int c_out;
    int stride;
    int line_no;
};

bool in_set(int value, const std::vector<int>& set) {
    return std::find(set.begin(), set.end(), value) != set.end();
}

}  // namespace

ArchitectureDesc parse_architecture(const std::string& text) {
    const SearchSpaceSpec space = default_space();
    std::vector<RawLayer> raw;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream fields(line);
        RawLayer layer{};
        layer.line_no = line_no;
        if (!(fields >> layer.index)) continue;  // blank line
        if (!(fields >> layer.op >> layer.c_in >> layer.c_out >> layer.stride)) {
            throw std::invalid_argument("malformed layer line at line " +
                                        std::to_string(line_no));
        }
        raw.push_back(layer);
    }
    if (raw.empty()) throw std::invalid_argument("empty architecture text");
    if (raw.front().op != "Conv3") {
        throw std::invalid_argument("first layer must be the Conv3 stem");
    }

    ArchitectureDesc arch;
    arch.stem = LayerDesc{OpKind::GBe1, raw[0].c_in, raw[0].c_out, raw[0].stride,
                          space.input_resolution};
    int spatial = (space.input_resolution + raw[0].stride - 1) / raw[0].stride;

    std::size_t pos = 1;
    for (int stage_index = 2; stage_index <= 6; ++stage_index) {
        const auto& st = space.stage(stage_index);
        std::vector<LayerDesc> layers;
        while (pos < raw.size()) {
            const auto& r = raw[pos];
            // Detect the start of the next stage. Channel sets are disjoint
            // across stages, so a stride-1 stage opens at the first layer
            // whose output enters its channel set.
            if (!layers.empty() && stage_index < 6) {
                const auto& next = space.stage(stage_index + 1);
                const bool starts_next =
                    next.first_slot_stride == 2
                        ? r.stride == 2
                        : (in_set(r.c_out, next.allowed_channels) &&
                           !in_set(r.c_in, next.allowed_channels));
                if (starts_next) break;
            }
            const auto op = op_from_name(r.op);
            if (!op || *op == OpKind::Identity) {
                throw std::invalid_argument("unknown operation at line " +
                                            std::to_string(r.line_no));
            }
            const int expected_stride = layers.empty() ? st.first_slot_stride : 1;
            if (r.stride != expected_stride) {
                throw std::invalid_argument("unexpected stride at line " +
                                            std::to_string(r.line_no));
            }
            LayerDesc layer{*op, r.c_in, r.c_out, r.stride, spatial};
            spatial = (spatial + r.stride - 1) / r.stride;
            layers.push_back(layer);
            ++pos;
        }
        if (layers.empty()) {
            throw std::invalid_argument("stage " + std::to_string(stage_index) +
                                        " has no layers");
        }
        if (!in_set(layers.back().c_out, st.allowed_channels)) {
            throw std::invalid_argument("stage " + std::to_string(stage_index) +
                                        " output channels " +
                                        std::to_string(layers.back().c_out) +
                                        " outside the allowed set");
        }
        arch.stages.push_back(std::move(layers));
    }
    if (pos != raw.size()) {
        throw std::invalid_argument("unassigned trailing layers at line " +
                                    std::to_string(raw[pos].line_no));
    }
    return arch;
}

std::string format_architecture(const ArchitectureDesc& arch) {
    std::ostringstream out;
    int index = 0;
    out << index++ << " Conv3 " << arch.stem.c_in << " " << arch.stem.c_out << " "
        << arch.stem.stride << "\n";
    for (const auto& stage : arch.stages) {
        for (const auto& layer : stage) {
            out << index++ << " " << op_name(layer.op) << " " << layer.c_in << " "
                << layer.c_out << " " << layer.stride << "\n";
        }
    }
    return out.str();
}

std::string genome_to_json(const Genome& genome) {
    nlohmann::json j;
    j["op_genes"] = nlohmann::json::array();
    for (const auto& stage : genome.op_genes) {
        nlohmann::json stage_j = nlohmann::json::array();
        for (OpKind op : stage) stage_j.push_back(op_name(op));
        j["op_genes"].push_back(stage_j);
    }
    j["channel_genes"] = genome.channel_genes;
    return j.dump(2);
}

Genome genome_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    Genome g;
    for (const auto& stage_j : j.at("op_genes")) {
        std::vector<OpKind> ops;
        for (const auto& name : stage_j) {
            const auto op = op_from_name(name.get<std::string>());
            if (!op) {
                throw std::invalid_argument("unknown operation name: " +
                                            name.get<std::string>());
            }
            ops.push_back(*op);
        }
        g.op_genes.push_back(std::move(ops));
    }
    g.channel_genes = j.at("channel_genes").get<std::vector<int>>();
    return g;
}

}  // namespace mnsga
