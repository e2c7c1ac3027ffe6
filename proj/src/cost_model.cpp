#include "mnsga/cost_model.hpp"

#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mnsga {

OpCost ghost_module_cost(int c_in, int c_out, int spatial_out) {
    if (c_out % 2 != 0) {
        throw std::invalid_argument("ghost module needs an even output width, got " +
                                    std::to_string(c_out));
    }
    if (spatial_out < 1) throw std::invalid_argument("spatial_out must be positive");
    const std::uint64_t s2 = static_cast<std::uint64_t>(spatial_out) * spatial_out;
    const std::uint64_t half = static_cast<std::uint64_t>(c_out) / 2;
    OpCost cost;
    cost.macs = s2 * c_in * half + s2 * half * 9;
    cost.params = static_cast<std::uint64_t>(c_in) * half + 9 * half;
    return cost;
}

OpCost ghost_bottleneck_cost(const LayerDesc& layer) {
    if (layer.op == OpKind::Identity) {
        throw std::invalid_argument("Identity carries no cost; drop it before costing");
    }
    const int e = expansion_of(layer.op);
    const int hidden = e * layer.c_in;
    const int spatial_out = (layer.spatial_in + layer.stride - 1) / layer.stride;

    // Expansion at the input resolution, stride applied by the depthwise
    // step, projection at the reduced resolution.
    OpCost cost = ghost_module_cost(layer.c_in, hidden, layer.spatial_in);
    if (layer.stride == 2) {
        const std::uint64_t s2 = static_cast<std::uint64_t>(spatial_out) * spatial_out;
        cost.macs += s2 * hidden * 9;
        cost.params += static_cast<std::uint64_t>(hidden) * 9;
    }
    cost += ghost_module_cost(hidden, layer.c_out, spatial_out);

    if (layer.stride == 2 || layer.c_in != layer.c_out) {
        const std::uint64_t s2 = static_cast<std::uint64_t>(spatial_out) * spatial_out;
        cost.macs += s2 * layer.c_in * 9;                 // 3x3 depthwise
        cost.macs += s2 * layer.c_in * layer.c_out;       // 1x1 projection
        cost.params += static_cast<std::uint64_t>(layer.c_in) * 9;
        cost.params += static_cast<std::uint64_t>(layer.c_in) * layer.c_out;
    }
    return cost;
}

CostReport backbone_cost(const ArchitectureDesc& arch) {
    CostReport report;
    const auto& stem = arch.stem;
    const int stem_out = (stem.spatial_in + stem.stride - 1) / stem.stride;
    const std::uint64_t s2 = static_cast<std::uint64_t>(stem_out) * stem_out;
    LayerCost stem_cost;
    stem_cost.label = "Conv3";
    stem_cost.macs = s2 * 9 * stem.c_in * stem.c_out;
    stem_cost.params = 9ULL * stem.c_in * stem.c_out;
    report.per_layer.push_back(stem_cost);

    for (std::size_t i = 0; i < arch.stages.size(); ++i) {
        for (const auto& layer : arch.stages[i]) {
            const OpCost c = ghost_bottleneck_cost(layer);
            report.per_layer.push_back({op_name(layer.op), c.macs, c.params});
        }
    }
    for (const auto& entry : report.per_layer) {
        report.macs += entry.macs;
        report.params += entry.params;
    }
    report.flops = 2 * report.macs;
    return report;
}

std::string CostReport::to_json() const {
    nlohmann::json j;
    j["macs"] = macs;
    j["flops"] = flops;
    j["params"] = params;
    j["per_layer"] = nlohmann::json::array();
    for (const auto& entry : per_layer) {
        j["per_layer"].push_back(
            {{"label", entry.label}, {"macs", entry.macs}, {"params", entry.params}});
    }
    return j.dump(2);
}

}  // namespace mnsga
