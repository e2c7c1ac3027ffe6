#ifndef MNSGA_COST_MODEL_HPP
#define MNSGA_COST_MODEL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mnsga/search_space.hpp"

namespace mnsga {

struct LayerCost {
    std::string label;
    std::uint64_t macs = 0;
    std::uint64_t params = 0;
};

// Analytic complexity of a decoded backbone. "flops" follows the common
// 2*MACs convention; the comparable quantity for published GFLOPs
// figures is macs.
struct CostReport {
    std::uint64_t macs = 0;
    std::uint64_t flops = 0;
    std::uint64_t params = 0;
    std::vector<LayerCost> per_layer;

    std::string to_json() const;
};

struct OpCost {
    std::uint64_t macs = 0;
    std::uint64_t params = 0;

    OpCost& operator+=(const OpCost& other) {
        macs += other.macs;
        params += other.params;
        return *this;
    }
};

// Ghost module: 1x1 primary convolution producing c_out/2 channels plus a
// 3x3 depthwise cheap branch producing the other half. c_out must be even.
OpCost ghost_module_cost(int c_in, int c_out, int spatial_out);

// Ghost bottleneck: expansion ghost module (hidden = e*c_in), optional
// strided 3x3 depthwise, projection ghost module, and a shortcut path
// (3x3 depthwise + 1x1 projection) when the skip is not an identity.
OpCost ghost_bottleneck_cost(const LayerDesc& layer);

CostReport backbone_cost(const ArchitectureDesc& arch);

}  // namespace mnsga

#endif
