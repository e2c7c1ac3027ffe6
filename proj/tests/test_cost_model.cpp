#include <doctest.h>

#include "mnsga/cost_model.hpp"
#include "mnsga/rng.hpp"
#include "mnsga/search_space.hpp"
#include "support.hpp"

using namespace mnsga;
using namespace mnsga::testing;

namespace {

// Independent counter: lists every convolution of a ghost bottleneck as
// (out_spatial, kernel, c_in_per_group, c_out) and sums k^2-style products.
struct Conv {
    int out_spatial;
    int kernel;
    int c_in_per_group;
    int c_out;
};

OpCost sum_convs(const std::vector<Conv>& convs) {
    OpCost total;
    for (const auto& c : convs) {
        const std::uint64_t weights = static_cast<std::uint64_t>(c.kernel) * c.kernel *
                                      c.c_in_per_group * c.c_out;
        total.params += weights;
        total.macs += static_cast<std::uint64_t>(c.out_spatial) * c.out_spatial * weights;
    }
    return total;
}

OpCost oracle_bottleneck(const LayerDesc& layer) {
    const int e = expansion_of(layer.op);
    const int hidden = e * layer.c_in;
    const int spatial_out = (layer.spatial_in + layer.stride - 1) / layer.stride;
    std::vector<Conv> convs;
    convs.push_back({layer.spatial_in, 1, layer.c_in, hidden / 2});   // expansion primary
    convs.push_back({layer.spatial_in, 3, 1, hidden / 2});            // expansion cheap dw
    if (layer.stride == 2) {
        convs.push_back({spatial_out, 3, 1, hidden});                 // strided dw
    }
    convs.push_back({spatial_out, 1, hidden, layer.c_out / 2});       // projection primary
    convs.push_back({spatial_out, 3, 1, layer.c_out / 2});            // projection cheap dw
    if (layer.stride == 2 || layer.c_in != layer.c_out) {
        convs.push_back({spatial_out, 3, 1, layer.c_in});             // shortcut dw
        convs.push_back({spatial_out, 1, layer.c_in, layer.c_out});   // shortcut 1x1
    }
    return sum_convs(convs);
}

std::uint64_t oracle_backbone_macs(const ArchitectureDesc& arch) {
    const int stem_out = (arch.stem.spatial_in + 1) / 2;
    std::uint64_t macs =
        sum_convs({{stem_out, 3, arch.stem.c_in, arch.stem.c_out}}).macs;
    for (const auto& stage : arch.stages) {
        for (const auto& layer : stage) macs += oracle_bottleneck(layer).macs;
    }
    return macs;
}

}  // namespace

TEST_CASE("ghost module hand counts") {
    const OpCost a = ghost_module_cost(4, 8, 2);
    CHECK(a.macs == 208);  // 64 primary + 144 cheap
    CHECK(a.params == 52);
    const OpCost b = ghost_module_cost(16, 16, 1);
    CHECK(b.params == 200);  // 16*8 + 9*8
    CHECK_THROWS_AS(ghost_module_cost(4, 7, 2), std::invalid_argument);
}

TEST_CASE("ghost module macs scale with spatial^2") {
    const OpCost s1 = ghost_module_cost(8, 16, 1);
    const OpCost s5 = ghost_module_cost(8, 16, 5);
    CHECK(s5.macs == 25 * s1.macs);
    CHECK(s5.params == s1.params);
}

TEST_CASE("bottleneck without channel or stride change has no shortcut term") {
    LayerDesc layer{OpKind::GBe1, 16, 16, 1, 8};
    const OpCost with_skip = ghost_bottleneck_cost(layer);
    // Expansion + projection modules only.
    OpCost expected = ghost_module_cost(16, 16, 8);
    expected += ghost_module_cost(16, 16, 8);
    CHECK(with_skip.macs == expected.macs);
    CHECK(with_skip.params == expected.params);
}

TEST_CASE("bottleneck cost matches the per-convolution oracle") {
    LayerDesc reference_layer14{OpKind::GBe6, 56, 128, 1, 20};
    const OpCost got = ghost_bottleneck_cost(reference_layer14);
    const OpCost want = oracle_bottleneck(reference_layer14);
    CHECK(got.macs == want.macs);
    CHECK(got.params == want.params);

    LayerDesc strided{OpKind::GBe3, 32, 40, 2, 80};
    CHECK(ghost_bottleneck_cost(strided).macs == oracle_bottleneck(strided).macs);
    CHECK(ghost_bottleneck_cost(strided).params == oracle_bottleneck(strided).params);

    CHECK_THROWS_AS(ghost_bottleneck_cost(LayerDesc{OpKind::Identity, 8, 8, 1, 4}),
                    std::invalid_argument);
}

TEST_CASE("backbone cost is additive over per-layer entries") {
    const auto space = default_space();
    Rng rng(17);
    const auto arch = decode(space, random_genome(space, rng));
    const CostReport report = backbone_cost(arch);
    std::uint64_t macs = 0, params = 0;
    for (const auto& entry : report.per_layer) {
        macs += entry.macs;
        params += entry.params;
    }
    CHECK(report.macs == macs);
    CHECK(report.params == params);
    CHECK(report.flops == 2 * report.macs);
}

TEST_CASE("backbone cost equals the enumeration oracle on random genomes") {
    const auto space = default_space();
    Rng rng(23);
    for (int trial = 0; trial < 25; ++trial) {
        const auto arch = decode(space, random_genome(space, rng));
        CHECK(backbone_cost(arch).macs == oracle_backbone_macs(arch));
    }
}

TEST_CASE("doubling the input resolution quadruples macs, params unchanged") {
    auto space = default_space();
    Rng rng(31);
    const Genome g = random_genome(space, rng);
    const CostReport at320 = backbone_cost(decode(space, g));
    space.input_resolution = 640;
    const CostReport at640 = backbone_cost(decode(space, g));
    CHECK(at640.macs == 4 * at320.macs);
    CHECK(at640.params == at320.params);
}

TEST_CASE("cost is monotone in expansion, channels, and depth") {
    const auto space = default_space();
    Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        Genome g = random_genome(space, rng);
        const CostReport base = backbone_cost(decode(space, g));

        Genome wider = g;
        wider.channel_genes[2] =
            static_cast<int>(space.stage(4).allowed_channels.size()) - 1;
        if (wider.channel_genes[2] != g.channel_genes[2]) {
            const CostReport w = backbone_cost(decode(space, wider));
            CHECK(w.macs >= base.macs);
            CHECK(w.params >= base.params);
        }

        Genome deeper = g;
        bool changed = false;
        for (auto& op : deeper.op_genes[4]) {
            if (op == OpKind::Identity) {
                op = OpKind::GBe1;
                changed = true;
                break;
            }
        }
        if (changed) {
            const CostReport d = backbone_cost(decode(space, deeper));
            CHECK(d.macs >= base.macs);
            CHECK(d.params >= base.params);
        }

        Genome expanded = g;
        expanded.op_genes[1][0] = OpKind::GBe6;
        const CostReport e = backbone_cost(decode(space, expanded));
        if (expansion_of(g.op_genes[1][0]) <= 6) {
            CHECK(e.macs >= base.macs);
        }
    }
}

TEST_CASE("minimal genome costs less than maximal genome") {
    const auto space = default_space();
    Genome minimal, maximal;
    for (int s = 2; s <= 6; ++s) {
        const auto& st = space.stage(s);
        std::vector<OpKind> ops(st.max_slots, OpKind::Identity);
        ops[0] = OpKind::GBe1;
        minimal.op_genes.push_back(ops);
        minimal.channel_genes.push_back(0);
        maximal.op_genes.emplace_back(st.max_slots, OpKind::GBe6);
        maximal.channel_genes.push_back(static_cast<int>(st.allowed_channels.size()) - 1);
    }
    const CostReport lo = backbone_cost(decode(space, minimal));
    const CostReport hi = backbone_cost(decode(space, maximal));
    CHECK(lo.macs < hi.macs);
    CHECK(lo.params < hi.params);
}

TEST_CASE("reference backbone lands in the expected GFLOPs band") {
    const auto arch = parse_architecture(reference_backbone_text());
    const CostReport report = backbone_cost(arch);
    CHECK(report.macs >= 350'000'000u);
    CHECK(report.macs <= 700'000'000u);
}
