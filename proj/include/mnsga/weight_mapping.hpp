#ifndef MNSGA_WEIGHT_MAPPING_HPP
#define MNSGA_WEIGHT_MAPPING_HPP

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "mnsga/rng.hpp"
#include "mnsga/search_space.hpp"

namespace mnsga {

// Dense (out, in, h, w) weight tensor, row-major.
struct Tensor4 {
    int out = 0;
    int in = 0;
    int h = 0;
    int w = 0;
    std::vector<float> values;

    std::size_t size() const {
        return static_cast<std::size_t>(out) * in * h * w;
    }
    float& at(int o, int i, int y, int x) {
        return values[((static_cast<std::size_t>(o) * in + i) * h + y) * w + x];
    }
    float at(int o, int i, int y, int x) const {
        return values[((static_cast<std::size_t>(o) * in + i) * h + y) * w + x];
    }
};

// L1 norm of each output-channel slice.
std::vector<double> l1_channel_norms(const Tensor4& t);

// Indices of the r largest L1 norms, ties to the lower index, sorted
// ascending.
std::vector<int> select_channels(const Tensor4& t, int r);
std::vector<int> select_top_k(const std::vector<double>& norms, int r);

// Address of one composite bottleneck tensor in the supernet.
struct SlotKey {
    int stage = 0;  // 2..6
    int slot = 0;
    OpKind op = OpKind::GBe1;

    auto operator<=>(const SlotKey&) const = default;
};

// Full-width, max-depth, all-operations weight store. One composite 3x3
// tensor per (stage, slot, op); the hidden width e*c_in is metadata of the
// bottleneck, not a stored dimension.
class SupernetWeights {
public:
    // Seeded uniform (-1, 1) initialization over every addressable slot.
    static SupernetWeights build(const SearchSpaceSpec& space, std::uint64_t seed);

    const Tensor4& tensor(int stage, int slot, OpKind op) const;
    Tensor4& mutable_tensor(int stage, int slot, OpKind op);

    std::uint64_t space_hash_value() const { return space_hash_; }
    std::uint64_t seed() const { return seed_; }
    const std::map<SlotKey, Tensor4>& tensors() const { return tensors_; }

    void save(const std::string& path) const;
    static SupernetWeights load(const std::string& path);

private:
    std::map<SlotKey, Tensor4> tensors_;
    std::uint64_t space_hash_ = 0;
    std::uint64_t seed_ = 0;
};

struct MappedLayer {
    int stage = 0;
    int slot = 0;
    OpKind op = OpKind::GBe1;
    Tensor4 weights;
    std::vector<int> out_indices;
    std::vector<int> in_indices;
};

struct MappedWeights {
    std::vector<MappedLayer> layers;
    std::uint64_t space_hash = 0;
};

// Eq.-style layer extraction: the stored tensor for the chosen op, untouched.
const Tensor4& operation_map(const SupernetWeights& supernet, int stage, int slot,
                             OpKind op);

// Top-k L1 slicing of output channels; input channels follow the supplied
// wiring (the predecessor's selected outputs).
struct ChannelMapResult {
    Tensor4 weights;
    std::vector<int> out_indices;
    std::vector<int> in_indices;
};
ChannelMapResult channel_map(const Tensor4& t, int r, const std::vector<int>& in_indices);
ChannelMapResult channel_map(const Tensor4& t, int r, int s);

// First l slots of a stage, order preserved.
std::vector<int> depth_map(int stage_max_slots, int depth);

MappedWeights map_individual(const SupernetWeights& supernet,
                             const SearchSpaceSpec& space, const Genome& genome);

// Container + JSON provenance sidecar (written at path + ".provenance.json").
void save_mapped(const MappedWeights& mapped, const std::string& path);

}  // namespace mnsga

#endif
