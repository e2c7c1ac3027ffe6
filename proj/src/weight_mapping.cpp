#include "mnsga/weight_mapping.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace mnsga {

std::vector<double> l1_channel_norms(const Tensor4& t) {
    std::vector<double> norms(t.out, 0.0);
    const std::size_t slice = static_cast<std::size_t>(t.in) * t.h * t.w;
    for (int o = 0; o < t.out; ++o) {
        double sum = 0.0;
        const float* base = t.values.data() + o * slice;
        for (std::size_t k = 0; k < slice; ++k) sum += std::abs(base[k]);
        norms[o] = sum;
    }
    return norms;
}

std::vector<int> select_top_k(const std::vector<double>& norms, int r) {
    if (r < 1 || r > static_cast<int>(norms.size())) {
        throw std::out_of_range("channel count out of range: " + std::to_string(r));
    }
    std::vector<int> order(norms.size());
    std::iota(order.begin(), order.end(), 0);
    // Stable sort by descending norm keeps the lower index on ties.
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return norms[a] > norms[b]; });
    order.resize(r);
    std::sort(order.begin(), order.end());
    return order;
}

std::vector<int> select_channels(const Tensor4& t, int r) {
    return select_top_k(l1_channel_norms(t), r);
}

SupernetWeights SupernetWeights::build(const SearchSpaceSpec& space, std::uint64_t seed) {
    SupernetWeights net;
    net.space_hash_ = space_hash(space);
    net.seed_ = seed;
    for (int stage = 2; stage <= 6; ++stage) {
        const auto& st = space.stage(stage);
        const int max_out = st.allowed_channels.back();
        const int prev_max = stage == 2 ? space.stem_channels
                                        : space.stage(stage - 1).allowed_channels.back();
        for (int slot = 0; slot < st.max_slots; ++slot) {
            for (OpKind op : space.allowed_ops) {
                Tensor4 t;
                t.out = max_out;
                t.in = slot == 0 ? prev_max : max_out;
                t.h = 3;
                t.w = 3;
                t.values.resize(t.size());
                Rng rng = Rng::derive(seed, stage, slot, static_cast<int>(op));
                for (auto& v : t.values) {
                    v = static_cast<float>(2.0 * rng.next_double() - 1.0);
                }
                net.tensors_.emplace(SlotKey{stage, slot, op}, std::move(t));
            }
        }
    }
    return net;
}

const Tensor4& SupernetWeights::tensor(int stage, int slot, OpKind op) const {
    const auto it = tensors_.find(SlotKey{stage, slot, op});
    if (it == tensors_.end()) {
        throw std::out_of_range("no supernet tensor at stage " + std::to_string(stage) +
                                " slot " + std::to_string(slot));
    }
    return it->second;
}

Tensor4& SupernetWeights::mutable_tensor(int stage, int slot, OpKind op) {
    return const_cast<Tensor4&>(tensor(stage, slot, op));
}

const Tensor4& operation_map(const SupernetWeights& supernet, int stage, int slot,
                             OpKind op) {
    if (op == OpKind::Identity) {
        throw std::invalid_argument("Identity carries no weights");
    }
    return supernet.tensor(stage, slot, op);
}

ChannelMapResult channel_map(const Tensor4& t, int r, const std::vector<int>& in_indices) {
    for (int idx : in_indices) {
        if (idx < 0 || idx >= t.in) {
            throw std::out_of_range("input index outside tensor width");
        }
    }
    ChannelMapResult result;
    result.out_indices = select_channels(t, r);
    result.in_indices = in_indices;
    Tensor4& out = result.weights;
    out.out = r;
    out.in = static_cast<int>(in_indices.size());
    out.h = t.h;
    out.w = t.w;
    out.values.resize(out.size());
    for (int a = 0; a < out.out; ++a) {
        for (int b = 0; b < out.in; ++b) {
            for (int y = 0; y < t.h; ++y) {
                for (int x = 0; x < t.w; ++x) {
                    out.at(a, b, y, x) = t.at(result.out_indices[a], in_indices[b], y, x);
                }
            }
        }
    }
    return result;
}

ChannelMapResult channel_map(const Tensor4& t, int r, int s) {
    if (s < 1 || s > t.in) throw std::out_of_range("input count out of range");
    std::vector<int> lowest(s);
    std::iota(lowest.begin(), lowest.end(), 0);
    return channel_map(t, r, lowest);
}

std::vector<int> depth_map(int stage_max_slots, int depth) {
    if (depth < 1 || depth > stage_max_slots) {
        throw std::out_of_range("depth out of range: " + std::to_string(depth));
    }
    std::vector<int> slots(depth);
    std::iota(slots.begin(), slots.end(), 0);
    return slots;
}

MappedWeights map_individual(const SupernetWeights& supernet,
                             const SearchSpaceSpec& space, const Genome& genome) {
    const ArchitectureDesc arch = decode(space, genome);
    MappedWeights mapped;
    mapped.space_hash = supernet.space_hash_value();

    // Stem channels are fixed, so the first mapped layer sees all of them.
    std::vector<int> carried(space.stem_channels);
    std::iota(carried.begin(), carried.end(), 0);

    for (std::size_t i = 0; i < arch.stages.size(); ++i) {
        const int stage = static_cast<int>(i) + 2;
        const auto& st = space.stage(stage);
        const auto& layers = arch.stages[i];
        const auto slots = depth_map(st.max_slots, static_cast<int>(layers.size()));
        for (std::size_t k = 0; k < layers.size(); ++k) {
            const auto& layer = layers[k];
            try {
                const Tensor4& source = operation_map(supernet, stage, slots[k], layer.op);
                auto sliced = channel_map(source, layer.c_out, carried);
                carried = sliced.out_indices;
                mapped.layers.push_back({stage, slots[k], layer.op,
                                         std::move(sliced.weights),
                                         std::move(sliced.out_indices),
                                         std::move(sliced.in_indices)});
            } catch (const std::exception& e) {
                throw std::runtime_error("mapping failed at stage " +
                                         std::to_string(stage) + " slot " +
                                         std::to_string(slots[k]) + ": " + e.what());
            }
        }
    }
    return mapped;
}

namespace {

constexpr char kMagic[8] = {'M', 'N', 'S', 'G', 'A', 'W', '0', '1'};

struct DirectoryEntry {
    std::int32_t stage;
    std::int32_t slot;
    std::int32_t op;
    std::uint32_t dims[4];
    std::uint64_t offset;  // floats into the data section
};

void write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw std::runtime_error("truncated weight container");
    return v;
}

void write_container(const std::string& path, std::uint64_t space_hash_value,
                     std::uint64_t seed,
                     const std::vector<std::pair<SlotKey, const Tensor4*>>& entries) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(kMagic, sizeof kMagic);
    write_u64(out, space_hash_value);
    write_u64(out, seed);
    write_u32(out, static_cast<std::uint32_t>(entries.size()));
    std::uint64_t offset = 0;
    for (const auto& [key, t] : entries) {
        write_u32(out, static_cast<std::uint32_t>(key.stage));
        write_u32(out, static_cast<std::uint32_t>(key.slot));
        write_u32(out, static_cast<std::uint32_t>(key.op));
        write_u32(out, static_cast<std::uint32_t>(t->out));
        write_u32(out, static_cast<std::uint32_t>(t->in));
        write_u32(out, static_cast<std::uint32_t>(t->h));
        write_u32(out, static_cast<std::uint32_t>(t->w));
        write_u64(out, offset);
        offset += t->size();
    }
    for (const auto& [key, t] : entries) {
        out.write(reinterpret_cast<const char*>(t->values.data()),
                  static_cast<std::streamsize>(t->values.size() * sizeof(float)));
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

void SupernetWeights::save(const std::string& path) const {
    std::vector<std::pair<SlotKey, const Tensor4*>> entries;
    entries.reserve(tensors_.size());
    for (const auto& [key, t] : tensors_) entries.emplace_back(key, &t);
    write_container(path, space_hash_, seed_, entries);
}

SupernetWeights SupernetWeights::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
        throw std::runtime_error("not a weight container: " + path);
    }
    SupernetWeights net;
    net.space_hash_ = read_pod<std::uint64_t>(in);
    net.seed_ = read_pod<std::uint64_t>(in);
    const auto count = read_pod<std::uint32_t>(in);
    std::vector<std::pair<SlotKey, Tensor4>> shapes(count);
    for (auto& [key, t] : shapes) {
        key.stage = static_cast<int>(read_pod<std::uint32_t>(in));
        key.slot = static_cast<int>(read_pod<std::uint32_t>(in));
        key.op = static_cast<OpKind>(read_pod<std::uint32_t>(in));
        t.out = static_cast<int>(read_pod<std::uint32_t>(in));
        t.in = static_cast<int>(read_pod<std::uint32_t>(in));
        t.h = static_cast<int>(read_pod<std::uint32_t>(in));
        t.w = static_cast<int>(read_pod<std::uint32_t>(in));
        read_pod<std::uint64_t>(in);  // offset, entries are stored in order
    }
    for (auto& [key, t] : shapes) {
        t.values.resize(t.size());
        in.read(reinterpret_cast<char*>(t.values.data()),
                static_cast<std::streamsize>(t.values.size() * sizeof(float)));
        if (!in) throw std::runtime_error("truncated weight container: " + path);
        net.tensors_.emplace(key, std::move(t));
    }
    return net;
}

void save_mapped(const MappedWeights& mapped, const std::string& path) {
    std::vector<std::pair<SlotKey, const Tensor4*>> entries;
    entries.reserve(mapped.layers.size());
    for (const auto& layer : mapped.layers) {
        entries.emplace_back(SlotKey{layer.stage, layer.slot, layer.op}, &layer.weights);
    }
    write_container(path, mapped.space_hash, 0, entries);

    nlohmann::json sidecar = nlohmann::json::array();
    for (const auto& layer : mapped.layers) {
        sidecar.push_back({{"stage", layer.stage},
                           {"slot", layer.slot},
                           {"op", op_name(layer.op)},
                           {"out_indices", layer.out_indices},
                           {"in_indices", layer.in_indices}});
    }
    std::ofstream side(path + ".provenance.json");
    if (!side) throw std::runtime_error("cannot write sidecar for: " + path);
    side << sidecar.dump(2) << "\n";
}

}  // namespace mnsga
