#ifndef MNSGA_SEARCH_SPACE_HPP
#define MNSGA_SEARCH_SPACE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mnsga/rng.hpp"

namespace mnsga {

// Per-layer operation menu: six ghost bottlenecks (3x3 kernel, expansion
// size 1..6) plus Identity, which removes the slot from the decoded network.
enum class OpKind : int {
    GBe1 = 0,
    GBe2,
    GBe3,
    GBe4,
    GBe5,
    GBe6,
    Identity,
};

inline constexpr int kNumOpKinds = 7;
inline constexpr int kNumConcreteOps = 6;  // all but Identity

// Expansion multiplier e of a GBe_e block (hidden width = e * c_in).
int expansion_of(OpKind op);
std::string op_name(OpKind op);
// Accepts the layer-table spelling ("K3GBe3") and "Identity".
std::optional<OpKind> op_from_name(const std::string& name);

struct StageSpec {
    int stage_index = 0;  // 1..6
    std::vector<int> allowed_channels;  // strictly increasing
    int max_slots = 1;
    int first_slot_stride = 1;
    bool emits_feature = false;
};

struct SearchSpaceSpec {
    std::vector<StageSpec> stages;  // exactly 6, stage 1 is the fixed stem
    int stem_channels = 16;
    int input_resolution = 320;
    // Operation menu restriction used by truncated test spaces. Identity is
    // always implicitly allowed in non-first slots.
    std::vector<OpKind> allowed_ops = {OpKind::GBe1, OpKind::GBe2, OpKind::GBe3,
                                       OpKind::GBe4, OpKind::GBe5, OpKind::GBe6};

    int num_searched_stages() const { return static_cast<int>(stages.size()) - 1; }
    const StageSpec& stage(int stage_index) const { return stages.at(stage_index - 1); }
};

// The default space: stem 16, resolution 320, strides (2,2,2,2,1,2) for
// stem + stages 2..6, max_slots (4,4,6,9,12) for stages 2..6.
SearchSpaceSpec default_space();

// FNV-1a over a canonical rendering of the space; identifies supernet
// containers and run configs built against the same space.
std::uint64_t space_hash(const SearchSpaceSpec& space);

// Number of distinct genomes, as a double (the default space overflows u64).
double space_cardinality(const SearchSpaceSpec& space);

struct Genome {
    // Index 0 corresponds to stage 2. op_genes[s] has stage max_slots entries.
    std::vector<std::vector<OpKind>> op_genes;
    std::vector<int> channel_genes;  // index into the stage's allowed_channels

    bool operator==(const Genome&) const = default;
};

enum class ViolationKind { Structural, Semantic };

struct Violation {
    ViolationKind kind;
    std::string message;
};

struct ValidationResult {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

struct LayerDesc {
    OpKind op = OpKind::GBe1;  // never Identity
    int c_in = 0;
    int c_out = 0;
    int stride = 1;
    int spatial_in = 0;  // square feature-map side at layer input
};

struct ArchitectureDesc {
    LayerDesc stem;  // plain 3x3 conv, 3 -> stem_channels, stride 2
    std::vector<std::vector<LayerDesc>> stages;  // index 0 = stage 2
    std::vector<int> feature_taps = {3, 5, 6};
};

Genome random_genome(const SearchSpaceSpec& space, Rng& rng);
ValidationResult validate(const SearchSpaceSpec& space, const Genome& genome);
// Throws std::invalid_argument if validate fails.
ArchitectureDesc decode(const SearchSpaceSpec& space, const Genome& genome);
// Inverse of decode; Identity genes are normalized to trailing slots.
Genome encode(const SearchSpaceSpec& space, const ArchitectureDesc& arch);

// Layer-table text format: one line per layer, "index op c_in c_out stride",
// op in {Conv3, K3GBe1..K3GBe6}; line 0 is the stem. '#' starts a comment.
ArchitectureDesc parse_architecture(const std::string& text);
std::string format_architecture(const ArchitectureDesc& arch);

std::string genome_to_json(const Genome& genome);
Genome genome_from_json(const std::string& text);

}  // namespace mnsga

#endif
