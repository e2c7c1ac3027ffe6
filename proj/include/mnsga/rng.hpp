#ifndef MNSGA_RNG_HPP
#define MNSGA_RNG_HPP

#include <cstdint>

namespace mnsga {

// Deterministic splitmix64 stream. Self-contained so results do not depend
// on the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Derives an independent stream from (seed, generation, phase, index).
    static Rng derive(std::uint64_t seed, std::uint64_t generation,
                      std::uint64_t phase, std::uint64_t index) {
        std::uint64_t s = seed;
        s = mix(s ^ (generation * 0x9e3779b97f4a7c15ULL));
        s = mix(s ^ (phase * 0xbf58476d1ce4e5b9ULL));
        s = mix(s ^ (index * 0x94d049bb133111ebULL));
        return Rng(s);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform integer in [0, n), rejection sampled to avoid modulo bias.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool next_bool() { return (next_u64() & 1u) != 0; }

    std::uint64_t state() const { return state_; }
    void set_state(std::uint64_t s) { state_ = s; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace mnsga

#endif
