#pragma once

#include <cstdint>
#include <random>

namespace trajdp {

inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic generator; uniform01 is open on both ends.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(mix64(seed)) {}

    double uniform01() {
        const uint64_t bits = eng_() >> 11;  // 53 bits
        return (static_cast<double>(bits) + 0.5) * 0x1p-53;
    }

    // Uniform integer in [0, n).
    uint64_t below(uint64_t n) {
        return static_cast<uint64_t>(uniform01() * static_cast<double>(n)) % n;
    }

    uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

// Named substream so per-trajectory draws stay independent of dataset order.
inline Rng substream(uint64_t seed, uint64_t stream, uint64_t index = 0) {
    return Rng(mix64(seed) ^ mix64(stream * 0x51ed270b0a1bd4ceULL + index));
}

}  // namespace trajdp
