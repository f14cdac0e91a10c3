#pragma once

#include <cstdint>
#include <random>

namespace pcot::rng {

// splitmix64; used to derive independent streams from one user seed so that
// per-item draws do not depend on thread schedule or evaluation order.
inline std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// A key names a point in the seed tree: key.child(i) is deterministic and
// decorrelated from key.child(j).
struct Key {
    std::uint64_t state = 0;

    Key child(std::uint64_t salt) const { return Key{mix(state ^ mix(salt))}; }

    std::mt19937_64 engine() const { return std::mt19937_64(mix(state)); }

    // Uniform in [0,1) straight from the key, no engine construction.
    double uniform(std::uint64_t salt) const {
        return double(mix(state ^ mix(salt)) >> 11) * 0x1.0p-53;
    }
};

} // namespace pcot::rng
