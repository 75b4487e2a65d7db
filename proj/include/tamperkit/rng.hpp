#pragma once

#include <cstdint>

namespace tamperkit {

/// splitmix64 step; the basis for every seeded choice in the toolkit so
/// runs reproduce across platforms and standard-library versions.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Minimal deterministic generator over splitmix64.
struct SplitMix {
    uint64_t state = 0;
    explicit SplitMix(uint64_t seed) : state(seed) {}
    uint64_t next() {
        state = splitmix64(state);
        return state;
    }
    /// Uniform-ish draw in [0, n); modulo bias is irrelevant at corpus sizes.
    uint64_t below(uint64_t n) { return n == 0 ? 0 : next() % n; }
};

/// Independent stream for record `index` of a run seeded with `seed`.
inline SplitMix record_stream(uint64_t seed, uint64_t index) {
    return SplitMix(splitmix64(seed) ^ splitmix64(index * 0x9e3779b97f4a7c15ull + 1));
}

} // namespace tamperkit
