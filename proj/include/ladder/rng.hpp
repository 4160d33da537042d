#pragma once
// Named deterministic RNG streams. Every random decision in a run draws from
// a stream keyed by (seed, purpose, index), so pipelines stay reproducible
// and independent of each other's draw counts.

#include <cstdint>
#include <random>
#include <string_view>

namespace ladder {

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::string_view purpose,
                                std::uint64_t index = 0) {
    const std::uint64_t stream = fnv1a64(purpose) ^ splitmix64(index + 0x51ed270b);
    return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

}  // namespace ladder
