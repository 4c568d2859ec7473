#pragma once

// Counter-based uniform draws: every (seed, row, stream) triple maps to one
// fixed 64-bit value, so a simulated row does not depend on which rows were
// generated before it or on which thread generated it.

#include <cstdint>

namespace selbias {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t row, std::uint64_t stream) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ row);
    return splitmix64(h ^ (stream * 0x632be59bd9b4e019ULL + 1));
}

// Uniform on [0, 1) with 53 random bits.
inline constexpr double counter_uniform(std::uint64_t seed, std::uint64_t row, std::uint64_t stream) {
    return static_cast<double>(counter_bits(seed, row, stream) >> 11) * 0x1.0p-53;
}

// Stream ids used by the simulator. Selection criterion k uses stream_s0 + k.
namespace stream {
inline constexpr std::uint64_t v = 0;
inline constexpr std::uint64_t u = 1;
inline constexpr std::uint64_t t = 2;
inline constexpr std::uint64_t y = 3;
inline constexpr std::uint64_t s0 = 4;
}  // namespace stream

}  // namespace selbias
