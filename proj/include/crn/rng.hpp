#pragma once

#include <cstdint>
#include <random>

namespace crn {

/// splitmix64 finalizer; used to derive independent, reproducible RNG streams
/// from a master seed and a handful of stream coordinates.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a = 0, std::uint64_t b = 0,
                                    std::uint64_t c = 0) {
    std::uint64_t s = splitmix64(base);
    s = splitmix64(s ^ a);
    s = splitmix64(s ^ b);
    s = splitmix64(s ^ c);
    return s;
}

inline std::mt19937_64 make_rng(std::uint64_t base, std::uint64_t a = 0, std::uint64_t b = 0,
                                std::uint64_t c = 0) {
    return std::mt19937_64(derive_seed(base, a, b, c));
}

}  // namespace crn
