// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string_view>

// Deterministic draws shared by the shuffle, the mock reader, and the
// corpus generator. std::uniform_* distributions are implementation
// defined, so bounded draws are done by hand to keep outputs identical
// across standard libraries.
namespace readrank::detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(splitmix64(seed)) {}

    std::uint64_t next() {
        state_ = splitmix64(state_);
        return state_;
    }

    // Uniform in [0, bound); bound must be > 0. Modulo bias is irrelevant
    // at the bounds used here.
    std::uint64_t bounded(std::uint64_t bound) { return next() % bound; }

    // Uniform in [0, 1).
    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

} // namespace readrank::detail
