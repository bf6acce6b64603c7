#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace mhqa {

// All randomness in the project flows through these helpers so that runs are
// reproducible bit-for-bit from a single seed. std::uniform_*_distribution is
// implementation-defined, so we draw from the raw engine ourselves.

inline std::uint64_t rand_below(std::mt19937_64& gen, std::uint64_t n) {
    // simple rejection to avoid modulo bias
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = gen();
    while (x >= limit) x = gen();
    return x % n;
}

inline double rand_unit(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// uniform in (-scale, +scale)
inline double rand_symmetric(std::mt19937_64& gen, double scale) {
    return (2.0 * rand_unit(gen) - 1.0) * scale;
}

template <typename T>
void shuffle_inplace(std::vector<T>& v, std::mt19937_64& gen) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rand_below(gen, i));
        std::swap(v[i - 1], v[j]);
    }
}

// Derives an independent stream from a base seed and a stream index.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    // splitmix64 step
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace mhqa
