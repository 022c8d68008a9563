#pragma once

#include <cstdint>
#include <random>

namespace rc {

// splitmix64, used only to derive decorrelated sub-seeds.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for the `counter`-th derived stream of `seed` (attempt seeds, per-rep
// streams, worker fan-out). Counter-mixed so (seed, counter) pairs never
// collide between nearby seeds.
inline uint64_t mix_seed(uint64_t seed, uint64_t counter) {
    return splitmix64(splitmix64(seed) + counter);
}

// All randomness in the project flows through this wrapper. The engine is
// std::mt19937_64, whose output sequence is pinned by the standard; the
// uniform mappings below are written out explicitly because the standard
// library's distributions are not portable across implementations.
class RandomSource {
public:
    explicit RandomSource(uint64_t seed) : eng_(seed) {}

    uint64_t bits() { return eng_(); }

    // Uniform on [0,1) with 53-bit resolution.
    double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform on {0,...,n-1} via 128-bit multiply-shift. The bias is at most
    // n / 2^64, far below anything our statistical tests can resolve.
    uint64_t below(uint64_t n) {
        const unsigned __int128 m = static_cast<unsigned __int128>(eng_()) * n;
        return static_cast<uint64_t>(m >> 64);
    }

    uint32_t below32(uint32_t n) { return static_cast<uint32_t>(below(n)); }

private:
    std::mt19937_64 eng_;
};

} // namespace rc
