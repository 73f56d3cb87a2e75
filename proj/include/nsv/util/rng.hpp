#pragma once
// One portable generator (splitmix64 core) so every seeded corpus and
// bootstrap replays bit-identically from a single 64-bit seed, independent of
// the standard library's distribution implementations.

#include <cmath>
#include <cstdint>

namespace nsv::util {

inline std::uint64_t mix_step(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// decorrelated substream seed
inline std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed ^ (0xd1b54a32d192ed03ull * (stream + 1));
    return mix_step(x);
}

struct Rng {
    explicit Rng(std::uint64_t s) : state(s) {}
    std::uint64_t state;
    bool has_spare = false;
    double spare = 0.0;
    std::uint64_t next_u64() { return mix_step(state); }
    double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * u01(); }
    // Box-Muller; pairs are consumed in a fixed order
    double normal() {
        if (has_spare) {
            has_spare = false;
            return spare;
        }
        double u = u01();
        if (u < 1e-300) u = 1e-300;
        const double r = std::sqrt(-2.0 * std::log(u));
        const double th = 6.283185307179586476925286766559 * u01();
        spare = r * std::sin(th);
        has_spare = true;
        return r * std::cos(th);
    }
};

} // namespace nsv::util
