#pragma once
/* Counter-based random streams: every record draws from its own generator
 * keyed by (seed, record index), so datasets are bit-identical no matter how
 * records are partitioned across workers, and a dataset of size N is a
 * prefix of the same-seed dataset of any larger size. */

#include <cstdint>

namespace salca {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

struct RecordRng {
    std::uint64_t state;

    RecordRng(std::uint64_t seed, std::uint64_t record)
        : state(splitmix64(seed ^ splitmix64(record + 0x9e3779b97f4a7c15ull))) {}

    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // unbiased uniform index in [0, n)
    int uniform_index(int n) {
        const std::uint64_t un = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = ~0ull - ~0ull % un;
        std::uint64_t v = next();
        while (v >= limit) v = next();
        return static_cast<int>(v % un);
    }
};

}  // namespace salca
