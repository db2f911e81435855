#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace degender {

// FNV-1a 64-bit; used for stage-seed derivation and content hashing.
inline uint64_t fnv1a64(std::string_view bytes, uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// splitmix64 finalizer.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Every stage derives its own seed from the master seed, so a stage run on
// its own draws the same stream as the same stage inside the full pipeline.
inline uint64_t derive_seed(uint64_t master, std::string_view stage) {
    return mix64(master ^ fnv1a64(stage));
}

// mt19937_64 is bit-exact across platforms; the distributions below are
// hand-rolled because the std::*_distribution algorithms are not.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // Uniform in [0, n); n must be > 0.
    size_t uniform_index(size_t n) {
        return static_cast<size_t>(
            (static_cast<unsigned __int128>(gen_()) * n) >> 64);
    }

    double normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(6.283185307179586476925286766559 * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[uniform_index(i)]);
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace degender
