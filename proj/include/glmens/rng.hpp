#pragma once

#include <cmath>
#include <cstdint>

namespace glmens {

// splitmix64. Used both as a seed mixer and as the bootstrap PRNG, so a
// per-bag stream depends only on (master seed, bag index) and never on
// execution order.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // draw in [0, n) via 64x32 multiply-shift
    std::uint32_t below(std::uint32_t n) {
        return static_cast<std::uint32_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double normal() {
        double u = uniform01();
        double v = uniform01();
        while (u <= 0.0) u = uniform01();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925286766559 * v);
    }

private:
    std::uint64_t state_;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 s(seed ^ (0x9e3779b97f4a7c15ull * (stream + 1)));
    s.next();
    return s.next();
}

}  // namespace glmens
