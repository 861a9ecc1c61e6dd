#pragma once

#include <cstdint>

namespace ozadp {

// xoshiro256++ with splitmix64 seed expansion. Fixed algorithm so every
// randomized run is reproducible bit-for-bit from its seed alone, on any
// platform. Reference: Blackman & Vigna, "Scrambled linear pseudorandom
// number generators".
class Xoshiro256pp {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& w : s_) w = splitmix64(x);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~std::uint64_t{0}; }

    result_type operator()() {
        std::uint64_t r = rotl(s_[0] + s_[3], 23) + s_[0];
        std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return r;
    }

    // Uniform on the open interval (0,1): the 53-bit integer is offset by
    // half a step, so 0.0 and 1.0 are unreachable.
    double u01() { return (double((*this)() >> 11) + 0.5) * 0x1p-53; }

    // Uniform on the open interval (lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t s_[4];
};

}  // namespace ozadp
