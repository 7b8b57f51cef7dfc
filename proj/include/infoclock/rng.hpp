#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

// Counter-seeded xoshiro256++ streams. Each simulated path owns the stream
// derived from (master_seed, path_index), so results are independent of
// worker count and path execution order. Normal variates use the Marsaglia
// polar method (no libm trig in the hot loop).

namespace infoclock {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class Xoshiro256pp {
public:
    Xoshiro256pp(uint64_t master_seed, uint64_t stream) {
        uint64_t seed = master_seed;
        uint64_t mix = stream + 0x632BE59BD9B4E019ull;
        mix = (mix ^ (mix >> 33)) * 0xFF51AFD7ED558CCDull;
        mix = (mix ^ (mix >> 33)) * 0xC4CEB9FE1A85EC53ull;
        seed ^= mix ^ (mix >> 33);
        s_[0] = splitmix64(seed);
        s_[1] = splitmix64(seed);
        s_[2] = splitmix64(seed);
        s_[3] = splitmix64(seed);
    }

    uint64_t next() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform on (0, 1]
    double uniform() { return ((next() >> 11) + 1) * 0x1.0p-53; }

    // uniform on [-1, 1)
    double uniform_sym() { return static_cast<double>(next() >> 11) * 0x1.0p-52 - 1.0; }

    std::pair<double, double> normal_pair() {
        for (;;) {
            double u = uniform_sym();
            double v = uniform_sym();
            double s = u * u + v * v;
            if (s < 1.0 && s > 0.0) {
                double f = std::sqrt(-2.0 * std::log(s) / s);
                return {u * f, v * f};
            }
        }
    }

    double normal() { return normal_pair().first; }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t s_[4];
};

} // namespace infoclock
