#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace slnd {

// Deterministic, platform-independent randomness. Experiments derive one
// stream per (seed, sample index) so results do not depend on the execution
// order of a parallel loop.

inline uint64_t splitmix64(uint64_t& s) {
    uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t splitmix_of(uint64_t seed, uint64_t stream) {
    uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 0x632be59bd9b4e019ULL));
    return splitmix64(s);
}

class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
    }
    Rng(uint64_t seed, uint64_t stream) : Rng(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1))) {}

    uint64_t next() {
        // xoshiro256**
        const uint64_t r = rotl(state_[1] * 5, 7) * 9;
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return r;
    }

    // uniform in [0,1)
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // inclusive range
    int64_t uniform_int(int64_t lo, int64_t hi) {
        return lo + int64_t(next() % uint64_t(hi - lo + 1));
    }

    // standard normal via Box-Muller
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t state_[4];
};

/// Kronecker (additive recurrence) low-discrepancy sequence in [0,1)^d,
/// phase-shifted by the seed.
class Kronecker {
public:
    Kronecker(int dim, uint64_t seed) : alpha_(dim), offset_(dim) {
        static const double primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                        31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
        uint64_t s = seed ^ 0x8e51'2af3'77bc'0a17ULL;
        for (int k = 0; k < dim; ++k) {
            double a = std::sqrt(primes[k % 20] * (1 + k / 20));
            alpha_[k] = a - std::floor(a);
            offset_[k] = double(splitmix64(s) >> 11) * 0x1.0p-53;
        }
    }

    std::vector<double> point(uint64_t j) const {
        std::vector<double> x(alpha_.size());
        for (size_t k = 0; k < alpha_.size(); ++k) {
            double v = offset_[k] + double(j + 1) * alpha_[k];
            x[k] = v - std::floor(v);
        }
        return x;
    }

private:
    std::vector<double> alpha_;
    std::vector<double> offset_;
};

}  // namespace slnd
