#pragma once

#include <cmath>
#include <cstdint>

namespace dcp {

// Splittable pseudo-random generator (splitmix64 core).
//
// Rng(seed, stream) is a pure function of the pair, so worker threads can
// derive independent substreams (one per Monte Carlo replicate) and the
// output never depends on scheduling. All distributions are hand-rolled on
// top of next_u64() to keep sequences identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : state_(mix(mix(seed + 0x9E3779B97F4A7C15ULL) ^ mix(stream + 0xD1B54A32D192ED03ULL))) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    // Uniform on [0, 1).
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform01_open_low() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Box-Muller, one normal per pair of uniforms (no cached spare).
    double normal(double mean = 0.0, double stdev = 1.0) {
        const double u1 = uniform01_open_low();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stdev * r * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Inverse CDF: location - scale * sign(u) * log(1 - |u|), u uniform on (-1, 1).
    double laplace(double location, double scale) {
        const double u = 2.0 * uniform01() - 1.0;
        const double a = u < 0.0 ? -u : u;
        const double t = -std::log1p(-(a < 1.0 - 1e-16 ? a : 1.0 - 1e-16));
        return u < 0.0 ? location - scale * t : location + scale * t;
    }

    // Knuth's product method; means above 500 are split using Poisson
    // additivity so exp(-mean) never underflows.
    std::uint64_t poisson(double mean) {
        std::uint64_t total = 0;
        while (mean > 500.0) {
            total += poisson_small(500.0);
            mean -= 500.0;
        }
        return total + poisson_small(mean);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t poisson_small(double mean) {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform01_open_low();
        } while (p > limit);
        return k - 1;
    }

    std::uint64_t state_;
};

// Deterministic per-replicate seed derivation: pure in (master_seed, index).
inline std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t index) {
    Rng r(master_seed, index);
    return r.next_u64();
}

}  // namespace dcp
