#ifndef SSICAST_RNG_HPP
#define SSICAST_RNG_HPP

#include <cmath>
#include <cstdint>

namespace ssicast {

/// SplitMix64 stream. Used everywhere randomness is needed because the
/// <random> distributions are implementation-defined sequences, and run
/// outputs must be byte-identical for a given seed on any platform.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller (pairwise, cached).
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        // keep log() off exact zero
        while (u1 <= 0.0) u1 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

private:
    uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

/// Derives a decorrelated child seed, e.g. one stream per pixel.
inline uint64_t derive_seed(uint64_t seed, uint64_t index) {
    SplitMix64 mix(seed ^ index);
    return mix.next();
}

}  // namespace ssicast

#endif
