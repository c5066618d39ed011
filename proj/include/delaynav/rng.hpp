#ifndef DELAYNAV_RNG_HPP
#define DELAYNAV_RNG_HPP

#include <cmath>
#include <cstdint>

namespace delaynav {

// Counter-based noise generation. Every draw is a pure function of
// (seed, stream, counter), so sensor streams are reproducible regardless of
// the order in which they are evaluated, and independent streams never
// share draws.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t key(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    std::uint64_t k = splitmix64(seed ^ 0x7f4a7c15ULL);
    k = splitmix64(k ^ splitmix64(stream));
    return splitmix64(k ^ splitmix64(counter ^ 0xda942042e4dd58b5ULL));
}

// Uniform in (0, 1]; never returns exactly 0 so it is safe under log().
inline double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return static_cast<double>((key(seed, stream, counter) >> 11) + 1) * 0x1.0p-53;
}

// Standard normal via Box-Muller on two decorrelated counters.
inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    const double u1 = uniform(seed, stream, 2 * counter);
    const double u2 = uniform(seed, stream, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Uniform in [-1, 1], used for jitter-style draws.
inline double symmetric(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return 2.0 * uniform(seed, stream, counter) - 1.0;
}

// Stream identifiers. Keeping them in one table guarantees two sensors never
// collide even when sample counters overlap.
enum Stream : std::uint64_t {
    kGyroNoise = 1,
    kAccelNoise = 2,
    kAcousticRange = 3,
    kAcousticAzimuth = 4,
    kDepthNoise = 5,
    kProcessingJitter = 6,
    kTruthDraws = 7,
    kInitErrors = 8,
};

// Per-run seed derivation for Monte Carlo: mixes the run index into the
// master seed so runs are independent but reproducible.
inline std::uint64_t run_seed(std::uint64_t master_seed, std::uint64_t run_index) {
    return splitmix64(master_seed ^ splitmix64(run_index + 0x632be59bd9b4e019ULL));
}

}  // namespace rng
}  // namespace delaynav

#endif  // DELAYNAV_RNG_HPP
