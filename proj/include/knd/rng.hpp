#ifndef KND_RNG_HPP
#define KND_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace knd {

// splitmix64 finalizer. Used both to scramble engine seeds and to derive
// per-replication sub-seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Sub-seed for replication k of a run seeded with `seed`. Pure, so
// replications can execute in any order (or in parallel) and still see
// identical streams.
inline std::uint64_t derive_subseed(std::uint64_t seed, std::uint64_t replication) {
    return splitmix64(seed ^ splitmix64(replication + 1));
}

// Deterministic random source. std::mt19937_64 output is bit-specified by the
// standard; the distribution transforms below are hand-rolled because the
// std::*_distribution algorithms are not, and report bytes must be stable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53 bits of mantissa.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform index in [0, n). Rejection sampling keeps it unbiased.
    std::size_t uniform_index(std::size_t n) {
        const std::uint64_t bound = n;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return static_cast<std::size_t>(x % bound);
    }

    // Box-Muller, cosine branch. Two engine draws per call, no cached state.
    double normal(double mean, double stddev) {
        const double u1 = 1.0 - uniform01(); // (0, 1], keeps log finite
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
    }

    double lognormal(double mu, double sigma) { return std::exp(normal(mu, sigma)); }

private:
    std::mt19937_64 engine_;
};

} // namespace knd

#endif // KND_RNG_HPP
