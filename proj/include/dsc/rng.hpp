#ifndef DSC_RNG_HPP
#define DSC_RNG_HPP

#include <array>
#include <cstdint>
#include <initializer_list>

namespace dsc {

// Deterministic, platform-independent random streams.
//
// Generator: xoshiro256++ (Blackman & Vigna), seeded through splitmix64 as
// the authors recommend. Streams are derived from a user seed plus a list of
// key words (draw index, unit index, period, ...), so any cell/draw stream
// can be reconstructed independently of evaluation order or thread count.
// std::* distributions are deliberately avoided: their output is
// implementation-defined and would break cross-platform reproducibility.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    // Stream keyed by (seed, words...). Distinct key tuples give
    // statistically independent streams.
    explicit Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> words = {}) {
        std::uint64_t key = seed;
        for (std::uint64_t w : words) {
            std::uint64_t mixer = key ^ (w + 0x9E3779B97F4A7C15ULL);
            key = splitmix64(mixer);
        }
        std::uint64_t sm = key;
        for (auto& s : state_) s = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on the open interval (0, 1); safe as input to inverse CDFs.
    double uniform_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer in [0, n), n >= 1 (rejection sampling).
    std::uint64_t bounded(std::uint64_t n) {
        const std::uint64_t limit = n * (UINT64_MAX / n);
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return x % n;
    }

    double normal(double mean = 0.0, double sd = 1.0);

    double exponential(double rate = 1.0);

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> state_{};
};

// Standard normal quantile (inverse CDF), |error| < 1e-13 after one Halley
// refinement of Acklam's rational approximation. Used for both sampling and
// the analytic family quantiles in the simulation module.
double normal_quantile(double p);

double normal_cdf(double x);

}  // namespace dsc

#endif
