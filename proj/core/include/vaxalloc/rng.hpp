#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace vaxalloc::num {

/// Deterministic random source. All stochastic code in the library draws from
/// an explicitly passed Rng; identical seeds give identical sequences on every
/// platform (the raw generator is bit-exact per the standard, and every
/// distribution transform below is implemented here rather than taken from
/// <random>, whose distributions are not portable).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed), seed_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform in (0, 1] — never returns exactly zero.
    double uniform_pos() { return 1.0 - uniform(); }

    /// Uniform index in [0, n). Rejection sampling keeps it unbiased.
    std::size_t uniform_index(std::size_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = gen_();
        } while (v >= limit);
        return static_cast<std::size_t>(v % n);
    }

    /// Standard normal via Box-Muller; the spare value is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * M_PI * u2;
        spare_ = mag * std::sin(ang);
        have_spare_ = true;
        return mag * std::cos(ang);
    }

    /// Log-normal with log-scale sigma and unit median.
    double lognormal(double sigma) { return std::exp(sigma * normal()); }

    /// Independent child generator for a named substream.
    Rng derive(std::uint64_t stream) const {
        // splitmix64 of (seed ^ stream) decorrelates nearby streams
        std::uint64_t z = seed_ ^ (stream + 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return Rng(z ^ (z >> 31));
    }

private:
    std::mt19937_64 gen_;
    std::uint64_t seed_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace vaxalloc::num
