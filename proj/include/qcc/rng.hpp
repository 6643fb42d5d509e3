#pragma once

#include <cstdint>
#include <cmath>
#include <complex>

namespace qcc {

// Counter-based pseudo-random generator.
//
// output(n) = mix64(key + n * 0x9E3779B97F4A7C15), with mix64 the SplitMix64
// finalizer. The stream depends only on (seed, counter), so identical seeds
// give bit-identical fixtures on every platform and in every language that
// reimplements these two constants. Substreams are derived with child().
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : key_(seed) {}

    static std::uint64_t mix64(std::uint64_t z) {
        z ^= z >> 30; z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27; z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t next_u64() {
        counter_ += 1;
        return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ull);
    }

    // Independent substream; does not advance this generator's counter.
    CounterRng child(std::uint64_t stream) const {
        return CounterRng(mix64(key_ ^ mix64(stream + 0x6A09E667F3BCC909ull)));
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; u1 is kept in (0, 1].
    double normal() {
        if (have_cached_) { have_cached_ = false; return cached_; }
        const double u1 = double((next_u64() >> 11) + 1) * 0x1.0p-53;
        const double u2 = double(next_u64() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(t);
        have_cached_ = true;
        return r * std::cos(t);
    }

    std::complex<double> complex_normal() {
        const double re = normal();
        const double im = normal();
        return {re, im};
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace qcc
