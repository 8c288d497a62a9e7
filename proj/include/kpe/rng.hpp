#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace kpe {

// Small self-contained generator (splitmix64 core) so that seeded runs are
// reproducible independent of the standard library's distribution details.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller.
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    std::complex<double> cgaussian() {
        const double re = gaussian();
        const double im = gaussian();
        return {re, im};
    }

    // Independent stream seed derived from a base seed and a stream index.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        Rng mix(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
        return mix.next_u64();
    }

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace kpe
