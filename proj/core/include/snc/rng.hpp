#pragma once

#include <cmath>
#include <cstdint>

namespace snc {

/// SplitMix64: counter-based, splittable, identical across platforms.
/// Parallel streams are derived by seed arithmetic (`stream`), never from
/// shared state.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static SplitMix64 stream(std::uint64_t seed, std::uint64_t stream_index) {
        SplitMix64 mixer(seed ^ (0x9E3779B97F4A7C15ULL * (stream_index + 1)));
        mixer.next();
        return mixer;
    }

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform on (0, 1]; never 0, so -log stays finite.
    double u01() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1p-53; }

    double exponential() { return -std::log(u01()); }

    /// Marsaglia polar method; consumes a variable number of draws.
    double normal() {
        for (;;) {
            const double u = 2.0 * u01() - 1.0;
            const double v = 2.0 * u01() - 1.0;
            const double r2 = u * u + v * v;
            if (r2 > 0.0 && r2 < 1.0) return u * std::sqrt(-2.0 * std::log(r2) / r2);
        }
    }

    /// Gamma(shape, 1). Integer shapes sum exponentials (exactness matters
    /// for the cross-checks); fractional parts use Johnk's beta trick.
    double gamma(double shape) {
        double value = 0.0;
        long whole = static_cast<long>(std::floor(shape));
        const double frac = shape - static_cast<double>(whole);
        for (long i = 0; i < whole; ++i) value += exponential();
        if (frac > 0.0) {
            for (;;) {
                const double x = std::pow(u01(), 1.0 / frac);
                const double y = std::pow(u01(), 1.0 / (1.0 - frac));
                if (x + y <= 1.0 && x + y > 0.0) {
                    value += exponential() * (x / (x + y));
                    break;
                }
            }
        }
        return value;
    }

  private:
    std::uint64_t state_;
};

}  // namespace snc
