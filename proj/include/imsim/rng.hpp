#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace imsim {

/// Deterministic random stream built on the splitmix64 mixer.
///
/// Streams are derived by hashing a (master seed, point key, frame index)
/// triple, so every Monte Carlo frame owns an independent stream and results
/// do not depend on execution order or worker count.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : state_(seed) {}

    static RandomStream derive(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
        std::uint64_t s = mix(master + kGamma);
        s = mix(s ^ a);
        s = mix(s ^ b);
        return RandomStream(s);
    }

    std::uint64_t next_u64() {
        state_ += kGamma;
        return mix(state_);
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// The top `count` bits of one draw, MSB-first. count in [1, 63].
    std::uint64_t next_bits(int count) { return next_u64() >> (64 - count); }

    /// Circularly symmetric complex Gaussian with total variance
    /// `total_variance` (variance/2 per real dimension). Box-Muller; consumes
    /// exactly two uniforms.
    std::complex<double> next_cgauss(double total_variance) {
        const double u1 = 1.0 - next_double();  // (0, 1]
        const double u2 = next_double();
        const double r = std::sqrt(-total_variance * std::log(u1));
        const double phi = 2.0 * kPi * u2;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;
    static constexpr double kPi = 3.141592653589793238462643383279502884;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

}  // namespace imsim
