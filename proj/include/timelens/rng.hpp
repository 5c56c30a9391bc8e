#pragma once

//
// Seedable, splittable pseudo-random source for the Monte Carlo modules.
//
// Streams are derived counter-style: stream(seed, index) mixes the pair
// through SplitMix64, so realization i draws the same numbers no matter how
// realizations are scheduled across threads. All samplers are implemented
// here (not std::<distribution>) to keep output bit-identical across
// standard libraries.
//

#include <cmath>
#include <cstdint>

#include "timelens/errors.hpp"
#include "timelens/units.hpp"

namespace timelens {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in (0, 1].
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal deviate (Box-Muller, first of the pair).
    double next_normal() {
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(constants::two_pi * u2);
    }

private:
    std::uint64_t state_;
};

/// Independent stream for realization `index` of run `seed`.
inline SplitMix64 derive_stream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mixer(seed ^ (0xA3EC647659359ACDull + index * 0x9E3779B97F4A7C15ull));
    // burn one output so adjacent indices decorrelate fully
    mixer.next_u64();
    return mixer;
}

/// Poisson deviate. Knuth's product method for small means, normal
/// approximation (rounded, clamped at zero) above mean 500 where the product
/// method would underflow.
inline std::uint64_t sample_poisson(double mean, SplitMix64& rng) {
    detail::require(std::isfinite(mean) && mean >= 0.0,
                    "sample_poisson: mean must be non-negative");
    if (mean == 0.0) return 0;
    if (mean <= 500.0) {
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double product = rng.next_uniform();
        while (product > limit) {
            ++k;
            product *= rng.next_uniform();
        }
        return k;
    }
    const double g = std::round(mean + std::sqrt(mean) * rng.next_normal());
    return g <= 0.0 ? 0 : static_cast<std::uint64_t>(g);
}

}  // namespace timelens
